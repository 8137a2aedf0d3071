from ._core import (
    CapacityError,
    FixmagError,
    Graph,
    RegimeError,
    SamplerFailure,
    beta_critical,
    brute_force_mebc,
    build_gadget,
    build_reduction,
    complete_graph,
    count_fixed,
    cycle_graph,
    disjoint_union,
    empty_graph,
    eta_critical,
    graph_from_dict,
    kawasaki,
    log_fixed_partition,
    log_partition_function,
    mean_magnetization,
    path_graph,
    sample_fixed_mag,
    solve_tree,
    star_graph,
    theta_gamma,
    tree_marginal_q,
)

__all__ = [name for name in dir() if not name.startswith("_")]
