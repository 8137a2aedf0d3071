#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "fixmag/annealing.hpp"
#include "fixmag/chains.hpp"
#include "fixmag/errors.hpp"
#include "fixmag/exact.hpp"
#include "fixmag/graph.hpp"
#include "fixmag/hardness.hpp"
#include "fixmag/io.hpp"
#include "fixmag/sample_k.hpp"
#include "fixmag/tree.hpp"

namespace py = pybind11;
using namespace fixmag;

namespace {

std::vector<int> spins_list(const SpinConfig& c) { return {c.spins().begin(), c.spins().end()}; }

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

GadgetSpec gadget_spec(int delta, int n, double theta, double psi, std::optional<int> m, int m_prime,
                       std::optional<int> tree_depth, std::optional<int> match_size, int max_attempts) {
  GadgetSpec spec;
  spec.delta = delta;
  spec.n = n;
  spec.theta = theta;
  spec.psi = psi;
  spec.max_attempts = max_attempts;
  if (m || tree_depth || match_size) {
    require(m && tree_depth && match_size, "overrides need m, tree_depth and match_size together");
    spec.overrides = GadgetOverrides{*m, m_prime, *tree_depth, *match_size};
  }
  return spec;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Ising model at fixed magnetization";

  static py::exception<Error> base(mod, "FixmagError");
  static py::exception<Error> capacity_error(mod, "CapacityError", base.ptr());
  static py::exception<Error> regime_error(mod, "RegimeError", base.ptr());
  static py::exception<Error> sampler_error(mod, "SamplerFailure", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::invalid_argument:
          PyErr_SetString(PyExc_ValueError, e.what());
          return;
        case ErrorKind::capacity:
          capacity_error(e.what());
          return;
        case ErrorKind::regime:
          regime_error(e.what());
          return;
        case ErrorKind::sampler_failure:
          sampler_error(e.what());
          return;
      }
    }
  });

  py::class_<Graph>(mod, "Graph")
      .def(py::init([](int n, int delta_cap, const std::vector<std::pair<int, int>>& edges) {
             std::vector<Edge> es;
             for (const auto& [u, v] : edges) es.push_back({u, v});
             return Graph(n, delta_cap, std::move(es));
           }),
           py::arg("n"), py::arg("delta_cap"), py::arg("edges"))
      .def_property_readonly("n", &Graph::size)
      .def_property_readonly("delta_cap", &Graph::delta_cap)
      .def_property_readonly("edges",
                             [](const Graph& g) {
                               std::vector<std::pair<int, int>> out;
                               for (const Edge& e : g.edges()) out.emplace_back(e.u, e.v);
                               return out;
                             })
      .def("degree", &Graph::degree)
      .def("to_dict", [](const Graph& g) { return to_python(graph_to_json(g)); })
      .def("__len__", &Graph::size)
      .def("__repr__", [](const Graph& g) {
        return "Graph(n=" + std::to_string(g.size()) + ", edges=" + std::to_string(g.edge_count()) + ")";
      });

  mod.def("path_graph", &path_graph, py::arg("n"));
  mod.def("cycle_graph", &cycle_graph, py::arg("n"));
  mod.def("complete_graph", &complete_graph, py::arg("n"));
  mod.def("star_graph", &star_graph, py::arg("leaves"));
  mod.def("empty_graph", &empty_graph, py::arg("n"), py::arg("delta_cap") = 1);
  mod.def("disjoint_union", &disjoint_union, py::arg("a"), py::arg("b"));
  mod.def("graph_from_dict", [](const py::object& d) {
    return graph_from_json(Json::parse(py::module_::import("json").attr("dumps")(d).cast<std::string>()));
  });

  mod.def("beta_critical", &beta_critical, py::arg("delta"));
  mod.def(
      "solve_tree",
      [](int delta, double beta, double lambda) {
        const auto s = solve_tree(delta, beta, lambda);
        py::dict d;
        d["L_star"] = s.L_star;
        d["eta_plus"] = s.eta_plus;
        d["residual"] = s.residual;
        d["low_precision"] = s.low_precision;
        return d;
      },
      py::arg("delta"), py::arg("beta"), py::arg("lambda_"));
  mod.def("eta_critical", [](int delta, double beta) { return eta_c(delta, beta).value; }, py::arg("delta"),
          py::arg("beta"));
  mod.def("tree_marginal_q", &tree_marginal_q, py::arg("delta"), py::arg("beta"));

  mod.def(
      "log_partition_function",
      [](const Graph& g, double beta, double lambda, int cap) {
        return ExactOracle(g, {cap, 1}).log_partition_function({beta, lambda});
      },
      py::arg("graph"), py::arg("beta"), py::arg("lambda_"), py::arg("cap") = 24);
  mod.def(
      "log_fixed_partition",
      [](const Graph& g, double beta, int k, int cap) {
        validate(FixedMagParams{beta, k}, g.size());
        return ExactOracle(g, {cap, 1}).log_fixed_partition(beta, k);
      },
      py::arg("graph"), py::arg("beta"), py::arg("k"), py::arg("cap") = 24);
  mod.def(
      "mean_magnetization",
      [](const Graph& g, double beta, double lambda) { return ExactOracle(g).mean_magnetization({beta, lambda}); },
      py::arg("graph"), py::arg("beta"), py::arg("lambda_"));

  mod.def(
      "sample_fixed_mag",
      [](const Graph& g, double beta, double eta, std::uint64_t seed, double epsilon, const std::string& sampler,
         std::int64_t steps, std::int64_t burn_in, int delta) {
        SampleKConfig cfg;
        cfg.beta = beta;
        cfg.eta = eta;
        cfg.seed = seed;
        cfg.epsilon = epsilon;
        cfg.delta = delta;
        cfg.sampler.kind = parse_chain_kind(sampler);
        cfg.sampler.steps = steps;
        cfg.sampler.burn_in = burn_in;
        const auto r = [&] {
          py::gil_scoped_release release;
          return fixmag::sample_fixed_mag(g, cfg);
        }();
        py::dict d;
        d["k"] = r.k;
        d["config"] = spins_list(r.config);
        d["fallback"] = r.fallback;
        d["total_draws"] = r.total_draws;
        return d;
      },
      py::arg("graph"), py::arg("beta"), py::arg("eta"), py::arg("seed"), py::arg("epsilon") = 0.05,
      py::arg("sampler") = "exact", py::arg("steps") = 0, py::arg("burn_in") = 0, py::arg("delta") = 3);

  mod.def(
      "count_fixed",
      [](const Graph& g, double beta, int k, std::uint64_t seed, double epsilon, const std::string& sampler,
         std::int64_t steps, std::int64_t samples, bool median) {
        ChainSpec spec{parse_chain_kind(sampler), steps, 0, 0};
        CountOptions opts;
        opts.epsilon = epsilon;
        opts.samples_override = samples;
        opts.median_of_three = median;
        py::gil_scoped_release release;
        auto s = make_fixed_sampler(g, k, spec, 3, epsilon);
        return count_fixed(g, beta, k, *s, seed, opts).log_estimate;
      },
      py::arg("graph"), py::arg("beta"), py::arg("k"), py::arg("seed"), py::arg("epsilon") = 0.1,
      py::arg("sampler") = "exact", py::arg("steps") = 0, py::arg("samples") = 0, py::arg("median") = false);

  mod.def(
      "kawasaki",
      [](const Graph& g, double beta, int k, std::int64_t steps, std::uint64_t seed, const std::string& variant) {
        require(variant == "local" || variant == "global", "variant must be local or global");
        ChainSpec spec{variant == "local" ? ChainKind::kawasaki_local : ChainKind::kawasaki_global, steps, seed, 0};
        std::vector<TraceRow> rows;
        const auto final = run_chain(g, spec, FixedMagParams{beta, k}, std::nullopt, 0, &rows);
        std::vector<std::tuple<std::int64_t, int, int>> trace;
        for (const auto& r : rows) trace.emplace_back(r.step, r.magnetization, r.interaction);
        return py::make_tuple(spins_list(final), trace);
      },
      py::arg("graph"), py::arg("beta"), py::arg("k"), py::arg("steps"), py::arg("seed"),
      py::arg("variant") = "local");

  mod.def(
      "build_gadget",
      [](int n, std::uint64_t seed, int delta, double theta, double psi, std::optional<int> m, int m_prime,
         std::optional<int> tree_depth, std::optional<int> match_size, int max_attempts) {
        return to_python(gadget_to_json(
            fixmag::build_gadget(gadget_spec(delta, n, theta, psi, m, m_prime, tree_depth, match_size, max_attempts),
                                 seed)));
      },
      py::arg("n"), py::arg("seed"), py::arg("delta") = 3, py::arg("theta") = 0.1, py::arg("psi") = 0.1,
      py::arg("m") = py::none(), py::arg("m_prime") = 0, py::arg("tree_depth") = py::none(),
      py::arg("match_size") = py::none(), py::arg("max_attempts") = 100);

  mod.def(
      "build_reduction",
      [](const Graph& host, double gamma, double eta, double beta, int n, std::uint64_t seed, int delta,
         std::optional<int> m, int m_prime, std::optional<int> tree_depth, std::optional<int> match_size) {
        const auto spec = gadget_spec(delta, n, 0.1, 0.1, m, m_prime, tree_depth, match_size, 100);
        return to_python(instance_to_json(fixmag::build_reduction(host, gamma, spec, eta, beta, seed)));
      },
      py::arg("host"), py::arg("gamma"), py::arg("eta"), py::arg("beta"), py::arg("n"), py::arg("seed"),
      py::arg("delta") = 3, py::arg("m") = py::none(), py::arg("m_prime") = 0, py::arg("tree_depth") = py::none(),
      py::arg("match_size") = py::none());

  mod.def("theta_gamma", [](double beta, double q) {
    const auto tg = theta_gamma(beta, q);
    return py::make_tuple(tg.theta, tg.gamma);
  });
  mod.def("brute_force_mebc", &brute_force_mebc, py::arg("host"), py::arg("gamma"));
}
