#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fixmag/chains.hpp"
#include "fixmag/graph.hpp"

namespace fixmag {

/// Explicit desk-scale parameters replacing the asymptotic formulas.
struct GadgetOverrides {
  int m = 1;
  /// Degree-(delta-1) vertices per side of the core; 0 means m (delta-1)^tree_depth.
  int m_prime = 0;
  int tree_depth = 0;
  int match_size = 1;
};

struct GadgetSpec {
  int delta = 3;
  int n = 0;
  double theta = 0.1;
  double psi = 0.1;
  std::optional<GadgetOverrides> overrides;
  /// Attempts at drawing delta pairwise disjoint perfect matchings.
  int max_attempts = 100;
};

/// m, m', tree depth and match size, derived or taken from the overrides.
struct GadgetParameters {
  int m = 0;
  int m_prime = 0;
  int tree_depth = 0;
  int match_size = 0;
  /// Core vertices per side, n + m'.
  int side = 0;
  /// Total vertex count 2 (n + m' + m ((delta-1)^depth - 1) / (delta-2)).
  int n_gadget = 0;
};

GadgetParameters gadget_parameters(const GadgetSpec& spec);

/// Random bipartite core with (delta-1)-ary trees hanging off the
/// degree-(delta-1) core vertices. Left core is 0..side-1, right core is
/// side..2 side-1, tree vertices follow.
struct Gadget {
  GadgetSpec spec;
  GadgetParameters params;
  Graph graph;
  std::vector<Vertex> side_left;
  std::vector<Vertex> side_right;
  /// Core vertices of degree delta before the trees are attached.
  std::vector<Vertex> u0;
  /// Core vertices of degree delta-1 before the trees are attached.
  std::vector<Vertex> w0;
  /// Tree roots, m per side.
  std::vector<Vertex> terminals_left;
  std::vector<Vertex> terminals_right;
  Vertex u1 = 0;
};

Gadget build_gadget(const GadgetSpec& spec, std::uint64_t seed);

/// +1 when the spins of U0 sum to a positive value, -1 when negative, and
/// the spin of u1 on a tie. `offset` locates a gadget copy inside a larger graph.
int phase(const Gadget& gadget, const SpinConfig& config, int offset = 0);

/// A host graph H with every vertex replaced by a gadget copy, terminals of
/// adjacent copies matched, and s isolated vertices appended.
struct ReductionInstance {
  Graph host;
  double gamma = 0.5;
  double beta = 0.0;
  double eta = 0.0;
  Gadget gadget;
  /// Copy x occupies vertices offsets[x] .. offsets[x] + n_gadget - 1.
  std::vector<int> offsets;
  int s = 0;
  Graph composite;
  /// The composite without the crossing edges.
  Graph decoupled;
  std::vector<Edge> crossing_edges;
  int h_plus = 0;
  int h_minus = 0;
  int M_star = 0;
  int N = 0;
  int ell = 0;
  /// Target magnetization 2 ell - N on the composite.
  int k_target = 0;
  /// eta = 0 with gamma = 1/2 and s = 0.
  bool demonstration = false;
};

/// Requires delta >= 3 and beta > beta_c when eta > 0.
ReductionInstance build_reduction(const Graph& host, double gamma, const GadgetSpec& spec, double eta, double beta,
                                  std::uint64_t seed);

/// Phase of every gadget copy.
std::vector<int> phase_vector(const ReductionInstance& instance, const SpinConfig& config);

struct ThetaGamma {
  double theta = 0.0;
  double gamma = 0.0;
};

/// Theta = 2q(1-q) e^{beta/2} + (q^2 + (1-q)^2) e^{-beta/2},
/// Gamma = 2q(1-q) e^{-beta/2} + (q^2 + (1-q)^2) e^{beta/2}.
ThetaGamma theta_gamma(double beta, double q);

struct RecoveryInputs {
  /// log Z of the decoupled composite.
  double log_z_free = 0.0;
  /// log Z^fix of the composite.
  double log_z_fixed = 0.0;
  int match_size = 1;
  int host_edges = 0;
  int n = 1;
  int h = 1;
  double beta = 0.0;
  double q = 0.5;
  double C = 1.0;
  double C_prime = 1.0;
};

struct CutInterval {
  double lower = 0.0;
  double center = 0.0;
  double upper = 0.0;
};

/// [T - log(2^h / C') / (2k log(Gamma/Theta)), T + log C / (2k log(Gamma/Theta))] with
/// T = (log(Z_free / Z_fixed) + 2k |E(H)| log Gamma - log sqrt(n h)) / (2k log(Gamma/Theta)).
CutInterval recover_cut_interval(const RecoveryInputs& in);

/// Minimum of |E(S, S^c)| over S with |S| = floor(gamma h). Requires h <= 20.
int brute_force_mebc(const Graph& host, double gamma);

/// floor(gamma h) with a guard against representation error in gamma.
int majority_size(int h, double gamma);

struct PhaseReport {
  /// Phase of the final configuration of each run.
  std::vector<int> phases;
  /// Per run, mean of phase(sigma) * M(sigma) over the recorded sweeps.
  std::vector<double> aligned_means;
  /// Mean of M over recorded configurations in the + phase and in the - phase.
  double mean_given_plus = 0.0;
  double mean_given_minus = 0.0;
  double plus_frequency = 0.0;
  /// Runs whose aligned mean is positive.
  int aligned_runs = 0;
};

/// Zero-field runs of a grand-canonical chain on the gadget. Run r uses
/// Rng(seed, r), starts from a uniformly random configuration, performs
/// burn_in sweeps, then records phase and magnetization after each of
/// `steps` sweeps.
PhaseReport phase_experiment(const Gadget& gadget, double beta, const ChainSpec& spec, int runs, std::uint64_t seed,
                             int jobs = 1);

}  // namespace fixmag
