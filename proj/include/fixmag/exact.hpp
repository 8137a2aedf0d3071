#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fixmag/graph.hpp"
#include "fixmag/rng.hpp"

namespace fixmag {

struct OracleOptions {
  /// Largest vertex count the oracle will enumerate.
  int enumeration_cap = 24;
  /// Worker threads for the enumeration pass. Results do not depend on it.
  int jobs = 1;
};

/// Z^fix(beta, k) for every achievable k, stored as logs and indexed by the
/// plus count l = (n + k) / 2.
struct FixedPartitionVector {
  int n = 0;
  double beta = 0.0;
  std::vector<double> log_values;

  double log_at(int k) const;
  double value_at(int k) const;
  /// log of sum_l Z^fix(beta, 2l - n) * lambda^(2l - n).
  double log_evaluate(double lambda) const;
};

/// A probability table over an explicit list of configurations (bit encoded).
struct ConfigDistribution {
  int n = 0;
  std::vector<std::uint64_t> configs;
  std::vector<double> probabilities;

  double probability_of(std::uint64_t bits) const;
};

/// The three GKS quantities:
///   <s_A>,  <s_A s_B> - <s_A><s_B>,  <s_A>_G - <s_A>_{G-e}.
struct GksSlots {
  double correlation = 0.0;
  double covariance = 0.0;
  double edge_monotonicity = 0.0;
};

/// Exhaustive enumeration of every spin configuration of a small graph.
///
/// Construction walks all 2^n configurations once (Gray-code order) and
/// records the number of disagreeing edges of each, plus the joint histogram
/// of (plus count, disagreeing edges). Every exact quantity below is a
/// finite sum over that histogram or over the per-configuration table,
/// accumulated in log space with compensated summation.
///
/// Configurations are bit encoded: bit v set means vertex v is +1.
class ExactOracle {
 public:
  explicit ExactOracle(Graph graph, const OracleOptions& options = {});

  const Graph& graph() const noexcept { return graph_; }
  int size() const noexcept { return graph_.size(); }
  std::uint64_t config_count() const noexcept { return std::uint64_t{1} << graph_.size(); }

  int disagreeing_edges(std::uint64_t bits) const { return cut_[bits]; }
  int interaction(std::uint64_t bits) const { return graph_.edge_count() - 2 * cut_[bits]; }
  /// Number of configurations with `plus` plus spins and `cut` disagreeing edges.
  std::uint64_t state_count(int plus, int cut) const {
    return counts_[static_cast<std::size_t>(plus) * (graph_.edge_count() + 1) + cut];
  }
  /// Number of configurations with the given plus count; equals binomial(n, plus).
  std::uint64_t plus_count_total(int plus) const;

  double log_weight(std::uint64_t bits, const IsingParams& params) const;

  double log_partition_function(const IsingParams& params) const;
  FixedPartitionVector fixed_partition_vector(double beta) const;
  double log_fixed_partition(double beta, int k) const;

  /// Exact law of X (number of plus spins), indexed 0..n.
  std::vector<double> plus_count_distribution(const IsingParams& params) const;
  double mean_magnetization(const IsingParams& params) const;
  double mean_plus_count(const IsingParams& params) const;
  double variance_of_x(const IsingParams& params) const;

  /// Probability of every configuration, indexed by bit encoding.
  std::vector<double> config_probabilities(const IsingParams& params) const;
  /// Probability of every configuration in Sigma(k), listed in increasing bit order.
  ConfigDistribution fixed_distribution(const FixedMagParams& params) const;

  /// <prod_{v in A} sigma_v> for a vertex set given as a bit mask.
  double correlation(const IsingParams& params, std::uint64_t vertex_mask) const;
  GksSlots gks_check(const IsingParams& params, std::span<const Vertex> a, std::span<const Vertex> b,
                     Edge e) const;

  /// max_l |P(X = l) - phi(l)| * sqrt(2 pi var X), with phi the Gaussian
  /// density of matching mean and variance. +inf when var X = 0.
  double clt_deviation(const IsingParams& params) const;

 private:
  double log_term(int plus, int cut, const IsingParams& params) const;

  Graph graph_;
  std::vector<std::uint16_t> cut_;
  std::vector<std::uint64_t> counts_;
};

// ---- free-function forms of the oracle operations ----

double partition_function(const Graph& graph, const IsingParams& params,
                          const OracleOptions& options = {});
FixedPartitionVector fixed_partition_vector(const Graph& graph, double beta,
                                            const OracleOptions& options = {});
double mean_magnetization(const Graph& graph, const IsingParams& params,
                          const OracleOptions& options = {});
double variance_of_x(const Graph& graph, const IsingParams& params,
                     const OracleOptions& options = {});
ConfigDistribution exact_fixed_distribution(const Graph& graph, const FixedMagParams& params,
                                            const OracleOptions& options = {});
GksSlots gks_check(const Graph& graph, const IsingParams& params, std::span<const Vertex> a,
                   std::span<const Vertex> b, Edge e, const OracleOptions& options = {});
double clt_deviation(const Graph& graph, const IsingParams& params,
                     const OracleOptions& options = {});

/// Walker/Vose alias table for O(1) draws from a finite distribution.
class AliasTable {
 public:
  AliasTable() = default;
  /// Builds from unnormalised log-weights.
  explicit AliasTable(std::span<const double> log_weights);

  std::size_t size() const noexcept { return probability_.size(); }
  std::size_t draw(Rng& rng) const;

 private:
  std::vector<double> probability_;
  std::vector<std::uint32_t> alias_;
};

/// Exact sampler for mu_{G,beta,lambda} over all configurations, with one
/// alias table cached per distinct activity.
class ExactIsingSampler {
 public:
  ExactIsingSampler(std::shared_ptr<const ExactOracle> oracle, double beta);

  std::uint64_t draw_bits(double lambda, Rng& rng);
  SpinConfig draw(double lambda, Rng& rng);
  const ExactOracle& oracle() const noexcept { return *oracle_; }
  double beta() const noexcept { return beta_; }

 private:
  std::shared_ptr<const ExactOracle> oracle_;
  double beta_;
  std::unordered_map<double, AliasTable> tables_;
};

/// Exact sampler for nu_{G,beta,k} over Sigma(k), one table per beta.
class ExactFixedSampler {
 public:
  ExactFixedSampler(std::shared_ptr<const ExactOracle> oracle, int k);

  std::uint64_t draw_bits(double beta, Rng& rng);
  SpinConfig draw(double beta, Rng& rng);
  int k() const noexcept { return k_; }
  const ExactOracle& oracle() const noexcept { return *oracle_; }

 private:
  std::shared_ptr<const ExactOracle> oracle_;
  int k_;
  std::vector<std::uint64_t> configs_;
  std::unordered_map<double, AliasTable> tables_;
};

/// One exact draw from mu (grand canonical) using stream 0 of `seed`.
SpinConfig exact_sample(const Graph& graph, const IsingParams& params, std::uint64_t seed,
                        const OracleOptions& options = {});
/// One exact draw from nu (fixed magnetization) using stream 0 of `seed`.
SpinConfig exact_sample(const Graph& graph, const FixedMagParams& params, std::uint64_t seed,
                        const OracleOptions& options = {});

// ---- extremal scan ----

struct ExtremalScanOptions {
  /// Every labeled graph is visited for n up to this size.
  int exhaustive_max_n = 6;
  /// Random degree-bounded graphs drawn per n above exhaustive_max_n.
  int random_graphs_per_n = 200;
  std::uint64_t seed = 0;
};

struct ExtremalRecord {
  int n = 0;
  std::vector<Edge> edges;
  double beta = 0.0;
  double lambda = 1.0;
  double eta_graph = 0.0;
  double eta_tree = 0.0;
  double gap() const { return eta_graph - eta_tree; }
};

struct ExtremalReport {
  int delta = 3;
  std::size_t graphs_scanned = 0;
  std::size_t evaluations = 0;
  double max_gap = -1.0;
  ExtremalRecord worst;
};

/// max over scanned (G, beta, lambda) of eta_G(beta, lambda) - eta_plus(delta, beta, lambda).
/// lambda_grid entries must be >= 1; n_max <= 8.
ExtremalReport extremal_scan(int delta, int n_max, std::span<const double> beta_grid,
                             std::span<const double> lambda_grid,
                             const ExtremalScanOptions& options = {});

/// Numerically stable log(sum exp(terms)) with compensated summation.
double log_sum_exp(std::span<const double> terms);

}  // namespace fixmag
