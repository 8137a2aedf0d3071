#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fixmag/chains.hpp"
#include "fixmag/exact.hpp"
#include "fixmag/graph.hpp"
#include "fixmag/rng.hpp"

namespace fixmag {

/// Source of (approximate) draws from mu_{G,beta,lambda} for a fixed graph and beta.
class IsingSampler {
 public:
  virtual ~IsingSampler() = default;
  /// Draws one configuration and returns its magnetization.
  virtual int draw(double lambda, Rng& rng) = 0;
  /// The configuration produced by the latest draw.
  virtual SpinConfig last() const = 0;
};

/// Exact backend: alias-table draws from the enumerated law.
class ExactIsingBackend final : public IsingSampler {
 public:
  ExactIsingBackend(std::shared_ptr<const ExactOracle> oracle, double beta);
  int draw(double lambda, Rng& rng) override;
  SpinConfig last() const override;

 private:
  ExactIsingSampler sampler_;
  int n_;
  std::uint64_t last_ = 0;
};

/// Chain backend: every draw is an independent run of burn_in + steps sweeps
/// from the all-plus configuration.
class ChainIsingBackend final : public IsingSampler {
 public:
  ChainIsingBackend(const Graph& graph, double beta, const ChainSpec& spec);
  int draw(double lambda, Rng& rng) override;
  SpinConfig last() const override { return last_; }

 private:
  const Graph& graph_;
  double beta_;
  ChainSpec spec_;
  SpinConfig last_;
};

/// glauber, sw_ghost or exact. The returned sampler may keep a reference to `graph`.
std::unique_ptr<IsingSampler> make_ising_sampler(const Graph& graph, double beta, const ChainSpec& spec,
                                                 const OracleOptions& options = {});

struct SampleKConfig {
  int delta = 3;
  double beta = 0.0;
  double eta = 0.0;
  double epsilon = 0.05;
  /// Kind, steps and burn_in of the mu-sampler; its seed field is unused.
  ChainSpec sampler{ChainKind::exact, 0, 0, 0};
  double C = 4.0;
  double C_prime = 2.0;
  std::uint64_t seed = 0;
  /// Replaces the batch size N when positive.
  std::int64_t batch_override = 0;
};

/// 2 * floor((eta + 1) n / 2) - n.
int target_k(int n, double eta);

struct LambdaBounds {
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  bool supercritical = false;
};

/// Search interval for the activity. Uses |eta|. Regime error when
/// beta == beta_c, or beta > beta_c and |eta| <= eta_c.
LambdaBounds lambda_bounds(int delta, double beta, double eta);

/// Number of grid points floor((lambda_max - lambda_min) n) + 1.
std::int64_t grid_size(const LambdaBounds& bounds, int n);
/// ceil(C ln n), at least 1.
int iteration_cap(int n, double C);
/// ceil(C' n^2 ln(ln n / epsilon)) with the logarithm clamped below at 1.
std::int64_t batch_size(int n, double C_prime, double epsilon);

struct SearchStep {
  int iteration = 0;
  double lambda = 0.0;
  /// Mean magnetization of the batch; NaN when the batch halted on a hit.
  double k_bar = 0.0;
  std::int64_t draws = 0;
  bool hit = false;
  /// Grid points left after this step.
  std::int64_t remaining = 0;
};

struct SampleKResult {
  SpinConfig config;
  int k = 0;
  bool fallback = false;
  std::string fallback_reason;
  LambdaBounds bounds;
  std::int64_t grid_points = 0;
  std::int64_t batch = 0;
  int iteration_limit = 0;
  /// 1 / (C N log n): the accuracy the mu-sampler is assumed to meet.
  double epsilon_prime = 0.0;
  std::int64_t total_draws = 0;
  std::vector<SearchStep> trace;
};

/// Sample-k with a caller-supplied mu-sampler and random stream. For eta < 0
/// the search runs for -k and the output is flipped; trace entries then refer
/// to the mirrored search.
SampleKResult sample_fixed_mag(const Graph& graph, const SampleKConfig& config, IsingSampler& sampler, Rng& rng);

/// Sample-k with the backend named in config.sampler and Rng(config.seed, 0).
SampleKResult sample_fixed_mag(const Graph& graph, const SampleKConfig& config,
                               const OracleOptions& options = {});

/// Same search for an explicit target magnetization k, with the interval
/// taken at |k| / n. Used by the counter as a fixed-magnetization sampler.
SampleKResult sample_magnetization(const Graph& graph, const SampleKConfig& config, int k, IsingSampler& sampler,
                                   Rng& rng);

/// The (lambda, k_bar) steps visited by sample_fixed_mag.
std::vector<SearchStep> binary_search_trace(const Graph& graph, const SampleKConfig& config,
                                            const OracleOptions& options = {});

}  // namespace fixmag
