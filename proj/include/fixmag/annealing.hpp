#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fixmag/chains.hpp"
#include "fixmag/exact.hpp"
#include "fixmag/graph.hpp"
#include "fixmag/rng.hpp"
#include "fixmag/sample_k.hpp"

namespace fixmag {

/// beta_i = i log(1 + 1/n) for i < ell and beta_ell = beta, starting at beta_0 = 0.
struct CoolingSchedule {
  int n = 0;
  std::vector<double> betas;
  /// Samples per ratio, ceil(8 ell / epsilon^2).
  std::int64_t sample_count = 0;
  /// Target accuracy of the fixed-magnetization sampler, epsilon / (8 ell).
  double sampler_tv = 0.0;

  int length() const noexcept { return static_cast<int>(betas.size()) - 1; }
};

CoolingSchedule build_schedule(int n, double beta, double epsilon = 0.1);

/// Source of draws from (an approximation of) nu_{G,beta,k} for fixed G and k.
class FixedSampler {
 public:
  virtual ~FixedSampler() = default;
  /// Draws one configuration and returns its interaction sum delta(sigma).
  virtual int draw_interaction(double beta, Rng& rng) = 0;
};

/// Alias-table draws from the enumerated law.
class ExactFixedBackend final : public FixedSampler {
 public:
  ExactFixedBackend(std::shared_ptr<const ExactOracle> oracle, int k);
  int draw_interaction(double beta, Rng& rng) override;

 private:
  std::shared_ptr<const ExactOracle> oracle_;
  ExactFixedSampler sampler_;
};

/// Independent Kawasaki runs of burn_in + steps sweeps from the fallback configuration.
class KawasakiFixedBackend final : public FixedSampler {
 public:
  KawasakiFixedBackend(const Graph& graph, int k, const ChainSpec& spec);
  int draw_interaction(double beta, Rng& rng) override;

 private:
  const Graph& graph_;
  int k_;
  ChainSpec spec_;
};

/// Sample-k on an explicit magnetization with a mu-sampler built per beta.
class SampleKFixedBackend final : public FixedSampler {
 public:
  SampleKFixedBackend(const Graph& graph, int k, const SampleKConfig& base, const OracleOptions& options = {});
  int draw_interaction(double beta, Rng& rng) override;
  std::int64_t fallbacks() const noexcept { return fallbacks_; }

 private:
  const Graph& graph_;
  int k_;
  SampleKConfig base_;
  OracleOptions options_;
  std::shared_ptr<const ExactOracle> oracle_;
  double cached_beta_ = -1.0;
  std::unique_ptr<IsingSampler> sampler_;
  std::int64_t fallbacks_ = 0;
};

/// kawasaki_local, kawasaki_global, exact, or glauber / sw_ghost through Sample-k.
std::unique_ptr<FixedSampler> make_fixed_sampler(const Graph& graph, int k, const ChainSpec& spec, int delta,
                                                 double epsilon, const OracleOptions& options = {});

struct RatioEstimate {
  double beta = 0.0;
  double beta_next = 0.0;
  /// Mean of exp(((beta_next - beta) / 2) delta(sigma)).
  double mean = 1.0;
  double variance = 0.0;
  double min_term = 1.0;
  double max_term = 1.0;
  std::int64_t samples = 0;
};

/// Mean of S terms exp(((beta_next - beta) / 2) delta(sigma)) with sigma from the sampler at beta.
RatioEstimate estimate_ratio(double beta, double beta_next, std::int64_t samples, FixedSampler& sampler, Rng& rng);

struct CountOptions {
  double epsilon = 0.1;
  /// Median of three independent runs, off by default.
  bool median_of_three = false;
  /// Overrides the schedule's sample count when positive.
  std::int64_t samples_override = 0;
};

struct CountResult {
  double log_estimate = 0.0;
  double log_binomial = 0.0;
  CoolingSchedule schedule;
  std::vector<RatioEstimate> stages;
  /// The three run estimates when median_of_three is set.
  std::vector<double> run_estimates;
};

/// log of the estimate binomial(n, (n + k) / 2) * prod_i R_i of Z^fix(beta, k).
/// Stage i draws from Rng(seed, i); the median-of-three runs use seeds forked by run.
CountResult count_fixed(const Graph& graph, double beta, int k, FixedSampler& sampler, std::uint64_t seed,
                        const CountOptions& options = {});

/// Z^fix(2 b' - b) Z^fix(b) / Z^fix(b')^2 for each consecutive pair (b, b').
std::vector<double> chebyshev_ratios(const ExactOracle& oracle, const CoolingSchedule& schedule, int k);

/// log binomial(n, (n+k)/2) + sum of the exact log-ratios along the schedule.
double telescoped_log_partition(const ExactOracle& oracle, const CoolingSchedule& schedule, int k);

double log_binomial(int n, int r);

}  // namespace fixmag
