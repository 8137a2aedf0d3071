#include "fixmag/annealing.hpp"

#include <algorithm>
#include <cmath>

#include "fixmag/errors.hpp"

namespace fixmag {

double log_binomial(int n, int r) {
  require(n >= 0 && r >= 0 && r <= n, "log_binomial: need 0 <= r <= n");
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

CoolingSchedule build_schedule(int n, double beta, double epsilon) {
  require(n >= 1, "build_schedule: n must be >= 1");
  require(std::isfinite(beta) && beta >= 0.0, "build_schedule: beta must be finite and >= 0");
  require(epsilon > 0.0 && epsilon < 1.0, "build_schedule: epsilon must lie in (0, 1)");
  CoolingSchedule s;
  s.n = n;
  const double gap = std::log1p(1.0 / n);
  int ell = beta == 0.0 ? 0 : static_cast<int>(std::ceil(beta / gap));
  while (ell > 1 && (ell - 1) * gap >= beta) --ell;
  for (int i = 0; i < ell; ++i) s.betas.push_back(i * gap);
  s.betas.push_back(beta);
  s.sample_count = ell == 0 ? 0 : static_cast<std::int64_t>(std::ceil(8.0 * ell / (epsilon * epsilon)));
  s.sampler_tv = ell == 0 ? epsilon : epsilon / (8.0 * ell);
  return s;
}

ExactFixedBackend::ExactFixedBackend(std::shared_ptr<const ExactOracle> oracle, int k)
    : oracle_(oracle), sampler_(oracle, k) {}

int ExactFixedBackend::draw_interaction(double beta, Rng& rng) {
  return oracle_->interaction(sampler_.draw_bits(beta, rng));
}

KawasakiFixedBackend::KawasakiFixedBackend(const Graph& graph, int k, const ChainSpec& spec)
    : graph_(graph), k_(k), spec_(spec) {
  require(conserves_magnetization(spec.kind), "KawasakiFixedBackend: needs a Kawasaki kind");
  require(valid_magnetization(graph.size(), k), "KawasakiFixedBackend: invalid magnetization");
  require(spec.steps >= 0 && spec.burn_in >= 0, "KawasakiFixedBackend: steps and burn_in must be >= 0");
}

int KawasakiFixedBackend::draw_interaction(double beta, Rng& rng) {
  SpinConfig c = SpinConfig::prefix_plus(graph_.size(), (graph_.size() + k_) / 2);
  run_sweeps(graph_, spec_.kind, beta, 1.0, c, spec_.burn_in + spec_.steps, rng);
  return interaction_sum(graph_, c);
}

SampleKFixedBackend::SampleKFixedBackend(const Graph& graph, int k, const SampleKConfig& base,
                                         const OracleOptions& options)
    : graph_(graph), k_(k), base_(base), options_(options) {
  require(valid_magnetization(graph.size(), k), "SampleKFixedBackend: invalid magnetization");
  require(!conserves_magnetization(base.sampler.kind), "SampleKFixedBackend: needs a grand-canonical sampler");
  if (base.sampler.kind == ChainKind::exact) oracle_ = std::make_shared<const ExactOracle>(graph, options);
}

int SampleKFixedBackend::draw_interaction(double beta, Rng& rng) {
  if (!sampler_ || beta != cached_beta_) {
    if (oracle_)
      sampler_ = std::make_unique<ExactIsingBackend>(oracle_, beta);
    else
      sampler_ = make_ising_sampler(graph_, beta, base_.sampler, options_);
    cached_beta_ = beta;
  }
  SampleKConfig cfg = base_;
  cfg.beta = beta;
  const auto out = sample_magnetization(graph_, cfg, k_, *sampler_, rng);
  fallbacks_ += out.fallback;
  return interaction_sum(graph_, out.config);
}

std::unique_ptr<FixedSampler> make_fixed_sampler(const Graph& graph, int k, const ChainSpec& spec, int delta,
                                                 double epsilon, const OracleOptions& options) {
  if (spec.kind == ChainKind::exact)
    return std::make_unique<ExactFixedBackend>(std::make_shared<const ExactOracle>(graph, options), k);
  if (conserves_magnetization(spec.kind)) return std::make_unique<KawasakiFixedBackend>(graph, k, spec);
  SampleKConfig base;
  base.delta = delta;
  base.epsilon = epsilon;
  base.sampler = spec;
  return std::make_unique<SampleKFixedBackend>(graph, k, base, options);
}

RatioEstimate estimate_ratio(double beta, double beta_next, std::int64_t samples, FixedSampler& sampler, Rng& rng) {
  require(samples > 0, "estimate_ratio: sample count must be positive");
  require(beta >= 0.0 && beta_next >= beta, "estimate_ratio: need 0 <= beta <= beta_next");
  RatioEstimate r;
  r.beta = beta;
  r.beta_next = beta_next;
  r.samples = samples;
  if (beta_next == beta) return r;
  const double h = 0.5 * (beta_next - beta);
  double mean = 0.0, m2 = 0.0;
  r.min_term = INFINITY;
  r.max_term = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double term = std::exp(h * sampler.draw_interaction(beta, rng));
    const double d = term - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (term - mean);
    r.min_term = std::min(r.min_term, term);
    r.max_term = std::max(r.max_term, term);
  }
  r.mean = mean;
  r.variance = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
  return r;
}

namespace {

CountResult single_count(const Graph& graph, double beta, int k, FixedSampler& sampler, std::uint64_t seed,
                         std::uint64_t run, const CountOptions& options) {
  CountResult out;
  out.schedule = build_schedule(graph.size(), beta, options.epsilon);
  out.log_binomial = log_binomial(graph.size(), (graph.size() + k) / 2);
  const std::int64_t samples = options.samples_override > 0 ? options.samples_override : out.schedule.sample_count;
  double total = out.log_binomial;
  for (int i = 0; i < out.schedule.length(); ++i) {
    Rng rng(seed, (run << 32) | static_cast<std::uint64_t>(i));
    auto r = estimate_ratio(out.schedule.betas[i], out.schedule.betas[i + 1], samples, sampler, rng);
    total += std::log(r.mean);
    out.stages.push_back(r);
  }
  out.log_estimate = total;
  return out;
}

}  // namespace

CountResult count_fixed(const Graph& graph, double beta, int k, FixedSampler& sampler, std::uint64_t seed,
                        const CountOptions& options) {
  validate(FixedMagParams{beta, k}, graph.size());
  if (!options.median_of_three) return single_count(graph, beta, k, sampler, seed, 0, options);
  std::vector<CountResult> runs;
  for (std::uint64_t r = 0; r < 3; ++r) runs.push_back(single_count(graph, beta, k, sampler, seed, r, options));
  std::vector<double> estimates;
  for (const auto& r : runs) estimates.push_back(r.log_estimate);
  std::vector<std::size_t> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return estimates[a] < estimates[b]; });
  CountResult out = runs[order[1]];
  out.run_estimates = estimates;
  return out;
}

std::vector<double> chebyshev_ratios(const ExactOracle& oracle, const CoolingSchedule& schedule, int k) {
  std::vector<double> out;
  for (int i = 0; i < schedule.length(); ++i) {
    const double b = schedule.betas[i];
    const double b1 = schedule.betas[i + 1];
    const double log_ratio = oracle.log_fixed_partition(2.0 * b1 - b, k) + oracle.log_fixed_partition(b, k) -
                             2.0 * oracle.log_fixed_partition(b1, k);
    out.push_back(std::exp(log_ratio));
  }
  return out;
}

double telescoped_log_partition(const ExactOracle& oracle, const CoolingSchedule& schedule, int k) {
  const int n = oracle.size();
  double total = log_binomial(n, (n + k) / 2);
  for (int i = 0; i < schedule.length(); ++i)
    total += oracle.log_fixed_partition(schedule.betas[i + 1], k) - oracle.log_fixed_partition(schedule.betas[i], k);
  return total;
}

}  // namespace fixmag
