#include "fixmag/sample_k.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "fixmag/errors.hpp"
#include "fixmag/tree.hpp"

namespace fixmag {

namespace {

void check_config(const Graph& graph, const SampleKConfig& config) {
  require(graph.size() >= 1, "sample_k: graph must have at least one vertex");
  require(graph.max_degree() <= config.delta,
          "sample_k: graph max degree " + std::to_string(graph.max_degree()) + " exceeds delta " +
              std::to_string(config.delta));
  require(config.epsilon > 0.0 && config.epsilon < 1.0, "sample_k: epsilon must lie in (0, 1)");
  require(config.C > 0.0 && config.C_prime > 0.0, "sample_k: C and C_prime must be positive");
  require(std::isfinite(config.beta) && config.beta >= 0.0, "sample_k: beta must be finite and >= 0");
  require(config.batch_override >= 0, "sample_k: batch_override must be >= 0");
}

SampleKResult search(const Graph& graph, const SampleKConfig& config, int k, double eta_for_bounds,
                     IsingSampler& sampler, Rng& rng) {
  const int n = graph.size();
  SampleKResult out;
  out.k = k;
  out.iteration_limit = iteration_cap(n, config.C);
  out.batch = config.batch_override > 0 ? config.batch_override : batch_size(n, config.C_prime, config.epsilon);
  out.epsilon_prime = n > 1 ? 1.0 / (config.C * static_cast<double>(out.batch) * std::log(n))
                            : std::numeric_limits<double>::infinity();

  if (k == n || k == -n) {
    out.config = SpinConfig::uniform(n, k > 0 ? Spin{1} : Spin{-1});
    out.fallback = true;
    out.fallback_reason = "Sigma(k) has a single configuration";
    return out;
  }

  out.bounds = lambda_bounds(config.delta, config.beta, eta_for_bounds);
  out.grid_points = grid_size(out.bounds, n);

  std::int64_t lo = 0;
  std::int64_t hi = out.grid_points - 1;
  for (int i = 1; i <= out.iteration_limit; ++i) {
    if (lo > hi) {
      out.fallback_reason = "empty search set";
      break;
    }
    const std::int64_t mid = lo + (hi - lo) / 2;
    const double lambda = out.bounds.lambda_min + static_cast<double>(mid) / n;
    SearchStep step;
    step.iteration = i;
    step.lambda = lambda;
    long double sum = 0.0L;
    for (std::int64_t j = 0; j < out.batch; ++j) {
      const int m = sampler.draw(lambda, rng);
      ++step.draws;
      sum += m;
      if (m == k) {
        step.hit = true;
        break;
      }
    }
    out.total_draws += step.draws;
    if (step.hit) {
      step.k_bar = std::numeric_limits<double>::quiet_NaN();
      step.remaining = hi - lo + 1;
      out.trace.push_back(step);
      out.config = sampler.last();
      return out;
    }
    step.k_bar = static_cast<double>(sum / out.batch);
    if (step.k_bar <= k)
      lo = mid + 1;
    else
      hi = mid - 1;
    step.remaining = std::max<std::int64_t>(0, hi - lo + 1);
    out.trace.push_back(step);
  }
  if (out.fallback_reason.empty()) out.fallback_reason = lo > hi ? "empty search set" : "iterations exhausted";
  out.fallback = true;
  out.config = SpinConfig::prefix_plus(n, (n + k) / 2);
  return out;
}

// nu_{-k}(s) = nu_k(-s): search for |k| and mirror the output.
SampleKResult mirror(SampleKResult r) {
  r.config = r.config.flipped();
  r.k = -r.k;
  return r;
}

}  // namespace

ExactIsingBackend::ExactIsingBackend(std::shared_ptr<const ExactOracle> oracle, double beta)
    : sampler_(oracle, beta), n_(oracle->size()) {}

int ExactIsingBackend::draw(double lambda, Rng& rng) {
  last_ = sampler_.draw_bits(lambda, rng);
  return 2 * std::popcount(last_) - n_;
}

SpinConfig ExactIsingBackend::last() const { return SpinConfig::from_bits(n_, last_); }

ChainIsingBackend::ChainIsingBackend(const Graph& graph, double beta, const ChainSpec& spec)
    : graph_(graph), beta_(beta), spec_(spec), last_(SpinConfig::all_plus(graph.size())) {
  require(spec.kind == ChainKind::glauber || spec.kind == ChainKind::sw_ghost,
          "ChainIsingBackend: needs glauber or sw_ghost, got " + to_string(spec.kind));
  require(spec.steps >= 0 && spec.burn_in >= 0, "ChainIsingBackend: steps and burn_in must be >= 0");
}

int ChainIsingBackend::draw(double lambda, Rng& rng) {
  last_ = SpinConfig::all_plus(graph_.size());
  run_sweeps(graph_, spec_.kind, beta_, lambda, last_, spec_.burn_in + spec_.steps, rng);
  return magnetization(last_);
}

std::unique_ptr<IsingSampler> make_ising_sampler(const Graph& graph, double beta, const ChainSpec& spec,
                                                 const OracleOptions& options) {
  if (spec.kind == ChainKind::exact)
    return std::make_unique<ExactIsingBackend>(std::make_shared<const ExactOracle>(graph, options), beta);
  return std::make_unique<ChainIsingBackend>(graph, beta, spec);
}

int target_k(int n, double eta) {
  require(n >= 1, "target_k: n must be >= 1");
  require(eta >= -1.0 && eta <= 1.0, "target_k: eta must lie in [-1, 1]");
  return 2 * static_cast<int>(std::floor((eta + 1.0) * n / 2.0)) - n;
}

LambdaBounds lambda_bounds(int delta, double beta, double eta) {
  const double a = std::fabs(eta);
  require(a < 1.0, "lambda_bounds: |eta| must be < 1");
  const double bc = beta_critical(delta);
  LambdaBounds b;
  b.lambda_max = std::sqrt((1.0 + a) / (1.0 - a)) * std::exp(0.5 * beta * delta);
  if (beta < bc) {
    b.lambda_min = 1.0;
  } else if (beta == bc) {
    fail(ErrorKind::regime, "lambda_bounds: beta equals beta_critical; no tractable regime");
  } else {
    const double critical = eta_c(delta, beta).value;
    if (!(a > critical))
      fail(ErrorKind::regime, "lambda_bounds: |eta| = " + std::to_string(a) + " <= eta_c = " +
                                  std::to_string(critical) + " at beta = " + std::to_string(beta) +
                                  " > beta_c; outside the tractable regime");
    b.supercritical = true;
    b.lambda_min = lambda_for_eta(delta, beta, a);
  }
  b.lambda_max = std::max(b.lambda_max, b.lambda_min);
  return b;
}

std::int64_t grid_size(const LambdaBounds& bounds, int n) {
  return static_cast<std::int64_t>(std::floor((bounds.lambda_max - bounds.lambda_min) * n)) + 1;
}

int iteration_cap(int n, double C) {
  return std::max(1, static_cast<int>(std::ceil(C * std::log(static_cast<double>(n)))));
}

std::int64_t batch_size(int n, double C_prime, double epsilon) {
  const double inner = std::log(std::log(static_cast<double>(std::max(n, 2))) / epsilon);
  const double nn = static_cast<double>(n) * n;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(C_prime * nn * std::max(1.0, inner))));
}

SampleKResult sample_fixed_mag(const Graph& graph, const SampleKConfig& config, IsingSampler& sampler, Rng& rng) {
  check_config(graph, config);
  const int n = graph.size();
  const int k = target_k(n, config.eta);
  if (config.eta >= 0.0) return search(graph, config, k, config.eta, sampler, rng);
  return mirror(search(graph, config, -k, -config.eta, sampler, rng));
}

SampleKResult sample_fixed_mag(const Graph& graph, const SampleKConfig& config, const OracleOptions& options) {
  check_config(graph, config);
  auto sampler = make_ising_sampler(graph, config.beta, config.sampler, options);
  Rng rng(config.seed, 0);
  return sample_fixed_mag(graph, config, *sampler, rng);
}

SampleKResult sample_magnetization(const Graph& graph, const SampleKConfig& config, int k, IsingSampler& sampler,
                                   Rng& rng) {
  check_config(graph, config);
  const int n = graph.size();
  require(valid_magnetization(n, k), "sample_magnetization: invalid magnetization " + std::to_string(k));
  const double eta = static_cast<double>(std::abs(k)) / n;
  if (k >= 0) return search(graph, config, k, eta, sampler, rng);
  return mirror(search(graph, config, -k, eta, sampler, rng));
}

std::vector<SearchStep> binary_search_trace(const Graph& graph, const SampleKConfig& config,
                                            const OracleOptions& options) {
  return sample_fixed_mag(graph, config, options).trace;
}

}  // namespace fixmag
