#include "fixmag/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "fixmag/tree.hpp"

namespace fixmag {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int parity_sign(std::uint64_t mask, std::uint64_t bits) {
  return (std::popcount(mask & ~bits) & 1) ? -1 : 1;
}

std::uint64_t vertex_mask(const Graph& graph, std::span<const Vertex> vertices, const char* what) {
  std::uint64_t mask = 0;
  for (Vertex v : vertices) {
    require(graph.contains(v), std::string(what) + ": vertex " + std::to_string(v) +
                                   " is not in the graph");
    mask |= std::uint64_t{1} << v;
  }
  return mask;
}

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

double log_sum_exp(std::span<const double> terms) {
  double top = kNegInf;
  for (double t : terms) top = std::max(top, t);
  if (top == kNegInf) return kNegInf;
  CompensatedSum sum;
  for (double t : terms) sum.add(std::exp(t - top));
  return top + std::log(sum.value());
}

// ---------------------------------------------------------------------------

ExactOracle::ExactOracle(Graph graph, const OracleOptions& options) : graph_(std::move(graph)) {
  const int n = graph_.size();
  if (n > options.enumeration_cap || n > 30)
    fail(ErrorKind::capacity, "exact oracle: graph has " + std::to_string(n) +
                                  " vertices, above the enumeration cap of " +
                                  std::to_string(std::min(options.enumeration_cap, 30)));
  const int edges = graph_.edge_count();
  const std::uint64_t total = config_count();
  cut_.assign(total, 0);

  // Each worker walks a contiguous slice of the Gray-code order, flipping one
  // vertex per step and updating the disagreeing-edge count locally.
  const int jobs = static_cast<int>(
      std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(1, options.jobs)), 1,
                                std::max<std::uint64_t>(1, total / 4096)));
  std::vector<std::vector<std::uint64_t>> partial(
      jobs, std::vector<std::uint64_t>(static_cast<std::size_t>(n + 1) * (edges + 1), 0));

  const auto walk = [&](int job) {
    const std::uint64_t begin = total * job / jobs;
    const std::uint64_t end = total * (job + 1) / jobs;
    auto& local = partial[job];
    std::uint64_t state = begin ^ (begin >> 1);
    int cut = 0;
    for (const auto& e : graph_.edges()) cut += ((state >> e.u) ^ (state >> e.v)) & 1u;
    for (std::uint64_t i = begin; i < end; ++i) {
      if (i != begin) {
        const int v = std::countr_zero(i);
        const std::uint64_t bit_v = (state >> v) & 1u;
        for (Vertex u : graph_.neighbors(v)) cut += (((state >> u) & 1u) == bit_v) ? 1 : -1;
        state ^= std::uint64_t{1} << v;
      }
      cut_[state] = static_cast<std::uint16_t>(cut);
      ++local[static_cast<std::size_t>(std::popcount(state)) * (edges + 1) + cut];
    }
  };

  if (jobs == 1) {
    walk(0);
  } else {
    std::vector<std::thread> workers;
    for (int j = 0; j < jobs; ++j) workers.emplace_back(walk, j);
    for (auto& w : workers) w.join();
  }
  counts_ = std::move(partial[0]);
  for (int j = 1; j < jobs; ++j)
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += partial[j][i];
}

std::uint64_t ExactOracle::plus_count_total(int plus) const {
  require(plus >= 0 && plus <= size(), "plus_count_total: plus count out of range");
  std::uint64_t total = 0;
  for (int c = 0; c <= graph_.edge_count(); ++c) total += state_count(plus, c);
  return total;
}

double ExactOracle::log_term(int plus, int cut, const IsingParams& params) const {
  const std::uint64_t count = state_count(plus, cut);
  if (count == 0) return kNegInf;
  return std::log(static_cast<double>(count)) +
         0.5 * params.beta * (graph_.edge_count() - 2 * cut) +
         (2 * plus - size()) * std::log(params.lambda);
}

double ExactOracle::log_weight(std::uint64_t bits, const IsingParams& params) const {
  return 0.5 * params.beta * interaction(bits) +
         (2 * std::popcount(bits) - size()) * std::log(params.lambda);
}

double ExactOracle::log_partition_function(const IsingParams& params) const {
  validate(params);
  std::vector<double> terms;
  terms.reserve(counts_.size());
  for (int x = 0; x <= size(); ++x)
    for (int c = 0; c <= graph_.edge_count(); ++c) terms.push_back(log_term(x, c, params));
  return log_sum_exp(terms);
}

FixedPartitionVector ExactOracle::fixed_partition_vector(double beta) const {
  validate(IsingParams{beta, 1.0});
  FixedPartitionVector out;
  out.n = size();
  out.beta = beta;
  out.log_values.resize(size() + 1);
  std::vector<double> terms(graph_.edge_count() + 1);
  for (int x = 0; x <= size(); ++x) {
    if (beta == 0.0) {
      out.log_values[x] = std::log(static_cast<double>(plus_count_total(x)));
      continue;
    }
    for (int c = 0; c <= graph_.edge_count(); ++c) terms[c] = log_term(x, c, {beta, 1.0});
    out.log_values[x] = log_sum_exp(terms);
  }
  return out;
}

double ExactOracle::log_fixed_partition(double beta, int k) const {
  return fixed_partition_vector(beta).log_at(k);
}

std::vector<double> ExactOracle::plus_count_distribution(const IsingParams& params) const {
  validate(params);
  std::vector<double> by_plus(size() + 1);
  std::vector<double> terms(graph_.edge_count() + 1);
  for (int x = 0; x <= size(); ++x) {
    for (int c = 0; c <= graph_.edge_count(); ++c) terms[c] = log_term(x, c, params);
    by_plus[x] = log_sum_exp(terms);
  }
  const double log_z = log_sum_exp(by_plus);
  for (auto& p : by_plus) p = std::exp(p - log_z);
  return by_plus;
}

double ExactOracle::mean_plus_count(const IsingParams& params) const {
  const auto pmf = plus_count_distribution(params);
  CompensatedSum sum;
  for (int x = 0; x <= size(); ++x) sum.add(x * pmf[x]);
  return sum.value();
}

double ExactOracle::mean_magnetization(const IsingParams& params) const {
  const auto pmf = plus_count_distribution(params);
  const int n = size();
  if (n == 0) return 0.0;
  // Pair l with n - l so a symmetric law gives exactly zero.
  CompensatedSum sum;
  for (int x = 0; 2 * x < n; ++x) sum.add((n - 2 * x) * (pmf[n - x] - pmf[x]));
  return sum.value() / n;
}

double ExactOracle::variance_of_x(const IsingParams& params) const {
  const auto pmf = plus_count_distribution(params);
  CompensatedSum mean;
  for (int x = 0; x <= size(); ++x) mean.add(x * pmf[x]);
  const double mu = mean.value();
  CompensatedSum second;
  for (int x = 0; x <= size(); ++x) second.add((x - mu) * (x - mu) * pmf[x]);
  return second.value();
}

std::vector<double> ExactOracle::config_probabilities(const IsingParams& params) const {
  const double log_z = log_partition_function(params);
  const int edges = graph_.edge_count();
  std::vector<double> single(static_cast<std::size_t>(size() + 1) * (edges + 1));
  for (int x = 0; x <= size(); ++x)
    for (int c = 0; c <= edges; ++c)
      single[static_cast<std::size_t>(x) * (edges + 1) + c] =
          std::exp(0.5 * params.beta * (edges - 2 * c) + (2 * x - size()) * std::log(params.lambda) -
                   log_z);
  std::vector<double> out(config_count());
  for (std::uint64_t s = 0; s < out.size(); ++s)
    out[s] = single[static_cast<std::size_t>(std::popcount(s)) * (edges + 1) + cut_[s]];
  return out;
}

ConfigDistribution ExactOracle::fixed_distribution(const FixedMagParams& params) const {
  validate(params, size());
  const int plus = (size() + params.k) / 2;
  ConfigDistribution out;
  out.n = size();
  std::vector<double> log_w;
  for (std::uint64_t s = 0; s < config_count(); ++s) {
    if (std::popcount(s) != plus) continue;
    out.configs.push_back(s);
    log_w.push_back(0.5 * params.beta * interaction(s));
  }
  const double log_z = log_sum_exp(log_w);
  out.probabilities.resize(log_w.size());
  for (std::size_t i = 0; i < log_w.size(); ++i)
    out.probabilities[i] = std::exp(log_w[i] - log_z);
  return out;
}

double ExactOracle::correlation(const IsingParams& params, std::uint64_t vertex_mask) const {
  const auto probs = config_probabilities(params);
  CompensatedSum sum;
  for (std::uint64_t s = 0; s < probs.size(); ++s) sum.add(parity_sign(vertex_mask, s) * probs[s]);
  return sum.value();
}

GksSlots ExactOracle::gks_check(const IsingParams& params, std::span<const Vertex> a,
                                std::span<const Vertex> b, Edge e) const {
  validate(params);
  require(params.lambda >= 1.0, "gks_check: requires lambda >= 1 (non-negative field)");
  const std::uint64_t mask_a = vertex_mask(graph_, a, "gks_check: A");
  const std::uint64_t mask_b = vertex_mask(graph_, b, "gks_check: B");
  require(graph_.has_edge(e.u, e.v), "gks_check: e is not an edge of the graph");

  GksSlots out;
  out.correlation = correlation(params, mask_a);
  out.covariance = correlation(params, mask_a ^ mask_b) - out.correlation * correlation(params, mask_b);
  const ExactOracle reduced(graph_.without_edge(e), {.enumeration_cap = 30});
  out.edge_monotonicity = out.correlation - reduced.correlation(params, mask_a);
  return out;
}

double ExactOracle::clt_deviation(const IsingParams& params) const {
  validate(params);
  const int delta = graph_.delta_cap();
  const bool subcritical = delta < 3 || params.beta < beta_critical(delta);
  if (!((subcritical && params.lambda >= 1.0) || params.lambda > 1.0))
    fail(ErrorKind::regime,
         "clt_deviation: needs (beta < beta_c and lambda >= 1) or lambda > 1");
  const auto pmf = plus_count_distribution(params);
  double mean = 0.0;
  for (int x = 0; x <= size(); ++x) mean += x * pmf[x];
  double var = 0.0;
  for (int x = 0; x <= size(); ++x) var += (x - mean) * (x - mean) * pmf[x];
  if (!(var > 0.0)) return std::numeric_limits<double>::infinity();
  const double scale = std::sqrt(2.0 * std::numbers::pi * var);
  double worst = 0.0;
  for (int x = 0; x <= size(); ++x) {
    const double gaussian = std::exp(-(x - mean) * (x - mean) / (2.0 * var));
    worst = std::max(worst, std::fabs(pmf[x] * scale - gaussian));
  }
  return worst;
}

// ---------------------------------------------------------------------------

double FixedPartitionVector::log_at(int k) const {
  require(valid_magnetization(n, k), "fixed partition vector: invalid magnetization k=" +
                                         std::to_string(k) + " for n=" + std::to_string(n));
  return log_values[(n + k) / 2];
}

double FixedPartitionVector::value_at(int k) const { return std::exp(log_at(k)); }

double FixedPartitionVector::log_evaluate(double lambda) const {
  require(lambda > 0.0, "fixed partition vector: lambda must be > 0");
  std::vector<double> terms(log_values.size());
  for (int x = 0; x <= n; ++x) terms[x] = log_values[x] + (2 * x - n) * std::log(lambda);
  return log_sum_exp(terms);
}

double ConfigDistribution::probability_of(std::uint64_t bits) const {
  const auto it = std::lower_bound(configs.begin(), configs.end(), bits);
  if (it == configs.end() || *it != bits) return 0.0;
  return probabilities[it - configs.begin()];
}

// ---------------------------------------------------------------------------

double partition_function(const Graph& graph, const IsingParams& params,
                          const OracleOptions& options) {
  return ExactOracle(graph, options).log_partition_function(params);
}

FixedPartitionVector fixed_partition_vector(const Graph& graph, double beta,
                                            const OracleOptions& options) {
  return ExactOracle(graph, options).fixed_partition_vector(beta);
}

double mean_magnetization(const Graph& graph, const IsingParams& params,
                          const OracleOptions& options) {
  return ExactOracle(graph, options).mean_magnetization(params);
}

double variance_of_x(const Graph& graph, const IsingParams& params, const OracleOptions& options) {
  return ExactOracle(graph, options).variance_of_x(params);
}

ConfigDistribution exact_fixed_distribution(const Graph& graph, const FixedMagParams& params,
                                            const OracleOptions& options) {
  validate(params, graph.size());
  return ExactOracle(graph, options).fixed_distribution(params);
}

GksSlots gks_check(const Graph& graph, const IsingParams& params, std::span<const Vertex> a,
                   std::span<const Vertex> b, Edge e, const OracleOptions& options) {
  return ExactOracle(graph, options).gks_check(params, a, b, e);
}

double clt_deviation(const Graph& graph, const IsingParams& params, const OracleOptions& options) {
  return ExactOracle(graph, options).clt_deviation(params);
}

// ---------------------------------------------------------------------------

AliasTable::AliasTable(std::span<const double> log_weights) {
  const std::size_t n = log_weights.size();
  require(n > 0 && n <= std::numeric_limits<std::uint32_t>::max(), "alias table: bad size");
  double top = kNegInf;
  for (double w : log_weights) top = std::max(top, w);
  require(top > kNegInf, "alias table: all weights are zero");
  std::vector<double> scaled(n);
  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = std::exp(log_weights[i] - top);
    total.add(scaled[i]);
  }
  const double norm = static_cast<double>(n) / total.value();
  for (auto& s : scaled) s *= norm;

  probability_.assign(n, 1.0);
  alias_.resize(n);
  for (std::size_t i = 0; i < n; ++i) alias_[i] = static_cast<std::uint32_t>(i);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i)
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    probability_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (auto i : small) probability_[i] = 1.0;
  for (auto i : large) probability_[i] = 1.0;
}

std::size_t AliasTable::draw(Rng& rng) const {
  const auto column = static_cast<std::size_t>(rng.below(probability_.size()));
  return rng.uniform() < probability_[column] ? column : alias_[column];
}

ExactIsingSampler::ExactIsingSampler(std::shared_ptr<const ExactOracle> oracle, double beta)
    : oracle_(std::move(oracle)), beta_(beta) {
  require(oracle_ != nullptr, "exact sampler: null oracle");
  validate(IsingParams{beta, 1.0});
}

std::uint64_t ExactIsingSampler::draw_bits(double lambda, Rng& rng) {
  auto it = tables_.find(lambda);
  if (it == tables_.end()) {
    const IsingParams params{beta_, lambda};
    validate(params);
    std::vector<double> log_w(oracle_->config_count());
    for (std::uint64_t s = 0; s < log_w.size(); ++s) log_w[s] = oracle_->log_weight(s, params);
    it = tables_.emplace(lambda, AliasTable(log_w)).first;
  }
  return it->second.draw(rng);
}

SpinConfig ExactIsingSampler::draw(double lambda, Rng& rng) {
  return SpinConfig::from_bits(oracle_->size(), draw_bits(lambda, rng));
}

ExactFixedSampler::ExactFixedSampler(std::shared_ptr<const ExactOracle> oracle, int k)
    : oracle_(std::move(oracle)), k_(k) {
  require(oracle_ != nullptr, "exact sampler: null oracle");
  validate(FixedMagParams{0.0, k}, oracle_->size());
  const int plus = (oracle_->size() + k) / 2;
  for (std::uint64_t s = 0; s < oracle_->config_count(); ++s)
    if (std::popcount(s) == plus) configs_.push_back(s);
}

std::uint64_t ExactFixedSampler::draw_bits(double beta, Rng& rng) {
  auto it = tables_.find(beta);
  if (it == tables_.end()) {
    validate(IsingParams{beta, 1.0});
    std::vector<double> log_w(configs_.size());
    for (std::size_t i = 0; i < configs_.size(); ++i)
      log_w[i] = 0.5 * beta * oracle_->interaction(configs_[i]);
    it = tables_.emplace(beta, AliasTable(log_w)).first;
  }
  return configs_[it->second.draw(rng)];
}

SpinConfig ExactFixedSampler::draw(double beta, Rng& rng) {
  return SpinConfig::from_bits(oracle_->size(), draw_bits(beta, rng));
}

SpinConfig exact_sample(const Graph& graph, const IsingParams& params, std::uint64_t seed,
                        const OracleOptions& options) {
  validate(params);
  ExactIsingSampler sampler(std::make_shared<const ExactOracle>(graph, options), params.beta);
  Rng rng(seed, 0);
  return sampler.draw(params.lambda, rng);
}

SpinConfig exact_sample(const Graph& graph, const FixedMagParams& params, std::uint64_t seed,
                        const OracleOptions& options) {
  validate(params, graph.size());
  ExactFixedSampler sampler(std::make_shared<const ExactOracle>(graph, options), params.k);
  Rng rng(seed, 0);
  return sampler.draw(params.beta, rng);
}

// ---------------------------------------------------------------------------

ExtremalReport extremal_scan(int delta, int n_max, std::span<const double> beta_grid,
                             std::span<const double> lambda_grid,
                             const ExtremalScanOptions& options) {
  require(delta >= 3, "extremal_scan: delta must be >= 3");
  require(n_max >= 1 && n_max <= 8, "extremal_scan: n_max must be in [1, 8]");
  require(!beta_grid.empty() && !lambda_grid.empty(), "extremal_scan: empty grid");
  for (double b : beta_grid)
    require(std::isfinite(b) && b >= 0.0, "extremal_scan: beta grid entries must be >= 0");
  for (double l : lambda_grid)
    require(std::isfinite(l) && l >= 1.0, "extremal_scan: lambda grid entries must be >= 1");

  std::vector<double> tree_eta;
  for (double b : beta_grid)
    for (double l : lambda_grid) tree_eta.push_back(solve_tree(delta, b, l).eta_plus);

  ExtremalReport report;
  report.delta = delta;
  const auto visit = [&](const Graph& g) {
    const ExactOracle oracle(g);
    ++report.graphs_scanned;
    std::size_t idx = 0;
    for (double b : beta_grid) {
      for (double l : lambda_grid) {
        const double eta_g = oracle.mean_magnetization({b, l});
        const double gap = eta_g - tree_eta[idx];
        ++report.evaluations;
        if (gap > report.max_gap) {
          report.max_gap = gap;
          report.worst = {g.size(), {g.edges().begin(), g.edges().end()}, b, l, eta_g,
                          tree_eta[idx]};
        }
        ++idx;
      }
    }
  };

  for (int n = 1; n <= n_max; ++n) {
    if (n <= options.exhaustive_max_n) {
      for_each_labeled_graph(n, delta, visit);
      continue;
    }
    Rng rng(options.seed, static_cast<std::uint64_t>(n));
    for (int i = 0; i < options.random_graphs_per_n; ++i) {
      const int attempts = static_cast<int>(rng.below(static_cast<std::uint64_t>(n) * delta + 1));
      visit(random_bounded_degree_graph(n, delta, attempts, rng));
    }
  }
  return report;
}

}  // namespace fixmag
