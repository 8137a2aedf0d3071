#include "fixmag/chains.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "fixmag/errors.hpp"

namespace fixmag {

namespace {

constexpr int kMatrixMaxN = 8;

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<int> parent_;
};

// Single-chain state with per-kind precomputed tables; one sweep per call.
class ChainRunner {
 public:
  ChainRunner(const Graph& graph, ChainKind kind, double beta, double lambda, SpinConfig start, Rng& rng)
      : graph_(graph), kind_(kind), beta_(beta), lambda_(lambda), config_(std::move(start)), rng_(rng) {
    if (kind_ == ChainKind::glauber) {
      const int d = std::max(graph_.max_degree(), 0);
      plus_table_.resize(2 * d + 1);
      for (int y = -d; y <= d; ++y) plus_table_[y + d] = glauber_plus_probability({beta_, lambda_}, y);
      offset_ = d;
    }
  }

  void sweep() {
    const int n = graph_.size();
    switch (kind_) {
      case ChainKind::glauber:
        for (int i = 0; i < n; ++i) {
          const auto v = static_cast<Vertex>(rng_.below(static_cast<std::uint64_t>(n)));
          int y = 0;
          for (Vertex u : graph_.neighbors(v)) y += config_[u];
          config_.set(v, rng_.uniform() < plus_table_[y + offset_] ? Spin{1} : Spin{-1});
        }
        break;
      case ChainKind::sw_ghost:
        sw_ghost_step(graph_, config_, {beta_, lambda_}, rng_);
        break;
      case ChainKind::kawasaki_local:
        for (int i = 0; i < n; ++i) kawasaki_step(graph_, config_, beta_, KawasakiVariant::local, rng_);
        break;
      case ChainKind::kawasaki_global:
        for (int i = 0; i < n; ++i) kawasaki_step(graph_, config_, beta_, KawasakiVariant::global, rng_);
        break;
      case ChainKind::exact:
        fail(ErrorKind::invalid_argument, "chain runner: exact kind has no sweep");
    }
  }

  const SpinConfig& config() const { return config_; }
  SpinConfig take() { return std::move(config_); }

 private:
  const Graph& graph_;
  ChainKind kind_;
  double beta_;
  double lambda_;
  SpinConfig config_;
  Rng& rng_;
  std::vector<double> plus_table_;
  int offset_ = 0;
};

void check_steps(const ChainSpec& spec) {
  require(spec.steps >= 0, "chain: steps must be >= 0");
  require(spec.burn_in >= 0, "chain: burn_in must be >= 0");
}

void check_start(const Graph& graph, const SpinConfig& start) {
  require(start.size() == graph.size(), "chain: initial configuration size does not match the graph");
}

SpinConfig drive(const Graph& graph, const ChainSpec& spec, double beta, double lambda, SpinConfig start,
                 std::uint64_t stream, std::vector<TraceRow>* trace) {
  Rng rng(spec.seed, stream);
  ChainRunner runner(graph, spec.kind, beta, lambda, std::move(start), rng);
  const std::int64_t total = spec.burn_in + spec.steps;
  if (trace) trace->push_back({0, magnetization(runner.config()), interaction_sum(graph, runner.config())});
  for (std::int64_t s = 1; s <= total; ++s) {
    runner.sweep();
    if (trace) trace->push_back({s, magnetization(runner.config()), interaction_sum(graph, runner.config())});
  }
  return runner.config();
}

SpinConfig fixed_start(int n, int k) { return SpinConfig::prefix_plus(n, (n + k) / 2); }

double total_variation(const std::unordered_map<std::uint64_t, std::int64_t>& counts, std::int64_t samples,
                       const std::vector<std::uint64_t>& states, const std::vector<double>& probabilities) {
  double tv = 0.0;
  std::int64_t matched = 0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto it = counts.find(states[i]);
    const std::int64_t c = it == counts.end() ? 0 : it->second;
    matched += c;
    tv += std::fabs(static_cast<double>(c) / samples - probabilities[i]);
  }
  tv += static_cast<double>(samples - matched) / samples;
  return 0.5 * tv;
}

struct Target {
  std::vector<std::uint64_t> states;
  std::vector<double> probabilities;
};

EmpiricalTv empirical(const Graph& graph, const ChainSpec& spec, double beta, double lambda,
                      std::optional<int> k, std::int64_t samples, EmpiricalMode mode,
                      const OracleOptions& options) {
  check_steps(spec);
  require(samples >= 0, "empirical_tv: sample count must be >= 0");
  auto oracle = std::make_shared<const ExactOracle>(graph, options);
  Target target;
  if (k) {
    auto dist = oracle->fixed_distribution({beta, *k});
    target.states = std::move(dist.configs);
    target.probabilities = std::move(dist.probabilities);
  } else {
    target.probabilities = oracle->config_probabilities({beta, lambda});
    target.states.resize(target.probabilities.size());
    std::iota(target.states.begin(), target.states.end(), std::uint64_t{0});
  }
  EmpiricalTv out;
  out.samples = samples;
  if (samples == 0) {
    out.degenerate = true;
    return out;
  }

  std::unordered_map<std::uint64_t, std::int64_t> counts;
  if (spec.kind == ChainKind::exact) {
    Rng rng(spec.seed, 0);
    if (k) {
      ExactFixedSampler sampler(oracle, *k);
      for (std::int64_t i = 0; i < samples; ++i) ++counts[sampler.draw_bits(beta, rng)];
    } else {
      ExactIsingSampler sampler(oracle, beta);
      for (std::int64_t i = 0; i < samples; ++i) ++counts[sampler.draw_bits(lambda, rng)];
    }
  } else {
    const SpinConfig start = k ? fixed_start(graph.size(), *k) : SpinConfig::all_plus(graph.size());
    if (mode == EmpiricalMode::independent) {
      for (std::int64_t i = 0; i < samples; ++i)
        ++counts[drive(graph, spec, beta, lambda, start, static_cast<std::uint64_t>(i), nullptr).to_bits()];
    } else {
      Rng rng(spec.seed, 0);
      ChainRunner runner(graph, spec.kind, beta, lambda, start, rng);
      for (std::int64_t s = 0; s < spec.burn_in; ++s) runner.sweep();
      for (std::int64_t i = 0; i < samples; ++i) {
        runner.sweep();
        ++counts[runner.config().to_bits()];
      }
    }
  }
  out.tv = total_variation(counts, samples, target.states, target.probabilities);
  return out;
}

void check_matrix_size(const Graph& graph) {
  if (graph.size() > kMatrixMaxN)
    fail(ErrorKind::capacity, "transition_matrix: n must be <= " + std::to_string(kMatrixMaxN));
}

}  // namespace

void run_sweeps(const Graph& graph, ChainKind kind, double beta, double lambda, SpinConfig& config,
                std::int64_t sweeps, Rng& rng) {
  require(kind != ChainKind::exact, "run_sweeps: the exact kind has no sweeps");
  require(sweeps >= 0, "run_sweeps: sweeps must be >= 0");
  check_start(graph, config);
  ChainRunner runner(graph, kind, beta, lambda, std::move(config), rng);
  for (std::int64_t s = 0; s < sweeps; ++s) runner.sweep();
  config = runner.take();
}

std::string to_string(ChainKind kind) {
  switch (kind) {
    case ChainKind::glauber: return "glauber";
    case ChainKind::sw_ghost: return "sw_ghost";
    case ChainKind::kawasaki_local: return "kawasaki_local";
    case ChainKind::kawasaki_global: return "kawasaki_global";
    case ChainKind::exact: return "exact";
  }
  return "unknown";
}

ChainKind parse_chain_kind(std::string_view name) {
  if (name == "glauber") return ChainKind::glauber;
  if (name == "sw_ghost" || name == "sw") return ChainKind::sw_ghost;
  if (name == "kawasaki_local" || name == "local") return ChainKind::kawasaki_local;
  if (name == "kawasaki_global" || name == "global") return ChainKind::kawasaki_global;
  if (name == "exact") return ChainKind::exact;
  fail(ErrorKind::invalid_argument, "unknown chain kind '" + std::string(name) + "'");
}

bool conserves_magnetization(ChainKind kind) noexcept {
  return kind == ChainKind::kawasaki_local || kind == ChainKind::kawasaki_global;
}

double glauber_plus_probability(const IsingParams& params, int y) {
  return 1.0 / (1.0 + std::exp(-2.0 * std::log(params.lambda) - params.beta * y));
}

void glauber_step(const Graph& graph, SpinConfig& config, const IsingParams& params, Rng& rng) {
  require(config.size() == graph.size(), "glauber_step: configuration size does not match the graph");
  if (graph.size() == 0) return;
  const auto v = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(graph.size())));
  int y = 0;
  for (Vertex u : graph.neighbors(v)) y += config[u];
  config.set(v, rng.uniform() < glauber_plus_probability(params, y) ? Spin{1} : Spin{-1});
}

void sw_ghost_step(const Graph& graph, SpinConfig& config, const IsingParams& params, Rng& rng) {
  require(config.size() == graph.size(), "sw_ghost_step: configuration size does not match the graph");
  require(params.lambda >= 1.0, "sw_ghost_step: requires lambda >= 1");
  const int n = graph.size();
  const int ghost = n;
  const double p_edge = -std::expm1(-params.beta);
  const double p_ghost = -std::expm1(-2.0 * std::log(params.lambda));
  DisjointSets sets(n + 1);
  for (const Edge& e : graph.edges())
    if (config[e.u] == config[e.v] && rng.uniform() < p_edge) sets.unite(e.u, e.v);
  for (Vertex v = 0; v < n; ++v)
    if (config[v] > 0 && rng.uniform() < p_ghost) sets.unite(v, ghost);

  // Roots are cluster minima, so the ghost cluster has root <= ghost and every
  // other cluster root is a real vertex; draw one sign per root in vertex order.
  const int ghost_root = sets.find(ghost);
  std::vector<Spin> sign(n, 0);
  for (Vertex v = 0; v < n; ++v) {
    const int r = sets.find(v);
    if (r == ghost_root) {
      config.set(v, 1);
      continue;
    }
    if (sign[r] == 0) sign[r] = rng.bernoulli(0.5) ? Spin{1} : Spin{-1};
    config.set(v, sign[r]);
  }
}

int swap_interaction_change(const Graph& graph, const SpinConfig& config, Vertex u, Vertex v) {
  require(config[u] != config[v], "swap_interaction_change: spins at u and v must differ");
  int yu = 0, yv = 0;
  for (Vertex w : graph.neighbors(u)) yu += config[w];
  for (Vertex w : graph.neighbors(v)) yv += config[w];
  const int adjacent = graph.has_edge(u, v) ? 1 : 0;
  return -2 * config[u] * yu - 2 * config[v] * yv + 4 * config[u] * config[v] * adjacent;
}

bool kawasaki_step(const Graph& graph, SpinConfig& config, double beta, KawasakiVariant variant, Rng& rng) {
  require(config.size() == graph.size(), "kawasaki_step: configuration size does not match the graph");
  Vertex u = 0, v = 0;
  if (variant == KawasakiVariant::local) {
    if (graph.edge_count() == 0) return false;
    const Edge& e = graph.edges()[rng.below(static_cast<std::uint64_t>(graph.edge_count()))];
    u = e.u;
    v = e.v;
  } else {
    const auto n = static_cast<std::uint64_t>(graph.size());
    if (n < 2) return false;
    u = static_cast<Vertex>(rng.below(n));
    v = static_cast<Vertex>(rng.below(n - 1));
    if (v >= u) ++v;
  }
  if (config[u] == config[v]) return false;
  const int change = swap_interaction_change(graph, config, u, v);
  if (change < 0 && !(rng.uniform() < std::exp(0.5 * beta * change))) return false;
  config.swap_spins(u, v);
  return true;
}

SpinConfig run_chain(const Graph& graph, const ChainSpec& spec, const IsingParams& params,
                     const std::optional<SpinConfig>& initial, std::uint64_t stream,
                     std::vector<TraceRow>* trace) {
  validate(params);
  check_steps(spec);
  if (conserves_magnetization(spec.kind))
    fail(ErrorKind::invalid_argument,
         "run_chain: " + to_string(spec.kind) + " targets a fixed magnetization; pass (beta, k)");
  if (spec.kind == ChainKind::sw_ghost)
    require(params.lambda >= 1.0, "run_chain: sw_ghost requires lambda >= 1");
  if (spec.kind == ChainKind::exact) {
    auto oracle = std::make_shared<const ExactOracle>(graph);
    ExactIsingSampler sampler(oracle, params.beta);
    Rng rng(spec.seed, stream);
    SpinConfig out = sampler.draw(params.lambda, rng);
    if (trace) trace->push_back({0, magnetization(out), interaction_sum(graph, out)});
    return out;
  }
  SpinConfig start = initial ? *initial : SpinConfig::all_plus(graph.size());
  check_start(graph, start);
  return drive(graph, spec, params.beta, params.lambda, std::move(start), stream, trace);
}

SpinConfig run_chain(const Graph& graph, const ChainSpec& spec, const FixedMagParams& params,
                     const std::optional<SpinConfig>& initial, std::uint64_t stream,
                     std::vector<TraceRow>* trace) {
  validate(params, graph.size());
  check_steps(spec);
  if (!conserves_magnetization(spec.kind) && spec.kind != ChainKind::exact)
    fail(ErrorKind::invalid_argument,
         "run_chain: " + to_string(spec.kind) + " does not conserve magnetization; pass (beta, lambda)");
  if (spec.kind == ChainKind::exact) {
    auto oracle = std::make_shared<const ExactOracle>(graph);
    ExactFixedSampler sampler(oracle, params.k);
    Rng rng(spec.seed, stream);
    SpinConfig out = sampler.draw(params.beta, rng);
    if (trace) trace->push_back({0, magnetization(out), interaction_sum(graph, out)});
    return out;
  }
  SpinConfig start = initial ? *initial : fixed_start(graph.size(), params.k);
  check_start(graph, start);
  require(magnetization(start) == params.k, "run_chain: initial configuration has the wrong magnetization");
  return drive(graph, spec, params.beta, 1.0, std::move(start), stream, trace);
}

EmpiricalTv empirical_tv(const Graph& graph, const ChainSpec& spec, const IsingParams& params,
                         std::int64_t samples, EmpiricalMode mode, const OracleOptions& options) {
  validate(params);
  if (conserves_magnetization(spec.kind))
    fail(ErrorKind::invalid_argument, "empirical_tv: Kawasaki kinds need (beta, k)");
  if (spec.kind == ChainKind::sw_ghost) require(params.lambda >= 1.0, "empirical_tv: sw_ghost requires lambda >= 1");
  return empirical(graph, spec, params.beta, params.lambda, std::nullopt, samples, mode, options);
}

EmpiricalTv empirical_tv(const Graph& graph, const ChainSpec& spec, const FixedMagParams& params,
                         std::int64_t samples, EmpiricalMode mode, const OracleOptions& options) {
  validate(params, graph.size());
  if (!conserves_magnetization(spec.kind) && spec.kind != ChainKind::exact)
    fail(ErrorKind::invalid_argument, "empirical_tv: grand-canonical kinds need (beta, lambda)");
  return empirical(graph, spec, params.beta, 1.0, params.k, samples, mode, options);
}

TransitionMatrix transition_matrix(const Graph& graph, ChainKind kind, const IsingParams& params) {
  validate(params);
  check_matrix_size(graph);
  const int n = graph.size();
  const std::uint64_t count = std::uint64_t{1} << n;
  TransitionMatrix m;
  m.states.resize(count);
  std::iota(m.states.begin(), m.states.end(), std::uint64_t{0});
  m.entries.assign(count * count, 0.0);

  if (kind == ChainKind::glauber) {
    for (std::uint64_t x = 0; x < count; ++x) {
      const SpinConfig c = SpinConfig::from_bits(n, x);
      for (Vertex v = 0; v < n; ++v) {
        const double p = glauber_plus_probability(params, neighbor_field(graph, c, v));
        const std::uint64_t bit = std::uint64_t{1} << v;
        m.at(x, x | bit) += p / n;
        m.at(x, x & ~bit) += (1.0 - p) / n;
      }
    }
    return m;
  }

  if (kind == ChainKind::sw_ghost) {
    require(params.lambda >= 1.0, "transition_matrix: sw_ghost requires lambda >= 1");
    const double p_edge = -std::expm1(-params.beta);
    const double ghost_miss = 1.0 / (params.lambda * params.lambda);
    for (std::uint64_t x = 0; x < count; ++x) {
      std::vector<Edge> agreeing;
      for (const Edge& e : graph.edges())
        if (((x >> e.u) & 1) == ((x >> e.v) & 1)) agreeing.push_back(e);
      // Aggregate bond subsets by the cluster partition they induce; the key
      // stores each vertex's cluster minimum in 4 bits.
      std::unordered_map<std::uint64_t, double> partitions;
      const std::uint64_t subsets = std::uint64_t{1} << agreeing.size();
      for (std::uint64_t mask = 0; mask < subsets; ++mask) {
        double p = 1.0;
        DisjointSets sets(n);
        for (std::size_t i = 0; i < agreeing.size(); ++i) {
          if ((mask >> i) & 1) {
            p *= p_edge;
            sets.unite(agreeing[i].u, agreeing[i].v);
          } else {
            p *= 1.0 - p_edge;
          }
        }
        if (p == 0.0) continue;
        std::uint64_t key = 0;
        for (Vertex v = 0; v < n; ++v) key |= static_cast<std::uint64_t>(sets.find(v)) << (4 * v);
        partitions[key] += p;
      }
      for (const auto& [key, p] : partitions) {
        std::vector<std::uint64_t> members;
        std::vector<double> plus_probability;
        for (Vertex v = 0; v < n; ++v) {
          if (static_cast<Vertex>((key >> (4 * v)) & 0xF) != v) continue;
          std::uint64_t mask = 0;
          for (Vertex w = 0; w < n; ++w)
            if (static_cast<Vertex>((key >> (4 * w)) & 0xF) == v) mask |= std::uint64_t{1} << w;
          members.push_back(mask);
          const bool plus = (x >> v) & 1;
          const double miss = plus ? std::pow(ghost_miss, std::popcount(mask)) : 1.0;
          plus_probability.push_back(plus ? 1.0 - 0.5 * miss : 0.5);
        }
        const std::uint64_t outcomes = std::uint64_t{1} << members.size();
        for (std::uint64_t o = 0; o < outcomes; ++o) {
          double q = p;
          std::uint64_t y = 0;
          for (std::size_t c = 0; c < members.size(); ++c) {
            if ((o >> c) & 1) {
              q *= plus_probability[c];
              y |= members[c];
            } else {
              q *= 1.0 - plus_probability[c];
            }
          }
          m.at(x, y) += q;
        }
      }
    }
    return m;
  }
  fail(ErrorKind::invalid_argument, "transition_matrix: " + to_string(kind) + " needs (beta, k)");
}

TransitionMatrix transition_matrix(const Graph& graph, ChainKind kind, const FixedMagParams& params) {
  validate(params, graph.size());
  check_matrix_size(graph);
  if (!conserves_magnetization(kind))
    fail(ErrorKind::invalid_argument, "transition_matrix: " + to_string(kind) + " needs (beta, lambda)");
  const int n = graph.size();
  const int plus = (n + params.k) / 2;
  TransitionMatrix m;
  std::vector<int> index(std::size_t{1} << n, -1);
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    if (std::popcount(x) != plus) continue;
    index[x] = static_cast<int>(m.states.size());
    m.states.push_back(x);
  }
  const std::size_t size = m.states.size();
  m.entries.assign(size * size, 0.0);

  const auto propose = [&](std::size_t from, const SpinConfig& c, Vertex u, Vertex v, double weight) {
    if (c[u] == c[v]) {
      m.at(from, from) += weight;
      return;
    }
    const int change = swap_interaction_change(graph, c, u, v);
    const double accept = change >= 0 ? 1.0 : std::exp(0.5 * params.beta * change);
    const std::uint64_t y = m.states[from] ^ ((std::uint64_t{1} << u) | (std::uint64_t{1} << v));
    m.at(from, static_cast<std::size_t>(index[y])) += weight * accept;
    m.at(from, from) += weight * (1.0 - accept);
  };

  for (std::size_t i = 0; i < size; ++i) {
    const SpinConfig c = SpinConfig::from_bits(n, m.states[i]);
    if (kind == ChainKind::kawasaki_local) {
      if (graph.edge_count() == 0) {
        m.at(i, i) = 1.0;
        continue;
      }
      const double w = 1.0 / graph.edge_count();
      for (const Edge& e : graph.edges()) propose(i, c, e.u, e.v, w);
    } else {
      if (n < 2) {
        m.at(i, i) = 1.0;
        continue;
      }
      const double w = 1.0 / (static_cast<double>(n) * (n - 1));
      for (Vertex u = 0; u < n; ++u)
        for (Vertex v = 0; v < n; ++v)
          if (u != v) propose(i, c, u, v, w);
    }
  }
  return m;
}

BalanceReport check_balance(const TransitionMatrix& matrix, const std::vector<double>& pi) {
  const std::size_t size = matrix.size();
  require(pi.size() == size, "check_balance: pi must match the state list");
  BalanceReport r;
  std::vector<double> pushed(size, 0.0);
  for (std::size_t x = 0; x < size; ++x) {
    double row = 0.0;
    for (std::size_t y = 0; y < size; ++y) {
      const double pxy = matrix.at(x, y);
      row += pxy;
      pushed[y] += pi[x] * pxy;
      if (y > x) r.reversibility = std::max(r.reversibility, std::fabs(pi[x] * pxy - pi[y] * matrix.at(y, x)));
    }
    r.row_sum = std::max(r.row_sum, std::fabs(row - 1.0));
  }
  for (std::size_t y = 0; y < size; ++y) r.stationarity = std::max(r.stationarity, std::fabs(pushed[y] - pi[y]));

  // Strong connectivity: every state reachable from state 0 along positive
  // entries, and state 0 reachable from every state.
  const auto reach_all = [&](bool forward) {
    std::vector<char> seen(size, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t visited = 1;
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t y = 0; y < size; ++y) {
        const double p = forward ? matrix.at(x, y) : matrix.at(y, x);
        if (p > 0.0 && !seen[y]) {
          seen[y] = 1;
          ++visited;
          stack.push_back(y);
        }
      }
    }
    return visited == size;
  };
  r.irreducible = size > 0 && reach_all(true) && reach_all(false);
  return r;
}

}  // namespace fixmag
