#include "fixmag/hardness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <thread>

#include "fixmag/errors.hpp"
#include "fixmag/rng.hpp"
#include "fixmag/tree.hpp"

namespace fixmag {

namespace {

constexpr double kFloorGuard = 1e-9;

std::int64_t checked_power(int base, int exponent) {
  std::int64_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    out *= base;
    require(out <= std::numeric_limits<int>::max() / 4, "gadget: parameters overflow");
  }
  return out;
}

template <class T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[rng.below(i)]);
}

std::vector<int> random_permutation(int size, Rng& rng) {
  std::vector<int> p(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) p[i] = i;
  shuffle(p, rng);
  return p;
}

}  // namespace

GadgetParameters gadget_parameters(const GadgetSpec& spec) {
  require(spec.delta >= 3, "gadget: delta must be >= 3");
  require(spec.n >= 1, "gadget: n must be >= 1");
  const int d = spec.delta - 1;
  GadgetParameters p;
  if (spec.overrides) {
    const auto& o = *spec.overrides;
    require(o.m >= 1 && o.tree_depth >= 0 && o.match_size >= 1, "gadget: overrides need m >= 1, tree_depth >= 0, "
                                                                 "match_size >= 1");
    p.m = o.m;
    p.tree_depth = o.tree_depth;
    p.match_size = o.match_size;
    const std::int64_t expected = o.m * checked_power(d, o.tree_depth);
    p.m_prime = o.m_prime == 0 ? static_cast<int>(expected) : o.m_prime;
    require(p.m_prime == expected, "gadget: m_prime must equal m (delta-1)^tree_depth");
  } else {
    require(spec.theta > 0.0 && spec.theta < 0.125 && spec.psi > 0.0 && spec.psi < 0.125,
            "gadget: theta and psi must lie in (0, 1/8)");
    const double log_n = std::log(static_cast<double>(spec.n)) / std::log(static_cast<double>(d));
    const int a = static_cast<int>(std::floor(spec.theta * log_n + kFloorGuard));
    const int b = static_cast<int>(std::floor(spec.psi * log_n + kFloorGuard));
    p.m = static_cast<int>(checked_power(d, a));
    p.m_prime = static_cast<int>(checked_power(d, a + b));
    p.tree_depth = b;
    p.match_size = static_cast<int>(std::floor(std::pow(spec.n, 0.75 * spec.theta) + kFloorGuard));
    require(p.match_size >= 1, "gadget: degenerate parameters (match size 0)");
  }
  p.side = spec.n + p.m_prime;
  require(p.side >= spec.delta, "gadget: n + m' must be >= delta for delta disjoint perfect matchings");
  const std::int64_t internal = (checked_power(d, p.tree_depth) - 1) / (spec.delta - 2);
  p.n_gadget = static_cast<int>(2 * (p.side + p.m * internal));
  return p;
}

Gadget build_gadget(const GadgetSpec& spec, std::uint64_t seed) {
  require(spec.max_attempts >= 1, "gadget: max_attempts must be >= 1");
  Gadget g;
  g.spec = spec;
  g.params = gadget_parameters(spec);
  const int delta = spec.delta;
  const int side = g.params.side;
  Rng rng(seed, 0);

  std::vector<std::vector<int>> matchings;
  bool disjoint = false;
  for (int attempt = 0; attempt < spec.max_attempts && !disjoint; ++attempt) {
    matchings.clear();
    for (int j = 0; j < delta; ++j) matchings.push_back(random_permutation(side, rng));
    disjoint = true;
    for (int i = 0; i < side && disjoint; ++i)
      for (int a = 0; a < delta && disjoint; ++a)
        for (int b = a + 1; b < delta; ++b)
          if (matchings[a][i] == matchings[b][i]) {
            disjoint = false;
            break;
          }
  }
  if (!disjoint)
    fail(ErrorKind::sampler_failure,
         "gadget: no pairwise disjoint matchings after " + std::to_string(spec.max_attempts) + " attempts");

  std::vector<int> order = random_permutation(side, rng);
  std::vector<bool> removed(static_cast<std::size_t>(side), false);
  for (int i = 0; i < g.params.m_prime; ++i) removed[order[i]] = true;

  std::vector<Edge> edges;
  for (int j = 0; j < delta; ++j)
    for (int i = 0; i < side; ++i)
      if (j < delta - 1 || !removed[i]) edges.push_back({i, side + matchings[j][i]});

  std::vector<Vertex> w_left, w_right;
  for (int i = 0; i < side; ++i) {
    g.side_left.push_back(i);
    g.side_right.push_back(side + i);
    if (removed[i]) {
      w_left.push_back(i);
      w_right.push_back(side + matchings[delta - 1][i]);
    }
  }
  std::sort(w_right.begin(), w_right.end());
  g.w0 = w_left;
  g.w0.insert(g.w0.end(), w_right.begin(), w_right.end());
  std::vector<bool> is_w(static_cast<std::size_t>(2 * side), false);
  for (Vertex v : g.w0) is_w[v] = true;
  for (int v = 0; v < 2 * side; ++v)
    if (!is_w[v]) g.u0.push_back(v);
  g.u1 = g.u0.front();

  const int arity = delta - 1;
  const int leaves = g.params.m_prime / g.params.m;
  Vertex next = 2 * side;
  auto attach_trees = [&](std::vector<Vertex> w, std::vector<Vertex>& terminals) {
    shuffle(w, rng);
    for (int t = 0; t < g.params.m; ++t) {
      std::vector<Vertex> layer(w.begin() + t * leaves, w.begin() + (t + 1) * leaves);
      for (int level = 0; level < g.params.tree_depth; ++level) {
        std::vector<Vertex> parents;
        for (std::size_t c = 0; c < layer.size(); c += arity) {
          const Vertex p = next++;
          for (int j = 0; j < arity; ++j) edges.push_back({layer[c + j], p});
          parents.push_back(p);
        }
        layer = std::move(parents);
      }
      terminals.push_back(layer.front());
    }
  };
  attach_trees(w_left, g.terminals_left);
  attach_trees(w_right, g.terminals_right);
  g.graph = Graph(next, delta, std::move(edges));
  return g;
}

int phase(const Gadget& gadget, const SpinConfig& config, int offset) {
  require(offset >= 0 && offset + gadget.graph.size() <= config.size(), "phase: configuration too small");
  int sum = 0;
  for (Vertex v : gadget.u0) sum += config[offset + v];
  if (sum > 0) return 1;
  if (sum < 0) return -1;
  return config[offset + gadget.u1];
}

int majority_size(int h, double gamma) {
  return static_cast<int>(std::floor(gamma * h + kFloorGuard));
}

ReductionInstance build_reduction(const Graph& host, double gamma, const GadgetSpec& spec, double eta, double beta,
                                  std::uint64_t seed) {
  const int h = host.size();
  require(h >= 1, "reduction: host must have at least one vertex");
  require(eta >= 0.0 && eta < 1.0, "reduction: eta must lie in [0, 1)");
  require(std::isfinite(beta) && beta > 0.0, "reduction: beta must be positive");
  const GadgetParameters params = gadget_parameters(spec);
  if (!spec.overrides)
    require(h <= std::pow(spec.n, spec.theta / 4.0) / (spec.delta - 1),
            "reduction: h exceeds n^(theta/4) / (delta-1); enlarge n or use overrides");
  for (Vertex x = 0; x < h; ++x)
    require(host.degree(x) * params.match_size <= params.m,
            "reduction: terminal exhaustion at host vertex " + std::to_string(x) + " (degree " +
                std::to_string(host.degree(x)) + " x match size " + std::to_string(params.match_size) +
                " > m = " + std::to_string(params.m) + ")");

  ReductionInstance r;
  r.host = host;
  r.gamma = gamma;
  r.beta = beta;
  r.eta = eta;
  r.h_plus = majority_size(h, gamma);
  r.h_minus = h - r.h_plus;
  r.M_star = r.h_plus - r.h_minus;
  const int ng = params.n_gadget;

  if (!(beta > beta_critical(spec.delta))) fail(ErrorKind::regime, "reduction: needs beta > beta_c");
  if (eta == 0.0) {
    if (gamma != 0.5)
      fail(ErrorKind::regime, "reduction: no feasible s at eta = 0 unless gamma = 1/2 (demonstration mode)");
    r.demonstration = true;
    r.s = 0;
  } else {
    require(gamma > 0.5 && gamma < 1.0, "reduction: gamma must lie in (1/2, 1)");
    const double ec = eta_c(spec.delta, beta).value;
    if (!(eta < ec)) fail(ErrorKind::regime, "reduction: needs eta < eta_c");
    if (!(gamma > 0.5 * (1.0 + eta / ec)))
      fail(ErrorKind::regime, "reduction: gamma must exceed (1 + eta/eta_c) / 2");
    const double lhs = 2.0 * spec.n * r.M_star * ec;
    const double target = lhs / eta - static_cast<double>(h) * ng;
    double best = INFINITY;
    for (double cand : {std::floor(target), std::ceil(target)}) {
      if (cand < 0.0) continue;
      const double gap = std::fabs(lhs - eta * (static_cast<double>(h) * ng + cand));
      if (gap < best) {
        best = gap;
        r.s = static_cast<int>(cand);
      }
    }
    if (!(best <= std::sqrt(static_cast<double>(spec.n) * h)))
      fail(ErrorKind::regime, "reduction: no feasible s");
  }

  r.gadget = build_gadget(spec, seed);
  r.N = h * ng + r.s;
  r.ell = static_cast<int>(std::floor(r.N * (eta + 1.0) / 2.0 + kFloorGuard));
  r.k_target = 2 * r.ell - r.N;

  std::vector<Edge> inner;
  for (Vertex x = 0; x < h; ++x) {
    r.offsets.push_back(x * ng);
    for (const Edge& e : r.gadget.graph.edges()) inner.push_back({e.u + x * ng, e.v + x * ng});
  }
  std::vector<std::vector<Vertex>> left(h), right(h);
  for (Vertex x = 0; x < h; ++x) {
    Rng rng(seed, 1 + static_cast<std::uint64_t>(x));
    left[x] = r.gadget.terminals_left;
    right[x] = r.gadget.terminals_right;
    shuffle(left[x], rng);
    shuffle(right[x], rng);
  }
  std::vector<int> used_left(h, 0), used_right(h, 0);
  for (const Edge& e : host.edges()) {
    for (int t = 0; t < params.match_size; ++t) {
      r.crossing_edges.push_back({r.offsets[e.u] + left[e.u][used_left[e.u]++],
                                  r.offsets[e.v] + left[e.v][used_left[e.v]++]});
      r.crossing_edges.push_back({r.offsets[e.u] + right[e.u][used_right[e.u]++],
                                  r.offsets[e.v] + right[e.v][used_right[e.v]++]});
    }
  }
  std::sort(r.crossing_edges.begin(), r.crossing_edges.end());
  std::vector<Edge> all = inner;
  all.insert(all.end(), r.crossing_edges.begin(), r.crossing_edges.end());
  r.decoupled = Graph(r.N, spec.delta, std::move(inner));
  r.composite = Graph(r.N, spec.delta, std::move(all));
  return r;
}

std::vector<int> phase_vector(const ReductionInstance& instance, const SpinConfig& config) {
  require(config.size() == instance.N, "phase_vector: configuration size mismatch");
  std::vector<int> out;
  for (int offset : instance.offsets) out.push_back(phase(instance.gadget, config, offset));
  return out;
}

ThetaGamma theta_gamma(double beta, double q) {
  require(std::isfinite(beta) && beta >= 0.0, "theta_gamma: beta must be finite and >= 0");
  require(q >= 0.5 && q <= 1.0, "theta_gamma: q must lie in [1/2, 1]");
  const double mixed = 2.0 * q * (1.0 - q);
  const double same = q * q + (1.0 - q) * (1.0 - q);
  const double up = std::exp(0.5 * beta);
  const double down = std::exp(-0.5 * beta);
  return {mixed * up + same * down, mixed * down + same * up};
}

CutInterval recover_cut_interval(const RecoveryInputs& in) {
  require(in.match_size >= 1 && in.n >= 1 && in.h >= 1 && in.host_edges >= 0,
          "recover_cut_interval: match_size, n, h must be positive");
  require(in.C > 0.0 && in.C_prime > 0.0, "recover_cut_interval: C and C_prime must be positive");
  const ThetaGamma tg = theta_gamma(in.beta, in.q);
  if (!(tg.gamma > tg.theta)) fail(ErrorKind::regime, "recover_cut_interval: degenerate Gamma <= Theta");
  const double k2 = 2.0 * in.match_size;
  const double denom = k2 * std::log(tg.gamma / tg.theta);
  CutInterval out;
  out.center = (in.log_z_free - in.log_z_fixed + k2 * in.host_edges * std::log(tg.gamma) -
                0.5 * std::log(static_cast<double>(in.n) * in.h)) /
               denom;
  out.lower = out.center - (in.h * std::log(2.0) - std::log(in.C_prime)) / denom;
  out.upper = out.center + std::log(in.C) / denom;
  return out;
}

int brute_force_mebc(const Graph& host, double gamma) {
  const int h = host.size();
  if (h > 20) fail(ErrorKind::capacity, "brute_force_mebc: host has " + std::to_string(h) + " > 20 vertices");
  require(gamma >= 0.0 && gamma <= 1.0, "brute_force_mebc: gamma must lie in [0, 1]");
  const int r = majority_size(h, gamma);
  if (r == 0 || r == h) return 0;
  const std::uint32_t limit = std::uint32_t{1} << h;
  int best = std::numeric_limits<int>::max();
  for (std::uint32_t s = (std::uint32_t{1} << r) - 1; s < limit;) {
    int cut = 0;
    for (const Edge& e : host.edges()) cut += ((s >> e.u) ^ (s >> e.v)) & 1u;
    best = std::min(best, cut);
    const std::uint32_t c = s & -s;
    const std::uint32_t t = s + c;
    s = (((t ^ s) >> 2) / c) | t;
  }
  return best;
}

PhaseReport phase_experiment(const Gadget& gadget, double beta, const ChainSpec& spec, int runs, std::uint64_t seed,
                             int jobs) {
  require(spec.kind == ChainKind::glauber || spec.kind == ChainKind::sw_ghost,
          "phase_experiment: needs glauber or sw_ghost");
  require(runs >= 1 && spec.steps >= 1 && spec.burn_in >= 0, "phase_experiment: needs runs >= 1 and steps >= 1");
  validate(IsingParams{beta, 1.0});

  struct RunStats {
    int final_phase = 0;
    double aligned = 0.0;
    double sum_plus = 0.0, sum_minus = 0.0;
    std::int64_t count_plus = 0, count_minus = 0;
  };
  std::vector<RunStats> stats(static_cast<std::size_t>(runs));
  const Graph& graph = gadget.graph;
  auto work = [&](int r) {
    Rng rng(seed, static_cast<std::uint64_t>(r));
    std::vector<Spin> spins(static_cast<std::size_t>(graph.size()));
    for (auto& s : spins) s = rng.bernoulli(0.5) ? Spin{1} : Spin{-1};
    SpinConfig config(std::move(spins));
    run_sweeps(graph, spec.kind, beta, 1.0, config, spec.burn_in, rng);
    RunStats& st = stats[r];
    for (std::int64_t t = 0; t < spec.steps; ++t) {
      run_sweeps(graph, spec.kind, beta, 1.0, config, 1, rng);
      const int p = phase(gadget, config);
      const int m = magnetization(config);
      st.aligned += p * m;
      if (p > 0) {
        st.sum_plus += m;
        ++st.count_plus;
      } else {
        st.sum_minus += m;
        ++st.count_minus;
      }
      st.final_phase = p;
    }
    st.aligned /= static_cast<double>(spec.steps);
  };
  const int workers = std::max(1, std::min(jobs, runs));
  if (workers == 1) {
    for (int r = 0; r < runs; ++r) work(r);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int r = w; r < runs; r += workers) work(r);
      });
    for (auto& t : pool) t.join();
  }

  PhaseReport out;
  double sum_plus = 0.0, sum_minus = 0.0;
  std::int64_t count_plus = 0, count_minus = 0;
  int plus_runs = 0;
  for (const auto& st : stats) {
    out.phases.push_back(st.final_phase);
    out.aligned_means.push_back(st.aligned);
    out.aligned_runs += st.aligned > 0.0;
    plus_runs += st.final_phase > 0;
    sum_plus += st.sum_plus;
    sum_minus += st.sum_minus;
    count_plus += st.count_plus;
    count_minus += st.count_minus;
  }
  out.plus_frequency = static_cast<double>(plus_runs) / runs;
  out.mean_given_plus = count_plus ? sum_plus / static_cast<double>(count_plus) : 0.0;
  out.mean_given_minus = count_minus ? sum_minus / static_cast<double>(count_minus) : 0.0;
  return out;
}

}  // namespace fixmag
