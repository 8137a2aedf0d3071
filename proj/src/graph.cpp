#include "fixmag/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "fixmag/rng.hpp"

namespace fixmag {

Graph::Graph(int n, int delta_cap, std::vector<Edge> edges)
    : n_(n), delta_cap_(delta_cap), edges_(std::move(edges)) {
  require(n >= 0, "graph: vertex count must be non-negative");
  require(delta_cap >= 1, "graph: delta_cap must be at least 1");
  for (auto& e : edges_) {
    require(contains(e.u) && contains(e.v), "graph: edge endpoint out of range");
    require(e.u != e.v, "graph: self-loop at vertex " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  const auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  require(dup == edges_.end(), "graph: duplicate edge");

  std::vector<int> degree(n_, 0);
  for (const auto& e : edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  offsets_.assign(n_ + 1, 0);
  for (int v = 0; v < n_; ++v) {
    require(degree[v] <= delta_cap_, "graph: vertex " + std::to_string(v) + " has degree " +
                                         std::to_string(degree[v]) + " > delta_cap " +
                                         std::to_string(delta_cap_));
    offsets_[v + 1] = offsets_[v] + degree[v];
  }
  adjacency_.resize(offsets_[n_]);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    adjacency_[fill[e.u]++] = e.v;
    adjacency_[fill[e.v]++] = e.u;
  }
}

int Graph::max_degree() const noexcept {
  int best = 0;
  for (int v = 0; v < n_; ++v) best = std::max(best, degree(v));
  return best;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  if (!contains(u) || !contains(v) || u == v) return false;
  const Edge e{std::min(u, v), std::max(u, v)};
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

Graph Graph::without_edge(Edge e) const {
  require(has_edge(e.u, e.v), "without_edge: not an edge of the graph");
  if (e.u > e.v) std::swap(e.u, e.v);
  std::vector<Edge> rest;
  rest.reserve(edges_.size() - 1);
  for (const auto& f : edges_)
    if (f != e) rest.push_back(f);
  return Graph(n_, delta_cap_, std::move(rest));
}

SpinConfig::SpinConfig(std::vector<Spin> spins) : spins_(std::move(spins)) {
  for (Spin s : spins_) require(s == 1 || s == -1, "spin config: entries must be +1 or -1");
}

SpinConfig SpinConfig::uniform(int n, Spin value) {
  require(n >= 0, "spin config: negative size");
  return SpinConfig(std::vector<Spin>(n, value));
}

SpinConfig SpinConfig::from_bits(int n, std::uint64_t bits) {
  require(n >= 0 && n <= 64, "spin config: bit encoding needs n <= 64");
  SpinConfig c;
  c.spins_.resize(n);
  for (int v = 0; v < n; ++v) c.spins_[v] = ((bits >> v) & 1u) ? 1 : -1;
  return c;
}

SpinConfig SpinConfig::prefix_plus(int n, int plus) {
  require(plus >= 0 && plus <= n, "spin config: plus count out of range");
  SpinConfig c = all_minus(n);
  for (int v = 0; v < plus; ++v) c.spins_[v] = 1;
  return c;
}

SpinConfig SpinConfig::flipped() const {
  SpinConfig c = *this;
  for (auto& s : c.spins_) s = static_cast<Spin>(-s);
  return c;
}

std::uint64_t SpinConfig::to_bits() const {
  require(size() <= 64, "spin config: bit encoding needs n <= 64");
  std::uint64_t bits = 0;
  for (int v = 0; v < size(); ++v)
    if (spins_[v] > 0) bits |= std::uint64_t{1} << v;
  return bits;
}

int SpinConfig::plus_count() const noexcept {
  return static_cast<int>(std::count(spins_.begin(), spins_.end(), Spin{1}));
}

void validate(const IsingParams& params) {
  require(std::isfinite(params.beta) && params.beta >= 0.0,
          "ising params: beta must be finite and >= 0");
  require(std::isfinite(params.lambda) && params.lambda > 0.0,
          "ising params: lambda must be finite and > 0");
}

bool valid_magnetization(int n, int k) noexcept {
  return n >= 0 && k >= -n && k <= n && ((n - k) % 2 == 0);
}

void validate(const FixedMagParams& params, int n) {
  require(std::isfinite(params.beta) && params.beta >= 0.0,
          "fixed-magnetization params: beta must be finite and >= 0");
  require(valid_magnetization(n, params.k),
          "fixed-magnetization params: k=" + std::to_string(params.k) +
              " needs |k| <= n and k = n mod 2 (n=" + std::to_string(n) + ")");
}

int magnetization(const SpinConfig& config) noexcept {
  int m = 0;
  for (Spin s : config.spins()) m += s;
  return m;
}

namespace {
void check_sizes(const Graph& graph, const SpinConfig& config) {
  require(graph.size() == config.size(), "spin config size " + std::to_string(config.size()) +
                                             " does not match graph size " +
                                             std::to_string(graph.size()));
}
}  // namespace

int interaction_sum(const Graph& graph, const SpinConfig& config) {
  check_sizes(graph, config);
  int total = 0;
  for (const auto& e : graph.edges()) total += config[e.u] * config[e.v];
  return total;
}

double log_gibbs_weight(const Graph& graph, const SpinConfig& config, const IsingParams& params) {
  validate(params);
  return 0.5 * params.beta * interaction_sum(graph, config) +
         magnetization(config) * std::log(params.lambda);
}

double gibbs_weight(const Graph& graph, const SpinConfig& config, const IsingParams& params) {
  return std::exp(log_gibbs_weight(graph, config, params));
}

int neighbor_field(const Graph& graph, const SpinConfig& config, Vertex v) {
  check_sizes(graph, config);
  require(graph.contains(v), "neighbor_field: invalid vertex " + std::to_string(v));
  int field = 0;
  for (Vertex u : graph.neighbors(v)) field += config[u];
  return field;
}

Graph empty_graph(int n, int delta_cap) { return Graph(n, delta_cap, {}); }

Graph path_graph(int n) {
  std::vector<Edge> edges;
  for (int v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
  return Graph(n, 2, std::move(edges));
}

Graph cycle_graph(int n) {
  require(n >= 3, "cycle_graph: need at least 3 vertices");
  std::vector<Edge> edges;
  for (int v = 0; v < n; ++v) edges.push_back({v, (v + 1) % n});
  return Graph(n, 2, std::move(edges));
}

Graph complete_graph(int n) {
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) edges.push_back({u, v});
  return Graph(n, std::max(1, n - 1), std::move(edges));
}

Graph star_graph(int leaves) {
  std::vector<Edge> edges;
  for (int v = 1; v <= leaves; ++v) edges.push_back({0, v});
  return Graph(leaves + 1, std::max(1, leaves), std::move(edges));
}

Graph disjoint_union(const Graph& a, const Graph& b) {
  std::vector<Edge> edges(a.edges().begin(), a.edges().end());
  for (const auto& e : b.edges()) edges.push_back({e.u + a.size(), e.v + a.size()});
  return Graph(a.size() + b.size(), std::max(a.delta_cap(), b.delta_cap()), std::move(edges));
}

Graph random_bounded_degree_graph(int n, int delta, int attempts, Rng& rng) {
  require(n >= 1 && delta >= 1, "random graph: need n >= 1 and delta >= 1");
  std::vector<Edge> edges;
  std::vector<int> degree(n, 0);
  std::vector<std::uint8_t> present(static_cast<std::size_t>(n) * n, 0);
  for (int t = 0; t < attempts && n > 1; ++t) {
    int u = static_cast<int>(rng.below(n));
    int v = static_cast<int>(rng.below(n - 1));
    if (v >= u) ++v;
    if (u > v) std::swap(u, v);
    auto& slot = present[static_cast<std::size_t>(u) * n + v];
    if (slot || degree[u] >= delta || degree[v] >= delta) continue;
    slot = 1;
    ++degree[u];
    ++degree[v];
    edges.push_back({u, v});
  }
  return Graph(n, delta, std::move(edges));
}

void for_each_labeled_graph(int n, int delta, const std::function<void(const Graph&)>& visit) {
  require(n >= 0 && n <= 8, "for_each_labeled_graph: n must be in [0, 8]");
  std::vector<Edge> slots;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) slots.push_back({u, v});
  const std::uint64_t total = std::uint64_t{1} << slots.size();
  std::vector<int> degree(n);
  std::vector<Edge> edges;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::fill(degree.begin(), degree.end(), 0);
    edges.clear();
    bool ok = true;
    for (std::size_t i = 0; i < slots.size() && ok; ++i) {
      if (!((mask >> i) & 1u)) continue;
      const auto& e = slots[i];
      ok = ++degree[e.u] <= delta && ++degree[e.v] <= delta;
      edges.push_back(e);
    }
    if (ok) visit(Graph(n, delta, edges));
  }
}

}  // namespace fixmag
