#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fixmag/errors.hpp"

namespace fixmag {

using Vertex = int;
using Spin = std::int8_t;

/// Undirected edge stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph on vertices 0..n-1 with a declared degree cap.
///
/// Immutable and validated at construction: no self-loops, no duplicate
/// edges, every degree at most delta_cap. Edges are kept sorted.
class Graph {
 public:
  Graph() = default;
  Graph(int n, int delta_cap, std::vector<Edge> edges);

  int size() const noexcept { return n_; }
  int delta_cap() const noexcept { return delta_cap_; }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  int degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  int max_degree() const noexcept;
  bool has_edge(Vertex u, Vertex v) const;
  bool contains(Vertex v) const noexcept { return v >= 0 && v < n_; }

  /// Copy of this graph with edge e removed. Throws if e is not an edge.
  Graph without_edge(Edge e) const;

 private:
  int n_ = 0;
  int delta_cap_ = 1;
  std::vector<Edge> edges_;
  std::vector<int> offsets_{0};
  std::vector<Vertex> adjacency_;
};

/// A spin assignment V -> {+1, -1}.
class SpinConfig {
 public:
  SpinConfig() = default;
  explicit SpinConfig(std::vector<Spin> spins);

  static SpinConfig all_plus(int n) { return uniform(n, 1); }
  static SpinConfig all_minus(int n) { return uniform(n, -1); }
  static SpinConfig uniform(int n, Spin value);
  /// Bit v of `bits` set means vertex v carries +1. Requires n <= 64.
  static SpinConfig from_bits(int n, std::uint64_t bits);
  /// The first `plus` vertices carry +1, the rest -1.
  static SpinConfig prefix_plus(int n, int plus);

  int size() const noexcept { return static_cast<int>(spins_.size()); }
  Spin operator[](Vertex v) const { return spins_[v]; }
  void set(Vertex v, Spin s) { spins_[v] = s; }
  void flip(Vertex v) { spins_[v] = static_cast<Spin>(-spins_[v]); }
  void swap_spins(Vertex u, Vertex v) { std::swap(spins_[u], spins_[v]); }
  std::span<const Spin> spins() const noexcept { return spins_; }

  SpinConfig flipped() const;
  std::uint64_t to_bits() const;
  int plus_count() const noexcept;

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

 private:
  std::vector<Spin> spins_;
};

/// Grand-canonical parameters: inverse temperature and activity.
struct IsingParams {
  double beta = 0.0;
  double lambda = 1.0;
};

/// Canonical parameters: inverse temperature and target magnetization.
struct FixedMagParams {
  double beta = 0.0;
  int k = 0;
};

void validate(const IsingParams& params);
void validate(const FixedMagParams& params, int n);

/// True when |k| <= n and k has the parity of n.
bool valid_magnetization(int n, int k) noexcept;

int magnetization(const SpinConfig& config) noexcept;

/// delta(sigma): sum over edges of sigma_u * sigma_v.
int interaction_sum(const Graph& graph, const SpinConfig& config);

/// log of exp((beta/2) * delta(sigma)) * lambda^M(sigma).
double log_gibbs_weight(const Graph& graph, const SpinConfig& config, const IsingParams& params);

/// The weight itself; overflows to +inf once the log-weight exceeds ~709,
/// callers working at large beta * |E| should stay with log_gibbs_weight.
double gibbs_weight(const Graph& graph, const SpinConfig& config, const IsingParams& params);

/// Magnetization of v's neighbourhood: 2j - deg(v) with j plus neighbours.
int neighbor_field(const Graph& graph, const SpinConfig& config, Vertex v);

// ---- constructors for common graphs ----

Graph empty_graph(int n, int delta_cap = 1);
Graph path_graph(int n);
Graph cycle_graph(int n);
Graph complete_graph(int n);
Graph star_graph(int leaves);
Graph disjoint_union(const Graph& a, const Graph& b);

class Rng;

/// Random graph with maximum degree <= delta: `attempts` uniformly chosen
/// vertex pairs are offered in turn and kept when both ends have room.
Graph random_bounded_degree_graph(int n, int delta, int attempts, Rng& rng);

/// Calls `visit` once for every labeled simple graph on n vertices whose
/// maximum degree is at most delta (n <= 8). Graphs carry delta_cap = delta.
void for_each_labeled_graph(int n, int delta, const std::function<void(const Graph&)>& visit);

}  // namespace fixmag
