#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fixmag/exact.hpp"
#include "fixmag/graph.hpp"
#include "fixmag/rng.hpp"

namespace fixmag {

enum class ChainKind { glauber, sw_ghost, kawasaki_local, kawasaki_global, exact };

std::string to_string(ChainKind kind);
/// Accepts glauber, sw_ghost (or sw), kawasaki_local, kawasaki_global, exact.
ChainKind parse_chain_kind(std::string_view name);
bool conserves_magnetization(ChainKind kind) noexcept;

/// One sweep is n single-site updates (Glauber), one cluster move (SW) or
/// n swap proposals (Kawasaki). The exact kind ignores steps and burn_in.
struct ChainSpec {
  ChainKind kind = ChainKind::glauber;
  std::int64_t steps = 0;
  std::uint64_t seed = 0;
  std::int64_t burn_in = 0;
};

enum class KawasakiVariant { local, global };

/// Heat-bath probability that a vertex with neighbourhood magnetization y is +1.
double glauber_plus_probability(const IsingParams& params, int y);

/// Resamples one uniformly chosen vertex from its conditional law.
void glauber_step(const Graph& graph, SpinConfig& config, const IsingParams& params, Rng& rng);

/// Swendsen-Wang move with a ghost vertex carrying the field log(lambda).
/// Requires lambda >= 1.
void sw_ghost_step(const Graph& graph, SpinConfig& config, const IsingParams& params, Rng& rng);

/// One swap proposal. Returns true when the configuration changed.
bool kawasaki_step(const Graph& graph, SpinConfig& config, double beta, KawasakiVariant variant,
                   Rng& rng);

/// Change of delta(sigma) when the opposite spins at u and v are exchanged.
int swap_interaction_change(const Graph& graph, const SpinConfig& config, Vertex u, Vertex v);

/// Applies `sweeps` sweeps of a non-exact kind in place, drawing from `rng`.
/// lambda is ignored by the Kawasaki kinds.
void run_sweeps(const Graph& graph, ChainKind kind, double beta, double lambda, SpinConfig& config,
                std::int64_t sweeps, Rng& rng);

struct TraceRow {
  std::int64_t step = 0;
  int magnetization = 0;
  int interaction = 0;
};

/// Runs burn_in + steps sweeps from `initial` (all-plus for grand-canonical
/// chains when absent). Draws come from Rng(spec.seed, stream).
/// When `trace` is non-null one row is appended per sweep, after the initial row.
SpinConfig run_chain(const Graph& graph, const ChainSpec& spec, const IsingParams& params,
                     const std::optional<SpinConfig>& initial = std::nullopt,
                     std::uint64_t stream = 0, std::vector<TraceRow>* trace = nullptr);

/// Kawasaki kinds and the exact kind only. Starts from the configuration with
/// the first (n + k) / 2 vertices plus when `initial` is absent.
SpinConfig run_chain(const Graph& graph, const ChainSpec& spec, const FixedMagParams& params,
                     const std::optional<SpinConfig>& initial = std::nullopt,
                     std::uint64_t stream = 0, std::vector<TraceRow>* trace = nullptr);

enum class EmpiricalMode {
  /// Each sample is the endpoint of an independent run on its own substream.
  independent,
  /// Samples are successive post-burn-in sweeps of a single run.
  trajectory,
};

struct EmpiricalTv {
  double tv = 1.0;
  std::int64_t samples = 0;
  /// Set when no samples were drawn; tv is then 1 by convention.
  bool degenerate = false;
};

EmpiricalTv empirical_tv(const Graph& graph, const ChainSpec& spec, const IsingParams& params,
                         std::int64_t samples, EmpiricalMode mode = EmpiricalMode::independent,
                         const OracleOptions& options = {});
EmpiricalTv empirical_tv(const Graph& graph, const ChainSpec& spec, const FixedMagParams& params,
                         std::int64_t samples, EmpiricalMode mode = EmpiricalMode::independent,
                         const OracleOptions& options = {});

/// Dense one-step kernel over an explicit list of bit-encoded states.
struct TransitionMatrix {
  std::vector<std::uint64_t> states;
  std::vector<double> entries;

  std::size_t size() const noexcept { return states.size(); }
  double at(std::size_t from, std::size_t to) const { return entries[from * states.size() + to]; }
  double& at(std::size_t from, std::size_t to) { return entries[from * states.size() + to]; }
};

/// Kernel of one Glauber update or one SW move on all 2^n states (n <= 8).
TransitionMatrix transition_matrix(const Graph& graph, ChainKind kind, const IsingParams& params);
/// Kernel of one Kawasaki proposal on Sigma(k) (n <= 8).
TransitionMatrix transition_matrix(const Graph& graph, ChainKind kind, const FixedMagParams& params);

struct BalanceReport {
  /// max |pi(x) P(x,y) - pi(y) P(y,x)|
  double reversibility = 0.0;
  /// max |(pi P)(y) - pi(y)|
  double stationarity = 0.0;
  /// max |sum_y P(x,y) - 1|
  double row_sum = 0.0;
  bool irreducible = false;
};

/// `pi` is indexed like matrix.states.
BalanceReport check_balance(const TransitionMatrix& matrix, const std::vector<double>& pi);

}  // namespace fixmag
