#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fixmag/annealing.hpp"
#include "fixmag/chains.hpp"
#include "fixmag/errors.hpp"
#include "fixmag/exact.hpp"
#include "fixmag/graph.hpp"
#include "fixmag/hardness.hpp"
#include "fixmag/io.hpp"
#include "fixmag/rng.hpp"
#include "fixmag/sample_k.hpp"
#include "fixmag/tree.hpp"

#ifndef FIXMAG_VERSION
#define FIXMAG_VERSION "0.0.0"
#endif

namespace {

using fixmag::Json;

enum Exit { ok = 0, usage = 2, capacity = 3, regime = 4, sampler = 5 };

int exit_code(fixmag::ErrorKind kind) {
  switch (kind) {
    case fixmag::ErrorKind::invalid_argument:
      return usage;
    case fixmag::ErrorKind::capacity:
      return capacity;
    case fixmag::ErrorKind::regime:
      return regime;
    case fixmag::ErrorKind::sampler_failure:
      return sampler;
  }
  return sampler;
}

std::string fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

// ---- graph input ----

fixmag::Graph family_graph(const std::string& text) {
  fixmag::Graph out;
  bool first = true;
  std::stringstream parts(text);
  std::string part;
  while (std::getline(parts, part, '+')) {
    const auto colon = part.find(':');
    fixmag::require(colon != std::string::npos, "family must look like name:n, got \"" + part + "\"");
    const std::string name = part.substr(0, colon);
    int n = 0;
    try {
      n = std::stoi(part.substr(colon + 1));
    } catch (const std::exception&) {
      fixmag::fail(fixmag::ErrorKind::invalid_argument, "family size must be an integer in \"" + part + "\"");
    }
    fixmag::Graph g;
    if (name == "path")
      g = fixmag::path_graph(n);
    else if (name == "cycle")
      g = fixmag::cycle_graph(n);
    else if (name == "complete")
      g = fixmag::complete_graph(n);
    else if (name == "star")
      g = fixmag::star_graph(n);
    else if (name == "empty")
      g = fixmag::empty_graph(n);
    else
      fixmag::fail(fixmag::ErrorKind::invalid_argument, "unknown graph family \"" + name + "\"");
    out = first ? g : fixmag::disjoint_union(out, g);
    first = false;
  }
  fixmag::require(!first, "empty graph family");
  return out;
}

struct GraphInput {
  std::string file;
  std::string family;

  void add(CLI::App* sub, const std::string& name = "graph") {
    auto* f = sub->add_option("--" + name, file, "graph JSON file {n, delta_cap, edges}");
    auto* g = sub->add_option("--" + name + "-family", family,
                              "named graph, e.g. cycle:8 or complete:2+complete:2");
    f->excludes(g);
  }

  fixmag::Graph load() const {
    if (!file.empty()) return fixmag::read_graph_file(file);
    fixmag::require(!family.empty(), "a graph file or a graph family is required");
    return family_graph(family);
  }
};

// ---- output ----

struct Output {
  Json result = Json::object();
  std::vector<std::pair<std::string, std::string>> table;

  template <class T>
  void row(const std::string& key, const T& value) {
    std::ostringstream s;
    s << std::setprecision(10) << value;
    table.emplace_back(key, s.str());
  }
};

Json parameters_of(const CLI::App* sub) {
  Json params = Json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help") continue;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      if (opt->get_type_size() == 0)
        params[name] = opt->count();
      else if (results.size() == 1)
        params[name] = results.front();
      else
        params[name] = results;
    } else if (!opt->get_default_str().empty()) {
      params[name] = opt->get_default_str();
    }
  }
  return params;
}

void emit(const CLI::App* sub, std::optional<std::uint64_t> seed, std::chrono::steady_clock::time_point start,
          const Output& out) {
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json manifest = {{"command", sub->get_name()},
                   {"parameters", parameters_of(sub)},
                   {"seed", seed ? Json(*seed) : Json(nullptr)},
                   {"version", FIXMAG_VERSION},
                   {"wall_seconds", seconds}};
  Json doc = {{"manifest", manifest}, {"result", out.result}, {"result_hash", fnv1a(out.result.dump())}};
  std::cout << doc.dump(2) << '\n';

  std::size_t width = 0;
  for (const auto& [k, v] : out.table) width = std::max(width, k.size());
  std::cerr << sub->get_name() << '\n';
  for (const auto& [k, v] : out.table) std::cerr << "  " << std::left << std::setw(static_cast<int>(width)) << k
                                                 << "  " << v << '\n';
}

Json trace_json(const std::vector<fixmag::SearchStep>& trace) {
  Json out = Json::array();
  for (const auto& s : trace)
    out.push_back({{"iteration", s.iteration},
                   {"lambda", s.lambda},
                   {"k_bar", finite_or_null(s.k_bar)},
                   {"draws", s.draws},
                   {"hit", s.hit},
                   {"remaining", s.remaining}});
  return out;
}

int resolve_k(int n, const std::optional<double>& eta, const std::optional<int>& k) {
  if (k) return *k;
  fixmag::require(eta.has_value(), "either --eta or --k is required");
  return fixmag::target_k(n, *eta);
}

struct GadgetFlags {
  fixmag::GadgetSpec spec;
  std::optional<int> m, m_prime, tree_depth, match_size;

  void add(CLI::App* sub) {
    sub->add_option("--delta", spec.delta, "maximum degree")->capture_default_str();
    sub->add_option("--n", spec.n, "core size parameter n")->required();
    sub->add_option("--theta", spec.theta, "theta in (0, 1/8)")->capture_default_str();
    sub->add_option("--psi", spec.psi, "psi in (0, 1/8)")->capture_default_str();
    sub->add_option("--m", m, "override: trees per side");
    sub->add_option("--m-prime", m_prime, "override: degree-(delta-1) core vertices per side");
    sub->add_option("--tree-depth", tree_depth, "override: tree depth");
    sub->add_option("--match-size", match_size, "override: crossing matching size per side");
    sub->add_option("--max-attempts", spec.max_attempts, "matching draws before failing")->capture_default_str();
  }

  fixmag::GadgetSpec resolve() const {
    fixmag::GadgetSpec s = spec;
    if (m || m_prime || tree_depth || match_size) {
      fixmag::require(m && tree_depth && match_size, "overrides need --m, --tree-depth and --match-size together");
      s.overrides = fixmag::GadgetOverrides{*m, m_prime.value_or(0), *tree_depth, *match_size};
    }
    return s;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ising model at fixed magnetization: exact oracles, samplers, counters and reductions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FIXMAG_VERSION);
  int jobs = 1;
  app.add_option("--jobs", jobs, "worker threads for parallel inner loops")->capture_default_str();
  std::uint64_t seed = 0;
  auto start = std::chrono::steady_clock::now();
  std::function<void()> action;
  const CLI::App* active = nullptr;
  bool stochastic = false;
  Output out;

  // tree
  auto* tree = app.add_subcommand("tree", "tree fixed point L* and eta+");
  int t_delta = 3;
  double t_beta = 0.0, t_lambda = 1.0;
  tree->add_option("--delta", t_delta)->required();
  tree->add_option("--beta", t_beta)->required();
  tree->add_option("--lambda", t_lambda)->capture_default_str();
  tree->callback([&] {
    active = tree;
    action = [&] {
      const auto s = fixmag::solve_tree(t_delta, t_beta, t_lambda);
      out.result = {{"delta", t_delta},
                    {"beta", t_beta},
                    {"lambda", t_lambda},
                    {"beta_c", fixmag::beta_critical(t_delta)},
                    {"L_star", s.L_star},
                    {"eta_plus", s.eta_plus},
                    {"residual", s.residual},
                    {"low_precision", s.low_precision}};
      out.row("beta_c", fixmag::beta_critical(t_delta));
      out.row("L_star", s.L_star);
      out.row("eta_plus", s.eta_plus);
    };
  });

  // exact
  auto* exact = app.add_subcommand("exact", "exact partition functions by enumeration");
  GraphInput e_graph;
  e_graph.add(exact);
  double e_beta = 0.0;
  std::optional<double> e_lambda;
  std::optional<int> e_k;
  int e_cap = 24;
  exact->add_option("--beta", e_beta)->required();
  auto* e_lambda_opt = exact->add_option("--lambda", e_lambda, "grand-canonical mode");
  auto* e_k_opt = exact->add_option("--k", e_k, "fixed-magnetization mode");
  e_lambda_opt->excludes(e_k_opt);
  exact->add_option("--cap", e_cap, "enumeration cap on n")->capture_default_str();
  exact->callback([&] {
    active = exact;
    action = [&] {
      fixmag::require(e_lambda || e_k, "exact needs --lambda or --k");
      const fixmag::Graph g = e_graph.load();
      const fixmag::ExactOracle oracle(g, {e_cap, jobs});
      out.result = {{"n", g.size()}, {"edges", g.edge_count()}, {"beta", e_beta}};
      if (e_lambda) {
        const fixmag::IsingParams p{e_beta, *e_lambda};
        fixmag::validate(p);
        const double log_z = oracle.log_partition_function(p);
        out.result.update({{"mode", "lambda"},
                           {"lambda", *e_lambda},
                           {"log_Z", log_z},
                           {"Z", finite_or_null(std::exp(log_z))},
                           {"mean_magnetization", oracle.mean_magnetization(p)},
                           {"variance_x", oracle.variance_of_x(p)}});
        out.row("log_Z", log_z);
        out.row("Z", std::exp(log_z));
      } else {
        fixmag::validate(fixmag::FixedMagParams{e_beta, *e_k}, g.size());
        const double log_z = oracle.log_fixed_partition(e_beta, *e_k);
        out.result.update({{"mode", "k"}, {"k", *e_k}, {"log_Z_fix", log_z}, {"Z_fix", finite_or_null(std::exp(log_z))}});
        out.row("log_Z_fix", log_z);
        out.row("Z_fix", std::exp(log_z));
      }
    };
  });

  // sample
  auto* sample = app.add_subcommand("sample", "Sample-k: fixed-magnetization sample by activity search");
  GraphInput s_graph;
  s_graph.add(sample);
  fixmag::SampleKConfig s_cfg;
  std::optional<double> s_eta;
  std::optional<int> s_k;
  std::string s_sampler = "exact";
  sample->add_option("--beta", s_cfg.beta)->required();
  auto* s_eta_opt = sample->add_option("--eta", s_eta, "target eta; k = 2 floor((eta+1) n / 2) - n");
  auto* s_k_opt = sample->add_option("--k", s_k, "explicit target magnetization");
  s_eta_opt->excludes(s_k_opt);
  sample->add_option("--eps", s_cfg.epsilon)->capture_default_str();
  sample->add_option("--delta", s_cfg.delta)->capture_default_str();
  sample->add_option("--sampler", s_sampler, "exact, glauber or sw")->capture_default_str();
  sample->add_option("--steps", s_cfg.sampler.steps, "chain sweeps per draw")->capture_default_str();
  sample->add_option("--burn-in", s_cfg.sampler.burn_in)->capture_default_str();
  sample->add_option("--C", s_cfg.C)->capture_default_str();
  sample->add_option("--C-prime", s_cfg.C_prime)->capture_default_str();
  sample->add_option("--batch", s_cfg.batch_override, "replace the batch size N")->capture_default_str();
  sample->add_option("--seed", seed)->required();
  sample->callback([&] {
    active = sample;
    stochastic = true;
    action = [&] {
      const fixmag::Graph g = s_graph.load();
      s_cfg.sampler.kind = fixmag::parse_chain_kind(s_sampler);
      s_cfg.seed = seed;
      fixmag::SampleKResult r;
      if (s_k) {
        auto backend = fixmag::make_ising_sampler(g, s_cfg.beta, s_cfg.sampler, {24, jobs});
        fixmag::Rng rng(seed, 0);
        r = fixmag::sample_magnetization(g, s_cfg, *s_k, *backend, rng);
      } else {
        fixmag::require(s_eta.has_value(), "sample needs --eta or --k");
        s_cfg.eta = *s_eta;
        r = fixmag::sample_fixed_mag(g, s_cfg, {24, jobs});
      }
      out.result = {{"n", g.size()},
                    {"k", r.k},
                    {"magnetization", fixmag::magnetization(r.config)},
                    {"config", fixmag::spins_to_json(r.config)},
                    {"fallback", r.fallback},
                    {"fallback_reason", r.fallback_reason},
                    {"lambda_min", r.bounds.lambda_min},
                    {"lambda_max", r.bounds.lambda_max},
                    {"supercritical", r.bounds.supercritical},
                    {"grid_points", r.grid_points},
                    {"batch", r.batch},
                    {"iteration_limit", r.iteration_limit},
                    {"epsilon_prime", finite_or_null(r.epsilon_prime)},
                    {"total_draws", r.total_draws},
                    {"trace", trace_json(r.trace)}};
      out.row("k", r.k);
      out.row("magnetization", fixmag::magnetization(r.config));
      out.row("fallback", r.fallback ? r.fallback_reason : "no");
      out.row("grid_points", r.grid_points);
      out.row("total_draws", r.total_draws);
    };
  });

  // count
  auto* count = app.add_subcommand("count", "annealing estimate of Z^fix");
  GraphInput c_graph;
  c_graph.add(count);
  double c_beta = 0.0;
  std::optional<double> c_eta;
  std::optional<int> c_k;
  std::string c_sampler = "exact";
  fixmag::ChainSpec c_chain;
  fixmag::CountOptions c_opts;
  int c_delta = 3;
  std::string c_stages_csv;
  bool c_oracle = false;
  count->add_option("--beta", c_beta)->required();
  auto* c_eta_opt = count->add_option("--eta", c_eta);
  auto* c_k_opt = count->add_option("--k", c_k);
  c_eta_opt->excludes(c_k_opt);
  count->add_option("--eps", c_opts.epsilon)->capture_default_str();
  count->add_option("--sampler", c_sampler, "exact, kawasaki_local, kawasaki_global, glauber or sw")
      ->capture_default_str();
  count->add_option("--steps", c_chain.steps)->capture_default_str();
  count->add_option("--burn-in", c_chain.burn_in)->capture_default_str();
  count->add_option("--delta", c_delta, "degree bound used by Sample-k")->capture_default_str();
  count->add_option("--samples", c_opts.samples_override, "samples per stage instead of ceil(8 l / eps^2)")
      ->capture_default_str();
  count->add_flag("--median", c_opts.median_of_three, "median of three independent runs");
  count->add_option("--stages-csv", c_stages_csv, "write per-stage diagnostics");
  count->add_flag("--oracle", c_oracle, "compare with the exact value");
  count->add_option("--seed", seed)->required();
  count->callback([&] {
    active = count;
    stochastic = true;
    action = [&] {
      const fixmag::Graph g = c_graph.load();
      const int k = resolve_k(g.size(), c_eta, c_k);
      c_chain.kind = fixmag::parse_chain_kind(c_sampler);
      auto sampler = fixmag::make_fixed_sampler(g, k, c_chain, c_delta, c_opts.epsilon, {24, jobs});
      const auto r = fixmag::count_fixed(g, c_beta, k, *sampler, seed, c_opts);
      Json stages = Json::array();
      for (const auto& s : r.stages)
        stages.push_back({{"beta", s.beta}, {"beta_next", s.beta_next}, {"mean", s.mean}, {"variance", s.variance}});
      out.result = {{"n", g.size()},
                    {"k", k},
                    {"beta", c_beta},
                    {"log_estimate", r.log_estimate},
                    {"estimate", finite_or_null(std::exp(r.log_estimate))},
                    {"log_binomial", r.log_binomial},
                    {"schedule_length", r.schedule.length()},
                    {"samples_per_stage", c_opts.samples_override > 0 ? c_opts.samples_override
                                                                      : r.schedule.sample_count},
                    {"sampler_tv", r.schedule.sampler_tv},
                    {"stages", stages}};
      if (!r.run_estimates.empty()) out.result["run_estimates"] = r.run_estimates;
      out.row("log_estimate", r.log_estimate);
      out.row("stages", r.schedule.length());
      if (c_oracle) {
        const double exact_log = fixmag::ExactOracle(g, {24, jobs}).log_fixed_partition(c_beta, k);
        out.result["log_exact"] = exact_log;
        out.result["relative_error"] = std::expm1(r.log_estimate - exact_log);
        out.row("log_exact", exact_log);
        out.row("relative_error", std::expm1(r.log_estimate - exact_log));
      }
      if (!c_stages_csv.empty()) {
        std::ofstream f(c_stages_csv);
        fixmag::require(f.good(), "cannot write " + c_stages_csv);
        fixmag::write_stages_csv(f, r.stages);
      }
    };
  });

  // kawasaki
  auto* kawasaki = app.add_subcommand("kawasaki", "Kawasaki dynamics at fixed magnetization");
  GraphInput k_graph;
  k_graph.add(kawasaki);
  double k_beta = 0.0;
  std::optional<double> k_eta;
  std::optional<int> k_k;
  std::string k_variant = "local";
  fixmag::ChainSpec k_chain;
  std::string k_trace;
  kawasaki->add_option("--beta", k_beta)->required();
  auto* k_eta_opt = kawasaki->add_option("--eta", k_eta);
  auto* k_k_opt = kawasaki->add_option("--k", k_k);
  k_eta_opt->excludes(k_k_opt);
  kawasaki->add_option("--variant", k_variant, "local (edge swaps) or global (any pair)")->capture_default_str();
  kawasaki->add_option("--steps", k_chain.steps, "sweeps of n proposals")->required();
  kawasaki->add_option("--burn-in", k_chain.burn_in)->capture_default_str();
  kawasaki->add_option("--trace", k_trace, "CSV trace file (step,M,delta_sigma)");
  kawasaki->add_option("--seed", seed)->required();
  kawasaki->callback([&] {
    active = kawasaki;
    stochastic = true;
    action = [&] {
      const fixmag::Graph g = k_graph.load();
      const int k = resolve_k(g.size(), k_eta, k_k);
      fixmag::require(k_variant == "local" || k_variant == "global", "--variant must be local or global");
      k_chain.kind = k_variant == "local" ? fixmag::ChainKind::kawasaki_local : fixmag::ChainKind::kawasaki_global;
      k_chain.seed = seed;
      std::vector<fixmag::TraceRow> rows;
      const auto final = fixmag::run_chain(g, k_chain, fixmag::FixedMagParams{k_beta, k}, std::nullopt, 0, &rows);
      if (!k_trace.empty()) fixmag::write_trace_csv(k_trace, rows);
      double mean_delta = 0.0;
      for (std::size_t i = 1; i < rows.size(); ++i) mean_delta += rows[i].interaction;
      if (rows.size() > 1) mean_delta /= static_cast<double>(rows.size() - 1);
      out.result = {{"n", g.size()},
                    {"k", k},
                    {"variant", k_variant},
                    {"magnetization", fixmag::magnetization(final)},
                    {"delta_sigma", fixmag::interaction_sum(g, final)},
                    {"mean_delta_sigma", mean_delta},
                    {"trace_rows", rows.size()},
                    {"config", fixmag::spins_to_json(final)}};
      out.row("magnetization", fixmag::magnetization(final));
      out.row("delta_sigma", fixmag::interaction_sum(g, final));
      out.row("mean_delta_sigma", mean_delta);
    };
  });

  // gadget
  auto* gadget = app.add_subcommand("gadget", "random bipartite gadget and optional phase experiment");
  GadgetFlags g_flags;
  g_flags.add(gadget);
  std::string g_out;
  int g_runs = 0;
  double g_beta = 2.0;
  std::string g_sampler = "sw";
  fixmag::ChainSpec g_chain{fixmag::ChainKind::sw_ghost, 20, 0, 20};
  gadget->add_option("--out", g_out, "write the gadget JSON here");
  gadget->add_option("--phase-runs", g_runs, "zero-field runs for the phase experiment")->capture_default_str();
  gadget->add_option("--beta", g_beta)->capture_default_str();
  gadget->add_option("--sampler", g_sampler, "glauber or sw")->capture_default_str();
  gadget->add_option("--steps", g_chain.steps)->capture_default_str();
  gadget->add_option("--burn-in", g_chain.burn_in)->capture_default_str();
  gadget->add_option("--seed", seed)->required();
  gadget->callback([&] {
    active = gadget;
    stochastic = true;
    action = [&] {
      const auto g = fixmag::build_gadget(g_flags.resolve(), seed);
      if (!g_out.empty()) fixmag::write_json_file(g_out, fixmag::gadget_to_json(g));
      out.result = {{"vertices", g.graph.size()},
                    {"edges", g.graph.edge_count()},
                    {"m", g.params.m},
                    {"m_prime", g.params.m_prime},
                    {"tree_depth", g.params.tree_depth},
                    {"match_size", g.params.match_size},
                    {"u1", g.u1},
                    {"terminals_left", g.terminals_left},
                    {"terminals_right", g.terminals_right}};
      out.row("vertices", g.graph.size());
      out.row("m", g.params.m);
      out.row("tree_depth", g.params.tree_depth);
      if (g_runs > 0) {
        g_chain.kind = fixmag::parse_chain_kind(g_sampler);
        const auto rep = fixmag::phase_experiment(g, g_beta, g_chain, g_runs, fixmag::splitmix64(seed), jobs);
        out.result["phase"] = {{"runs", g_runs},
                               {"plus_frequency", rep.plus_frequency},
                               {"mean_given_plus", rep.mean_given_plus},
                               {"mean_given_minus", rep.mean_given_minus},
                               {"aligned_runs", rep.aligned_runs},
                               {"phases", rep.phases}};
        out.row("plus_frequency", rep.plus_frequency);
        out.row("aligned_runs", rep.aligned_runs);
      }
    };
  });

  // reduce
  auto* reduce = app.add_subcommand("reduce", "composite graph from a host graph and gadget copies");
  GraphInput r_host;
  r_host.add(reduce, "host");
  GadgetFlags r_flags;
  r_flags.add(reduce);
  double r_gamma = 0.5, r_eta = 0.0, r_beta = 3.0, r_C = 1.0, r_Cp = 1.0;
  std::string r_out;
  bool r_oracle = false;
  reduce->add_option("--gamma", r_gamma)->capture_default_str();
  reduce->add_option("--eta", r_eta)->capture_default_str();
  reduce->add_option("--beta", r_beta)->capture_default_str();
  reduce->add_option("--C", r_C)->capture_default_str();
  reduce->add_option("--C-prime", r_Cp)->capture_default_str();
  reduce->add_option("--out", r_out, "write the instance JSON here");
  reduce->add_flag("--oracle", r_oracle, "exact Z values, cut interval and brute-force MEBC");
  reduce->add_option("--seed", seed)->required();
  reduce->callback([&] {
    active = reduce;
    stochastic = true;
    action = [&] {
      const fixmag::Graph host = r_host.load();
      const auto r = fixmag::build_reduction(host, r_gamma, r_flags.resolve(), r_eta, r_beta, seed);
      if (!r_out.empty()) fixmag::write_json_file(r_out, fixmag::instance_to_json(r));
      out.result = {{"h", host.size()},
                    {"host_edges", host.edge_count()},
                    {"N", r.N},
                    {"s", r.s},
                    {"h_plus", r.h_plus},
                    {"h_minus", r.h_minus},
                    {"M_star", r.M_star},
                    {"ell", r.ell},
                    {"k", r.k_target},
                    {"crossing_edges", r.crossing_edges.size()},
                    {"demonstration", r.demonstration}};
      out.row("N", r.N);
      out.row("k", r.k_target);
      out.row("crossing_edges", r.crossing_edges.size());
      if (r_oracle) {
        const fixmag::OracleOptions opts{24, jobs};
        const double log_fixed = fixmag::ExactOracle(r.composite, opts).log_fixed_partition(r_beta, r.k_target);
        const double log_free = fixmag::ExactOracle(r.decoupled, opts).log_partition_function({r_beta, 1.0});
        const int b = fixmag::brute_force_mebc(host, r_gamma);
        fixmag::RecoveryInputs in;
        in.log_z_free = log_free;
        in.log_z_fixed = log_fixed;
        in.match_size = r.gadget.params.match_size;
        in.host_edges = host.edge_count();
        in.n = r.gadget.spec.n;
        in.h = host.size();
        in.beta = r_beta;
        in.q = fixmag::tree_marginal_q(r.gadget.spec.delta, r_beta);
        in.C = r_C;
        in.C_prime = r_Cp;
        const auto cut = fixmag::recover_cut_interval(in);
        out.result["oracle"] = {{"log_Z_fix", log_fixed}, {"log_Z_free", log_free}, {"q", in.q}, {"mebc", b},
                                {"T", cut.center},       {"lower", cut.lower},      {"upper", cut.upper}};
        out.row("log_Z_fix", log_fixed);
        out.row("mebc", b);
        out.row("T", cut.center);
      }
    };
  });

  // verify
  auto* verify = app.add_subcommand("verify", "exhaustive checks: extremal, gks, balance, clt");
  std::string v_check;
  int v_delta = 3, v_nmin = 12, v_nmax = 6, v_instances = 100;
  std::vector<double> v_betas{0.3, 0.7, 1.1, 1.5, 2.0};
  std::vector<double> v_lambdas{1.0, 1.2, 1.5, 2.0, 4.0};
  verify->add_option("check", v_check, "extremal, gks, balance or clt")
      ->required()
      ->check(CLI::IsMember({"extremal", "gks", "balance", "clt"}));
  verify->add_option("--delta", v_delta)->capture_default_str();
  verify->add_option("--nmin", v_nmin, "clt: smallest path")->capture_default_str();
  verify->add_option("--nmax", v_nmax, "largest graph size")->capture_default_str();
  verify->add_option("--betas", v_betas)->capture_default_str();
  verify->add_option("--lambdas", v_lambdas)->capture_default_str();
  verify->add_option("--instances", v_instances, "gks and balance: random instances")->capture_default_str();
  verify->add_option("--seed", seed, "gks and balance: instance seed")->capture_default_str();
  verify->callback([&] {
    active = verify;
    stochastic = v_check == "gks" || v_check == "balance";
    action = [&] {
      out.result["check"] = v_check;
      if (v_check == "extremal") {
        fixmag::ExtremalScanOptions opts;
        opts.exhaustive_max_n = v_nmax;
        const auto rep = fixmag::extremal_scan(v_delta, v_nmax, v_betas, v_lambdas, opts);
        out.result.update({{"graphs", rep.graphs_scanned},
                           {"evaluations", rep.evaluations},
                           {"max_gap", rep.max_gap},
                           {"worst", {{"n", rep.worst.n}, {"beta", rep.worst.beta}, {"lambda", rep.worst.lambda}}},
                           {"pass", rep.max_gap <= 1e-9}});
        out.row("graphs", rep.graphs_scanned);
        out.row("max_gap", rep.max_gap);
      } else if (v_check == "gks") {
        fixmag::Rng rng(seed, 0);
        double worst[3] = {INFINITY, INFINITY, INFINITY};
        int done = 0;
        while (done < v_instances) {
          const int n = 2 + static_cast<int>(rng.below(std::max(1, v_nmax - 1)));
          const auto g = fixmag::random_bounded_degree_graph(n, v_delta, 3 * n, rng);
          if (g.edge_count() == 0) continue;
          std::vector<fixmag::Vertex> a, b;
          for (int v = 0; v < n; ++v) {
            if (rng.bernoulli(0.4)) a.push_back(v);
            if (rng.bernoulli(0.4)) b.push_back(v);
          }
          const auto e = g.edges()[rng.below(g.edges().size())];
          const fixmag::IsingParams p{3.0 * rng.uniform(), 1.0 + 3.0 * rng.uniform()};
          const auto s = fixmag::gks_check(g, p, a, b, e);
          worst[0] = std::min(worst[0], s.correlation);
          worst[1] = std::min(worst[1], s.covariance);
          worst[2] = std::min(worst[2], s.edge_monotonicity);
          ++done;
        }
        out.result.update({{"instances", done},
                           {"min_correlation", worst[0]},
                           {"min_covariance", worst[1]},
                           {"min_edge_monotonicity", worst[2]},
                           {"pass", std::min({worst[0], worst[1], worst[2]}) >= -1e-12}});
        out.row("min_correlation", worst[0]);
        out.row("min_covariance", worst[1]);
        out.row("min_edge_monotonicity", worst[2]);
      } else if (v_check == "balance") {
        fixmag::require(v_nmax <= 8, "balance: --nmax must be <= 8");
        fixmag::Rng rng(seed, 0);
        double rev = 0.0, stat = 0.0;
        for (int i = 0; i < v_instances; ++i) {
          const int n = 2 + static_cast<int>(rng.below(std::max(1, v_nmax - 1)));
          const auto g = fixmag::random_bounded_degree_graph(n, v_delta, 3 * n, rng);
          const double beta = 2.0 * rng.uniform();
          const double lambda = 1.0 + 2.0 * rng.uniform();
          const fixmag::ExactOracle oracle(g);
          for (auto kind : {fixmag::ChainKind::glauber, fixmag::ChainKind::sw_ghost}) {
            const fixmag::IsingParams p{beta, lambda};
            const auto m = fixmag::transition_matrix(g, kind, p);
            const auto rep = fixmag::check_balance(m, oracle.config_probabilities(p));
            rev = std::max(rev, rep.reversibility);
            stat = std::max(stat, rep.stationarity);
          }
          for (auto kind : {fixmag::ChainKind::kawasaki_local, fixmag::ChainKind::kawasaki_global}) {
            for (int k = -n; k <= n; k += 2) {
              const auto m = fixmag::transition_matrix(g, kind, fixmag::FixedMagParams{beta, k});
              const auto rep = fixmag::check_balance(m, oracle.fixed_distribution({beta, k}).probabilities);
              rev = std::max(rev, rep.reversibility);
              stat = std::max(stat, rep.stationarity);
            }
          }
        }
        out.result.update({{"instances", v_instances},
                           {"max_reversibility", rev},
                           {"max_stationarity", stat},
                           {"pass", rev <= 1e-12 && stat <= 1e-10}});
        out.row("max_reversibility", rev);
        out.row("max_stationarity", stat);
      } else {
        const double beta = v_betas.empty() ? 0.8 : v_betas.front();
        const double lambda = v_lambdas.empty() ? 1.5 : v_lambdas.front();
        Json devs = Json::array();
        bool decreasing = true;
        double previous = INFINITY;
        for (int n = v_nmin; n <= v_nmax; ++n) {
          const double d = fixmag::clt_deviation(fixmag::path_graph(n), {beta, lambda});
          devs.push_back({{"n", n}, {"deviation", d}});
          decreasing = decreasing && d < previous;
          previous = d;
          out.row("n=" + std::to_string(n), d);
        }
        out.result.update({{"beta", beta}, {"lambda", lambda}, {"deviations", devs}, {"strictly_decreasing", decreasing}});
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  try {
    start = std::chrono::steady_clock::now();
    action();
    emit(active, stochastic ? std::optional<std::uint64_t>(seed) : std::nullopt, start, out);
  } catch (const fixmag::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return sampler;
  }
  return ok;
}
