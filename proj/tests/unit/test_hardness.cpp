#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fixmag/errors.hpp"
#include "fixmag/hardness.hpp"
#include "fixmag/rng.hpp"
#include "fixmag/tree.hpp"

namespace fixmag {
namespace {

GadgetSpec small_spec(int n, int m, int depth, int match = 1) {
  GadgetSpec spec;
  spec.n = n;
  spec.overrides = GadgetOverrides{m, 0, depth, match};
  return spec;
}

TEST(GadgetParameters, DerivedFromFormulas) {
  GadgetSpec spec;
  spec.delta = 3;
  spec.n = 1024;
  spec.theta = 0.1;
  spec.psi = 0.1;
  const auto p = gadget_parameters(spec);
  EXPECT_EQ(p.m, 2);
  EXPECT_EQ(p.tree_depth, 1);
  EXPECT_EQ(p.m_prime, 4);
  EXPECT_EQ(p.match_size, 1);
  EXPECT_EQ(p.side, 1028);
  EXPECT_EQ(p.n_gadget, 2 * (1024 + 4 + 2));
}

TEST(GadgetParameters, Errors) {
  GadgetSpec spec;
  spec.n = 100;
  spec.theta = 0.2;
  EXPECT_THROW(gadget_parameters(spec), Error);
  auto bad = small_spec(10, 2, 1);
  bad.overrides->m_prime = 3;
  EXPECT_THROW(gadget_parameters(bad), Error);
  EXPECT_THROW(gadget_parameters(small_spec(1, 1, 0)), Error);
  auto d2 = small_spec(10, 1, 0);
  d2.delta = 2;
  EXPECT_THROW(gadget_parameters(d2), Error);
}

struct GadgetCase {
  int delta;
  int n;
  int m;
  int depth;
  std::uint64_t seed;
};

class GadgetInvariants : public ::testing::TestWithParam<GadgetCase> {};

TEST_P(GadgetInvariants, DegreesTerminalsAndSides) {
  const auto c = GetParam();
  GadgetSpec spec = small_spec(c.n, c.m, c.depth);
  spec.delta = c.delta;
  spec.max_attempts = 10000;
  const Gadget g = build_gadget(spec, c.seed);
  EXPECT_EQ(g.graph.size(), g.params.n_gadget);
  EXPECT_EQ(static_cast<int>(g.terminals_left.size()), c.m);
  EXPECT_EQ(static_cast<int>(g.terminals_right.size()), c.m);
  std::set<Vertex> terminals(g.terminals_left.begin(), g.terminals_left.end());
  terminals.insert(g.terminals_right.begin(), g.terminals_right.end());
  int low = 0;
  for (Vertex v = 0; v < g.graph.size(); ++v) {
    const int d = g.graph.degree(v);
    if (terminals.count(v)) {
      EXPECT_EQ(d, c.delta - 1);
    } else {
      EXPECT_EQ(d, c.delta) << v;
    }
    low += d == c.delta - 1;
  }
  EXPECT_EQ(low, 2 * c.m);
  const int side = g.params.side;
  for (const Edge& e : g.graph.edges())
    if (e.v < 2 * side) EXPECT_TRUE(e.u < side && e.v >= side);
  EXPECT_EQ(static_cast<int>(g.w0.size()), 2 * g.params.m_prime);
  EXPECT_EQ(static_cast<int>(g.u0.size()), 2 * c.n);
  EXPECT_EQ(g.u1, g.u0.front());
}

INSTANTIATE_TEST_SUITE_P(Cases, GadgetInvariants,
                         ::testing::Values(GadgetCase{3, 20, 2, 1, 1}, GadgetCase{3, 40, 4, 2, 2},
                                           GadgetCase{3, 1, 2, 0, 3}, GadgetCase{4, 30, 3, 1, 4},
                                           GadgetCase{4, 50, 1, 2, 5}, GadgetCase{4, 25, 2, 1, 6},
                                           GadgetCase{3, 200, 4, 2, 7}));

TEST(Gadget, SameSeedSameEdges) {
  const auto spec = small_spec(30, 2, 1);
  const Gadget a = build_gadget(spec, 11);
  const Gadget b = build_gadget(spec, 11);
  EXPECT_TRUE(std::equal(a.graph.edges().begin(), a.graph.edges().end(), b.graph.edges().begin(),
                         b.graph.edges().end()));
  EXPECT_EQ(a.terminals_left, b.terminals_left);
}

TEST(Gadget, MatchingFailureIsReported) {
  auto spec = small_spec(1, 2, 0);
  spec.max_attempts = 1;
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    try {
      build_gadget(spec, seed);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::sampler_failure);
      ++failures;
    }
  }
  EXPECT_GT(failures, 0);
}

TEST(Phase, Examples) {
  const Gadget g = build_gadget(small_spec(10, 2, 1), 3);
  EXPECT_EQ(phase(g, SpinConfig::all_plus(g.graph.size())), 1);
  EXPECT_EQ(phase(g, SpinConfig::all_minus(g.graph.size())), -1);

  std::vector<Spin> spins(g.graph.size(), 1);
  int i = 0;
  for (Vertex v : g.u0) spins[v] = (i++ % 2 == 0) ? Spin{-1} : Spin{1};
  spins[g.u1] = -1;
  int sum = 0;
  for (Vertex v : g.u0) sum += spins[v];
  ASSERT_EQ(sum, 0);
  const SpinConfig tie(spins);
  EXPECT_EQ(phase(g, tie), -1);
  EXPECT_EQ(phase(g, tie.flipped()), 1);
}

TEST(Phase, AntiCommutesWithGlobalFlip) {
  const Gadget g = build_gadget(small_spec(12, 2, 1), 8);
  Rng rng(4);
  for (int t = 0; t < 500; ++t) {
    std::vector<Spin> spins(g.graph.size());
    for (auto& s : spins) s = rng.bernoulli(0.5) ? Spin{1} : Spin{-1};
    const SpinConfig c(spins);
    EXPECT_EQ(phase(g, c.flipped()), -phase(g, c));
  }
}

TEST(MajoritySize, FloorAndComplement) {
  EXPECT_EQ(majority_size(8, 0.75), 6);
  EXPECT_EQ(majority_size(3, 2.0 / 3.0), 2);
  for (int h = 1; h <= 30; ++h)
    for (double g : {0.55, 0.6, 2.0 / 3.0, 0.75, 0.8, 0.9})
      EXPECT_EQ(majority_size(h, g) + (h - majority_size(h, g)), h);
}

class Reduction : public ::testing::Test {
 protected:
  static constexpr double kBeta = 2.0;
  GadgetSpec spec = small_spec(4, 2, 0);
};

TEST_F(Reduction, ArithmeticAndAssembly) {
  const Graph host = cycle_graph(8);
  const double ec = eta_c(3, kBeta).value;
  const double eta = 0.1;
  const auto r = build_reduction(host, 0.75, spec, eta, kBeta, 5);
  EXPECT_EQ(r.h_plus, 6);
  EXPECT_EQ(r.h_minus, 2);
  EXPECT_EQ(r.M_star, 4);
  EXPECT_FALSE(r.demonstration);
  const int ng = r.gadget.params.n_gadget;
  EXPECT_EQ(r.N, 8 * ng + r.s);
  EXPECT_EQ(r.composite.size(), r.N);
  EXPECT_LE(std::fabs(2.0 * spec.n * r.M_star * ec - eta * r.N), std::sqrt(spec.n * 8.0));
  EXPECT_EQ(r.ell, static_cast<int>(std::floor(r.N * (eta + 1.0) / 2.0)));
  EXPECT_EQ(static_cast<int>(r.crossing_edges.size()), 2 * 1 * host.edge_count());
  EXPECT_EQ(r.composite.edge_count(), r.decoupled.edge_count() + 2 * host.edge_count());
  EXPECT_EQ(r.composite.max_degree(), 3);
  std::set<Vertex> touched;
  for (const Edge& e : r.crossing_edges) {
    EXPECT_TRUE(touched.insert(e.u).second);
    EXPECT_TRUE(touched.insert(e.v).second);
  }
  for (Vertex v = r.N - r.s; v < r.N; ++v) EXPECT_EQ(r.composite.degree(v), 0);
}

TEST_F(Reduction, DemonstrationMode) {
  const auto r = build_reduction(path_graph(3), 0.5, spec, 0.0, 3.0, 1);
  EXPECT_TRUE(r.demonstration);
  EXPECT_EQ(r.s, 0);
  EXPECT_EQ(r.k_target, 2 * r.ell - r.N);
  EXPECT_EQ(r.h_plus, 1);
  EXPECT_EQ(r.h_minus, 2);
  const auto phases = phase_vector(r, SpinConfig::all_plus(r.N));
  EXPECT_EQ(phases, std::vector<int>(3, 1));
  try {
    build_reduction(path_graph(3), 0.5, spec, 0.0, 0.5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::regime);
  }
  try {
    build_reduction(path_graph(3), 0.75, spec, 0.0, 3.0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::regime);
  }
}

TEST_F(Reduction, Errors) {
  EXPECT_THROW(build_reduction(star_graph(3), 0.75, spec, 0.1, kBeta, 1), Error);
  try {
    build_reduction(cycle_graph(8), 0.75, spec, 0.1, 1.0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::regime);
  }
  try {
    build_reduction(cycle_graph(8), 0.55, spec, 0.5, kBeta, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::regime);
  }
  GadgetSpec derived;
  derived.n = 1024;
  EXPECT_THROW(build_reduction(cycle_graph(8), 0.75, derived, 0.1, kBeta, 1), Error);
}

TEST(ThetaGamma, Examples) {
  const auto tg = theta_gamma(1.0, 0.7);
  EXPECT_NEAR(tg.theta, 0.42 * std::exp(0.5) + 0.58 * std::exp(-0.5), 1e-15);
  EXPECT_NEAR(tg.theta, 1.0443, 1e-4);
  EXPECT_NEAR(tg.gamma, 1.2110012140853803, 1e-12);
  for (double beta : {0.5, 1.0, 2.0}) {
    const auto half = theta_gamma(beta, 0.5);
    EXPECT_NEAR(half.theta, std::cosh(beta / 2), 1e-15);
    EXPECT_NEAR(half.gamma, std::cosh(beta / 2), 1e-15);
  }
  EXPECT_THROW(theta_gamma(1.0, 0.4), Error);
  EXPECT_THROW(theta_gamma(1.0, 1.1), Error);
}

TEST(ThetaGamma, StrictOrderingOnGrid) {
  for (double beta = 0.05; beta <= 6.0; beta += 0.05)
    for (double q = 0.505; q < 1.0; q += 0.005) {
      const auto tg = theta_gamma(beta, q);
      EXPECT_LT(tg.theta, tg.gamma) << beta << " " << q;
    }
}

TEST(Recovery, LinearShiftAndSlack) {
  RecoveryInputs in;
  in.log_z_free = 40.0;
  in.log_z_fixed = 30.0;
  in.match_size = 2;
  in.host_edges = 5;
  in.n = 100;
  in.h = 6;
  in.beta = 2.0;
  in.q = 0.9;
  const auto base = recover_cut_interval(in);
  const auto tg = theta_gamma(2.0, 0.9);
  const double denom = 4.0 * std::log(tg.gamma / tg.theta);
  const double t = (10.0 + 4.0 * 5 * std::log(tg.gamma) - 0.5 * std::log(600.0)) / denom;
  EXPECT_NEAR(base.center, t, 1e-12);
  EXPECT_NEAR(base.upper, t, 1e-12);
  EXPECT_NEAR(base.lower, t - 6 * std::log(2.0) / denom, 1e-12);

  auto shifted = in;
  shifted.log_z_free += 1.7;
  EXPECT_NEAR(recover_cut_interval(shifted).center - base.center, 1.7 / denom, 1e-12);

  auto slack = in;
  slack.C = 3.0;
  slack.C_prime = 2.0;
  const auto wide = recover_cut_interval(slack);
  EXPECT_NEAR(wide.upper - wide.center, std::log(3.0) / denom, 1e-12);
  EXPECT_NEAR(wide.center - wide.lower, (6 * std::log(2.0) - std::log(2.0)) / denom, 1e-12);
}

TEST(Recovery, DecreasingInFixedMass) {
  RecoveryInputs in;
  in.match_size = 1;
  in.host_edges = 3;
  in.n = 10;
  in.h = 3;
  in.beta = 3.0;
  in.q = 0.95;
  in.log_z_free = 20.0;
  double previous = INFINITY;
  for (double lz = 0.0; lz < 20.0; lz += 0.5) {
    in.log_z_fixed = lz;
    const double c = recover_cut_interval(in).center;
    EXPECT_LT(c, previous);
    previous = c;
  }
  in.q = 0.5;
  try {
    recover_cut_interval(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::regime);
  }
}

TEST(Mebc, Examples) {
  EXPECT_EQ(brute_force_mebc(cycle_graph(4), 0.5), 2);
  EXPECT_EQ(brute_force_mebc(empty_graph(6), 0.5), 0);
  EXPECT_EQ(brute_force_mebc(complete_graph(4), 0.5), 4);
  EXPECT_EQ(brute_force_mebc(path_graph(3), 0.5), 1);
  EXPECT_EQ(brute_force_mebc(cycle_graph(10), 0.7), 2);
  try {
    brute_force_mebc(empty_graph(21), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::capacity);
  }
}

TEST(Mebc, AgreesWithComplementAndBounds) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int h = 4 + static_cast<int>(rng.below(9));
    const Graph g = random_bounded_degree_graph(h, 3, 3 * h, rng);
    const int b = brute_force_mebc(g, 0.5);
    EXPECT_GE(b, 0);
    EXPECT_LE(b, g.edge_count());
    if (h % 2 == 0) EXPECT_EQ(b, brute_force_mebc(g, 0.5 + 1e-3));
  }
}

TEST(PhaseExperiment, SymmetricPhasesAndAlignedMagnetization) {
  const Gadget g = build_gadget(small_spec(40, 2, 1), 21);
  const ChainSpec sw{ChainKind::sw_ghost, 20, 0, 20};
  const auto report = phase_experiment(g, 2.0, sw, 80, 3);
  ASSERT_EQ(report.phases.size(), 80u);
  EXPECT_GE(report.plus_frequency, 0.5 - 3 * std::sqrt(0.25 / 80));
  EXPECT_LE(report.plus_frequency, 0.5 + 3 * std::sqrt(0.25 / 80));
  EXPECT_GT(report.mean_given_plus, 0.0);
  EXPECT_LT(report.mean_given_minus, 0.0);
  EXPECT_GE(report.aligned_runs, 76);

  const auto again = phase_experiment(g, 2.0, sw, 80, 3, 3);
  EXPECT_EQ(again.phases, report.phases);
  EXPECT_EQ(again.aligned_means, report.aligned_means);
  EXPECT_THROW(phase_experiment(g, 2.0, ChainSpec{ChainKind::kawasaki_local, 1, 0, 0}, 1, 0), Error);
}

}  // namespace
}  // namespace fixmag
