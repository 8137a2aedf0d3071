#include <gtest/gtest.h>

#include <cmath>

#include "fixmag/annealing.hpp"
#include "fixmag/errors.hpp"

namespace fixmag {
namespace {

TEST(Schedule, ZeroBetaIsSingleton) {
  const auto s = build_schedule(10, 0.0);
  ASSERT_EQ(s.betas.size(), 1u);
  EXPECT_EQ(s.betas[0], 0.0);
  EXPECT_EQ(s.length(), 0);
}

TEST(Schedule, TenVerticesBetaOne) {
  const auto s = build_schedule(10, 1.0, 0.1);
  EXPECT_EQ(s.length(), 11);
  EXPECT_EQ(s.betas.front(), 0.0);
  EXPECT_EQ(s.betas.back(), 1.0);
  EXPECT_EQ(s.sample_count, 8800);
  EXPECT_NEAR(s.sampler_tv, 0.1 / 88.0, 1e-15);
}

TEST(Schedule, StepsNeverExceedGap) {
  for (int n : {1, 2, 5, 17, 100}) {
    for (double beta : {0.01, 0.3, 1.0, 2.5, 7.0}) {
      const auto s = build_schedule(n, beta);
      const double gap = std::log1p(1.0 / n);
      EXPECT_EQ(s.betas.back(), beta);
      for (int i = 0; i < s.length(); ++i) {
        EXPECT_GT(s.betas[i + 1], s.betas[i]);
        EXPECT_LE(s.betas[i + 1] - s.betas[i], gap * (1 + 1e-12));
      }
    }
  }
  EXPECT_THROW(build_schedule(0, 1.0), Error);
  EXPECT_THROW(build_schedule(4, -1.0), Error);
  EXPECT_THROW(build_schedule(4, 1.0, 0.0), Error);
}

TEST(Ratio, SameBetaIsOne) {
  const Graph g = cycle_graph(4);
  ExactFixedBackend backend(std::make_shared<const ExactOracle>(g), 0);
  Rng rng(1);
  const auto r = estimate_ratio(0.5, 0.5, 10, backend, rng);
  EXPECT_EQ(r.mean, 1.0);
  Rng rng2(1);
  EXPECT_THROW(estimate_ratio(0.5, 0.6, 0, backend, rng2), Error);
}

TEST(Ratio, EdgeAtZeroMagnetizationIsDeterministic) {
  const Graph g = complete_graph(2);
  ExactFixedBackend backend(std::make_shared<const ExactOracle>(g), 0);
  Rng rng(2);
  const auto r = estimate_ratio(0.2, 0.5, 50, backend, rng);
  EXPECT_NEAR(r.mean, std::exp(-0.15), 1e-15);
  EXPECT_EQ(r.variance, 0.0);
}

TEST(Ratio, TermsBoundedByHalfDegreeGap) {
  Rng graphs(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 10 + static_cast<int>(graphs.below(6));
    const Graph g = random_bounded_degree_graph(n, 3, 10000, graphs);
    const auto s = build_schedule(n, 1.5);
    ExactFixedBackend backend(std::make_shared<const ExactOracle>(g), n % 2);
    Rng rng(7, static_cast<std::uint64_t>(trial));
    for (int i = 0; i < s.length(); ++i) {
      const auto r = estimate_ratio(s.betas[i], s.betas[i + 1], 200, backend, rng);
      EXPECT_LE(r.max_term, std::exp(1.5) * (1 + 1e-12));
      EXPECT_GE(r.min_term, std::exp(-1.5) * (1 - 1e-12));
    }
  }
}

TEST(Ratio, StageMeansAreUnbiased) {
  const Graph g = cycle_graph(8);
  const auto oracle = std::make_shared<const ExactOracle>(g);
  ExactFixedBackend backend(oracle, 0);
  const double b = 0.4, b1 = 0.55;
  const double exact = std::exp(oracle->log_fixed_partition(b1, 0) - oracle->log_fixed_partition(b, 0));
  Rng rng(11);
  const auto r = estimate_ratio(b, b1, 200000, backend, rng);
  EXPECT_NEAR(r.mean, exact, 5.0 * std::sqrt(r.variance / 200000.0));
}

TEST(Count, ZeroBetaReturnsBinomialExactly) {
  const Graph g = cycle_graph(12);
  ExactFixedBackend backend(std::make_shared<const ExactOracle>(g), 4);
  const auto out = count_fixed(g, 0.0, 4, backend, 3);
  EXPECT_DOUBLE_EQ(out.log_estimate, std::log(495.0));
  EXPECT_TRUE(out.stages.empty());
}

TEST(Count, FullMagnetization) {
  const Graph g = cycle_graph(6);
  const ExactOracle oracle(g);
  ExactFixedBackend backend(std::make_shared<const ExactOracle>(g), 6);
  CountOptions opts;
  opts.samples_override = 20;
  const auto out = count_fixed(g, 1.3, 6, backend, 1, opts);
  EXPECT_NEAR(out.log_estimate, oracle.log_fixed_partition(1.3, 6), 1e-12);
  EXPECT_NEAR(out.log_estimate, 0.5 * 1.3 * 6, 1e-12);
}

TEST(Count, TwoEdgesWithinTenPercent) {
  const Graph g = disjoint_union(complete_graph(2), complete_graph(2));
  const ExactOracle oracle(g);
  const double exact = oracle.log_fixed_partition(1.0, 0);
  ExactFixedBackend backend(std::make_shared<const ExactOracle>(g), 0);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto out = count_fixed(g, 1.0, 0, backend, seed);
    good += std::fabs(std::exp(out.log_estimate - exact) - 1.0) <= 0.1;
  }
  EXPECT_GE(good, 7);
}

TEST(Count, MedianOfThreeAndDeterminism) {
  const Graph g = cycle_graph(6);
  ExactFixedBackend backend(std::make_shared<const ExactOracle>(g), 0);
  CountOptions opts;
  opts.median_of_three = true;
  opts.samples_override = 300;
  const auto a = count_fixed(g, 0.8, 0, backend, 9, opts);
  const auto b = count_fixed(g, 0.8, 0, backend, 9, opts);
  ASSERT_EQ(a.run_estimates.size(), 3u);
  EXPECT_EQ(a.log_estimate, b.log_estimate);
  auto sorted = a.run_estimates;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(a.log_estimate, sorted[1]);
  EXPECT_THROW(count_fixed(g, 0.8, 1, backend, 9), Error);
}

TEST(Oracle, ChebyshevBoundAndTelescoping) {
  Rng graphs(17);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 4 + static_cast<int>(graphs.below(11));
    const Graph g = random_bounded_degree_graph(n, 3, 10000, graphs);
    const ExactOracle oracle(g);
    const double beta = 0.3 + 2.5 * graphs.uniform();
    const auto s = build_schedule(n, beta);
    for (int k = -n; k <= n; k += 2) {
      for (double r : chebyshev_ratios(oracle, s, k)) {
        EXPECT_GE(r, 1.0 - 1e-12);
        EXPECT_LE(r, std::exp(1.5) * (1 + 1e-12));
      }
      EXPECT_NEAR(telescoped_log_partition(oracle, s, k), oracle.log_fixed_partition(beta, k), 1e-10);
    }
  }
}

TEST(Backends, KawasakiAndSampleKConserveMagnetization) {
  const Graph g = cycle_graph(10);
  const ChainSpec kaw{ChainKind::kawasaki_global, 3, 0, 2};
  auto a = make_fixed_sampler(g, 2, kaw, 3, 0.1);
  const ChainSpec ex{ChainKind::exact, 0, 0, 0};
  auto b = make_fixed_sampler(g, 2, ChainSpec{ChainKind::glauber, 3, 0, 3}, 3, 0.1);
  auto c = make_fixed_sampler(g, 2, ex, 3, 0.1);
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    for (auto* s : {a.get(), b.get(), c.get()}) {
      const int d = s->draw_interaction(0.5, rng);
      EXPECT_LE(std::abs(d), 10);
      EXPECT_EQ((d + 10) % 2, 0);
    }
  }
}

TEST(Backends, SampleKExactBackendTracksLaw) {
  const Graph g = cycle_graph(8);
  const ExactOracle oracle(g);
  SampleKConfig base;
  base.epsilon = 0.01;
  SampleKFixedBackend backend(g, 2, base);
  const double b = 0.3, b1 = 0.45;
  const double exact = std::exp(oracle.log_fixed_partition(b1, 2) - oracle.log_fixed_partition(b, 2));
  Rng rng(21);
  const auto r = estimate_ratio(b, b1, 20000, backend, rng);
  EXPECT_NEAR(r.mean, exact, 0.01);
  EXPECT_LE(backend.fallbacks(), 200);
}

TEST(LogBinomial, Values) {
  EXPECT_NEAR(log_binomial(10, 5), std::log(252.0), 1e-12);
  EXPECT_EQ(log_binomial(7, 0), 0.0);
  EXPECT_THROW(log_binomial(3, 4), Error);
}

}  // namespace
}  // namespace fixmag
