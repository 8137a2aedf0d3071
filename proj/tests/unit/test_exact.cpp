#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <map>
#include <memory>

#include "brute_force.hpp"
#include "fixmag/errors.hpp"
#include "fixmag/exact.hpp"
#include "fixmag/rng.hpp"
#include "fixmag/tree.hpp"

namespace fixmag {
namespace {

using testing::naive_correlation;
using testing::naive_expectation_plus;
using testing::naive_variance_x;
using testing::naive_z;
using testing::naive_zfix;

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

TEST(PartitionFunction, Examples) {
  const Graph k2 = complete_graph(2);
  EXPECT_NEAR(std::exp(partition_function(k2, {0.0, 1.0})), 4.0, 1e-14);
  EXPECT_NEAR(std::exp(partition_function(k2, {1.0, 1.0})), 4.510503860825523, 1e-14);
  EXPECT_NEAR(std::exp(partition_function(k2, {1.0, 1.0})),
              2 * std::exp(0.5) + 2 * std::exp(-0.5), 1e-14);
  for (int n : {1, 5, 12}) EXPECT_NEAR(partition_function(empty_graph(n), {0.7, 1.0}), n * std::log(2.0), 1e-12);
}

TEST(PartitionFunction, CapacityIsEnforced) {
  try {
    partition_function(empty_graph(25), {1.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::capacity);
  }
  OracleOptions small;
  small.enumeration_cap = 4;
  EXPECT_THROW(partition_function(path_graph(5), {1.0, 1.0}, small), Error);
}

TEST(PartitionFunction, ParallelEnumerationIsIdentical) {
  Rng rng(7);
  const Graph g = random_bounded_degree_graph(16, 3, 30, rng);
  OracleOptions one, four;
  four.jobs = 4;
  const ExactOracle a(g, one), b(g, four);
  for (int plus = 0; plus <= 16; ++plus)
    for (int cut = 0; cut <= g.edge_count(); ++cut) EXPECT_EQ(a.state_count(plus, cut), b.state_count(plus, cut));
  EXPECT_EQ(a.log_partition_function({1.3, 1.7}), b.log_partition_function({1.3, 1.7}));
}

TEST(FixedPartition, Examples) {
  const Graph k2 = complete_graph(2);
  for (double beta : {0.0, 0.5, 3.0}) {
    const auto v = fixed_partition_vector(k2, beta);
    EXPECT_NEAR(v.value_at(0), 2 * std::exp(-beta / 2), 1e-14);
    EXPECT_NEAR(v.value_at(2), std::exp(beta / 2), 1e-13);
    EXPECT_NEAR(v.value_at(-2), std::exp(beta / 2), 1e-13);
  }
  const Graph g = cycle_graph(9);
  const auto v = fixed_partition_vector(g, 0.0);
  for (int l = 0; l <= 9; ++l)
    EXPECT_NEAR(v.value_at(2 * l - 9), std::round(std::tgamma(10.0) / (std::tgamma(l + 1.0) * std::tgamma(10.0 - l))),
                1e-9);
  EXPECT_THROW(v.log_at(0), Error);
  EXPECT_THROW(v.log_at(11), Error);
}

TEST(FixedPartition, MatchesNaiveSum) {
  const Graph g = cycle_graph(7);
  const auto v = fixed_partition_vector(g, 1.1);
  for (int k = -7; k <= 7; k += 2)
    EXPECT_LE(rel(v.value_at(k), static_cast<double>(naive_zfix(g, 1.1, k))), 1e-13);
}

TEST(MeanMagnetization, Examples) {
  Rng rng(3);
  for (int i = 0; i < 5; ++i) {
    const Graph g = random_bounded_degree_graph(10, 3, 12, rng);
    EXPECT_EQ(mean_magnetization(g, {1.5, 1.0}), 0.0);
  }
  for (double lambda : {0.5, 1.0, 2.0, 3.0})
    EXPECT_NEAR(mean_magnetization(empty_graph(6), {1.0, lambda}),
                (lambda * lambda - 1) / (lambda * lambda + 1), 1e-14);
  EXPECT_NEAR(mean_magnetization(complete_graph(2), {1.0, 2.0}), 0.7521422693104279, 1e-14);
}

TEST(VarianceOfX, Examples) {
  EXPECT_NEAR(variance_of_x(empty_graph(10), {1.0, 1.0}), 2.5, 1e-12);
  EXPECT_NEAR(variance_of_x(complete_graph(2), {0.0, 1.0}), 0.5, 1e-14);
  EXPECT_NEAR(variance_of_x(path_graph(4), {1.0, 1.5}), 0.9984577335590248, 1e-13);
}

TEST(FixedDistribution, Examples) {
  const Graph k2 = complete_graph(2);
  const auto zero = exact_fixed_distribution(k2, {1.0, 0});
  ASSERT_EQ(zero.configs.size(), 2u);
  EXPECT_NEAR(zero.probability_of(0b01), 0.5, 1e-15);
  EXPECT_NEAR(zero.probability_of(0b10), 0.5, 1e-15);
  const auto top = exact_fixed_distribution(k2, {1.0, 2});
  ASSERT_EQ(top.configs.size(), 1u);
  EXPECT_EQ(top.configs[0], 0b11u);
  EXPECT_DOUBLE_EQ(top.probabilities[0], 1.0);

  const auto p3 = exact_fixed_distribution(path_graph(3), {1.0, 1});
  const double z = 2.0 + std::exp(-1.0);
  EXPECT_NEAR(p3.probability_of(0b011), 1.0 / z, 1e-15);
  EXPECT_NEAR(p3.probability_of(0b101), std::exp(-1.0) / z, 1e-15);
  EXPECT_NEAR(p3.probability_of(0b110), 1.0 / z, 1e-15);
  EXPECT_EQ(p3.probability_of(0b111), 0.0);

  EXPECT_THROW(exact_fixed_distribution(k2, {1.0, 1}), Error);
  EXPECT_THROW(exact_fixed_distribution(k2, {1.0, 4}), Error);
}

class RandomSmallGraph : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
    Rng rng(99, static_cast<std::uint64_t>(GetParam()));
    n = 3 + static_cast<int>(rng.below(8));
    graph = std::make_unique<Graph>(random_bounded_degree_graph(n, 3, 2 * n, rng));
    beta = 0.1 + 2.5 * rng.uniform();
    for (auto& l : lambdas) l = 0.3 + 3.0 * rng.uniform();
    oracle = std::make_unique<ExactOracle>(*graph);
  }
  int n = 0;
  std::unique_ptr<Graph> graph;
  std::unique_ptr<ExactOracle> oracle;
  double beta = 0.0;
  std::array<double, 5> lambdas{};
};

TEST_P(RandomSmallGraph, CoefficientIdentity) {
  const auto v = oracle->fixed_partition_vector(beta);
  for (int l = 0; l <= n; ++l) EXPECT_TRUE(std::isfinite(v.log_values[l]));
  for (double lambda : lambdas) {
    long double sum = 0;
    for (int l = 0; l <= n; ++l)
      sum += std::exp(static_cast<long double>(v.log_values[l]) + (2 * l - n) * std::log(static_cast<long double>(lambda)));
    const long double z = std::exp(static_cast<long double>(oracle->log_partition_function({beta, lambda})));
    EXPECT_LE(std::fabs(static_cast<double>((sum - z) / z)), 1e-12);
    EXPECT_LE(rel(std::exp(oracle->log_partition_function({beta, lambda})), static_cast<double>(naive_z(*graph, {beta, lambda}))), 1e-12);
  }
}

TEST_P(RandomSmallGraph, ConditioningIdentity) {
  const IsingParams params{beta, lambdas[0]};
  const auto full = oracle->config_probabilities(params);
  for (int k = -n; k <= n; k += 2) {
    const auto dist = oracle->fixed_distribution({beta, k});
    double mass = 0.0;
    for (std::uint64_t s = 0; s < full.size(); ++s)
      if (2 * std::popcount(s) - n == k) mass += full[s];
    double total = 0.0;
    for (std::size_t i = 0; i < dist.configs.size(); ++i) {
      EXPECT_NEAR(dist.probabilities[i], full[dist.configs[i]] / mass, 1e-12);
      total += dist.probabilities[i];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST_P(RandomSmallGraph, Symmetry) {
  for (double lambda : lambdas)
    EXPECT_NEAR(oracle->log_partition_function({beta, lambda}), oracle->log_partition_function({beta, 1.0 / lambda}),
                1e-12);
  const auto v = oracle->fixed_partition_vector(beta);
  for (int k = -n; k <= n; k += 2) EXPECT_NEAR(v.log_at(k), v.log_at(-k), 1e-12);
  EXPECT_EQ(oracle->mean_magnetization({beta, 1.0}), 0.0);
}

TEST_P(RandomSmallGraph, MomentsMatchNaiveSums) {
  for (double lambda : lambdas) {
    const IsingParams p{beta, lambda};
    EXPECT_NEAR(oracle->mean_plus_count(p), static_cast<double>(naive_expectation_plus(*graph, p, 1)), 1e-11);
    EXPECT_NEAR(oracle->variance_of_x(p), static_cast<double>(naive_variance_x(*graph, p)), 1e-10);
  }
}

// d<M>/d(log lambda) = 2 var(M) = 8 var(X), hence d eta / d lambda = 4 var(X) / (n lambda).
TEST_P(RandomSmallGraph, DerivativeIdentity) {
  const double h = 1e-4;
  for (double lambda : lambdas) {
    const double fd = (oracle->mean_magnetization({beta, lambda + h}) - oracle->mean_magnetization({beta, lambda - h})) /
                      (2 * h);
    const double analytic = 4.0 * oracle->variance_of_x({beta, lambda}) / (n * lambda);
    EXPECT_LE(rel(fd, analytic), 1e-6) << lambda;
  }
}

TEST_P(RandomSmallGraph, MeanPlusCountIncreasesInLambda) {
  double previous = -1.0;
  for (double lambda = 0.2; lambda <= 5.0; lambda += 0.1) {
    const double x = oracle->mean_plus_count({beta, lambda});
    EXPECT_GT(x, previous);
    previous = x;
  }
}

TEST_P(RandomSmallGraph, GksInequalities) {
  Rng rng(5, static_cast<std::uint64_t>(GetParam()));
  if (graph->edge_count() == 0) GTEST_SKIP();
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<Vertex> a, b;
    for (int v = 0; v < n; ++v) {
      if (rng.bernoulli(0.4)) a.push_back(v);
      if (rng.bernoulli(0.4)) b.push_back(v);
    }
    const Edge e = graph->edges()[rng.below(graph->edge_count())];
    const double lambda = 1.0 + 2.0 * rng.uniform();
    const auto slots = oracle->gks_check({beta, lambda}, a, b, e);
    EXPECT_GE(slots.correlation, -1e-12);
    EXPECT_GE(slots.covariance, -1e-12);
    EXPECT_GE(slots.edge_monotonicity, -1e-12);
    EXPECT_NEAR(slots.correlation, static_cast<double>(naive_correlation(*graph, {beta, lambda}, a)), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Random, RandomSmallGraph, ::testing::Range(0, 20));

TEST(Gks, Examples) {
  const Graph k3 = complete_graph(3);
  const std::vector<Vertex> none, zero{0}, rest{1, 2};
  EXPECT_NEAR(gks_check(k3, {1.0, 1.2}, none, rest, {0, 1}).correlation, 1.0, 1e-15);
  EXPECT_NEAR(gks_check(k3, {1.0, 1.0}, zero, rest, {0, 1}).correlation, 0.0, 1e-15);
  const auto slots = gks_check(k3, {1.0, 1.2}, zero, rest, {0, 1});
  EXPECT_NEAR(slots.correlation, 0.3827662678550825, 1e-14);
  EXPECT_NEAR(slots.covariance, 0.07114038842006943, 1e-14);
  EXPECT_NEAR(slots.edge_monotonicity, 0.08876424417793185, 1e-14);
}

TEST(Gks, RejectsInvalidInput) {
  const Graph p3 = path_graph(3);
  const std::vector<Vertex> ok{0}, bad{5};
  EXPECT_THROW(gks_check(p3, {1.0, 1.2}, bad, ok, {0, 1}), Error);
  EXPECT_THROW(gks_check(p3, {1.0, 1.2}, ok, ok, {0, 2}), Error);
  EXPECT_THROW(gks_check(p3, {1.0, 0.8}, ok, ok, {0, 1}), Error);
}

TEST(CltDeviation, Examples) {
  EXPECT_NEAR(clt_deviation(empty_graph(20), {0.0, 1.0}), 0.01241707117384366, 1e-12);
  EXPECT_LT(clt_deviation(path_graph(20), {0.8, 1.5}), clt_deviation(path_graph(12), {0.8, 1.5}));
  EXPECT_GE(clt_deviation(empty_graph(1), {0.0, 2.0}), 0.0);
}

TEST(CltDeviation, SupercriticalZeroFieldIsARegimeError) {
  try {
    clt_deviation(complete_graph(4), {2.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::regime);
  }
}

TEST(AliasTable, ReproducesWeights) {
  const std::vector<double> logw{std::log(1.0), std::log(2.0), std::log(3.0), -INFINITY, std::log(4.0)};
  const AliasTable table(logw);
  Rng rng(11);
  std::array<int, 5> counts{};
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) ++counts[table.draw(rng)];
  EXPECT_EQ(counts[3], 0);
  for (int i : {0, 1, 2, 4}) {
    const double p = std::exp(logw[i]) / 10.0;
    EXPECT_NEAR(counts[i] / double(draws), p, 4 * std::sqrt(p * (1 - p) / draws));
  }
}

TEST(ExactSample, UniformOnFreeEdge) {
  auto oracle = std::make_shared<const ExactOracle>(complete_graph(2));
  ExactIsingSampler sampler(oracle, 0.0);
  Rng rng(123);
  std::array<int, 4> counts{};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[sampler.draw_bits(1.0, rng)];
  const double sd = std::sqrt(0.25 * 0.75 / draws);
  for (int c : counts) EXPECT_NEAR(c / double(draws), 0.25, 3 * sd);
}

TEST(ExactSample, FullMagnetizationIsAllPlus) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = exact_sample(cycle_graph(6), FixedMagParams{1.0, 6}, seed);
    EXPECT_EQ(s.plus_count(), 6);
  }
}

TEST(ExactSample, EmpiricalLawMatchesOracle) {
  const Graph p3 = path_graph(3);
  auto oracle = std::make_shared<const ExactOracle>(p3);
  ExactIsingSampler sampler(oracle, 1.0);
  const auto exact = oracle->config_probabilities({1.0, 1.0});
  Rng rng(2025);
  std::array<long, 8> counts{};
  const long draws = 1000000;
  for (long i = 0; i < draws; ++i) ++counts[sampler.draw_bits(1.0, rng)];
  double tv = 0.0;
  for (int s = 0; s < 8; ++s) tv += std::fabs(counts[s] / double(draws) - exact[s]);
  EXPECT_LE(0.5 * tv, 0.01);
}

TEST(ExactSample, FixedSamplerStaysInSlice) {
  auto oracle = std::make_shared<const ExactOracle>(cycle_graph(8));
  ExactFixedSampler sampler(oracle, 2);
  Rng rng(8);
  const auto dist = oracle->fixed_distribution({1.5, 2});
  std::map<std::uint64_t, long> counts;
  const long draws = 200000;
  for (long i = 0; i < draws; ++i) {
    const auto bits = sampler.draw_bits(1.5, rng);
    ASSERT_EQ(std::popcount(bits), 5);
    ++counts[bits];
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < dist.configs.size(); ++i)
    tv += std::fabs(counts[dist.configs[i]] / double(draws) - dist.probabilities[i]);
  EXPECT_LE(0.5 * tv, 0.02);
}

TEST(ExactSample, SameSeedSameDraw) {
  const Graph g = cycle_graph(10);
  EXPECT_EQ(exact_sample(g, IsingParams{1.0, 1.3}, 77).to_bits(), exact_sample(g, IsingParams{1.0, 1.3}, 77).to_bits());
}

TEST(ExtremalScan, BoundHoldsOnSmallGraphs) {
  const std::vector<double> betas{1.0}, lambdas{1.5};
  const auto report = extremal_scan(3, 6, betas, lambdas);
  EXPECT_GT(report.graphs_scanned, 1000u);
  EXPECT_LE(report.max_gap, 0.0);
}

TEST(ExtremalScan, ZeroFieldGivesZeroMagnetization) {
  const std::vector<double> betas{0.5, 2.0}, lambdas{1.0};
  ExtremalScanOptions options;
  options.exhaustive_max_n = 4;
  const auto report = extremal_scan(3, 4, betas, lambdas, options);
  EXPECT_EQ(report.worst.eta_graph, 0.0);
  EXPECT_LE(report.max_gap, 0.0);
}

TEST(ExtremalScan, CompleteGraphOnFour) {
  const double eta_graph = mean_magnetization(complete_graph(4), {2.0, 1.2});
  EXPECT_LE(eta_graph - solve_tree(3, 2.0, 1.2).eta_plus, 0.0);
}

TEST(ExtremalScan, RejectsBadGrids) {
  const std::vector<double> betas{1.0}, low{0.5}, ok{1.5};
  EXPECT_THROW(extremal_scan(3, 5, betas, low), Error);
  EXPECT_THROW(extremal_scan(3, 9, betas, ok), Error);
}

TEST(LogSumExp, StableForLargeTerms) {
  const std::vector<double> t{1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(t), 1000.0 + std::log(2.0), 1e-12);
  const std::vector<double> empty;
  EXPECT_EQ(log_sum_exp(empty), -INFINITY);
}

}  // namespace
}  // namespace fixmag
