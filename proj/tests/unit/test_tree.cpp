#include <gtest/gtest.h>

#include <cmath>

#include "fixmag/errors.hpp"
#include "fixmag/tree.hpp"

namespace fixmag {
namespace {

TEST(BetaCritical, ClosedForm) {
  EXPECT_NEAR(beta_critical(3), std::log(3.0), 1e-12);
  EXPECT_NEAR(beta_critical(4), std::log(2.0), 1e-12);
  EXPECT_THROW(beta_critical(2), Error);
}

TEST(SolveTree, ZeroTemperatureFieldOnly) {
  const auto s = solve_tree(3, 0.0, 2.0);
  EXPECT_NEAR(s.L_star, std::log(2.0), 1e-14);
  EXPECT_NEAR(s.eta_plus, 0.6, 1e-14);
}

TEST(SolveTree, SubcriticalZeroFieldHasNoMagnetization) {
  for (double beta : {0.3, 0.5, 0.7, 1.05}) {
    const auto s = solve_tree(3, beta, 1.0);
    EXPECT_LE(s.eta_plus, 1e-9) << beta;
    EXPECT_LE(s.residual, 1e-12);
  }
}

TEST(SolveTree, SupercriticalZeroFieldMatchesReference) {
  const auto s = solve_tree(3, 2.0, 1.0);
  EXPECT_NEAR(s.L_star, 1.829136159423517, 1e-11);
  EXPECT_NEAR(s.eta_plus, 0.9917570032084977, 1e-12);
  EXPECT_LE(s.residual, 1e-12);
  EXPECT_FALSE(s.low_precision);
  for (double beta : {1.2, 1.5, 2.0}) EXPECT_GE(solve_tree(3, beta, 1.0).eta_plus, 1e-3);
}

TEST(SolveTree, VeryLowTemperatureSaturates) {
  EXPECT_NEAR(solve_tree(3, 20.0, 1.0).eta_plus, 1.0, 1e-12);
  EXPECT_NEAR(eta_c(3, 20.0).value, 1.0, 1e-6);
}

TEST(SolveTree, FlagsNeighbourhoodOfCriticality) {
  EXPECT_TRUE(solve_tree(3, std::log(3.0), 1.0).low_precision);
  EXPECT_FALSE(solve_tree(3, std::log(3.0), 1.5).low_precision);
}

TEST(SolveTree, RejectsInvalidInput) {
  EXPECT_THROW(solve_tree(2, 1.0, 1.0), Error);
  EXPECT_THROW(solve_tree(3, -1.0, 1.0), Error);
  EXPECT_THROW(solve_tree(3, 1.0, 0.5), Error);
  EXPECT_THROW(solve_tree(3, std::nan(""), 1.0), Error);
}

TEST(SolveTree, ResidualAndMonotonicityOverGrid) {
  for (int delta : {3, 4, 5}) {
    double previous_beta_eta = -1.0;
    for (double beta = 0.0; beta <= 4.0; beta += 0.25) {
      double previous = -1.0;
      for (double lambda : {1.0, 1.01, 1.2, 1.5, 2.0, 4.0, 10.0}) {
        const auto s = solve_tree(delta, beta, lambda);
        EXPECT_LE(s.residual, 1e-12);
        EXPECT_GE(s.eta_plus, 0.0);
        EXPECT_LE(s.eta_plus, 1.0);
        EXPECT_GE(s.eta_plus, previous - 1e-14) << delta << " " << beta << " " << lambda;
        previous = s.eta_plus;
      }
      const double at_two = solve_tree(delta, beta, 2.0).eta_plus;
      EXPECT_GE(at_two, previous_beta_eta - 1e-14);
      previous_beta_eta = at_two;
    }
  }
}

TEST(FiniteTree, ConvergesToFixedPoint) {
  const double eta = solve_tree(3, 2.0, 1.0).eta_plus;
  EXPECT_NEAR(finite_tree_magnetization(3, 2.0, 1.0, 30), eta, 1e-6);
  EXPECT_NEAR(finite_tree_magnetization(3, 2.0, 1.0, 60), eta, 1e-6);
  for (double lambda : {1.2, 3.0})
    EXPECT_NEAR(finite_tree_magnetization(4, 1.0, lambda, 60), solve_tree(4, 1.0, lambda).eta_plus,
                1e-6);
}

TEST(FiniteTree, BoundaryEffectDecreasesWithDepth) {
  double previous = 2.0;
  for (int depth = 1; depth <= 40; ++depth) {
    const double value = finite_tree_magnetization(3, 2.0, 1.0, depth);
    EXPECT_LE(value, previous + 1e-15);
    previous = value;
  }
}

TEST(EtaCritical, RegimeDetection) {
  EXPECT_FALSE(eta_c(3, 1.0).supercritical);
  EXPECT_EQ(eta_c(3, 1.0).value, 0.0);
  const auto c = eta_c(3, 2.0);
  EXPECT_TRUE(c.supercritical);
  EXPECT_DOUBLE_EQ(c.value, solve_tree(3, 2.0, 1.0).eta_plus);
}

TEST(LambdaForEta, RoundTrip) {
  for (double beta : {0.5, 1.0, 2.0}) {
    for (double eta : {0.3, 0.8, 0.995, 0.9999}) {
      if (eta < solve_tree(3, beta, 1.0).eta_plus) continue;
      const double lambda = lambda_for_eta(3, beta, eta);
      EXPECT_GE(lambda, 1.0);
      EXPECT_NEAR(solve_tree(3, beta, lambda).eta_plus, eta, 1e-10) << beta << " " << eta;
    }
  }
  EXPECT_GT(lambda_for_eta(3, 2.0, 0.995), 1.0);
}

TEST(LambdaForEta, BelowCriticalMagnetizationIsARegimeError) {
  try {
    lambda_for_eta(3, 2.0, 0.9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::regime);
  }
}

TEST(TreeMarginal, ReferenceValueAndBounds) {
  EXPECT_NEAR(tree_marginal_q(3, 2.0), 0.9809391948549687, 1e-12);
  for (int delta : {3, 4}) {
    for (double beta : {1.2, 1.5, 2.0, 3.0}) {
      const double q = tree_marginal_q(delta, beta);
      EXPECT_GT(q, 0.5);
      EXPECT_LT(q, 1.0);
    }
  }
  EXPECT_THROW(tree_marginal_q(3, 1.0), Error);
}

}  // namespace
}  // namespace fixmag
