#include "fixmag/tree.hpp"

#include <cmath>
#include <string>

#include "fixmag/errors.hpp"

namespace fixmag {

namespace {

void check_delta(int delta) {
  require(delta >= 3, "tree: delta must be at least 3 (got " + std::to_string(delta) + ")");
}

void check_beta(double beta) {
  require(std::isfinite(beta) && beta >= 0.0, "tree: beta must be finite and >= 0");
}

double log_cosh(double x) {
  const double a = std::fabs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// artanh(tanh(a) * tanh(b)). Once the product nears 1 (large a and b) the
// direct form loses everything to rounding, so switch to the log-cosh form.
double edge_message(double a, double b) {
  const double p = std::tanh(a) * std::tanh(b);
  if (std::fabs(p) < 0.9) return std::atanh(p);
  return 0.5 * (log_cosh(a + b) - log_cosh(a - b));
}

}  // namespace

double beta_critical(int delta) {
  check_delta(delta);
  return std::log(static_cast<double>(delta) / (delta - 2));
}

double cavity_map(int delta, double beta, double lambda, double x) {
  return std::log(lambda) + (delta - 1) * edge_message(x, 0.5 * beta);
}

double root_magnetization(double beta, double L) {
  return std::tanh(L + edge_message(L, 0.5 * beta));
}

TreeSolution solve_tree(int delta, double beta, double lambda) {
  check_delta(delta);
  check_beta(beta);
  require(std::isfinite(lambda) && lambda >= 1.0, "solve_tree: lambda must be finite and >= 1");

  const auto residual = [&](double x) { return cavity_map(delta, beta, lambda, x) - x; };

  // F(x) <= log(lambda) + (delta-1) beta/2, so this start lies above every
  // fixed point. F is increasing, so iterating from above stays above the
  // largest fixed point while moving towards it.
  double hi = std::log(lambda) + 0.5 * (delta - 1) * beta + 1.0;
  for (int i = 0; i < 200; ++i) {
    const double next = cavity_map(delta, beta, lambda, hi);
    if (!(next < hi)) break;
    hi = next;
  }

  // On (0, inf) the map is concave, so the residual is positive exactly on
  // (0, L*) and bisection between a positive and a non-positive residual
  // isolates the largest root.
  double lo = 0.0;
  bool has_positive_root = true;
  if (lambda == 1.0) {
    const double slope_at_zero = (delta - 1) * std::tanh(0.5 * beta);
    if (slope_at_zero <= 1.0) {
      has_positive_root = false;
    } else {
      lo = hi;
      while (lo > 0.0 && !(residual(lo) > 0.0)) lo *= 0.5;
      if (lo == 0.0) has_positive_root = false;
    }
  }

  double L = 0.0;
  if (has_positive_root) {
    while (true) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      if (residual(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    L = std::fabs(residual(lo)) < std::fabs(residual(hi)) ? lo : hi;
  }

  TreeSolution out;
  out.delta = delta;
  out.beta = beta;
  out.lambda = lambda;
  out.L_star = L;
  out.eta_plus = root_magnetization(beta, L);
  out.residual = std::fabs(residual(L));
  out.low_precision = lambda == 1.0 && std::fabs(beta - beta_critical(delta)) < 1e-6;
  if (!std::isfinite(out.L_star) || !std::isfinite(out.eta_plus) || out.residual > 1e-12)
    fail(ErrorKind::sampler_failure, "solve_tree: fixed point did not converge");
  return out;
}

EtaCritical eta_c(int delta, double beta) {
  check_delta(delta);
  check_beta(beta);
  if (beta <= beta_critical(delta)) return {0.0, false};
  return {solve_tree(delta, beta, 1.0).eta_plus, true};
}

double lambda_for_eta(int delta, double beta, double eta) {
  check_delta(delta);
  check_beta(beta);
  require(std::isfinite(eta) && eta < 1.0, "lambda_for_eta: eta must be < 1");
  const double floor_eta = solve_tree(delta, beta, 1.0).eta_plus;
  if (eta < floor_eta - 1e-15)
    fail(ErrorKind::regime, "lambda_for_eta: eta=" + std::to_string(eta) +
                                " is below eta_plus at lambda=1 (" + std::to_string(floor_eta) +
                                "); no activity >= 1 reaches it");
  if (eta <= floor_eta) return 1.0;

  // eta_plus is increasing in log(lambda); bracket then bisect.
  const auto eta_at = [&](double h) { return solve_tree(delta, beta, std::exp(h)).eta_plus; };
  double lo = 0.0;
  double hi = 1.0;
  while (eta_at(hi) < eta) {
    lo = hi;
    hi *= 2.0;
    require(hi < 1e3, "lambda_for_eta: eta too close to 1");
  }
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double value = eta_at(mid);
    if (value == eta) return std::exp(mid);
    if (value < eta)
      lo = mid;
    else
      hi = mid;
  }
  return std::fabs(eta_at(lo) - eta) < std::fabs(eta_at(hi) - eta) ? std::exp(lo) : std::exp(hi);
}

double tree_marginal_q(int delta, double beta) {
  const auto critical = eta_c(delta, beta);
  if (!critical.supercritical)
    fail(ErrorKind::regime, "tree_marginal_q: requires beta > beta_critical(delta)");
  const double alpha = 0.5 * (1.0 + critical.value);
  const double e = std::exp(beta);
  const double a = alpha * e + 1.0 - alpha;
  const double b = alpha + (1.0 - alpha) * e;
  return 1.0 / (1.0 + std::pow(b / a, delta - 1));
}

double finite_tree_magnetization(int delta, double beta, double lambda, int depth) {
  check_delta(delta);
  check_beta(beta);
  require(lambda > 0.0 && std::isfinite(lambda), "finite_tree_magnetization: lambda must be > 0");
  require(depth >= 0, "finite_tree_magnetization: depth must be >= 0");
  if (depth == 0) return 1.0;
  const double h = std::log(lambda);
  // A boundary vertex pinned to +1 sends artanh(tanh(beta/2)) = beta/2.
  double message = 0.5 * beta;
  for (int level = depth - 1; level >= 1; --level) {
    const double field = h + (delta - 1) * message;
    message = edge_message(field, 0.5 * beta);
  }
  return std::tanh(h + delta * message);
}

}  // namespace fixmag
