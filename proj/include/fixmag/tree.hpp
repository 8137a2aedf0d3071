#pragma once

namespace fixmag {

/// Critical inverse temperature log(delta / (delta - 2)) of the zero-field
/// model on the infinite delta-regular tree. Requires delta >= 3.
double beta_critical(int delta);

/// Largest fixed point of the cavity recursion on the delta-regular tree
/// together with the root magnetization of the all-plus measure.
struct TreeSolution {
  int delta = 3;
  double beta = 0.0;
  double lambda = 1.0;
  double L_star = 0.0;
  double eta_plus = 0.0;
  /// |L_star - F(L_star)| for the cavity map F.
  double residual = 0.0;
  /// Set when lambda == 1 and beta sits within 1e-6 of beta_critical, where
  /// the fixed point bifurcates and the result carries less precision.
  bool low_precision = false;
};

/// One application of the cavity map:
///   log(lambda) + (delta - 1) * artanh(tanh(x) * tanh(beta / 2)).
double cavity_map(int delta, double beta, double lambda, double x);

/// Root magnetization tanh(L + artanh(tanh(L) tanh(beta/2))) for a cavity field L.
double root_magnetization(double beta, double L);

/// Requires delta >= 3, beta >= 0, lambda >= 1.
TreeSolution solve_tree(int delta, double beta, double lambda);

struct EtaCritical {
  double value = 0.0;
  /// False when beta <= beta_critical(delta); value is then 0.
  bool supercritical = false;
};

/// eta_c = eta_plus at lambda = 1.
EtaCritical eta_c(int delta, double beta);

/// Activity lambda >= 1 with solve_tree(delta, beta, lambda).eta_plus == eta
/// (to 1e-10). Requires eta in [eta_plus(lambda = 1), 1).
double lambda_for_eta(int delta, double beta, double eta);

/// Probability that the root of a (delta-1)-ary tree is +1 under the
/// zero-field plus measure, with alpha = (1 + eta_c) / 2:
///   q = A^(d-1) / (A^(d-1) + B^(d-1)),  A = alpha e^beta + 1 - alpha,
///   B = alpha + (1 - alpha) e^beta.
/// Requires beta > beta_critical(delta).
double tree_marginal_q(int delta, double beta);

/// Root magnetization of the depth-`depth` delta-regular tree with all-plus
/// boundary spins, computed by the finite recursion from the leaves inward.
double finite_tree_magnetization(int delta, double beta, double lambda, int depth);

}  // namespace fixmag
