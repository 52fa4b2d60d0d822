#pragma once

namespace nomaec::specfun {

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
double gaussian_q(double x);

/// Inverse of gaussian_q on (0, 1). Throws DomainError outside.
double gaussian_q_inv(double p);

/// Exponential integral E1(z) for z > 0. Underflows to zero for z > 700.
double exp_integral_e1(double z);

/// Ei(x) = -E1(-x) for x < 0.
double exp_integral_ei(double x);

/// e^z E_s(z) for integer s >= 0 and z > 0, where
/// E_s(z) = int_1^inf e^{-zt} t^{-s} dt. Scaling keeps it finite for large z.
double exp_integral_en_scaled(int s, double z);

/// Tricomi confluent hypergeometric function U(a, b, z) from its integral
/// representation; requires a > 0 and z > 0. Throws ConvergenceError when the
/// adaptive scheme cannot reach `rel_tol`.
double tricomi_u(double a, double b, double z, double rel_tol = 1e-12);

/// Generalized binomial coefficient split as sign * exp(log_magnitude).
struct SignedLog {
  double sign = 1.0;  // +1, -1, or 0 when the coefficient vanishes
  double log_magnitude = 0.0;

  [[nodiscard]] double value() const;
};

SignedLog gen_binomial_log(double alpha, int s);

/// prod_{j<s} (alpha - j) / s!
double gen_binomial(double alpha, int s);

double log_beta(double a, double b);

/// B(a, b) for a, b > 0.
double beta_fn(double a, double b);

}  // namespace nomaec::specfun
