#pragma once

namespace nomaec {

/// Per-user constants of the finite-blocklength effective-capacity kernel.
///   zeta  = -theta n / (2 ln 2)
///   beta  = theta sqrt(n) Qinv(eps)
///   kappa = beta^2 / 2 + beta
struct KernelParams {
  double zeta = 0.0;
  double beta = 0.0;
  double kappa = 0.0;
};

KernelParams make_kernel_params(double theta, int n, double eps);

/// sqrt(1 - (1 + gamma)^{-2}), the square root of the channel dispersion.
double dispersion_root(double gamma);

enum class RateForm {
  /// log2(1+g) - delta Qinv(eps) / sqrt(n): the rate whose exp(-theta n r)
  /// is exactly the kernel below. Used everywhere in the library.
  bits,
  /// ln(1+g) - sqrt(delta / n) Qinv(eps), the nat-domain expression with the
  /// square root taken over delta as commonly printed.
  nats_as_printed,
};

/// Normal-approximation achievable rate. Can be negative at small SINR;
/// callers decide whether to clamp.
double fbl_rate(double gamma, int n, double eps, RateForm form = RateForm::bits);

/// eps + (1 - eps) (1 + gamma)^{2 zeta} e^{beta delta}. Equals 1 when eps = 1.
double ec_kernel(double gamma, const KernelParams& kp, double eps);

/// Kernel with e^{beta delta} truncated after the quadratic term and
/// delta ~ 1 - (1+gamma)^{-2} / 2:
///   eps + (1 - eps) [(1+g)^{2 zeta} (K+1) - (1+g)^{2 zeta - 2} (K - beta/2)]
double ec_kernel_approx(double gamma, const KernelParams& kp, double eps);

}  // namespace nomaec
