#include "nomaec/fblrate.hpp"

#include <cmath>
#include <numbers>

#include "nomaec/error.hpp"
#include "nomaec/specfun.hpp"

namespace nomaec {
namespace {

void check_block(int n, double eps) {
  if (n < 1) throw DomainError("blocklength must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("error probability must lie in (0, 1)");
}

}  // namespace

KernelParams make_kernel_params(double theta, int n, double eps) {
  if (!(theta > 0.0)) throw DomainError("make_kernel_params: theta must be positive");
  check_block(n, eps);
  KernelParams kp;
  kp.zeta = -theta * n / (2.0 * std::numbers::ln2);
  kp.beta = theta * std::sqrt(static_cast<double>(n)) * specfun::gaussian_q_inv(eps);
  kp.kappa = 0.5 * kp.beta * kp.beta + kp.beta;
  return kp;
}

double dispersion_root(double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("dispersion_root: gamma must be non-negative");
  // 1 - (1+g)^{-2} = g (2 + g) / (1 + g)^2, free of cancellation near 0.
  const double one_plus = 1.0 + gamma;
  return std::sqrt(gamma * (2.0 + gamma)) / one_plus;
}

double fbl_rate(double gamma, int n, double eps, RateForm form) {
  check_block(n, eps);
  const double qinv = specfun::gaussian_q_inv(eps);
  const double delta = dispersion_root(gamma);
  const double root_n = std::sqrt(static_cast<double>(n));
  if (form == RateForm::nats_as_printed) {
    return std::log1p(gamma) - std::sqrt(delta / n) * qinv;
  }
  return std::log1p(gamma) / std::numbers::ln2 - delta * qinv / root_n;
}

double ec_kernel(double gamma, const KernelParams& kp, double eps) {
  if (eps >= 1.0) return 1.0;
  const double delta = dispersion_root(gamma);
  return eps + (1.0 - eps) * std::exp(2.0 * kp.zeta * std::log1p(gamma) + kp.beta * delta);
}

double ec_kernel_approx(double gamma, const KernelParams& kp, double eps) {
  if (eps >= 1.0) return 1.0;
  if (!(gamma >= 0.0)) throw DomainError("ec_kernel_approx: gamma must be non-negative");
  const double log_base = std::log1p(gamma);
  const double lead = std::exp(2.0 * kp.zeta * log_base);
  const double inv_sq = std::exp(-2.0 * log_base);
  return eps + (1.0 - eps) * lead * ((kp.kappa + 1.0) - inv_sq * (kp.kappa - 0.5 * kp.beta));
}

}  // namespace nomaec
