#include "nomaec/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nomaec/error.hpp"
#include "nomaec/quadrature.hpp"

namespace nomaec::specfun {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

double gaussian_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Lentz continued fraction for e^z E_s(z), valid for z > 1 (and s >= 1).
double en_scaled_cf(int s, double z) {
  double b = z + s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (s - 1 + i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw ConvergenceError("exp_integral_en: continued fraction did not converge");
}

// Power series for E_s(z), z <= 1.
double en_series(int s, double z) {
  const int nm1 = s - 1;
  double ans = (nm1 != 0) ? 1.0 / nm1 : -std::log(z) - std::numbers::egamma;
  double fact = 1.0;
  for (int i = 1; i < kMaxIter; ++i) {
    fact *= -z / i;
    double del;
    if (i != nm1) {
      del = -fact / (i - nm1);
    } else {
      double psi = -std::numbers::egamma;
      for (int ii = 1; ii <= nm1; ++ii) psi += 1.0 / ii;
      del = fact * (-std::log(z) + psi);
    }
    ans += del;
    if (std::fabs(del) < std::fabs(ans) * kEps) return ans;
  }
  throw ConvergenceError("exp_integral_en: series did not converge");
}

}  // namespace

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double gaussian_q_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("gaussian_q_inv: p must lie in (0, 1), got " + std::to_string(p));
  }
  // Q is decreasing: Q(lo) >= p >= Q(hi).
  double lo = -40.0, hi = 40.0;
  while (hi - lo > 1e-12 * std::max(1.0, std::fabs(lo))) {
    const double mid = 0.5 * (lo + hi);
    if (gaussian_q(mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int k = 0; k < 5; ++k) {
    const double pdf = gaussian_pdf(x);
    if (pdf == 0.0) break;
    const double next = x + (gaussian_q(x) - p) / pdf;
    if (!(next >= lo && next <= hi) || next == x) break;
    x = next;
  }
  return x;
}

double exp_integral_e1(double z) {
  if (!(z > 0.0)) throw DomainError("exp_integral_e1: z must be positive");
  if (z > 700.0) return 0.0;
  if (z <= 1.0) return en_series(1, z);
  return std::exp(-z) * en_scaled_cf(1, z);
}

double exp_integral_ei(double x) {
  if (!(x < 0.0)) throw DomainError("exp_integral_ei: only negative arguments are supported");
  return -exp_integral_e1(-x);
}

double exp_integral_en_scaled(int s, double z) {
  if (s < 0) throw DomainError("exp_integral_en_scaled: order must be non-negative");
  if (!(z > 0.0)) throw DomainError("exp_integral_en_scaled: z must be positive");
  if (s == 0) return 1.0 / z;
  if (z > 1.0) return en_scaled_cf(s, z);
  return std::exp(z) * en_series(s, z);
}

double tricomi_u(double a, double b, double z, double rel_tol) {
  if (!(a > 0.0)) throw DomainError("tricomi_u: a must be positive");
  if (!(z > 0.0)) throw DomainError("tricomi_u: z must be positive");
  const double power = b - a - 1.0;
  QuadOptions opt;
  opt.rel_tol = rel_tol;

  // [0, 1] with y = v^{1/a}, which absorbs the y^{a-1} endpoint behaviour.
  auto head = [&](double v) {
    const double y = (a == 1.0) ? v : std::pow(v, 1.0 / a);
    return std::exp(-z * y + power * std::log1p(y)) / a;
  };
  std::vector<double> cuts;
  for (double scale : {1.0 / z, 1.0 / std::max(1.0, std::fabs(power))}) {
    for (double k : {0.1, 1.0, 10.0, 100.0}) {
      const double y = k * scale;
      if (y < 1.0) cuts.push_back(std::pow(y, a));
    }
  }
  const QuadResult h = integrate(head, 0.0, 1.0, opt, cuts);

  // [1, inf) with y = 1 - ln(w) / z, pulling out e^{-z} / z.
  auto tail = [&](double w) {
    const double y = 1.0 - std::log(w) / z;
    return std::exp((a - 1.0) * std::log(y) + power * std::log1p(y));
  };
  const QuadResult t = integrate(tail, 0.0, 1.0, opt, {1e-12, 1e-8, 1e-4, 1e-2, 0.1, 0.5});
  if (!h.converged || !t.converged) {
    throw ConvergenceError("tricomi_u: adaptive quadrature did not reach tolerance");
  }
  const double tail_weight = std::exp(-z) / z;
  return (h.value + tail_weight * t.value) / std::tgamma(a);
}

double SignedLog::value() const {
  return sign == 0.0 ? 0.0 : sign * std::exp(log_magnitude);
}

SignedLog gen_binomial_log(double alpha, int s) {
  if (s < 0) throw DomainError("gen_binomial: s must be non-negative");
  SignedLog out;
  for (int j = 0; j < s; ++j) {
    const double factor = alpha - j;
    if (factor == 0.0) return {0.0, -std::numeric_limits<double>::infinity()};
    if (factor < 0.0) out.sign = -out.sign;
    out.log_magnitude += std::log(std::fabs(factor)) - std::log(static_cast<double>(j + 1));
  }
  return out;
}

double gen_binomial(double alpha, int s) {
  if (s < 0) throw DomainError("gen_binomial: s must be non-negative");
  // The running value is C(alpha, j) itself, so integer alpha stays exact.
  double value = 1.0;
  for (int j = 0; j < s; ++j) {
    value = value * (alpha - j) / (j + 1);
    if (value == 0.0) return 0.0;
    if (!std::isfinite(value) || std::fabs(value) > 1e300) {
      return gen_binomial_log(alpha, s).value();
    }
  }
  return value;
}

double log_beta(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("beta: arguments must be positive");
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta_fn(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("beta: arguments must be positive");
  if (a + b < 170.0) return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
  return std::exp(log_beta(a, b));
}

}  // namespace nomaec::specfun
