#include "nomaec/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nomaec/error.hpp"
#include "nomaec/specfun.hpp"

namespace nomaec {

std::string_view to_string(Role role) { return role == Role::weak ? "weak" : "strong"; }

Role role_from_string(std::string_view name) {
  if (name == "weak") return Role::weak;
  if (name == "strong") return Role::strong;
  throw ConfigError("unknown role '" + std::string(name) + "'");
}

void SystemConfig::validate() const {
  if (!(1 <= t && t < u && u <= V)) throw ConfigError("require 1 <= t < u <= V");
  if (!(alpha_t > alpha_u && alpha_u > 0.0)) throw ConfigError("require alpha_t > alpha_u > 0");
  const double total = alpha_t + alpha_u;
  if (allow_power_backoff) {
    if (total > 1.0 + 1e-12) throw ConfigError("require alpha_t + alpha_u <= 1");
  } else if (std::fabs(total - 1.0) > 1e-12) {
    throw ConfigError("require alpha_t + alpha_u = 1 (set allow_power_backoff for less)");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("require rho > 0");
  if (n < 1) throw ConfigError("require n >= 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("require 0 < eps <= 1");
  if (!(theta_t > 0.0 && theta_u > 0.0)) throw ConfigError("require theta_t, theta_u > 0");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

PdfCdf unordered_pdf_cdf(double x) {
  if (!(x >= 0.0)) throw DomainError("unordered_pdf_cdf: x must be non-negative");
  return {std::exp(-x), -std::expm1(-x)};
}

double ordered_pdf(double x, int k, int V) {
  if (!(1 <= k && k <= V)) throw DomainError("ordered_pdf: order index out of range");
  if (!(x >= 0.0)) throw DomainError("ordered_pdf: x must be non-negative");
  const double xi = 1.0 / specfun::beta_fn(k, V - k + 1);
  const double cdf = -std::expm1(-x);
  // f F^{k-1} (1-F)^{V-k} with f = 1 - F = e^{-x}
  return xi * std::pow(cdf, k - 1) * std::exp(-x * (V - k + 1));
}

double ordered_cdf(double x, int k, int V) {
  if (!(1 <= k && k <= V)) throw DomainError("ordered_cdf: order index out of range");
  if (x <= 0.0) return 0.0;
  const double p = -std::expm1(-x);
  const double q = std::exp(-x);
  // Upper binomial tail, all terms positive.
  double upper = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= V; ++j) {
    if (j >= k) upper += binom * std::pow(p, j) * std::pow(q, V - j);
    binom = binom * (V - j) / (j + 1);
  }
  return std::min(upper, 1.0);
}

double ordered_quantile(double q, int k, int V) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("ordered_quantile: q must lie in (0, 1)");
  double lo = 0.0, hi = 1.0;
  while (ordered_cdf(hi, k, V) < q) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ordered_cdf(mid, k, V) < q ? lo : hi) = mid;
  }
  return hi;
}

GainSample sample_pair(const SystemConfig& cfg, RandomStream& rng) {
  thread_local std::vector<double> gains;
  gains.resize(static_cast<std::size_t>(cfg.V));
  for (double& g : gains) g = rng.exponential();
  std::sort(gains.begin(), gains.end());
  return {gains[static_cast<std::size_t>(cfg.t - 1)], gains[static_cast<std::size_t>(cfg.u - 1)]};
}

double sinr_weak(double x_t, const SystemConfig& cfg) {
  return cfg.alpha_t * x_t / (cfg.alpha_u * x_t + 1.0 / cfg.rho);
}

double snr_strong(double x_u, const SystemConfig& cfg) { return cfg.alpha_u * cfg.rho * x_u; }

double link_sinr(Role role, double x, const SystemConfig& cfg) {
  return role == Role::weak ? sinr_weak(x, cfg) : snr_strong(x, cfg);
}

}  // namespace nomaec
