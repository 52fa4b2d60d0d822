#pragma once

#include <string_view>

#include "nomaec/rng.hpp"

namespace nomaec {

enum class Role { weak, strong };

std::string_view to_string(Role role);
Role role_from_string(std::string_view name);

/// Scenario parameters shared by every evaluator.
struct SystemConfig {
  int V = 10;  // users in the pool
  int t = 2;   // weak-user order index
  int u = 8;   // strong-user order index
  double alpha_t = 0.8;
  double alpha_u = 0.2;
  double rho = 100.0;  // transmit SNR, linear
  int n = 300;         // blocklength in channel uses
  double eps = 1e-5;   // transmission error probability; eps = 1 is the degenerate no-service case
  double theta_t = 0.01;
  double theta_u = 0.01;
  bool allow_power_backoff = false;  // permit alpha_t + alpha_u < 1

  [[nodiscard]] int order_index(Role role) const { return role == Role::weak ? t : u; }
  [[nodiscard]] double theta(Role role) const { return role == Role::weak ? theta_t : theta_u; }

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

double db_to_linear(double db);

/// Ordered power gains of one fading draw; x_t <= x_u.
struct GainSample {
  double x_t = 0.0;
  double x_u = 0.0;
};

struct PdfCdf {
  double density;
  double cumulative;
};

/// Unit-mean exponential power gain (Rayleigh amplitude).
PdfCdf unordered_pdf_cdf(double x);

/// Density of the k-th smallest of V iid unit-mean exponentials.
double ordered_pdf(double x, int k, int V);

/// CDF of the same order statistic: P(at least k of V gains <= x).
double ordered_cdf(double x, int k, int V);

/// Smallest x with ordered_cdf(x) >= q, by bisection.
double ordered_quantile(double q, int k, int V);

GainSample sample_pair(const SystemConfig& cfg, RandomStream& rng);

double sinr_weak(double x_t, const SystemConfig& cfg);
double snr_strong(double x_u, const SystemConfig& cfg);

/// Dispatches to sinr_weak / snr_strong.
double link_sinr(Role role, double x, const SystemConfig& cfg);

}  // namespace nomaec
