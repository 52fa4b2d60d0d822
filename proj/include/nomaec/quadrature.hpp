#pragma once

#include <functional>
#include <vector>

namespace nomaec {

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  int intervals = 0;
  bool converged = false;
};

struct QuadOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 15-point Gauss-Kronrod on [a, b]. The interval with the
/// largest error estimate is bisected until the total estimate falls below
/// max(abs_tol, rel_tol * |I|). `breakpoints` seeds the initial partition.
QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opt,
                     const std::vector<double>& breakpoints = {});

/// Integral over [a, inf) through x = a + t / (1 - t).
QuadResult integrate_to_infinity(const Integrand& f, double a, const QuadOptions& opt);

}  // namespace nomaec
