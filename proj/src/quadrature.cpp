#include "nomaec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace nomaec {
namespace {

// QUADPACK qk15 abscissae and weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gauss_kronrod15(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double abs_half = std::fabs(half);
  const double fc = f(center);
  double result_g = fc * kWg[3];
  double result_k = fc * kWgk[7];
  double result_abs = std::fabs(result_k);
  double fv1[7], fv2[7];
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double dx = half * kXgk[jtw];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    result_g += kWg[j] * (f1 + f2);
    result_k += kWgk[jtw] * (f1 + f2);
    result_abs += kWgk[jtw] * (std::fabs(f1) + std::fabs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double dx = half * kXgk[jtwm1];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    result_k += kWgk[jtwm1] * (f1 + f2);
    result_abs += kWgk[jtwm1] * (std::fabs(f1) + std::fabs(f2));
  }
  const double mean = result_k * 0.5;
  double result_asc = kWgk[7] * std::fabs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    result_asc += kWgk[j] * (std::fabs(fv1[j] - mean) + std::fabs(fv2[j] - mean));
  }
  double err = std::fabs((result_k - result_g) * half);
  result_k *= half;
  result_abs *= abs_half;
  result_asc *= abs_half;
  if (result_asc != 0.0 && err != 0.0) {
    err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double uflow = std::numeric_limits<double>::min();
  if (result_abs > uflow / (50.0 * eps)) {
    err = std::max(eps * 50.0 * result_abs, err);
  }
  return {a, b, result_k, err};
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opt,
                     const std::vector<double>& breakpoints) {
  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> panels;
  QuadResult out;
  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = gauss_kronrod15(f, cuts[i], cuts[i + 1]);
    out.evaluations += 15;
    total += p.value;
    total_err += p.error;
    panels.push(p);
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  while (true) {
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::fabs(total));
    if (total_err <= tol) {
      out.converged = true;
      break;
    }
    if (static_cast<int>(panels.size()) >= opt.max_intervals) break;
    Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    // Interval can no longer be split in double precision.
    if (std::fabs(worst.b - worst.a) <= 4.0 * eps * std::max(std::fabs(worst.a), std::fabs(worst.b))) {
      break;
    }
    panels.pop();
    Panel left = gauss_kronrod15(f, worst.a, mid);
    Panel right = gauss_kronrod15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // Re-add from scratch to shed drift accumulated by the incremental updates.
  double sum = 0.0, err = 0.0;
  out.intervals = static_cast<int>(panels.size());
  while (!panels.empty()) {
    sum += panels.top().value;
    err += panels.top().error;
    panels.pop();
  }
  out.value = sum;
  out.abs_error = err;
  if (!out.converged) {
    out.converged = err <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(sum));
  }
  return out;
}

QuadResult integrate_to_infinity(const Integrand& f, double a, const QuadOptions& opt) {
  auto mapped = [&](double t) {
    const double one_minus = 1.0 - t;
    const double x = a + t / one_minus;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, opt, {0.5, 0.9, 0.99});
}

}  // namespace nomaec
