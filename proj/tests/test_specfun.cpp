#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "nomaec/error.hpp"
#include "nomaec/quadrature.hpp"
#include "nomaec/specfun.hpp"
#include "nomaec/summation.hpp"

using namespace nomaec;
using namespace nomaec::specfun;

namespace {

// Independent references, deliberately naive.

double q_by_erfc(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double qinv_bisect(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (q_by_erfc(mid) > p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Ei(x) = gamma + ln|x| + sum x^k / (k k!), fine for moderate |x|.
double ei_series(double x) {
  long double sum = 0.0L, term = 1.0L;
  for (int k = 1; k < 400; ++k) {
    term *= static_cast<long double>(x) / k;
    sum += term / k;
  }
  return static_cast<double>(std::numbers::egamma_v<long double> + std::log(std::fabs(static_cast<long double>(x))) + sum);
}

double pascal_binomial(int m, int k) {
  std::vector<double> row{1.0};
  for (int i = 1; i <= m; ++i) {
    std::vector<double> next(i + 1, 1.0);
    for (int j = 1; j < i; ++j) next[j] = row[j - 1] + row[j];
    row = next;
  }
  return row[k];
}

int random_int(unsigned& state, int lo, int hi) {
  state = state * 1664525u + 1013904223u;
  return lo + static_cast<int>(state % static_cast<unsigned>(hi - lo + 1));
}

double random_unit(unsigned& state) {
  state = state * 1664525u + 1013904223u;
  return (state >> 8) / 16777216.0;
}

}  // namespace

TEST_CASE("gaussian Q against erfc and its inverse against bisection") {
  for (double x : {-5.0, -1.0, 0.0, 0.3, 1.0, 2.5, 4.0, 6.0, 8.0}) {
    CHECK(gaussian_q(x) == doctest::Approx(q_by_erfc(x)).epsilon(1e-13));
  }
  CHECK(gaussian_q_inv(1e-5) == doctest::Approx(4.26489079392282).epsilon(1e-11));
  CHECK(gaussian_q_inv(1e-6) == doctest::Approx(4.75342430882290).epsilon(1e-11));
  CHECK(std::fabs(gaussian_q_inv(0.5)) < 1e-12);
  for (double p : {1e-300, 1e-12, 1e-3, 0.2, 0.7, 0.999}) {
    CHECK(gaussian_q_inv(p) == doctest::Approx(qinv_bisect(p)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(gaussian_q_inv(0.0), DomainError);
  CHECK_THROWS_AS(gaussian_q_inv(1.0), DomainError);
  CHECK_THROWS_AS(gaussian_q_inv(-0.1), DomainError);
}

TEST_CASE("Q(Qinv(p)) round-trips over random p") {
  unsigned state = 7;
  for (int i = 0; i < 300; ++i) {
    const double p = std::pow(10.0, -12.0 * random_unit(state)) * 0.999;
    CHECK(gaussian_q(gaussian_q_inv(p)) == doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("exponential integral Ei on the negative axis") {
  CHECK(exp_integral_ei(-1.0) == doctest::Approx(-0.219383934395520).epsilon(1e-12));
  CHECK(exp_integral_ei(-10.0) == doctest::Approx(-4.15696892968532e-6).epsilon(1e-11));
  CHECK(exp_integral_ei(-1e-12) == doctest::Approx(-27.0538054510280).epsilon(1e-12));
  CHECK(exp_integral_ei(-100.0) == doctest::Approx(-3.68359776168203e-46).epsilon(1e-11));
  CHECK(exp_integral_ei(-700.0) == doctest::Approx(-1.40651876623403e-307).epsilon(1e-9));
  CHECK(exp_integral_ei(-800.0) == 0.0);
  for (double x : {-0.01, -0.5, -2.0, -5.0, -8.0}) {
    CHECK(exp_integral_ei(x) == doctest::Approx(ei_series(x)).epsilon(1e-11));
  }
  CHECK_THROWS_AS(exp_integral_ei(0.0), DomainError);
  CHECK_THROWS_AS(exp_integral_ei(1.0), DomainError);
}

TEST_CASE("Ei derivative is e^x / x") {
  for (double x : {-0.2, -1.5, -4.0, -20.0}) {
    const double h = 1e-5 * std::fabs(x);
    const double fd = (exp_integral_ei(x + h) - exp_integral_ei(x - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(std::exp(x) / x).epsilon(1e-7));
  }
}

TEST_CASE("scaled generalized exponential integral") {
  CHECK(exp_integral_en_scaled(2, 3.0) == doctest::Approx(0.213748779234045).epsilon(1e-12));
  CHECK(exp_integral_en_scaled(30, 50.0) == doctest::Approx(0.0125579585381161).epsilon(1e-11));
  CHECK(exp_integral_en_scaled(0, 4.0) == doctest::Approx(0.25).epsilon(1e-14));
  // Against direct quadrature of the defining integral.
  for (int s : {1, 3, 7}) {
    for (double z : {0.3, 2.0, 15.0}) {
      const auto q = integrate_to_infinity([&](double t) { return std::exp(-z * (t - 1.0)) * std::pow(t, -s); },
                                           1.0, {0.0, 1e-13, 2000});
      CHECK(exp_integral_en_scaled(s, z) == doctest::Approx(q.value).epsilon(1e-10));
    }
  }
  // Recurrence s E_{s+1}(z) = e^{-z} - z E_s(z), scaled by e^z.
  for (int s = 1; s < 40; s += 3) {
    const double z = 2.5;
    CHECK(s * exp_integral_en_scaled(s + 1, z) ==
          doctest::Approx(1.0 - z * exp_integral_en_scaled(s, z)).epsilon(1e-10));
  }
}

TEST_CASE("Tricomi U identities") {
  CHECK(tricomi_u(1.0, 1.0, 1.0) == doctest::Approx(0.596347362323194).epsilon(1e-12));
  CHECK(1e4 * tricomi_u(1.0, 0.0, 1e4) == doctest::Approx(0.999800059976012).epsilon(1e-12));
  CHECK(tricomi_u(1.0, 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (double z : {0.05, 0.7, 3.0, 25.0, 300.0}) {
    CHECK(tricomi_u(1.0, 1.0, z) == doctest::Approx(std::exp(z) * exp_integral_e1(z)).epsilon(1e-11));
    // U(a, a+1, z) = z^{-a}
    CHECK(tricomi_u(2.5, 3.5, z) == doctest::Approx(std::pow(z, -2.5)).epsilon(1e-11));
  }
  // Kummer transformation U(a, b, z) = z^{1-b} U(a-b+1, 2-b, z).
  for (double b : {-3.3, 0.4, 1.7}) {
    const double z = 2.0;
    CHECK(tricomi_u(1.0, b, z) ==
          doctest::Approx(std::pow(z, 1.0 - b) * tricomi_u(2.0 - b, 2.0 - b, z)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(tricomi_u(0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(tricomi_u(1.0, 1.0, -1.0), DomainError);
}

TEST_CASE("Tricomi U at negative b matches its integral representation") {
  // U(1, b, z) = int_0^inf e^{-zy} (1+y)^{b-2} dy
  for (double b : {-8.65, -4.3, 0.0, 2.0}) {
    for (double z : {0.02, 0.5, 6.0}) {
      const auto q = integrate_to_infinity([&](double y) { return std::exp(-z * y) * std::pow(1.0 + y, b - 2.0); },
                                           0.0, {0.0, 1e-13, 4000});
      CHECK(tricomi_u(1.0, b, z) == doctest::Approx(q.value).epsilon(1e-9));
    }
  }
}

TEST_CASE("generalized binomial coefficients") {
  CHECK(gen_binomial(-4.328, 3) == doctest::Approx(-24.3201745920).epsilon(1e-10));
  CHECK(gen_binomial(5.0, 0) == 1.0);
  CHECK(gen_binomial(3.0, 5) == 0.0);
  CHECK(gen_binomial_log(3.0, 5).sign == 0.0);
  unsigned state = 11;
  for (int i = 0; i < 200; ++i) {
    const int m = random_int(state, 0, 60);
    const int k = random_int(state, 0, m);
    CHECK(gen_binomial(m, k) == doctest::Approx(pascal_binomial(m, k)).epsilon(1e-12));
  }
  // Pascal's rule holds for non-integer alpha too.
  for (double a : {-4.328, 0.5, 7.25, -100.5}) {
    for (int s = 1; s < 30; ++s) {
      CHECK(gen_binomial(a + 1.0, s) ==
            doctest::Approx(gen_binomial(a, s) + gen_binomial(a, s - 1)).epsilon(1e-10));
      const auto lg = gen_binomial_log(a, s);
      CHECK(lg.value() == doctest::Approx(gen_binomial(a, s)).epsilon(1e-10));
    }
  }
}

TEST_CASE("beta function") {
  CHECK(beta_fn(2.0, 9.0) == doctest::Approx(1.0 / 90.0).epsilon(1e-13));
  CHECK(beta_fn(8.0, 3.0) == doctest::Approx(1.0 / 360.0).epsilon(1e-13));
  CHECK(beta_fn(0.5, 0.5) == doctest::Approx(std::numbers::pi).epsilon(1e-13));
  // Factorial form B(a, b) = (a-1)!(b-1)!/(a+b-1)! for integers.
  for (int a = 1; a <= 12; ++a) {
    for (int b = 1; b <= 12; ++b) {
      CHECK(beta_fn(a, b) == doctest::Approx(1.0 / (a * pascal_binomial(a + b - 1, a))).epsilon(1e-12));
    }
  }
  CHECK(log_beta(300.0, 400.0) == doctest::Approx(std::lgamma(300.0) + std::lgamma(400.0) - std::lgamma(700.0)).epsilon(1e-12));
  CHECK_THROWS_AS(beta_fn(0.0, 1.0), DomainError);
}

TEST_CASE("compensated summation and alternating binomial sums") {
  CompensatedSum s;
  s += 1e16;
  for (int i = 0; i < 1000; ++i) s += 1.0;
  s += -1e16;
  CHECK(s.value() == 1000.0);

  // sum C(m,i)(-1)^i i^k = 0 for k < m, and (-1)^m m! for k = m.
  for (int m = 2; m <= 20; ++m) {
    for (bool rev : {false, true}) {
      const double zero = alternating_binomial_sum(m, [](int i) { return static_cast<double>(i); }, rev);
      CHECK(std::fabs(zero) < 1e-9 * std::pow(2.0, m));
      const double full = alternating_binomial_sum(m, [m](int i) { return std::pow(i, m); }, rev);
      CHECK(full == doctest::Approx((m % 2 ? -1.0 : 1.0) * std::tgamma(m + 1.0)).epsilon(1e-6));
    }
  }
  // sum C(m,i)(-1)^i / (i+1) = 1/(m+1)
  for (int m : {0, 3, 6}) {
    CHECK(alternating_binomial_sum(m, [](int i) { return 1.0 / (i + 1); }) ==
          doctest::Approx(1.0 / (m + 1)).epsilon(1e-13));
  }
}

TEST_CASE("adaptive quadrature") {
  const QuadOptions opt{0.0, 1e-12, 4000};
  auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, opt);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));
  r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, opt);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
  r = integrate_to_infinity([](double x) { return std::exp(-x * x); }, 0.0, opt);
  CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-12));
  r = integrate([](double x) { return std::fabs(x - 0.3); }, 0.0, 1.0, opt, {0.3});
  CHECK(r.value == doctest::Approx(0.045 + 0.245).epsilon(1e-13));
  CHECK(r.abs_error >= 0.0);
}
