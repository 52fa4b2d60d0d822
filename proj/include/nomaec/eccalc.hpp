#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "nomaec/channel.hpp"
#include "nomaec/fblrate.hpp"

namespace nomaec {

/// Numerical policy shared by the effective-capacity evaluators.
struct EvalControls {
  std::uint64_t mc_samples = 1'000'000;
  std::uint64_t seed = 1;
  double quad_rel_tol = 1e-9;
  int series_max_terms = 200;
  double series_rel_tol = 1e-10;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

enum class Method { closed_form, monte_carlo, quadrature };
enum class KernelVariant { exact, approx };

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

struct Diagnostics {
  int series_terms = 0;
  bool converged = true;
  bool diverged = false;
  bool infeasible = false;  // EC <= 0, the delay exponent cannot be supported
  bool fell_back_to_quadrature = false;
  double truncation_bound = 0.0;  // bound on |EC error| from series truncation, bits/cu
  double series_value = 0.0;      // truncated-series EC, kept when falling back
  std::string note;
};

struct EcResult {
  double value = 0.0;  // bits per channel use
  Method method = Method::closed_form;
  double std_error = 0.0;
  double kernel_mean = 1.0;  // E[kernel], the argument of the logarithm
  Diagnostics diag;
};

/// -ln(kernel_mean) / (theta n).
double ec_from_kernel_mean(double kernel_mean, double theta, int n);

/// Sample mean of the kernel over ordered Rayleigh draws. The sample budget is
/// split into fixed-size chunks, each on its own (seed, chunk) substream and
/// merged in chunk order, so results do not depend on the thread count.
EcResult ec_monte_carlo(const SystemConfig& cfg, Role role, const EvalControls& ctl);

/// Mean and standard error of the finite-blocklength rate on the same draws
/// that ec_monte_carlo uses.
struct RateEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};
RateEstimate ergodic_rate_monte_carlo(const SystemConfig& cfg, Role role, const EvalControls& ctl);

/// E[kernel] as an integral against the order-statistic density.
EcResult ec_quadrature(const SystemConfig& cfg, Role role, const EvalControls& ctl,
                       KernelVariant variant = KernelVariant::exact);

enum class WeakSeriesForm {
  corrected,
  /// Uses the first-order coefficient theta n (alpha_u - 1) / (alpha_u ln 2)
  /// in both blocks, as the expression is commonly printed. Kept to measure
  /// the discrepancy; it disagrees with the quadrature oracle.
  as_printed,
};

/// E[(1 + gamma_t)^c] for the weak user via the binomial series in
/// (alpha_u - 1) z, z = (1/rho) / (x + 1/(alpha_u rho)). Requires c < 0.
struct WeakMoment {
  double value = 0.0;
  double abs_bound = 0.0;  // truncation bound on |value|
  int terms = 0;
  bool converged = false;
  bool diverged = false;
};
/// `first_order_coefficient`, when set, replaces C(c, 1) = c in the s = 1 term.
WeakMoment weak_sinr_moment(const SystemConfig& cfg, double exponent, const EvalControls& ctl,
                            std::optional<double> first_order_coefficient = std::nullopt);

/// alpha_u^{s-1} e^{eta} E_s(eta), the inner block of the weak-user series.
double weak_inner_block(int s, double eta, double alpha_u);

/// The same block as the finite sum
///   [sum_{r=1}^{s-1} (r-1)! alpha_u^r (-alpha_u eta)^{s-r-1}] / (s-1)!
///     - (-alpha_u eta)^{s-1} / (s-1)! e^{eta} Ei(-eta)
/// Exact algebraically but cancels catastrophically once alpha_u eta and s
/// grow, so the library evaluates weak_inner_block instead.
double weak_inner_block_finite_sum(int s, double eta, double alpha_u);

/// Closed-form weak-user EC. Requires alpha_t + alpha_u = 1. When the series
/// does not converge within ctl.series_max_terms the value reported is the
/// approximate-kernel quadrature, with diag.converged = false.
EcResult ec_closed_weak(const SystemConfig& cfg, const EvalControls& ctl,
                        WeakSeriesForm form = WeakSeriesForm::corrected);

/// Closed-form strong-user EC through Tricomi U.
EcResult ec_closed_strong(const SystemConfig& cfg, const EvalControls& ctl,
                          bool reversed_alternating_sum = false);

EcResult ec_closed(const SystemConfig& cfg, Role role, const EvalControls& ctl);

/// Dispatch by method; quadrature uses the exact kernel.
EcResult evaluate_ec(const SystemConfig& cfg, Role role, Method method, const EvalControls& ctl);

}  // namespace nomaec
