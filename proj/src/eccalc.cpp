#include "nomaec/eccalc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "nomaec/error.hpp"
#include "nomaec/quadrature.hpp"
#include "nomaec/specfun.hpp"
#include "nomaec/summation.hpp"

namespace nomaec {
namespace {

constexpr std::uint64_t kChunkSize = 1u << 15;

struct Moments {
  CompensatedSum sum;
  CompensatedSum sum_sq;
  std::uint64_t count = 0;
};

/// Runs `sample_value(gamma)` over ctl.mc_samples ordered draws. Chunk c
/// always uses substream (seed, c); chunks are merged in index order.
template <class SampleValue>
Moments run_chunks(const SystemConfig& cfg, Role role, const EvalControls& ctl,
                   SampleValue sample_value) {
  const std::uint64_t total = ctl.mc_samples;
  const std::uint64_t chunks = (total + kChunkSize - 1) / kChunkSize;
  std::vector<Moments> partial(chunks);
  std::atomic<std::uint64_t> next{0};

  auto worker = [&] {
    for (std::uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
      RandomStream rng(ctl.seed, c);
      const std::uint64_t begin = c * kChunkSize;
      const std::uint64_t count = std::min(kChunkSize, total - begin);
      Moments m;
      for (std::uint64_t i = 0; i < count; ++i) {
        const GainSample g = sample_pair(cfg, rng);
        const double x = role == Role::weak ? g.x_t : g.x_u;
        const double v = sample_value(link_sinr(role, x, cfg));
        m.sum += v;
        m.sum_sq += v * v;
      }
      m.count = count;
      partial[c] = m;
    }
  };

  unsigned threads = ctl.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : ctl.threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }

  Moments merged;
  for (const Moments& m : partial) {
    merged.sum += m.sum;
    merged.sum_sq += m.sum_sq;
    merged.count += m.count;
  }
  return merged;
}

struct MeanAndError {
  double mean;
  double std_error;
};

MeanAndError summarize(const Moments& m) {
  const double n = static_cast<double>(m.count);
  const double mean = m.sum.value() / n;
  const double var = m.count > 1 ? std::max(0.0, (m.sum_sq.value() - n * mean * mean) / (n - 1.0)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

EcResult degenerate_result(Method method) {
  EcResult r;
  r.method = method;
  r.value = 0.0;
  r.kernel_mean = 1.0;
  r.diag.note = "eps = 1: no successful transmissions, kernel is identically 1";
  return r;
}

void finish(EcResult& r, double theta, int n) {
  r.value = ec_from_kernel_mean(r.kernel_mean, theta, n);
  if (!std::isfinite(r.value)) {
    r.diag.converged = false;
    r.diag.note += (r.diag.note.empty() ? "" : "; ") + std::string("non-finite kernel mean");
  } else if (r.value <= 0.0) {
    r.diag.infeasible = true;
  }
}

/// One binomial series T = sum_s C(c, s) q^s e^eta E_s(eta) held as
/// exp(log_scale) * sum, so huge terms with a tiny prefactor stay finite.
struct ScaledSeries {
  double log_scale = 0.0;
  double sum = 0.0;
  double tail = 0.0;  // truncation bound, same scaling as sum
  int terms = 0;
  bool converged = false;
  bool diverged = false;
};

ScaledSeries weak_series(double c, double eta, double alpha_u, const EvalControls& ctl,
                         std::optional<double> first_order) {
  const double q = alpha_u - 1.0;
  const double log_q = std::log(std::fabs(q));
  const double abs_c = std::fabs(c);

  ScaledSeries out;
  CompensatedSum acc;
  bool started = false;
  double log_binom = 0.0;  // log |C(c, s)|
  double binom_sign = 1.0;
  double prev_log_term = -std::numeric_limits<double>::infinity();
  int growth_run = 0;

  for (int s = 0; s < ctl.series_max_terms; ++s) {
    double lb = log_binom;
    double sb = binom_sign;
    if (s == 1 && first_order) {
      lb = std::log(std::fabs(*first_order));
      sb = *first_order < 0.0 ? -1.0 : 1.0;
    }
    const double block = specfun::exp_integral_en_scaled(s, eta);
    const double log_term = lb + s * log_q + std::log(block);
    const double sign = sb * ((q < 0.0 && s % 2 == 1) ? -1.0 : 1.0);
    out.terms = s + 1;
    if (!std::isfinite(log_term)) {
      out.diverged = true;
      break;
    }
    if (!started) {
      out.log_scale = log_term;
      started = true;
    } else if (log_term > out.log_scale) {
      acc.scale(std::exp(out.log_scale - log_term));
      out.log_scale = log_term;
    }
    acc += sign * std::exp(log_term - out.log_scale);

    // Later ratios |term_{j+1} / term_j| are bounded by |q| |c - j| / (j + 1)
    // (E_s decreases in s), which for c < 0 never exceeds this value.
    const double ratio_bound = std::fabs(q) * std::max(1.0, (abs_c + s) / (s + 1.0));
    const double term_scaled = std::exp(log_term - out.log_scale);
    if (ratio_bound < 1.0) {
      out.tail = term_scaled * ratio_bound / (1.0 - ratio_bound);
      growth_run = log_term > prev_log_term ? growth_run + 1 : 0;
      if (growth_run >= 10) {
        out.diverged = true;
        break;
      }
      if (s >= 1 && out.tail <= ctl.series_rel_tol * std::fabs(acc.value())) {
        out.converged = true;
        break;
      }
    } else {
      out.tail = std::numeric_limits<double>::infinity();
    }
    prev_log_term = log_term;

    // C(c, s+1) = C(c, s) (c - s) / (s + 1)
    const double factor = c - s;
    if (factor == 0.0) {  // integer c >= 0: series terminates
      out.tail = 0.0;
      out.converged = true;
      break;
    }
    log_binom += std::log(std::fabs(factor)) - std::log(s + 1.0);
    if (factor < 0.0) binom_sign = -binom_sign;
  }
  out.sum = acc.value();
  return out;
}

}  // namespace

void EvalControls::validate() const {
  if (mc_samples < 1) throw ConfigError("mc_samples must be >= 1");
  if (!(quad_rel_tol > 0.0 && quad_rel_tol < 1.0)) throw ConfigError("quad_rel_tol must lie in (0, 1)");
  if (!(series_rel_tol > 0.0 && series_rel_tol < 1.0)) throw ConfigError("series_rel_tol must lie in (0, 1)");
  if (series_max_terms < 2) throw ConfigError("series_max_terms must be >= 2");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::closed_form: return "closed_form";
    case Method::monte_carlo: return "monte_carlo";
    case Method::quadrature: return "quadrature";
  }
  return "?";
}

Method method_from_string(std::string_view name) {
  if (name == "closed_form") return Method::closed_form;
  if (name == "monte_carlo") return Method::monte_carlo;
  if (name == "quadrature") return Method::quadrature;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

double ec_from_kernel_mean(double kernel_mean, double theta, int n) {
  return -std::log(kernel_mean) / (theta * n);
}

EcResult ec_monte_carlo(const SystemConfig& cfg, Role role, const EvalControls& ctl) {
  cfg.validate();
  ctl.validate();
  if (cfg.eps >= 1.0) return degenerate_result(Method::monte_carlo);
  const double theta = cfg.theta(role);
  const KernelParams kp = make_kernel_params(theta, cfg.n, cfg.eps);
  const Moments m = run_chunks(cfg, role, ctl, [&](double gamma) { return ec_kernel(gamma, kp, 0.0); });
  const MeanAndError raw = summarize(m);

  EcResult r;
  r.method = Method::monte_carlo;
  r.kernel_mean = cfg.eps + (1.0 - cfg.eps) * raw.mean;
  finish(r, theta, cfg.n);
  // Delta method through -ln(.) / (theta n).
  r.std_error = (1.0 - cfg.eps) * raw.std_error / (r.kernel_mean * theta * cfg.n);
  return r;
}

RateEstimate ergodic_rate_monte_carlo(const SystemConfig& cfg, Role role, const EvalControls& ctl) {
  cfg.validate();
  ctl.validate();
  if (cfg.eps >= 1.0) throw DomainError("ergodic rate undefined for eps = 1");
  const double qinv = specfun::gaussian_q_inv(cfg.eps);
  const double root_n = std::sqrt(static_cast<double>(cfg.n));
  const Moments m = run_chunks(cfg, role, ctl, [&](double gamma) {
    return std::log1p(gamma) / std::numbers::ln2 - dispersion_root(gamma) * qinv / root_n;
  });
  const MeanAndError s = summarize(m);
  return {s.mean, s.std_error};
}

EcResult ec_quadrature(const SystemConfig& cfg, Role role, const EvalControls& ctl,
                       KernelVariant variant) {
  cfg.validate();
  ctl.validate();
  if (cfg.eps >= 1.0) return degenerate_result(Method::quadrature);
  const double theta = cfg.theta(role);
  const KernelParams kp = make_kernel_params(theta, cfg.n, cfg.eps);
  const int k = cfg.order_index(role);

  // Only the (1 - eps)-weighted part is integrated; eps is added exactly.
  auto integrand = [&](double x) {
    const double pdf = ordered_pdf(x, k, cfg.V);
    if (pdf == 0.0) return 0.0;
    const double gamma = link_sinr(role, x, cfg);
    const double g = variant == KernelVariant::exact ? ec_kernel(gamma, kp, 0.0)
                                                     : ec_kernel_approx(gamma, kp, 0.0);
    return g * pdf;
  };

  const double split = ordered_quantile(1.0 - 1e-6, k, cfg.V);
  std::vector<double> cuts;
  for (int j = 1; j <= 14; ++j) cuts.push_back(split * std::pow(10.0, -j));
  QuadOptions opt;
  opt.rel_tol = ctl.quad_rel_tol;
  opt.abs_tol = 0.1 * ctl.quad_rel_tol * cfg.eps;
  opt.max_intervals = 20000;
  const QuadResult head = integrate(integrand, 0.0, split, opt, cuts);
  QuadOptions tail_opt = opt;
  tail_opt.abs_tol = std::max(opt.abs_tol, 1e-3 * ctl.quad_rel_tol * std::fabs(head.value));
  const QuadResult tail = integrate_to_infinity(integrand, split, tail_opt);
  if (!head.converged || !tail.converged) {
    throw ConvergenceError("ec_quadrature: tolerance not reached for the " + std::string(to_string(role)) +
                           " user");
  }

  EcResult r;
  r.method = Method::quadrature;
  r.kernel_mean = cfg.eps + (1.0 - cfg.eps) * (head.value + tail.value);
  finish(r, theta, cfg.n);
  r.diag.truncation_bound = (1.0 - cfg.eps) * (head.abs_error + tail.abs_error) / (r.kernel_mean * theta * cfg.n);
  if (variant == KernelVariant::approx) r.diag.note = "approximate kernel";
  return r;
}

double weak_inner_block(int s, double eta, double alpha_u) {
  return std::pow(alpha_u, s - 1) * specfun::exp_integral_en_scaled(s, eta);
}

double weak_inner_block_finite_sum(int s, double eta, double alpha_u) {
  if (s < 1) throw DomainError("weak_inner_block_finite_sum: s must be >= 1");
  const double x = -alpha_u * eta;
  double factorial_s1 = 1.0;  // (s-1)!
  for (int j = 2; j <= s - 1; ++j) factorial_s1 *= j;
  CompensatedSum acc;
  double fact = 1.0;  // (r-1)!
  for (int r = 1; r <= s - 1; ++r) {
    if (r > 1) fact *= (r - 1);
    acc += fact * std::pow(alpha_u, r) * std::pow(x, s - r - 1);
  }
  const double ei_term = std::exp(eta) * specfun::exp_integral_ei(-eta);
  return acc.value() / factorial_s1 - std::pow(x, s - 1) / factorial_s1 * ei_term;
}

WeakMoment weak_sinr_moment(const SystemConfig& cfg, double exponent, const EvalControls& ctl,
                            std::optional<double> first_order_coefficient) {
  if (!(exponent < 0.0)) throw DomainError("weak_sinr_moment: exponent must be negative");
  const int t = cfg.t;
  const double log_prefactor = -specfun::log_beta(t, cfg.V - t + 1) - std::log(cfg.rho) +
                               (-exponent - 1.0) * std::log(cfg.alpha_u);
  WeakMoment out;
  out.converged = true;
  CompensatedSum value;
  double binom = 1.0;
  for (int r = 0; r < t; ++r) {
    const double eta = (cfg.V - t + 1 + r) / (cfg.rho * cfg.alpha_u);
    const ScaledSeries ser = weak_series(exponent, eta, cfg.alpha_u, ctl, first_order_coefficient);
    const double weight = std::exp(log_prefactor + ser.log_scale);
    const double sign = (r % 2 == 0) ? 1.0 : -1.0;
    value += sign * binom * weight * ser.sum;
    out.abs_bound += binom * weight * ser.tail;
    out.terms = std::max(out.terms, ser.terms);
    out.converged = out.converged && ser.converged;
    out.diverged = out.diverged || ser.diverged;
    binom = binom * (t - 1 - r) / (r + 1);
  }
  out.value = value.value();
  return out;
}

EcResult ec_closed_weak(const SystemConfig& cfg, const EvalControls& ctl, WeakSeriesForm form) {
  cfg.validate();
  ctl.validate();
  if (cfg.eps >= 1.0) return degenerate_result(Method::closed_form);
  if (std::fabs(cfg.alpha_t + cfg.alpha_u - 1.0) > 1e-12) {
    throw DomainError("ec_closed_weak: closed form requires alpha_t + alpha_u = 1");
  }
  const double theta = cfg.theta_t;
  const KernelParams kp = make_kernel_params(theta, cfg.n, cfg.eps);
  const double c = 2.0 * kp.zeta;
  std::optional<double> printed;
  if (form == WeakSeriesForm::as_printed) printed = c;
  const WeakMoment lead = weak_sinr_moment(cfg, c, ctl);
  const WeakMoment corr = weak_sinr_moment(cfg, c - 2.0, ctl, printed);

  const double w_lead = kp.kappa + 1.0;
  const double w_corr = kp.kappa - 0.5 * kp.beta;
  EcResult r;
  r.method = Method::closed_form;
  r.kernel_mean = cfg.eps + (1.0 - cfg.eps) * (lead.value * w_lead - corr.value * w_corr);
  r.diag.series_terms = std::max(lead.terms, corr.terms);
  r.diag.converged = lead.converged && corr.converged;
  r.diag.diverged = lead.diverged || corr.diverged;
  finish(r, theta, cfg.n);
  const double mean_bound = (1.0 - cfg.eps) * (lead.abs_bound * w_lead + corr.abs_bound * std::fabs(w_corr));
  r.diag.truncation_bound = mean_bound < r.kernel_mean
                                ? mean_bound / (r.kernel_mean * theta * cfg.n)
                                : std::numeric_limits<double>::infinity();
  r.diag.series_value = r.value;

  if (!r.diag.converged || !std::isfinite(r.value)) {
    const EcResult fallback = ec_quadrature(cfg, Role::weak, ctl, KernelVariant::approx);
    r.value = fallback.value;
    r.kernel_mean = fallback.kernel_mean;
    r.diag.converged = false;
    r.diag.fell_back_to_quadrature = true;
    r.diag.infeasible = fallback.value <= 0.0;
    r.diag.note = std::string(r.diag.diverged ? "series diverged" : "series truncated at ") +
                  (r.diag.diverged ? "" : std::to_string(r.diag.series_terms) + " terms") +
                  "; value taken from approximate-kernel quadrature";
  }
  return r;
}

EcResult ec_closed_strong(const SystemConfig& cfg, const EvalControls& ctl, bool reversed_alternating_sum) {
  cfg.validate();
  ctl.validate();
  if (cfg.eps >= 1.0) return degenerate_result(Method::closed_form);
  const double theta = cfg.theta_u;
  const KernelParams kp = make_kernel_params(theta, cfg.n, cfg.eps);
  const int u = cfg.u;
  const double w_lead = kp.kappa + 1.0;
  const double w_corr = kp.kappa - 0.5 * kp.beta;
  const double tol = std::min(1e-12, 1e-3 * ctl.quad_rel_tol);

  auto term = [&](int i) {
    const double eta = (cfg.V - u + 1 + i) / (cfg.rho * cfg.alpha_u);
    return specfun::tricomi_u(1.0, 2.0 + 2.0 * kp.zeta, eta, tol) * w_lead -
           specfun::tricomi_u(1.0, 2.0 * kp.zeta, eta, tol) * w_corr;
  };
  const double sum = alternating_binomial_sum(u - 1, term, reversed_alternating_sum);
  const double xi = 1.0 / specfun::beta_fn(u, cfg.V - u + 1);

  EcResult r;
  r.method = Method::closed_form;
  r.kernel_mean = cfg.eps + (1.0 - cfg.eps) * xi / (cfg.rho * cfg.alpha_u) * sum;
  finish(r, theta, cfg.n);
  return r;
}

EcResult ec_closed(const SystemConfig& cfg, Role role, const EvalControls& ctl) {
  return role == Role::weak ? ec_closed_weak(cfg, ctl) : ec_closed_strong(cfg, ctl);
}

EcResult evaluate_ec(const SystemConfig& cfg, Role role, Method method, const EvalControls& ctl) {
  switch (method) {
    case Method::closed_form: return ec_closed(cfg, role, ctl);
    case Method::monte_carlo: return ec_monte_carlo(cfg, role, ctl);
    case Method::quadrature: return ec_quadrature(cfg, role, ctl, KernelVariant::exact);
  }
  throw ConfigError("unknown method");
}

}  // namespace nomaec
