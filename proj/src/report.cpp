#include "nomaec/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace nomaec {
namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

template <class F>
void evaluate_into(ValidationReport& rep, Role role, const std::string& label, F&& fn) {
  LabeledResult lr{role, label, {}};
  try {
    lr.result = fn();
  } catch (const std::exception& e) {
    lr.result.value = std::nan("");
    lr.result.diag.converged = false;
    lr.result.diag.note = e.what();
  }
  rep.evaluations.push_back(std::move(lr));
}

const EcResult* find(const ValidationReport& rep, Role role, const std::string& label) {
  for (const auto& e : rep.evaluations) {
    if (e.role == role && e.label == label) return &e.result;
  }
  return nullptr;
}

}  // namespace

bool ValidationReport::all_pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  os << "config: V=" << cfg.V << " t=" << cfg.t << " u=" << cfg.u << " alpha_t=" << cfg.alpha_t
     << " alpha_u=" << cfg.alpha_u << " rho=" << fmt("%.6g", cfg.rho) << " ("
     << fmt("%.3f", 10.0 * std::log10(cfg.rho)) << " dB) n=" << cfg.n << " eps=" << fmt("%.3g", cfg.eps)
     << " theta_t=" << fmt("%.6g", cfg.theta_t) << " theta_u=" << fmt("%.6g", cfg.theta_u) << "\n\n";
  for (const auto& e : evaluations) {
    const std::string_view role = to_string(e.role);
    os << "  " << role << std::string(8 - role.size(), ' ') << e.label;
    os << std::string(e.label.size() < 18 ? 18 - e.label.size() : 1, ' ');
    os << fmt("%.10f", e.result.value) << " bit/cu";
    if (e.result.std_error > 0.0) os << "  se " << fmt("%.3g", e.result.std_error);
    if (e.result.diag.series_terms > 0) os << "  terms " << e.result.diag.series_terms;
    if (!e.result.diag.converged) os << "  [not converged]";
    if (!e.result.diag.note.empty()) os << "  (" << e.result.diag.note << ")";
    os << "\n";
  }
  os << "\n";
  for (const auto& c : checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << " [" << to_string(c.role) << "] observed "
       << fmt("%.3g", c.observed) << " tolerance " << fmt("%.3g", c.tolerance);
    if (!c.detail.empty()) os << "  " << c.detail;
    os << "\n";
  }
  os << (all_pass() ? "all checks passed\n" : "some checks failed\n");
  return os.str();
}

std::string ValidationReport::to_json() const {
  using nlohmann::json;
  json j;
  j["config"] = {{"V", cfg.V},           {"t", cfg.t},
                 {"u", cfg.u},           {"alpha_t", cfg.alpha_t},
                 {"alpha_u", cfg.alpha_u}, {"rho", cfg.rho},
                 {"n", cfg.n},           {"eps", cfg.eps},
                 {"theta_t", cfg.theta_t}, {"theta_u", cfg.theta_u}};
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  j["evaluations"] = json::array();
  for (const auto& e : evaluations) {
    j["evaluations"].push_back({{"role", to_string(e.role)},
                                {"label", e.label},
                                {"ec_bits_per_cu", num(e.result.value)},
                                {"std_error", num(e.result.std_error)},
                                {"kernel_mean", num(e.result.kernel_mean)},
                                {"series_terms", e.result.diag.series_terms},
                                {"converged", e.result.diag.converged},
                                {"truncation_bound", num(e.result.diag.truncation_bound)},
                                {"note", e.result.diag.note}});
  }
  j["checks"] = json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"role", to_string(c.role)},
                           {"observed", num(c.observed)},
                           {"tolerance", num(c.tolerance)},
                           {"pass", c.pass},
                           {"detail", c.detail}});
  }
  j["all_pass"] = all_pass();
  return j.dump(2);
}

ValidationReport validate_report(const SystemConfig& cfg, const EvalControls& ctl) {
  cfg.validate();
  ctl.validate();
  ValidationReport rep;
  rep.cfg = cfg;
  for (Role role : {Role::weak, Role::strong}) {
    evaluate_into(rep, role, "closed_form", [&] { return ec_closed(cfg, role, ctl); });
    evaluate_into(rep, role, "quadrature_approx",
                  [&] { return ec_quadrature(cfg, role, ctl, KernelVariant::approx); });
    evaluate_into(rep, role, "quadrature_exact",
                  [&] { return ec_quadrature(cfg, role, ctl, KernelVariant::exact); });
    evaluate_into(rep, role, "monte_carlo", [&] { return ec_monte_carlo(cfg, role, ctl); });
  }

  for (Role role : {Role::weak, Role::strong}) {
    const EcResult* closed = find(rep, role, "closed_form");
    const EcResult* approx = find(rep, role, "quadrature_approx");
    ValidationCheck c{"closed_form_vs_quadrature_approx", role, 0.0, 0.0, false, {}};
    const double diff = closed->value - approx->value;
    if (role == Role::strong) {
      c.observed = std::abs(diff) / std::max(std::abs(approx->value), 1e-300);
      c.tolerance = kStrongClosedRelTol;
      c.detail = "relative gap";
      c.pass = c.observed <= c.tolerance;
    } else {
      c.observed = std::abs(diff);
      c.tolerance = std::max(kWeakClosedAbsTol, closed->diag.truncation_bound);
      c.detail = "absolute gap, bit/cu";
      c.pass = c.observed <= c.tolerance && closed->diag.converged;
      if (!closed->diag.converged) c.detail += "; series did not converge";
    }
    if (!std::isfinite(c.observed)) c.pass = false;
    rep.checks.push_back(std::move(c));

    const EcResult* exact = find(rep, role, "quadrature_exact");
    const EcResult* mc = find(rep, role, "monte_carlo");
    ValidationCheck m{"quadrature_exact_vs_monte_carlo", role, 0.0, 0.0, false, {}};
    m.observed = std::abs(exact->value - mc->value);
    m.tolerance = kMcStdErrors * mc->std_error;
    m.detail = "absolute gap vs " + fmt("%.0f", kMcStdErrors) + " standard errors";
    m.pass = std::isfinite(m.observed) && m.observed <= m.tolerance;
    if (!m.pass && mc->std_error == 0.0) m.pass = m.observed <= 1e-12 * std::max(1.0, std::abs(exact->value));
    rep.checks.push_back(std::move(m));
  }
  return rep;
}

}  // namespace nomaec
