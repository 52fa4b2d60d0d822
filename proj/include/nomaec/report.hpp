#pragma once

#include <string>
#include <vector>

#include "nomaec/eccalc.hpp"

namespace nomaec {

struct LabeledResult {
  Role role;
  std::string label;  // closed_form | quadrature_approx | quadrature_exact | monte_carlo
  EcResult result;
};

struct ValidationCheck {
  std::string name;
  Role role;
  double observed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  SystemConfig cfg;
  std::vector<LabeledResult> evaluations;
  std::vector<ValidationCheck> checks;

  [[nodiscard]] bool all_pass() const;
  [[nodiscard]] std::string to_text() const;
  [[nodiscard]] std::string to_json() const;
};

/// Gap tolerances of the method triangle.
inline constexpr double kStrongClosedRelTol = 1e-6;
inline constexpr double kWeakClosedAbsTol = 1e-4;
inline constexpr double kMcStdErrors = 4.0;

/// Closed form vs approximate-kernel quadrature (same quantity), and exact
/// quadrature vs Monte-Carlo (same quantity), for both users. Failures are
/// report content, never exceptions.
ValidationReport validate_report(const SystemConfig& cfg, const EvalControls& ctl);

}  // namespace nomaec
