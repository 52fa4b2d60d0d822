#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nomaec/eccalc.hpp"

namespace nomaec {

struct DelaySpec {
  double d_max = 400.0;          // delay bound, channel uses
  double nonempty_prob = 1.0;    // Pr{Q > 0}
  double arrival_rate = 0.0;     // bits per channel use

  void validate() const;
};

/// nonempty_prob * exp(-theta * arrival_rate * d_max). theta is per bit and
/// the rate is in bits per channel use, so the exponent is dimensionless.
/// The result is clamped into (0, nonempty_prob].
double delay_violation_prob(double theta, const DelaySpec& spec);

enum class ArrivalMode {
  effective_capacity,  // arrival rate = EC(theta) at each grid point
  fixed,               // arrival rate = DelayCurveOptions::fixed_rate
};

struct DelayCurveOptions {
  Method method = Method::closed_form;
  ArrivalMode mode = ArrivalMode::effective_capacity;
  double fixed_rate = 0.0;
  double nonempty_prob = 1.0;
};

struct DelayPoint {
  double theta = 0.0;
  double arrival_rate = 0.0;
  double probability = 1.0;
  EcResult ec;
};

/// Delay-violation probability over an ascending theta grid. theta is applied
/// to the evaluated user only.
std::vector<DelayPoint> delay_violation_curve(const SystemConfig& cfg, Role role,
                                              std::span<const double> thetas, double d_max,
                                              const EvalControls& ctl,
                                              const DelayCurveOptions& options = {});

/// eps^{d_max / n}: the value the curve approaches once the error floor of the
/// kernel dominates.
double delay_violation_floor(double eps, int n, double d_max);

}  // namespace nomaec
