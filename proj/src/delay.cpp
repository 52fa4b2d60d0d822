#include "nomaec/delay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nomaec/error.hpp"

namespace nomaec {

void DelaySpec::validate() const {
  if (!(d_max >= 0.0)) throw ConfigError("d_max must be non-negative");
  if (!(nonempty_prob > 0.0 && nonempty_prob <= 1.0)) throw ConfigError("nonempty_prob must lie in (0, 1]");
  if (!(arrival_rate >= 0.0)) throw ConfigError("arrival_rate must be non-negative");
}

double delay_violation_prob(double theta, const DelaySpec& spec) {
  if (!(theta > 0.0)) throw DomainError("delay_violation_prob: theta must be positive");
  spec.validate();
  const double p = spec.nonempty_prob * std::exp(-theta * spec.arrival_rate * spec.d_max);
  return std::clamp(p, std::numeric_limits<double>::min(), spec.nonempty_prob);
}

std::vector<DelayPoint> delay_violation_curve(const SystemConfig& cfg, Role role,
                                              std::span<const double> thetas, double d_max,
                                              const EvalControls& ctl, const DelayCurveOptions& options) {
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (!(thetas[i] > 0.0)) throw ConfigError("theta grid must be positive");
    if (i > 0 && !(thetas[i] > thetas[i - 1])) throw ConfigError("theta grid must be ascending");
  }
  std::vector<DelayPoint> curve;
  curve.reserve(thetas.size());
  for (double theta : thetas) {
    SystemConfig point = cfg;
    (role == Role::weak ? point.theta_t : point.theta_u) = theta;
    DelayPoint dp;
    dp.theta = theta;
    if (options.mode == ArrivalMode::effective_capacity) {
      dp.ec = evaluate_ec(point, role, options.method, ctl);
      dp.arrival_rate = std::max(dp.ec.value, 0.0);
    } else {
      dp.arrival_rate = options.fixed_rate;
    }
    dp.probability = delay_violation_prob(theta, {d_max, options.nonempty_prob, dp.arrival_rate});
    curve.push_back(std::move(dp));
  }
  return curve;
}

double delay_violation_floor(double eps, int n, double d_max) { return std::pow(eps, d_max / n); }

}  // namespace nomaec
