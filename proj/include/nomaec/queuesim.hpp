#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nomaec/channel.hpp"

namespace nomaec {

/// Block-fading fluid queue driven by the finite-blocklength service process.
struct SimSpec {
  SystemConfig cfg;
  Role role = Role::strong;
  double arrival_rate = 0.0;  // bits per channel use, arriving at constant rate
  std::uint64_t num_blocks = 100000;
  std::uint64_t warmup_blocks = 1000;
  double d_max = 400.0;  // channel uses
  std::uint64_t seed = 1;
  std::optional<double> fixed_gain;    // bypass fading: same power gain every block
  std::optional<double> failure_prob;  // decoding-failure probability, defaults to cfg.eps
  int tail_thresholds = 48;

  void validate() const;
};

/// Empirical Pr{Q > x}; Q is sampled at the end of every post-warmup block.
struct TailHistogram {
  std::vector<double> thresholds;         // bits, ascending; the first is 0
  std::vector<std::uint64_t> exceedances;  // samples with Q > threshold
  std::uint64_t samples = 0;

  [[nodiscard]] double probability(std::size_t i) const;
};

struct TailFit {
  double slope = 0.0;  // per bit
  double std_error = 0.0;
  int points = 0;
};

/// Least-squares slope of -ln Pr{Q > x} against x over thresholds with at
/// least `min_hits` exceedances. Throws InsufficientDataError when fewer than
/// `min_points` qualify.
TailFit fit_tail_exponent(std::span<const double> thresholds, std::span<const double> probabilities,
                          std::span<const std::uint64_t> hits, std::uint64_t min_hits = 100,
                          int min_points = 5);
TailFit fit_tail_exponent(const TailHistogram& hist, std::uint64_t min_hits = 100, int min_points = 5);

struct QueueStats {
  TailHistogram tail;
  /// Fraction of post-warmup blocks whose last arriving bit waited longer
  /// than d_max.
  double delay_violation_freq = 0.0;
  std::uint64_t delay_violations = 0;
  std::uint64_t delay_samples = 0;
  double nonempty_freq = 0.0;
  double mean_queue = 0.0;  // bits
  std::uint64_t decoding_failures = 0;
  std::optional<TailFit> fit;
  std::string fit_note;
  double fitted_theta = 0.0;  // 0 when the fit is unavailable

  bool operator==(const QueueStats&) const = default;
};

inline bool operator==(const TailFit& a, const TailFit& b) {
  return a.slope == b.slope && a.std_error == b.std_error && a.points == b.points;
}
inline bool operator==(const TailHistogram& a, const TailHistogram& b) {
  return a.thresholds == b.thresholds && a.exceedances == b.exceedances && a.samples == b.samples;
}

/// Queue bookkeeping is done in integer units of 1/kUnitsPerBit bit so flow
/// conservation holds exactly.
inline constexpr std::int64_t kUnitsPerBit = 1024;

struct BlockRecord {
  std::uint64_t block = 0;
  std::int64_t queue_before = 0;
  std::int64_t arrivals = 0;
  std::int64_t capacity = 0;
  std::int64_t delivered = 0;
  std::int64_t queue_after = 0;
  bool decoding_failed = false;
};

using BlockObserver = std::function<void(const BlockRecord&)>;

QueueStats run_queue_sim(const SimSpec& spec, const BlockObserver& observer = {});

/// Runs one simulation per seed concurrently and pools the counts in seed
/// order; the tail fit is redone on the pooled histogram.
QueueStats run_queue_replications(const SimSpec& spec, std::span<const std::uint64_t> seeds);

}  // namespace nomaec
