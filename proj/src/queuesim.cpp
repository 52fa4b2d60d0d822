#include "nomaec/queuesim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <thread>

#include "nomaec/error.hpp"
#include "nomaec/fblrate.hpp"
#include "nomaec/specfun.hpp"

namespace nomaec {
namespace {

std::vector<double> threshold_grid(double bits_per_block, int count) {
  const double base = std::max(bits_per_block, 1.0);
  const double lo = base / 256.0;
  const double hi = base * 64.0;
  std::vector<double> grid{0.0};
  for (int i = 0; i < count - 1; ++i) {
    grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 2)));
  }
  return grid;
}

std::int64_t to_units(double bits) { return std::llround(bits * kUnitsPerBit); }

void attach_fit(QueueStats& stats) {
  try {
    stats.fit = fit_tail_exponent(stats.tail);
    stats.fitted_theta = stats.fit->slope;
    stats.fit_note.clear();
  } catch (const InsufficientDataError& e) {
    stats.fit.reset();
    stats.fitted_theta = 0.0;
    stats.fit_note = e.what();
  }
}

struct Pending {
  std::uint64_t block;
  std::int64_t target;  // cumulative arrivals once this block's last bit is in
};

}  // namespace

void SimSpec::validate() const {
  cfg.validate();
  if (!(num_blocks > warmup_blocks)) throw ConfigError("num_blocks must exceed warmup_blocks");
  if (!(arrival_rate >= 0.0)) throw ConfigError("arrival_rate must be non-negative");
  if (!(d_max >= 0.0)) throw ConfigError("d_max must be non-negative");
  if (fixed_gain && !(*fixed_gain >= 0.0)) throw ConfigError("fixed_gain must be non-negative");
  if (failure_prob && !(*failure_prob >= 0.0 && *failure_prob <= 1.0)) {
    throw ConfigError("failure_prob must lie in [0, 1]");
  }
  if (tail_thresholds < 3) throw ConfigError("tail_thresholds must be >= 3");
}

double TailHistogram::probability(std::size_t i) const {
  return samples == 0 ? 0.0 : static_cast<double>(exceedances.at(i)) / static_cast<double>(samples);
}

TailFit fit_tail_exponent(std::span<const double> thresholds, std::span<const double> probabilities,
                          std::span<const std::uint64_t> hits, std::uint64_t min_hits, int min_points) {
  if (thresholds.size() != probabilities.size() || thresholds.size() != hits.size()) {
    throw ConfigError("fit_tail_exponent: mismatched input lengths");
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (hits[i] >= min_hits && probabilities[i] > 0.0) {
      xs.push_back(thresholds[i]);
      ys.push_back(-std::log(probabilities[i]));
    }
  }
  const int m = static_cast<int>(xs.size());
  if (m < min_points) {
    throw InsufficientDataError("tail fit needs " + std::to_string(min_points) + " thresholds with >= " +
                                std::to_string(min_hits) + " hits, found " + std::to_string(m));
  }
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < m; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw InsufficientDataError("tail fit: thresholds are not distinct");
  TailFit fit;
  fit.slope = sxy / sxx;
  fit.points = m;
  if (m > 2) {
    const double intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (int i = 0; i < m; ++i) {
      const double r = ys[i] - intercept - fit.slope * xs[i];
      rss += r * r;
    }
    fit.std_error = std::sqrt(rss / (m - 2) / sxx);
  }
  return fit;
}

TailFit fit_tail_exponent(const TailHistogram& hist, std::uint64_t min_hits, int min_points) {
  std::vector<double> probs(hist.thresholds.size());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = hist.probability(i);
  return fit_tail_exponent(hist.thresholds, probs, hist.exceedances, min_hits, min_points);
}

QueueStats run_queue_sim(const SimSpec& spec, const BlockObserver& observer) {
  spec.validate();
  const SystemConfig& cfg = spec.cfg;
  const double n = cfg.n;
  const double fail_p = spec.failure_prob.value_or(cfg.eps);
  const double qinv = cfg.eps < 1.0 ? specfun::gaussian_q_inv(cfg.eps) : 0.0;
  const double root_n = std::sqrt(n);
  const std::int64_t arrivals = to_units(spec.arrival_rate * n);

  QueueStats stats;
  stats.tail.thresholds = threshold_grid(spec.arrival_rate * n, spec.tail_thresholds);
  std::vector<std::uint64_t> bucket(stats.tail.thresholds.size(), 0);

  RandomStream rng(spec.seed, 0);
  std::int64_t queue = 0;
  std::int64_t cum_arrived = 0;
  std::int64_t cum_departed = 0;
  std::deque<Pending> pending;
  double queue_sum = 0.0;
  std::uint64_t nonempty = 0;

  auto record_delay = [&](std::uint64_t block, double sojourn) {
    if (block < spec.warmup_blocks) return;
    ++stats.delay_samples;
    if (sojourn > spec.d_max) ++stats.delay_violations;
  };

  for (std::uint64_t k = 0; k < spec.num_blocks; ++k) {
    double x;
    if (spec.fixed_gain) {
      x = *spec.fixed_gain;
    } else {
      const GainSample g = sample_pair(cfg, rng);
      x = spec.role == Role::weak ? g.x_t : g.x_u;
    }
    const bool failed = fail_p > 0.0 && rng.bernoulli(fail_p);
    std::int64_t capacity = 0;
    if (!failed && cfg.eps < 1.0) {
      const double gamma = link_sinr(spec.role, x, cfg);
      const double rate = std::log1p(gamma) / std::numbers::ln2 - dispersion_root(gamma) * qinv / root_n;
      capacity = to_units(n * std::max(rate, 0.0));
    }
    if (failed) ++stats.decoding_failures;

    // Constant arrival and service rates within the block keep the backlog
    // monotone, so the end-of-block queue is exact.
    const std::int64_t before = queue;
    const std::int64_t after = std::max<std::int64_t>(before + arrivals - capacity, 0);
    const std::int64_t delivered = before + arrivals - after;
    const std::int64_t departed_before = cum_departed;
    cum_arrived += arrivals;
    cum_departed += delivered;
    queue = after;

    if (observer) observer({k, before, arrivals, capacity, delivered, after, failed});

    // Older backlogs are served first at rate capacity / n from block start.
    while (!pending.empty() && pending.front().target <= cum_departed) {
      const Pending p = pending.front();
      pending.pop_front();
      const double frac = static_cast<double>(p.target - departed_before) / static_cast<double>(capacity);
      const double departure = static_cast<double>(k) * n + n * frac;
      record_delay(p.block, departure - static_cast<double>(p.block + 1) * n);
    }
    if (after > 0) {
      pending.push_back({k, cum_arrived});
    } else {
      record_delay(k, 0.0);
    }

    if (k >= spec.warmup_blocks) {
      const double bits = static_cast<double>(after) / kUnitsPerBit;
      queue_sum += bits;
      if (after > 0) ++nonempty;
      // Count into the bucket of the largest threshold strictly below Q.
      const auto it = std::lower_bound(stats.tail.thresholds.begin(), stats.tail.thresholds.end(), bits);
      const auto idx = static_cast<std::size_t>(it - stats.tail.thresholds.begin());
      if (idx > 0) ++bucket[idx - 1];
    }
  }

  // Unfinished backlogs whose wait already exceeds the bound still count.
  const double end_time = static_cast<double>(spec.num_blocks) * n;
  for (const Pending& p : pending) {
    const double waited = end_time - static_cast<double>(p.block + 1) * n;
    if (waited > spec.d_max) record_delay(p.block, waited);
  }

  const std::uint64_t measured = spec.num_blocks - spec.warmup_blocks;
  stats.tail.samples = measured;
  stats.tail.exceedances.assign(bucket.size(), 0);
  std::uint64_t running = 0;
  for (std::size_t i = bucket.size(); i-- > 0;) {
    running += bucket[i];
    stats.tail.exceedances[i] = running;
  }
  stats.mean_queue = queue_sum / static_cast<double>(measured);
  stats.nonempty_freq = static_cast<double>(nonempty) / static_cast<double>(measured);
  stats.delay_violation_freq = stats.delay_samples == 0
                                   ? 0.0
                                   : static_cast<double>(stats.delay_violations) /
                                         static_cast<double>(stats.delay_samples);
  attach_fit(stats);
  return stats;
}

QueueStats run_queue_replications(const SimSpec& spec, std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ConfigError("run_queue_replications: no seeds");
  std::vector<QueueStats> runs(seeds.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      pool.emplace_back([&, i] {
        SimSpec s = spec;
        s.seed = seeds[i];
        runs[i] = run_queue_sim(s);
      });
    }
  }
  QueueStats pooled;
  pooled.tail.thresholds = runs.front().tail.thresholds;
  pooled.tail.exceedances.assign(pooled.tail.thresholds.size(), 0);
  double queue_weighted = 0.0, nonempty_weighted = 0.0;
  for (const QueueStats& r : runs) {
    pooled.tail.samples += r.tail.samples;
    for (std::size_t i = 0; i < r.tail.exceedances.size(); ++i) pooled.tail.exceedances[i] += r.tail.exceedances[i];
    pooled.delay_violations += r.delay_violations;
    pooled.delay_samples += r.delay_samples;
    pooled.decoding_failures += r.decoding_failures;
    queue_weighted += r.mean_queue * static_cast<double>(r.tail.samples);
    nonempty_weighted += r.nonempty_freq * static_cast<double>(r.tail.samples);
  }
  const double total = static_cast<double>(pooled.tail.samples);
  pooled.mean_queue = queue_weighted / total;
  pooled.nonempty_freq = nonempty_weighted / total;
  pooled.delay_violation_freq = pooled.delay_samples == 0
                                    ? 0.0
                                    : static_cast<double>(pooled.delay_violations) /
                                          static_cast<double>(pooled.delay_samples);
  attach_fit(pooled);
  return pooled;
}

}  // namespace nomaec
