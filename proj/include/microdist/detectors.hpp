#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "microdist/distortion.hpp"
#include "microdist/pad.hpp"
#include "microdist/trace.hpp"

namespace microdist {

/// Partition of delta positions by the ordered pair of pad bits. Delta i is
/// formed from readings i and i+1, so its pair is (bit[i], bit[i+1]); indices
/// here are 0-based positions into the delta sequence. The sets are pairwise
/// disjoint and cover every delta position.
///
/// The pair determines how the distortion shows up in the delta:
///   i in s00 or s11:  delta'[i] = delta[i]
///   i in s01:         delta'[i] = delta[i] + 2*eps
///   i in s10:         delta'[i] = delta[i] - 2*eps
struct PartitionSets {
  std::vector<std::size_t> s00, s01, s10, s11;
};

inline PartitionSets partition(const SecretPad& pad, std::size_t n) {
  if (n < 2) throw std::invalid_argument("partition needs n >= 2");
  detail::require_pad_covers(pad.size(), n);
  PartitionSets p;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const bool a = pad.bits[i] != 0;
    const bool b = pad.bits[i + 1] != 0;
    if (!a && !b) p.s00.push_back(i);
    else if (!a && b) p.s01.push_back(i);
    else if (a && !b) p.s10.push_back(i);
    else p.s11.push_back(i);
  }
  return p;
}

enum class AlarmReason { none, band_violation, insufficient_samples };

inline const char* reason_name(AlarmReason r) {
  switch (r) {
    case AlarmReason::none: return "none";
    case AlarmReason::band_violation: return "band-violation";
    case AlarmReason::insufficient_samples: return "insufficient-samples";
  }
  return "?";
}

/// Retained sample counts per set. The delta detectors fill all four pair
/// sets; the simple detector works on single-bit sets and reports them in
/// s01 (the +eps set S1) and s10 (the -eps set S0).
struct SetCounts {
  std::size_t s00 = 0, s01 = 0, s10 = 0, s11 = 0;

  std::size_t gauge_sets() const { return s01 + s10; }
};

struct Verdict {
  bool alarm = false;
  AlarmReason reason = AlarmReason::none;
  std::optional<double> gauge;  // absent when too few samples to compute
  SetCounts counts;
};

/// Tuning for the filtered detector. Band endpoints default to [2e, 6e]
/// around the expected genuine gauge of 4e; the filtration threshold and
/// minimum retained count come from calibration and the deployment's sample
/// budget.
struct DetectorConfig {
  double epsilon = 0.0;
  double delta_threshold = 0.0;  // filtration cut on |delta'|
  std::size_t min_count = 1;     // minimum retained samples over s01+s10
  double band_low = 0.0;
  double band_high = 0.0;

  static DetectorConfig with_defaults(Epsilon eps, double delta_threshold,
                                      std::size_t min_count) {
    DetectorConfig c;
    c.epsilon = eps.value;
    c.delta_threshold = delta_threshold;
    c.min_count = min_count;
    c.band_low = 2.0 * eps.value;
    c.band_high = 6.0 * eps.value;
    return c;
  }

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("detector config: epsilon must be > 0");
    if (!(delta_threshold > 0.0))
      throw std::invalid_argument(
          "detector config: delta threshold must be > 0 (degenerate calibration?)");
    if (min_count < 1) throw std::invalid_argument("detector config: min_count must be >= 1");
    if (!(band_low < band_high))
      throw std::invalid_argument("detector config: band_low must be below band_high");
  }
};

/// Default retained-count threshold: half the expected |S01 u S10| of
/// (n-1)/2, tolerating up to 50% filtration on genuine data.
inline std::size_t default_min_count(std::size_t window) {
  if (window < 2) return 1;
  return (window - 1 + 3) / 4;  // ceil((n-1)/4)
}

namespace detail {

/// Shared core of the delta-based detectors. Builds the delta' sequence,
/// drops |delta'| strictly above the threshold (when given), classifies the
/// survivors by pad-bit pair and runs the band check on
/// gauge = mean(delta' | s01) - mean(delta' | s10).
inline Verdict delta_band_check(std::span<const double> readings,
                                std::span<const std::uint8_t> bits,
                                std::optional<double> threshold,
                                std::size_t min_count, double band_low,
                                double band_high) {
  const std::size_t n = readings.size();
  Verdict v;
  double sum01 = 0.0, sum10 = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = readings[i + 1] - readings[i];
    if (threshold && std::fabs(d) > *threshold) continue;  // keep |d| == threshold
    const bool a = bits[i] != 0;
    const bool b = bits[i + 1] != 0;
    if (a == b) {
      (a ? v.counts.s11 : v.counts.s00) += 1;
    } else if (b) {
      v.counts.s01 += 1;
      sum01 += d;
    } else {
      v.counts.s10 += 1;
      sum10 += d;
    }
  }

  if (v.counts.gauge_sets() < min_count || v.counts.s01 == 0 || v.counts.s10 == 0) {
    v.alarm = true;
    v.reason = AlarmReason::insufficient_samples;
    return v;
  }

  const double mu01 = sum01 / static_cast<double>(v.counts.s01);
  const double mu10 = sum10 / static_cast<double>(v.counts.s10);
  v.gauge = mu01 - mu10;
  if (*v.gauge < band_low || *v.gauge > band_high) {
    v.alarm = true;
    v.reason = AlarmReason::band_violation;
  }
  return v;
}

/// Strawman: band check directly on the reading means of the single-bit
/// sets, gauge = mean(readings | bit 1) - mean(readings | bit 0).
inline Verdict simple_band_check(std::span<const double> readings,
                                 std::span<const std::uint8_t> bits,
                                 double band_low, double band_high) {
  Verdict v;
  double sum1 = 0.0, sum0 = 0.0;
  for (std::size_t i = 0; i < readings.size(); ++i) {
    if (bits[i]) {
      v.counts.s01 += 1;
      sum1 += readings[i];
    } else {
      v.counts.s10 += 1;
      sum0 += readings[i];
    }
  }
  if (v.counts.s01 == 0 || v.counts.s10 == 0) {
    v.alarm = true;
    v.reason = AlarmReason::insufficient_samples;
    return v;
  }
  v.gauge = sum1 / static_cast<double>(v.counts.s01) -
            sum0 / static_cast<double>(v.counts.s10);
  if (*v.gauge < band_low || *v.gauge > band_high) {
    v.alarm = true;
    v.reason = AlarmReason::band_violation;
  }
  return v;
}

}  // namespace detail

/// Simple mean difference over raw readings. Genuine streams concentrate the
/// gauge near 2*eps; the default acceptance band is [eps, 3*eps]. Slow on
/// volatile data: the reading spread swamps the distortion until the window
/// is very large.
inline Verdict simple_mean_difference(const DistortedTrace& readings,
                                      const SecretPad& pad, Epsilon eps) {
  if (readings.values.empty()) throw std::invalid_argument("empty readings");
  detail::require_pad_covers(pad.size(), readings.size());
  return detail::simple_band_check(readings.values,
                                   std::span(pad.bits).first(readings.size()),
                                   eps.value, 3.0 * eps.value);
}

/// Same check with explicit band endpoints.
inline Verdict simple_mean_difference(const DistortedTrace& readings,
                                      const SecretPad& pad, double band_low,
                                      double band_high) {
  if (readings.values.empty()) throw std::invalid_argument("empty readings");
  if (!(band_low < band_high)) throw std::invalid_argument("band_low must be below band_high");
  detail::require_pad_covers(pad.size(), readings.size());
  return detail::simple_band_check(readings.values,
                                   std::span(pad.bits).first(readings.size()),
                                   band_low, band_high);
}

/// Delta mean difference without filtration: gauge on consecutive changes,
/// expected 4*eps genuine and 0 under a pad-blind attacker; acceptance band
/// [2*eps, 6*eps], boundary-inclusive.
inline Verdict delta_mean_difference(const DistortedTrace& readings,
                                     const SecretPad& pad, Epsilon eps) {
  if (readings.size() < 2)
    throw std::invalid_argument("delta detector needs at least 2 readings");
  detail::require_pad_covers(pad.size(), readings.size());
  return detail::delta_band_check(readings.values,
                                  std::span(pad.bits).first(readings.size()),
                                  std::nullopt, 1, 2.0 * eps.value, 6.0 * eps.value);
}

/// Full detector: delta'-sequence creation, filtration of |delta'| strictly
/// above config.delta_threshold, partitioning, retained-count check against
/// config.min_count (an undersupplied window is itself an alarm — that is
/// what defeats noise flooding), then the band check on the gauge.
inline Verdict filtered_delta_mean_difference(const DistortedTrace& readings,
                                              const SecretPad& pad,
                                              const DetectorConfig& config) {
  config.validate();
  if (readings.size() < 2)
    throw std::invalid_argument("delta detector needs at least 2 readings");
  if (pad.size() != readings.size())
    throw std::invalid_argument("length mismatch: " + std::to_string(readings.size()) +
                                " readings vs " + std::to_string(pad.size()) +
                                " pad bits");
  return detail::delta_band_check(readings.values, pad.bits, config.delta_threshold,
                                  config.min_count, config.band_low, config.band_high);
}

/// Filtration threshold from attack-free history: the retain_quantile-th
/// quantile (nearest-rank) of |delta|. A constant history yields 0, which
/// DetectorConfig::validate rejects as degenerate.
inline double calibrate_delta_threshold(const SensorTrace& history,
                                        double retain_quantile) {
  if (history.size() < 100)
    throw std::invalid_argument("calibration history too short (need >= 100 readings)");
  if (!(retain_quantile > 0.0 && retain_quantile < 1.0))
    throw std::invalid_argument("retain quantile must be in (0, 1)");
  std::vector<double> mags = abs_values(delta_sequence(history).deltas);
  std::sort(mags.begin(), mags.end());
  const double rank = std::ceil(retain_quantile * static_cast<double>(mags.size()));
  const std::size_t idx =
      std::min(mags.size() - 1, static_cast<std::size_t>(rank) - 1);
  return mags[idx];
}

}  // namespace microdist
