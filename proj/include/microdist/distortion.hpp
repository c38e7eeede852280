#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "microdist/pad.hpp"
#include "microdist/trace.hpp"

namespace microdist {

/// Magnitude of the keyed micro-distortion, in trace units. Kept small
/// relative to the operating range so downstream consumers can use the
/// distorted stream directly.
struct Epsilon {
  double value = 0.0;

  explicit Epsilon(double v) : value(v) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("epsilon must be a positive finite value");
  }
};

/// A reading sequence carrying the keyed distortion (or an attacker's
/// imitation of one). Same length and period as its source.
struct DistortedTrace {
  std::vector<double> values;
  double sample_period = 1.0;
  std::string unit_label;

  std::size_t size() const { return values.size(); }
};

namespace detail {

inline void require_pad_covers(std::size_t pad_len, std::size_t n) {
  if (pad_len < n)
    throw std::invalid_argument("pad too short: " + std::to_string(pad_len) +
                                " bits for " + std::to_string(n) + " readings");
}

inline void inject_span(std::span<const double> in, std::span<const std::uint8_t> bits,
                        double eps, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i)
    out[i] = in[i] + (bits[i] ? eps : -eps);
}

}  // namespace detail

/// distorted[i] = trace[i] + eps when bit i is 1, trace[i] - eps when 0.
/// The pad must cover the trace; it is never cycled.
inline DistortedTrace inject(const SensorTrace& trace, const SecretPad& pad,
                             Epsilon eps) {
  validate_trace(trace);
  detail::require_pad_covers(pad.size(), trace.size());
  DistortedTrace out;
  out.values.resize(trace.size());
  out.sample_period = trace.sample_period;
  out.unit_label = trace.unit_label;
  detail::inject_span(trace.values, pad.bits, eps.value, out.values);
  return out;
}

/// Exact algebraic inverse of inject().
inline SensorTrace recover(const DistortedTrace& distorted, const SecretPad& pad,
                           Epsilon eps) {
  if (distorted.values.empty()) throw std::invalid_argument("trace is empty");
  detail::require_pad_covers(pad.size(), distorted.size());
  SensorTrace out;
  out.values.resize(distorted.size());
  out.sample_period = distorted.sample_period;
  out.unit_label = distorted.unit_label;
  for (std::size_t i = 0; i < distorted.size(); ++i)
    out.values[i] = distorted.values[i] - (pad.bits[i] ? eps.value : -eps.value);
  return out;
}

/// Range rule: eps = fraction * stats.max, with the calibration trace's
/// maximum standing in for the operating range. Fraction is hard-capped at
/// 5%; larger distortions would no longer be "micro". An explicit Epsilon
/// can always be constructed directly to override this rule.
inline Epsilon choose_epsilon(const TraceStats& stats, double fraction) {
  if (!(fraction > 0.0 && fraction <= 0.05))
    throw std::invalid_argument("epsilon fraction must be in (0, 0.05]");
  if (!(stats.max > 0.0))
    throw std::invalid_argument("non-positive operating range");
  return Epsilon(fraction * stats.max);
}

}  // namespace microdist
