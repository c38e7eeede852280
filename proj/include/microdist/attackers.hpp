#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "microdist/distortion.hpp"
#include "microdist/rng.hpp"
#include "microdist/trace.hpp"

namespace microdist {

/// Attacker model: full knowledge of the reading history, no access to the
/// pad. None of the fake-stream builders below take a SecretPad argument;
/// that is the interface-level guarantee, not a runtime check.
enum class AttackKind { none, exact_duplication, random_distortion, noise_flood };

inline const char* attack_name(AttackKind k) {
  switch (k) {
    case AttackKind::none: return "none";
    case AttackKind::exact_duplication: return "eda";
    case AttackKind::random_distortion: return "rda";
    case AttackKind::noise_flood: return "flood";
  }
  return "?";
}

struct AttackScenario {
  AttackKind kind = AttackKind::none;
  double epsilon = 0.0;    // random_distortion only
  double amplitude = 0.0;  // noise_flood only
  std::uint64_t seed = 0;

  void validate() const {
    if (kind == AttackKind::random_distortion && !(epsilon > 0.0))
      throw std::invalid_argument("random-distortion attack needs epsilon > 0");
    if (kind == AttackKind::noise_flood && !(amplitude > 0.0))
      throw std::invalid_argument("noise-flood attack needs amplitude > 0");
  }
};

namespace detail {

inline void eda_span(std::span<const double> in, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i];
}

inline void rda_span(std::span<const double> in, double eps, std::uint64_t seed,
                     std::span<double> out) {
  Rng rng(seed);
  for (std::size_t i = 0; i < in.size(); ++i)
    out[i] = in[i] + (rng.coin() ? eps : -eps);
}

inline void flood_span(std::span<const double> in, double amplitude,
                       std::uint64_t seed, std::span<double> out) {
  Rng rng(seed);
  for (std::size_t i = 0; i < in.size(); ++i)
    out[i] = in[i] + rng.uniform(-amplitude, amplitude);
}

inline void attack_span(std::span<const double> in, const AttackScenario& s,
                        std::uint64_t seed, std::span<double> out) {
  switch (s.kind) {
    case AttackKind::exact_duplication: eda_span(in, out); return;
    case AttackKind::random_distortion: rda_span(in, s.epsilon, seed, out); return;
    case AttackKind::noise_flood: flood_span(in, s.amplitude, seed, out); return;
    case AttackKind::none:
      throw std::invalid_argument("attack kind 'none' produces no fake stream");
  }
}

}  // namespace detail

/// Exact Duplication Attack: the attacker predicts the true readings
/// perfectly and replays them undistorted. Best case for the attacker.
inline DistortedTrace eda(const SensorTrace& trace) {
  validate_trace(trace);
  DistortedTrace out;
  out.values = trace.values;
  out.sample_period = trace.sample_period;
  out.unit_label = trace.unit_label;
  return out;
}

/// Random Distortion Attack: adds or subtracts eps with an independent fair
/// coin per slot (the attacker guesses the pad).
inline DistortedTrace rda(const SensorTrace& trace, Epsilon eps, std::uint64_t seed) {
  validate_trace(trace);
  DistortedTrace out;
  out.values.resize(trace.size());
  out.sample_period = trace.sample_period;
  out.unit_label = trace.unit_label;
  detail::rda_span(trace.values, eps.value, seed, out.values);
  return out;
}

/// Noise flooding: uniform noise in [-amplitude, +amplitude] per slot, aimed
/// at pushing deltas past the filtration threshold and starving the detector.
inline DistortedTrace noise_flood(const SensorTrace& trace, double amplitude,
                                  std::uint64_t seed) {
  validate_trace(trace);
  if (!(amplitude > 0.0)) throw std::invalid_argument("flood amplitude must be > 0");
  DistortedTrace out;
  out.values.resize(trace.size());
  out.sample_period = trace.sample_period;
  out.unit_label = trace.unit_label;
  detail::flood_span(trace.values, amplitude, seed, out.values);
  return out;
}

inline DistortedTrace apply_attack(const SensorTrace& trace, const AttackScenario& s) {
  s.validate();
  switch (s.kind) {
    case AttackKind::exact_duplication: return eda(trace);
    case AttackKind::random_distortion: return rda(trace, Epsilon(s.epsilon), s.seed);
    case AttackKind::noise_flood: return noise_flood(trace, s.amplitude, s.seed);
    case AttackKind::none:
      throw std::invalid_argument("attack kind 'none' produces no fake stream");
  }
  throw std::invalid_argument("unknown attack kind");
}

}  // namespace microdist
