#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "microdist/rng.hpp"
#include "microdist/trace.hpp"

namespace microdist {

/// Two-regime synthetic load model. Most steps are small perturbations of the
/// current level ("dwell"); the rest re-anchor the level near base_level with
/// an exponential excursion of scale jump_scale ("jump"). Dwell steps are
/// heavy-tailed (Student-t, 2 dof) so magnitude statistics concentrate near
/// small_step_scale while occasional much larger moves still occur, and the
/// level process stays stationary over long windows.
struct GradualModel {
  double base_level = 0.0;
  double dwell_ratio = 1.0;       // fraction of steps in the dwell regime
  double small_step_scale = 1.0;  // dwell step scale; median |step| = 0.8165x
  double jump_scale = 2.0;        // excursion scale of level re-anchoring
  double floor = 0.0;
  double ceiling = 0.0;

  void validate() const {
    if (!(floor <= base_level && base_level <= ceiling))
      throw std::invalid_argument("gradual model: need floor <= base_level <= ceiling");
    if (!(dwell_ratio >= 0.0 && dwell_ratio <= 1.0))
      throw std::invalid_argument("gradual model: dwell_ratio must be in [0,1]");
    if (!(small_step_scale >= 0.0))
      throw std::invalid_argument("gradual model: small_step_scale must be >= 0");
    if (!(jump_scale > small_step_scale))
      throw std::invalid_argument("gradual model: jump_scale must exceed small_step_scale");
  }
};

/// Diurnal generation model: a sin^2 envelope from 0 at the segment edges to
/// `peak` at midday, plus random-walk noise with Gaussian steps. One segment
/// is one daytime span of `day_points` samples.
struct SolarModel {
  double peak = 1500.0;
  double noise_scale = 6.0;  // std-dev of one walk step
  std::size_t day_points = 600;
  double floor = 0.0;
  double ceiling = 1576.54;

  void validate() const {
    if (!(peak > 0.0) || !(noise_scale >= 0.0))
      throw std::invalid_argument("solar model: peak must be > 0, noise_scale >= 0");
    if (day_points < 2)
      throw std::invalid_argument("solar model: day_points must be >= 2");
    if (!(floor < ceiling))
      throw std::invalid_argument("solar model: floor must be below ceiling");
  }
};

namespace detail {

inline void fill_uniform(std::vector<double>& out, double low, double high,
                         std::size_t n, Rng& rng) {
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = rng.uniform(low, high);
}

inline void fill_gradual(std::vector<double>& out, const GradualModel& m,
                         std::size_t n, Rng& rng) {
  out.resize(n);
  constexpr double kLn2 = 0.6931471805599453;
  double level = std::clamp(m.base_level, m.floor, m.ceiling);
  out[0] = level;
  for (std::size_t i = 1; i < n; ++i) {
    if (rng.uniform01() < m.dwell_ratio) {
      level += m.small_step_scale * rng.student_t2();
    } else {
      level = m.base_level + m.jump_scale * (rng.exponential() - kLn2);
    }
    level = std::clamp(level, m.floor, m.ceiling);
    out[i] = level;
  }
}

/// One daytime segment of day_points samples.
inline void fill_solar_day(std::vector<double>& out, const SolarModel& m, Rng& rng) {
  const std::size_t n = m.day_points;
  out.resize(n);
  constexpr double kPi = 3.141592653589793238462643;
  double walk = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double envelope = m.peak * std::sin(phase) * std::sin(phase);
    walk += m.noise_scale * rng.normal();
    out[i] = std::clamp(envelope + walk, m.floor, m.ceiling);
  }
}

}  // namespace detail

/// n i.i.d. uniform samples over [low, high); pure function of (params, seed).
inline SensorTrace generate_uniform_trace(double low, double high, std::size_t n,
                                          std::uint64_t seed) {
  if (!(low < high)) throw std::invalid_argument("uniform trace: need low < high");
  if (n < 1) throw std::invalid_argument("uniform trace: need n >= 1");
  SensorTrace t;
  Rng rng(seed);
  detail::fill_uniform(t.values, low, high, n, rng);
  return t;
}

inline SensorTrace generate_gradual_trace(const GradualModel& model, std::size_t n,
                                          std::uint64_t seed) {
  model.validate();
  if (n < 1) throw std::invalid_argument("gradual trace: need n >= 1");
  SensorTrace t;
  Rng rng(seed);
  detail::fill_gradual(t.values, model, n, rng);
  return t;
}

/// `days` consecutive daytime segments (night samples are not emitted; they
/// are trivial to authenticate and excluded from evaluation).
inline SensorTrace generate_solar_trace(const SolarModel& model, std::size_t days,
                                        std::uint64_t seed) {
  model.validate();
  if (days < 1) throw std::invalid_argument("solar trace: need days >= 1");
  SensorTrace t;
  t.values.reserve(days * model.day_points);
  std::vector<double> day;
  for (std::size_t d = 0; d < days; ++d) {
    Rng rng(derive_seed(seed, d));
    detail::fill_solar_day(day, model, rng);
    t.values.insert(t.values.end(), day.begin(), day.end());
  }
  return t;
}

}  // namespace microdist
