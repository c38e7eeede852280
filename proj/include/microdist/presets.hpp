#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "microdist/evaluation.hpp"
#include "microdist/generators.hpp"

namespace microdist {

/// Synthetic stand-in for a 1 Hz household mains feed: level mostly near
/// 775 W with heavy-tailed small fluctuations (median |delta| ~ 3 W) and
/// occasional kW-scale re-anchoring when appliances switch.
inline GradualModel house_gradual_model() {
  GradualModel m;
  m.base_level = 775.0;
  m.dwell_ratio = 0.997;
  m.small_step_scale = 3.7;
  m.jump_scale = 1000.0;
  m.floor = 225.0;
  m.ceiling = 17206.0;
  return m;
}

/// Synthetic stand-in for a per-minute utility-scale PV feed, daytime only:
/// sin^2 ramp to ~1.5 MW with small cloud-noise steps; 600 points per day.
inline SolarModel solar_plant_model() {
  SolarModel m;
  m.peak = 1500.0;
  m.noise_scale = 6.0;
  m.day_points = 600;
  m.floor = 0.0;
  m.ceiling = 1576.54;
  return m;
}

/// Parameter bundle for one-command table reproduction.
struct EvalPreset {
  std::string name;
  TraceSource source;
  double epsilon = 0.0;
  double delta_threshold = 0.0;
  double flood_amplitude = 0.0;  // default 10 x delta threshold
  std::vector<std::size_t> windows;
  std::size_t trials = 0;
};

inline EvalPreset house_preset() {
  EvalPreset p;
  p.name = "house";
  p.source = TraceSource::gradual_source(house_gradual_model());
  p.source.label = "house-gradual";
  p.epsilon = 40.0;
  p.delta_threshold = 200.0;
  p.flood_amplitude = 2000.0;
  p.windows = {30, 60, 90, 120, 150};
  p.trials = 10000;
  return p;
}

inline EvalPreset solar_preset() {
  EvalPreset p;
  p.name = "solar";
  p.source = TraceSource::solar_source(solar_plant_model());
  p.source.label = "solar-day";
  p.epsilon = 7.5;
  p.delta_threshold = 30.0;
  p.flood_amplitude = 300.0;
  p.windows = {30, 60, 90, 120, 600};
  p.trials = 10000;
  return p;
}

/// Readings drawn uniformly over the whole operating range with
/// eps = 0.5% of it; the case where only very large windows help the
/// simple detector.
inline EvalPreset uniform_preset() {
  EvalPreset p;
  p.name = "uniform";
  p.source = TraceSource::uniform_source(0.0, 10000.0);
  p.epsilon = 50.0;
  p.delta_threshold = 7000.0;  // ~90% retention on |u2 - u1|
  p.flood_amplitude = 70000.0;
  p.windows = {20000, 40000, 80000};
  p.trials = 2000;
  return p;
}

inline EvalPreset preset_by_name(const std::string& name) {
  if (name == "house") return house_preset();
  if (name == "solar") return solar_preset();
  if (name == "uniform") return uniform_preset();
  throw std::invalid_argument("unknown preset: " + name);
}

}  // namespace microdist
