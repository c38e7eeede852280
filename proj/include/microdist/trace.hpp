#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace microdist {

/// An ordered sequence of sensor readings with a fixed sample period.
/// Values are stored as doubles even when the source data is integer-valued;
/// distortions and means are fractional.
struct SensorTrace {
  std::vector<double> values;
  double sample_period = 1.0;  // seconds between readings, > 0
  std::string unit_label;

  std::size_t size() const { return values.size(); }
};

/// Consecutive differences of a trace: deltas[i] = values[i+1] - values[i].
struct DeltaSequence {
  std::vector<double> deltas;

  std::size_t size() const { return deltas.size(); }
};

struct TraceStats {
  double max = 0.0;
  double min = 0.0;
  double mean = 0.0;
  double median = 0.0;
};

inline void validate_trace(const SensorTrace& trace) {
  if (trace.values.empty()) throw std::invalid_argument("trace is empty");
  if (!(trace.sample_period > 0.0))
    throw std::invalid_argument("sample_period must be positive");
  for (std::size_t i = 0; i < trace.values.size(); ++i) {
    if (!std::isfinite(trace.values[i]))
      throw std::invalid_argument("trace value at row " + std::to_string(i) +
                                  " is not finite");
  }
}

/// Max / min / arithmetic mean / median of a series. The median of an
/// even-length series is the average of the two middle order statistics.
inline TraceStats stats_of(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("stats of empty series");
  TraceStats s;
  s.max = values[0];
  s.min = values[0];
  double sum = 0.0;
  for (double v : values) {
    s.max = std::max(s.max, v);
    s.min = std::min(s.min, v);
    sum += v;
  }
  s.mean = sum / static_cast<double>(values.size());

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  s.median = (n % 2 == 1) ? sorted[n / 2]
                          : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return s;
}

inline TraceStats trace_stats(const SensorTrace& trace) {
  if (trace.values.empty()) throw std::invalid_argument("trace is empty");
  return stats_of(trace.values);
}

inline DeltaSequence delta_sequence(const SensorTrace& trace) {
  if (trace.values.size() < 2)
    throw std::invalid_argument("delta sequence needs at least 2 readings");
  DeltaSequence d;
  d.deltas.resize(trace.values.size() - 1);
  for (std::size_t i = 0; i + 1 < trace.values.size(); ++i)
    d.deltas[i] = trace.values[i + 1] - trace.values[i];
  return d;
}

/// |x| of every element; used to report magnitude statistics of a
/// delta sequence alongside the signed ones.
inline std::vector<double> abs_values(std::span<const double> values) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::fabs(values[i]);
  return out;
}

}  // namespace microdist
