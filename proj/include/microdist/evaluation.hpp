#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "microdist/attackers.hpp"
#include "microdist/detectors.hpp"
#include "microdist/generators.hpp"
#include "microdist/pad.hpp"
#include "microdist/rng.hpp"
#include "microdist/trace.hpp"

namespace microdist {

enum class DetectorKind { simple, delta, filtered };

inline const char* detector_name(DetectorKind k) {
  switch (k) {
    case DetectorKind::simple: return "simple";
    case DetectorKind::delta: return "delta";
    case DetectorKind::filtered: return "filtered";
  }
  return "?";
}

/// Detector selection plus tuning. min_count and the band default per window
/// size (ceil((n-1)/4) and [2e,6e] / [e,3e]) when left unset.
struct DetectorSpec {
  DetectorKind kind = DetectorKind::filtered;
  double epsilon = 0.0;
  double delta_threshold = 0.0;  // filtered only
  std::optional<std::size_t> min_count;
  std::optional<double> band_low;
  std::optional<double> band_high;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("detector spec: epsilon must be > 0");
    if (kind == DetectorKind::filtered && !(delta_threshold > 0.0))
      throw std::invalid_argument(
          "detector spec: filtered detector needs delta threshold > 0 "
          "(degenerate calibration?)");
  }
};

/// Where trial windows come from. File-backed sources follow the stored
/// trace: consecutive tumbling windows when the trace can supply
/// trials x n distinct samples, otherwise seeded random start offsets with
/// replacement. Synthetic sources generate a fresh window (or day segment)
/// per trial from a derived seed. A nonzero segment_length confines windows
/// to one segment (used for daytime-only evaluation of solar-like data).
struct TraceSource {
  enum class Kind { file_trace, uniform, gradual, solar };

  Kind kind = Kind::uniform;
  std::shared_ptr<const SensorTrace> trace;  // file_trace only
  double low = 0.0, high = 1.0;              // uniform only
  GradualModel gradual_model;                // gradual only
  SolarModel solar_model;                    // solar only
  std::size_t segment_length = 0;
  std::string label = "uniform";

  static TraceSource from_trace(SensorTrace t, std::string name = "file") {
    validate_trace(t);
    TraceSource s;
    s.kind = Kind::file_trace;
    s.trace = std::make_shared<SensorTrace>(std::move(t));
    s.label = std::move(name);
    return s;
  }
  static TraceSource uniform_source(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("uniform source: need low < high");
    TraceSource s;
    s.kind = Kind::uniform;
    s.low = lo;
    s.high = hi;
    s.label = "uniform";
    return s;
  }
  static TraceSource gradual_source(GradualModel m) {
    m.validate();
    TraceSource s;
    s.kind = Kind::gradual;
    s.gradual_model = m;
    s.label = "gradual";
    return s;
  }
  static TraceSource solar_source(SolarModel m) {
    m.validate();
    TraceSource s;
    s.kind = Kind::solar;
    s.solar_model = m;
    s.segment_length = m.day_points;
    s.label = "solar";
    return s;
  }

  /// Largest window this source can supply, or SIZE_MAX when unbounded.
  std::size_t max_window() const {
    switch (kind) {
      case Kind::file_trace:
        return segment_length > 0 ? std::min(segment_length, trace->size())
                                  : trace->size();
      case Kind::solar: return solar_model.day_points;
      default: return static_cast<std::size_t>(-1);
    }
  }

  void make_window(std::size_t n, std::size_t trial, std::uint64_t seed,
                   bool tumbling, std::vector<double>& out) const {
    switch (kind) {
      case Kind::file_trace: {
        const auto& v = trace->values;
        std::size_t offset = 0;
        if (tumbling) {
          offset = trial * n;
        } else {
          Rng rng(seed);
          if (segment_length > 0) {
            const std::size_t segments = v.size() / segment_length;
            const std::size_t seg = rng.index(segments);
            offset = seg * segment_length + rng.index(segment_length - n + 1);
          } else {
            offset = rng.index(v.size() - n + 1);
          }
        }
        out.assign(v.begin() + static_cast<std::ptrdiff_t>(offset),
                   v.begin() + static_cast<std::ptrdiff_t>(offset + n));
        return;
      }
      case Kind::uniform: {
        Rng rng(seed);
        detail::fill_uniform(out, low, high, n, rng);
        return;
      }
      case Kind::gradual: {
        Rng rng(seed);
        detail::fill_gradual(out, gradual_model, n, rng);
        return;
      }
      case Kind::solar: {
        Rng rng(seed);
        thread_local std::vector<double> day;
        detail::fill_solar_day(day, solar_model, rng);
        const std::size_t offset = rng.index(day.size() - n + 1);
        out.assign(day.begin() + static_cast<std::ptrdiff_t>(offset),
                   day.begin() + static_cast<std::ptrdiff_t>(offset + n));
        return;
      }
    }
  }
};

/// Statistics of a source for range-rule epsilon selection: file sources use
/// the stored trace, synthetic sources a generated calibration trace.
inline TraceStats calibration_stats(const TraceSource& source, std::uint64_t seed,
                                    std::size_t samples = 100000) {
  switch (source.kind) {
    case TraceSource::Kind::file_trace:
      return stats_of(source.trace->values);
    case TraceSource::Kind::uniform:
      return stats_of(
          generate_uniform_trace(source.low, source.high, samples, derive_seed(seed, 9001))
              .values);
    case TraceSource::Kind::gradual:
      return stats_of(
          generate_gradual_trace(source.gradual_model, samples, derive_seed(seed, 9001))
              .values);
    case TraceSource::Kind::solar: {
      const std::size_t days =
          (samples + source.solar_model.day_points - 1) / source.solar_model.day_points;
      return stats_of(
          generate_solar_trace(source.solar_model, days, derive_seed(seed, 9001)).values);
    }
  }
  throw std::invalid_argument("unknown source kind");
}

struct TrialConfig {
  DetectorSpec detector;
  AttackScenario attack;  // scenario seed is ignored; per-trial seeds derive
                          // from master_seed
  std::size_t window = 0;
  std::size_t trials = 0;
  TraceSource source;
  std::uint64_t master_seed = 1;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// One table cell. fp_pct is set only for attack-free runs and fn_pct only
/// for attack runs; ci95 is the binomial 95% half-width of whichever is set.
struct ReportRow {
  std::string detector;
  std::string attack;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::optional<double> fp_pct;
  std::optional<double> fn_pct;
  double ci95 = 0.0;
  double epsilon = 0.0;
  std::optional<double> delta_th;
  std::optional<std::size_t> min_count;
  std::uint64_t seed = 0;
};

struct FpFnReport {
  std::vector<ReportRow> rows;

  static const char* header() {
    return "detector,attack,n,trials,fp_pct,fn_pct,ci95,epsilon,delta_th,min_count,seed";
  }

  std::string to_csv(char sep = ',') const {
    std::string out = header();
    if (sep != ',')
      for (auto& c : out)
        if (c == ',') c = sep;
    out.push_back('\n');
    char buf[256];
    for (const auto& r : rows) {
      const auto pct = [&](const std::optional<double>& p) -> std::string {
        if (!p) return "";
        std::snprintf(buf, sizeof(buf), "%.4f", *p);
        return buf;
      };
      std::string delta_th_s;
      if (r.delta_th) {
        std::snprintf(buf, sizeof(buf), "%g", *r.delta_th);
        delta_th_s = buf;
      }
      std::string min_count_s;
      if (r.min_count) min_count_s = std::to_string(*r.min_count);
      std::string eps_s;
      std::snprintf(buf, sizeof(buf), "%g", r.epsilon);
      eps_s = buf;
      std::snprintf(buf, sizeof(buf), "%.4f", r.ci95);
      const std::string ci_s = buf;

      std::string line = r.detector;
      for (const std::string& field :
           {r.attack, std::to_string(r.n), std::to_string(r.trials), pct(r.fp_pct),
            pct(r.fn_pct), ci_s, eps_s, delta_th_s, min_count_s,
            std::to_string(r.seed)}) {
        line.push_back(sep);
        line += field;
      }
      line.push_back('\n');
      out += line;
    }
    return out;
  }
};

/// run_trials output plus the alarm tally behind it.
struct RunResult {
  ReportRow row;
  std::size_t alarms = 0;
  std::size_t band_alarms = 0;
  std::size_t insufficient_alarms = 0;
};

namespace detail {

inline Verdict run_detector_kernel(const DetectorSpec& d, std::size_t min_count,
                                   std::span<const double> readings,
                                   std::span<const std::uint8_t> bits) {
  switch (d.kind) {
    case DetectorKind::simple:
      return simple_band_check(readings, bits, d.band_low.value_or(d.epsilon),
                               d.band_high.value_or(3.0 * d.epsilon));
    case DetectorKind::delta:
      return delta_band_check(readings, bits, std::nullopt, 1,
                              d.band_low.value_or(2.0 * d.epsilon),
                              d.band_high.value_or(6.0 * d.epsilon));
    case DetectorKind::filtered:
      return delta_band_check(readings, bits, d.delta_threshold, min_count,
                              d.band_low.value_or(2.0 * d.epsilon),
                              d.band_high.value_or(6.0 * d.epsilon));
  }
  throw std::invalid_argument("unknown detector kind");
}

/// Chunked parallel loop, deterministic by construction: every iteration owns
/// its slot in the output and derives its own seeds, so thread count and
/// scheduling cannot change results.
template <typename Fn>
void parallel_trials(std::size_t trials, unsigned threads, Fn&& body) {
  unsigned t = threads != 0 ? threads : std::thread::hardware_concurrency();
  if (t == 0) t = 1;
  if (t == 1 || trials < 2 * t) {
    for (std::size_t i = 0; i < trials; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::size_t chunk = (trials + t - 1) / t;
  for (unsigned w = 0; w < t; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(trials, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline double binomial_ci95_pct(double p_hat, std::size_t trials) {
  return 100.0 * 1.96 * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

}  // namespace detail

/// Monte Carlo run of one (detector, attack, n) cell. Every trial draws a
/// fresh window and a fresh pad from seeds derived off master_seed; genuine
/// runs inject the distortion, attack runs replace the stream with the fake
/// (the crashed sensor never distorts). Deterministic for a given config,
/// regardless of thread count.
inline RunResult run_trials_detailed(const TrialConfig& cfg) {
  cfg.detector.validate();
  if (cfg.attack.kind != AttackKind::none) cfg.attack.validate();
  if (cfg.window < 2) throw std::invalid_argument("window must be >= 2");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (cfg.window > cfg.source.max_window())
    throw std::invalid_argument("trace shorter than one window of " +
                                std::to_string(cfg.window));

  const std::size_t n = cfg.window;
  const std::size_t min_count =
      cfg.detector.min_count.value_or(default_min_count(n));
  const bool tumbling = cfg.source.kind == TraceSource::Kind::file_trace &&
                        cfg.source.segment_length == 0 &&
                        cfg.source.trace->size() >= cfg.trials * n;

  const std::uint64_t row_seed = derive_seed(
      cfg.master_seed, (static_cast<std::uint64_t>(cfg.detector.kind) << 48) ^
                           (static_cast<std::uint64_t>(cfg.attack.kind) << 40) ^
                           static_cast<std::uint64_t>(n));

  std::vector<std::uint8_t> reasons(cfg.trials, 0);
  detail::parallel_trials(cfg.trials, cfg.threads, [&](std::size_t t) {
    thread_local std::vector<double> window;
    thread_local std::vector<double> readings;
    thread_local std::vector<std::uint8_t> bits;

    const std::uint64_t trial_seed = derive_seed(row_seed, t);
    cfg.source.make_window(n, t, derive_seed(trial_seed, 1), tumbling, window);
    detail::fill_pad(bits, n, derive_seed(trial_seed, 2));
    readings.resize(n);
    if (cfg.attack.kind == AttackKind::none) {
      detail::inject_span(window, bits, cfg.detector.epsilon, readings);
    } else {
      detail::attack_span(window, cfg.attack, derive_seed(trial_seed, 3), readings);
    }
    const Verdict v = detail::run_detector_kernel(cfg.detector, min_count,
                                                  readings, bits);
    reasons[t] = static_cast<std::uint8_t>(v.reason);
  });

  RunResult result;
  for (std::uint8_t r : reasons) {
    if (r == static_cast<std::uint8_t>(AlarmReason::band_violation))
      ++result.band_alarms;
    else if (r == static_cast<std::uint8_t>(AlarmReason::insufficient_samples))
      ++result.insufficient_alarms;
  }
  result.alarms = result.band_alarms + result.insufficient_alarms;

  ReportRow& row = result.row;
  row.detector = detector_name(cfg.detector.kind);
  row.attack = attack_name(cfg.attack.kind);
  row.n = n;
  row.trials = cfg.trials;
  row.epsilon = cfg.detector.epsilon;
  if (cfg.detector.kind == DetectorKind::filtered) {
    row.delta_th = cfg.detector.delta_threshold;
    row.min_count = min_count;
  }
  row.seed = cfg.master_seed;
  const double trials_d = static_cast<double>(cfg.trials);
  if (cfg.attack.kind == AttackKind::none) {
    const double p = static_cast<double>(result.alarms) / trials_d;
    row.fp_pct = 100.0 * p;
    row.ci95 = detail::binomial_ci95_pct(p, cfg.trials);
  } else {
    const double p = static_cast<double>(cfg.trials - result.alarms) / trials_d;
    row.fn_pct = 100.0 * p;
    row.ci95 = detail::binomial_ci95_pct(p, cfg.trials);
  }
  return result;
}

inline FpFnReport run_trials(const TrialConfig& cfg) {
  FpFnReport report;
  report.rows.push_back(run_trials_detailed(cfg).row);
  return report;
}

/// run_trials per window size, one consolidated report.
inline FpFnReport sweep(TrialConfig cfg, const std::vector<std::size_t>& windows) {
  FpFnReport report;
  for (std::size_t n : windows) {
    cfg.window = n;
    report.rows.push_back(run_trials_detailed(cfg).row);
  }
  return report;
}

struct RequiredSamplesOptions {
  std::size_t trials_per_point = 2000;
  std::size_t n_start = 4;
  std::size_t n_cap = std::size_t{1} << 20;
  std::uint64_t master_seed = 1;
  unsigned threads = 0;
};

struct RequiredSamplesResult {
  std::size_t n = 0;  // smallest probed window meeting the target
  struct Probe {
    std::size_t n;
    double fp_pct;
    double fn_pct;
    bool pass;
  };
  std::vector<Probe> probes;
  std::size_t trials_per_point = 0;
};

/// Smallest window at which both the measured false-positive rate (clean
/// runs) and false-negative rate (exact-duplication runs) drop to
/// target_rate, found by doubling from n_start and then bisecting between the
/// last failing and first passing size. Throws when the cap is reached first.
inline RequiredSamplesResult required_samples(const DetectorSpec& detector,
                                              const TraceSource& source,
                                              double target_rate,
                                              const RequiredSamplesOptions& opt = {}) {
  if (!(target_rate > 0.0 && target_rate < 1.0))
    throw std::invalid_argument("target rate must be in (0, 1)");

  RequiredSamplesResult result;
  result.trials_per_point = opt.trials_per_point;

  const auto probe = [&](std::size_t n) -> bool {
    TrialConfig cfg;
    cfg.detector = detector;
    cfg.window = n;
    cfg.trials = opt.trials_per_point;
    cfg.source = source;
    cfg.master_seed = opt.master_seed;
    cfg.threads = opt.threads;

    cfg.attack = AttackScenario{};  // clean: false positives
    const RunResult clean = run_trials_detailed(cfg);
    cfg.attack.kind = AttackKind::exact_duplication;
    const RunResult eda = run_trials_detailed(cfg);

    const double limit = target_rate * static_cast<double>(opt.trials_per_point) + 1e-9;
    const double fp_alarms = static_cast<double>(clean.alarms);
    const double fn_misses = static_cast<double>(cfg.trials - eda.alarms);
    const bool pass = fp_alarms <= limit && fn_misses <= limit;
    result.probes.push_back({n, *clean.row.fp_pct, *eda.row.fn_pct, pass});
    return pass;
  };

  std::size_t lo = 0;  // largest known-failing n (0 = none yet)
  std::size_t hi = 0;  // smallest known-passing n
  for (std::size_t n = std::max<std::size_t>(2, opt.n_start);; n *= 2) {
    const std::size_t capped = std::min(n, std::min(opt.n_cap, source.max_window()));
    if (probe(capped)) {
      hi = capped;
      break;
    }
    lo = capped;
    if (capped >= opt.n_cap || capped >= source.max_window())
      throw std::runtime_error("required_samples: target rate unreachable within n cap " +
                               std::to_string(capped));
  }

  while (hi - lo > std::max<std::size_t>(1, hi / 32)) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (probe(mid))
      hi = mid;
    else
      lo = mid;
  }
  result.n = hi;
  return result;
}

}  // namespace microdist
