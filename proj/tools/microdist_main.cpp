// Command-line front end: trace/pad generation, distortion injection, attack
// simulation, window-by-window detection, threshold calibration, and the
// Monte Carlo false-positive/false-negative harness.
//
// Exit codes: 0 success (and no alarm), 2 when `detect` raises an alarm,
// 1 on usage or runtime errors.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "microdist/microdist.hpp"

namespace md = microdist;

namespace {

/// Every subcommand echoes its full effective configuration so any number in
/// a report can be reproduced from the report alone.
class ConfigEcho {
 public:
  void add(const std::string& key, const std::string& value) {
    lines_.emplace_back(key, value);
  }
  void add(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", value);
    add(key, std::string(buf));
  }
  void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }

  void print(const std::string& command) const {
    std::cerr << "# " << command;
    for (const auto& [k, v] : lines_) std::cerr << ' ' << k << '=' << v;
    std::cerr << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

struct OutputOpts {
  std::string path;  // empty = stdout
  std::string format = "csv";

  char separator() const { return format == "tsv" ? '\t' : ','; }

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << text;
  }
};

void add_output_opts(CLI::App* cmd, OutputOpts& opts) {
  cmd->add_option("--out", opts.path, "output file (default stdout)");
  cmd->add_option("--format", opts.format, "csv or tsv")
      ->check(CLI::IsMember({"csv", "tsv"}));
}

md::DetectorKind parse_detector(const std::string& name) {
  if (name == "simple") return md::DetectorKind::simple;
  if (name == "delta") return md::DetectorKind::delta;
  if (name == "filtered") return md::DetectorKind::filtered;
  throw CLI::ValidationError("--algo", "unknown detector: " + name);
}

md::AttackKind parse_attack(const std::string& name) {
  if (name == "none") return md::AttackKind::none;
  if (name == "eda") return md::AttackKind::exact_duplication;
  if (name == "rda") return md::AttackKind::random_distortion;
  if (name == "flood") return md::AttackKind::noise_flood;
  throw CLI::ValidationError("--attack", "unknown attack: " + name);
}

// ---------------------------------------------------------------- gen-trace

struct GenTraceOpts {
  std::string model = "gradual";
  std::size_t n = 0;
  std::size_t days = 1;
  std::uint64_t seed = 1;
  std::string config_file;
  md::GradualModel gradual = md::house_gradual_model();
  md::SolarModel solar = md::solar_plant_model();
  double low = 0.0, high = 10000.0;
  OutputOpts out;
};

void apply_config_file(GenTraceOpts& o) {
  if (o.config_file.empty()) return;
  for (const auto& [key, value] : md::load_key_values(o.config_file)) {
    if (key == "model") o.model = value;
    else if (key == "low") o.low = std::stod(value);
    else if (key == "high") o.high = std::stod(value);
    else if (key == "base_level") o.gradual.base_level = std::stod(value);
    else if (key == "dwell_ratio") o.gradual.dwell_ratio = std::stod(value);
    else if (key == "small_step_scale") o.gradual.small_step_scale = std::stod(value);
    else if (key == "jump_scale") o.gradual.jump_scale = std::stod(value);
    else if (key == "floor") o.gradual.floor = std::stod(value);
    else if (key == "ceiling") o.gradual.ceiling = std::stod(value);
    else if (key == "peak") o.solar.peak = std::stod(value);
    else if (key == "noise_scale") o.solar.noise_scale = std::stod(value);
    else if (key == "day_points") o.solar.day_points = std::stoul(value);
    else throw std::runtime_error("unknown config key: " + key);
  }
}

int run_gen_trace(GenTraceOpts& o) {
  apply_config_file(o);
  md::SensorTrace trace;
  ConfigEcho echo;
  echo.add("model", o.model);
  echo.add("seed", o.seed);
  if (o.model == "uniform") {
    if (o.n == 0) throw std::runtime_error("gen-trace: --n is required");
    trace = md::generate_uniform_trace(o.low, o.high, o.n, o.seed);
    echo.add("n", o.n);
    echo.add("low", o.low);
    echo.add("high", o.high);
  } else if (o.model == "gradual") {
    if (o.n == 0) throw std::runtime_error("gen-trace: --n is required");
    trace = md::generate_gradual_trace(o.gradual, o.n, o.seed);
    echo.add("n", o.n);
    echo.add("base_level", o.gradual.base_level);
    echo.add("dwell_ratio", o.gradual.dwell_ratio);
    echo.add("small_step_scale", o.gradual.small_step_scale);
    echo.add("jump_scale", o.gradual.jump_scale);
    echo.add("floor", o.gradual.floor);
    echo.add("ceiling", o.gradual.ceiling);
  } else if (o.model == "solar") {
    trace = md::generate_solar_trace(o.solar, o.days, o.seed);
    echo.add("days", o.days);
    echo.add("peak", o.solar.peak);
    echo.add("noise_scale", o.solar.noise_scale);
    echo.add("day_points", o.solar.day_points);
  } else {
    throw std::runtime_error("unknown model: " + o.model);
  }
  echo.print("gen-trace");

  if (o.out.path.empty()) {
    std::ostringstream buf;
    buf << "t,value\n";
    char line[64];
    for (std::size_t i = 0; i < trace.size(); ++i) {
      std::snprintf(line, sizeof(line), "%zu,%.17g\n", i, trace.values[i]);
      buf << line;
    }
    std::cout << buf.str();
  } else {
    md::save_trace(o.out.path, trace.values);
  }
  return 0;
}

// ------------------------------------------------------------------ gen-pad

int run_gen_pad(std::size_t n, std::uint64_t seed, const std::string& out) {
  const md::SecretPad pad = md::generate_pad(n, seed);
  ConfigEcho echo;
  echo.add("n", n);
  echo.add("seed", seed);
  echo.print("gen-pad");
  if (out.empty()) {
    for (std::size_t i = 0; i < pad.bits.size(); ++i) {
      std::cout.put(pad.bits[i] ? '1' : '0');
      if ((i + 1) % 64 == 0) std::cout.put('\n');
    }
    if (pad.bits.size() % 64 != 0) std::cout.put('\n');
  } else {
    md::save_pad(pad, out);
  }
  return 0;
}

// ------------------------------------------------------------------- inject

struct EpsilonOpts {
  double epsilon = 0.0;
  double fraction = 0.005;
  bool epsilon_given = false;
  bool fraction_given = false;

  /// Explicit --epsilon wins; otherwise the range rule over the calibration
  /// trace's statistics.
  md::Epsilon resolve(const md::TraceStats& stats, ConfigEcho& echo) const {
    md::Epsilon eps = epsilon_given ? md::Epsilon(epsilon)
                                    : md::choose_epsilon(stats, fraction);
    echo.add("epsilon", eps.value);
    if (!epsilon_given) echo.add("epsilon_fraction", fraction);
    return eps;
  }
};

void add_epsilon_opts(CLI::App* cmd, EpsilonOpts& o) {
  auto* eps = cmd->add_option("--epsilon", o.epsilon, "distortion magnitude (trace units)");
  auto* frac = cmd->add_option("--epsilon-fraction", o.fraction,
                               "distortion as a fraction of the operating range (default 0.005)");
  eps->excludes(frac);
  frac->excludes(eps);
  cmd->callback([&o, eps, frac] {
    o.epsilon_given = eps->count() > 0;
    o.fraction_given = frac->count() > 0;
  });
}

int run_inject(const std::string& trace_path, const std::string& column,
               const std::string& pad_path, const EpsilonOpts& eps_opts,
               const std::string& out) {
  const md::SensorTrace trace = md::load_trace(trace_path, md::Column::parse(column));
  const md::SecretPad pad = md::load_pad(pad_path);
  ConfigEcho echo;
  echo.add("trace", trace_path);
  echo.add("column", column);
  echo.add("pad", pad_path);
  echo.add("rows", trace.size());
  const md::Epsilon eps = eps_opts.resolve(md::trace_stats(trace), echo);
  echo.print("inject");
  const md::DistortedTrace distorted = md::inject(trace, pad, eps);
  md::save_trace(out.empty() ? "distorted.csv" : out, distorted.values);
  return 0;
}

// ------------------------------------------------------------------- attack

int run_attack(const std::string& trace_path, const std::string& column,
               const std::string& attack, double epsilon, double amplitude,
               std::uint64_t seed, const std::string& out) {
  const md::SensorTrace trace = md::load_trace(trace_path, md::Column::parse(column));
  md::AttackScenario scenario;
  scenario.kind = parse_attack(attack);
  scenario.epsilon = epsilon;
  scenario.amplitude = amplitude;
  scenario.seed = seed;
  if (scenario.kind == md::AttackKind::none)
    throw std::runtime_error("attack: pick one of eda|rda|flood");
  ConfigEcho echo;
  echo.add("trace", trace_path);
  echo.add("attack", attack);
  if (scenario.kind == md::AttackKind::random_distortion) echo.add("epsilon", epsilon);
  if (scenario.kind == md::AttackKind::noise_flood) echo.add("flood_amplitude", amplitude);
  echo.add("attack_seed", seed);
  echo.print("attack");
  const md::DistortedTrace fake = md::apply_attack(trace, scenario);
  md::save_trace(out.empty() ? "fake.csv" : out, fake.values);
  return 0;
}

// ------------------------------------------------------------------- detect

struct DetectOpts {
  std::string input;
  std::string column = "value";
  std::string pad_path;
  std::string algo = "filtered";
  double epsilon = 0.0;
  double delta_th = 0.0;
  std::size_t min_count = 0;  // 0 = ceil((n-1)/4)
  std::optional<double> band_low, band_high;
  std::size_t window = 0;
  OutputOpts out;
};

int run_detect(const DetectOpts& o) {
  const md::SensorTrace input = md::load_trace(o.input, md::Column::parse(o.column));
  const md::SecretPad pad = md::load_pad(o.pad_path);
  const md::DetectorKind kind = parse_detector(o.algo);
  if (o.window < 2) throw std::runtime_error("detect: --window must be >= 2");
  if (!(o.epsilon > 0)) throw std::runtime_error("detect: --epsilon is required");

  md::DetectorSpec spec;
  spec.kind = kind;
  spec.epsilon = o.epsilon;
  spec.delta_threshold = o.delta_th;
  if (o.min_count > 0) spec.min_count = o.min_count;
  spec.band_low = o.band_low;
  spec.band_high = o.band_high;
  spec.validate();
  const std::size_t min_count = spec.min_count.value_or(md::default_min_count(o.window));

  const std::size_t windows = input.size() / o.window;
  if (windows == 0) throw std::runtime_error("detect: trace shorter than one window");
  if (pad.size() < windows * o.window)
    throw std::runtime_error("detect: pad too short: " + std::to_string(pad.size()) +
                             " bits for " + std::to_string(windows * o.window) +
                             " readings (pads are never cycled)");

  ConfigEcho echo;
  echo.add("input", o.input);
  echo.add("pad", o.pad_path);
  echo.add("algo", o.algo);
  echo.add("epsilon", o.epsilon);
  if (kind == md::DetectorKind::filtered) {
    echo.add("delta_th", o.delta_th);
    echo.add("min_count", min_count);
  }
  echo.add("band_low", spec.band_low.value_or(
      kind == md::DetectorKind::simple ? o.epsilon : 2 * o.epsilon));
  echo.add("band_high", spec.band_high.value_or(
      kind == md::DetectorKind::simple ? 3 * o.epsilon : 6 * o.epsilon));
  echo.add("window", o.window);
  echo.add("windows_evaluated", windows);
  if (input.size() % o.window != 0)
    echo.add("trailing_readings_skipped", input.size() % o.window);
  echo.print("detect");

  const char sep = o.out.separator();
  std::string text = "window_index,algo,gauge,retained_count,alarm,reason";
  if (sep != ',')
    for (auto& c : text)
      if (c == ',') c = sep;
  text.push_back('\n');

  bool any_alarm = false;
  char buf[160];
  for (std::size_t w = 0; w < windows; ++w) {
    const std::span<const double> readings(input.values.data() + w * o.window, o.window);
    const std::span<const std::uint8_t> bits(pad.bits.data() + w * o.window, o.window);
    const md::Verdict v = md::detail::run_detector_kernel(spec, min_count, readings, bits);
    any_alarm = any_alarm || v.alarm;
    std::string gauge;
    if (v.gauge) {
      std::snprintf(buf, sizeof(buf), "%.6f", *v.gauge);
      gauge = buf;
    }
    const std::size_t retained = kind == md::DetectorKind::simple
                                     ? v.counts.s01 + v.counts.s10
                                     : v.counts.gauge_sets();
    std::snprintf(buf, sizeof(buf), "%zu%c%s%c%s%c%zu%c%d%c%s\n", w, sep, o.algo.c_str(),
                  sep, gauge.c_str(), sep, retained, sep, v.alarm ? 1 : 0, sep,
                  md::reason_name(v.reason));
    text += buf;
  }
  o.out.write(text);
  return any_alarm ? 2 : 0;
}

// ---------------------------------------------------------------- calibrate

int run_calibrate(const std::string& history_path, const std::string& column,
                  double retain_quantile) {
  const md::SensorTrace history =
      md::load_trace(history_path, md::Column::parse(column));
  const md::DeltaSequence deltas = md::delta_sequence(history);
  const md::TraceStats signed_stats = md::stats_of(deltas.deltas);
  const md::TraceStats abs_stats = md::stats_of(md::abs_values(deltas.deltas));
  const double delta_th = md::calibrate_delta_threshold(history, retain_quantile);

  ConfigEcho echo;
  echo.add("history", history_path);
  echo.add("rows", history.size());
  echo.add("retain_quantile", retain_quantile);
  echo.add("delta_max", signed_stats.max);
  echo.add("delta_min", signed_stats.min);
  echo.add("delta_mean", signed_stats.mean);
  echo.add("delta_median", signed_stats.median);
  echo.add("abs_delta_max", abs_stats.max);
  echo.add("abs_delta_min", abs_stats.min);
  echo.add("abs_delta_mean", abs_stats.mean);
  echo.add("abs_delta_median", abs_stats.median);
  echo.print("calibrate");

  if (!(delta_th > 0.0))
    throw std::runtime_error(
        "degenerate-calibration: |delta| quantile is 0 (constant history); "
        "pick a higher quantile or a more representative history");
  std::printf("%.17g\n", delta_th);
  return 0;
}

// ----------------------------------------------------------------- evaluate

struct EvaluateOpts {
  std::string preset;
  std::vector<std::string> detectors;
  std::vector<std::string> attacks;
  std::vector<std::size_t> windows;
  std::size_t trials = 0;
  EpsilonOpts eps;
  double delta_th = 0.0;
  std::size_t min_count = 0;
  std::optional<double> band_low, band_high;
  double flood_amplitude = 0.0;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string input, column = "value";
  std::size_t segment_length = 0;
  bool required_mode = false;
  double target_rate = 0.01;
  OutputOpts out;
};

int run_evaluate(const EvaluateOpts& o) {
  if (o.preset.empty() && o.input.empty())
    throw std::runtime_error("evaluate: pick --preset, or give --input (a trace CSV)");

  md::EvalPreset preset;
  if (!o.preset.empty()) {
    preset = md::preset_by_name(o.preset);
  } else {
    preset.name = "file";
    preset.windows = {30, 60, 90, 120, 150};
    preset.trials = 10000;
  }

  if (!o.input.empty()) {
    md::SensorTrace t = md::load_trace(o.input, md::Column::parse(o.column));
    preset.source = md::TraceSource::from_trace(std::move(t), o.input);
    preset.source.segment_length = o.segment_length;
  }

  ConfigEcho echo;
  if (!o.preset.empty()) echo.add("preset", o.preset);
  echo.add("source", preset.source.label);

  const md::Epsilon eps = [&]() -> md::Epsilon {
    if (o.eps.epsilon_given) {
      echo.add("epsilon", o.eps.epsilon);
      return md::Epsilon(o.eps.epsilon);
    }
    if (!o.eps.fraction_given && !o.preset.empty()) {
      echo.add("epsilon", preset.epsilon);
      return md::Epsilon(preset.epsilon);
    }
    const md::Epsilon e =
        md::choose_epsilon(md::calibration_stats(preset.source, o.seed), o.eps.fraction);
    echo.add("epsilon", e.value);
    echo.add("epsilon_fraction", o.eps.fraction);
    return e;
  }();

  const double delta_th = o.delta_th > 0 ? o.delta_th : preset.delta_threshold;
  const double flood_amp =
      o.flood_amplitude > 0 ? o.flood_amplitude
                            : (preset.flood_amplitude > 0 ? preset.flood_amplitude
                                                          : 10.0 * delta_th);
  const std::vector<std::size_t> windows = o.windows.empty() ? preset.windows : o.windows;
  const std::size_t trials = o.trials > 0 ? o.trials : preset.trials;

  std::vector<md::DetectorKind> detectors;
  for (const auto& name : o.detectors) detectors.push_back(parse_detector(name));
  if (detectors.empty())
    detectors = {md::DetectorKind::simple, md::DetectorKind::delta,
                 md::DetectorKind::filtered};

  echo.add("delta_th", delta_th);
  echo.add("trials", trials);
  echo.add("seed", o.seed);
  echo.add("flood_amplitude", flood_amp);
  if (o.min_count > 0) echo.add("min_count", o.min_count);

  if (o.required_mode) {
    if (detectors.size() != 1)
      throw std::runtime_error("evaluate --required-samples needs exactly one --detector");
    md::DetectorSpec spec;
    spec.kind = detectors[0];
    spec.epsilon = eps.value;
    spec.delta_threshold = delta_th;
    if (o.min_count > 0) spec.min_count = o.min_count;
    spec.band_low = o.band_low;
    spec.band_high = o.band_high;
    md::RequiredSamplesOptions ropt;
    ropt.trials_per_point = trials;
    ropt.master_seed = o.seed;
    ropt.threads = o.threads;
    echo.add("target_rate", o.target_rate);
    echo.print("evaluate");
    const md::RequiredSamplesResult res =
        md::required_samples(spec, preset.source, o.target_rate, ropt);
    std::string text = "n,fp_pct,fn_pct,pass\n";
    char buf[96];
    for (const auto& p : res.probes) {
      std::snprintf(buf, sizeof(buf), "%zu,%.4f,%.4f,%d\n", p.n, p.fp_pct, p.fn_pct,
                    p.pass ? 1 : 0);
      text += buf;
    }
    std::snprintf(buf, sizeof(buf), "required_samples,%zu\n", res.n);
    text += buf;
    o.out.write(text);
    return 0;
  }

  std::vector<md::AttackKind> attacks;
  for (const auto& name : o.attacks) attacks.push_back(parse_attack(name));
  if (attacks.empty())
    attacks = {md::AttackKind::none, md::AttackKind::exact_duplication,
               md::AttackKind::random_distortion};
  echo.print("evaluate");

  md::FpFnReport report;
  for (const md::DetectorKind det : detectors) {
    for (const md::AttackKind atk : attacks) {
      md::TrialConfig cfg;
      cfg.detector.kind = det;
      cfg.detector.epsilon = eps.value;
      cfg.detector.delta_threshold = delta_th;
      if (o.min_count > 0) cfg.detector.min_count = o.min_count;
      cfg.detector.band_low = o.band_low;
      cfg.detector.band_high = o.band_high;
      cfg.attack.kind = atk;
      cfg.attack.epsilon = eps.value;
      cfg.attack.amplitude = flood_amp;
      cfg.trials = trials;
      cfg.source = preset.source;
      cfg.master_seed = o.seed;
      cfg.threads = o.threads;
      const md::FpFnReport part = md::sweep(cfg, windows);
      report.rows.insert(report.rows.end(), part.rows.begin(), part.rows.end());
    }
  }
  o.out.write(report.to_csv(o.out.separator()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"keyed micro-distortion authentication of sensor streams"};
  app.require_subcommand(1);

  // gen-trace
  GenTraceOpts gen_trace;
  auto* cmd_gen_trace = app.add_subcommand("gen-trace", "generate a synthetic trace CSV");
  cmd_gen_trace->add_option("--model", gen_trace.model, "uniform | gradual | solar")
      ->check(CLI::IsMember({"uniform", "gradual", "solar"}));
  cmd_gen_trace->add_option("--n", gen_trace.n, "number of samples");
  cmd_gen_trace->add_option("--days", gen_trace.days, "solar model: daytime segments");
  cmd_gen_trace->add_option("--seed", gen_trace.seed, "generator seed");
  cmd_gen_trace->add_option("--config", gen_trace.config_file, "key=value model file");
  cmd_gen_trace->add_option("--low", gen_trace.low, "uniform low");
  cmd_gen_trace->add_option("--high", gen_trace.high, "uniform high");
  cmd_gen_trace->add_option("--base-level", gen_trace.gradual.base_level);
  cmd_gen_trace->add_option("--dwell-ratio", gen_trace.gradual.dwell_ratio);
  cmd_gen_trace->add_option("--small-step", gen_trace.gradual.small_step_scale);
  cmd_gen_trace->add_option("--jump-scale", gen_trace.gradual.jump_scale);
  cmd_gen_trace->add_option("--floor", gen_trace.gradual.floor);
  cmd_gen_trace->add_option("--ceiling", gen_trace.gradual.ceiling);
  cmd_gen_trace->add_option("--peak", gen_trace.solar.peak);
  cmd_gen_trace->add_option("--noise-scale", gen_trace.solar.noise_scale);
  cmd_gen_trace->add_option("--day-points", gen_trace.solar.day_points);
  add_output_opts(cmd_gen_trace, gen_trace.out);

  // gen-pad
  std::size_t pad_n = 0;
  std::uint64_t pad_seed = 1;
  std::string pad_out;
  auto* cmd_gen_pad = app.add_subcommand("gen-pad", "generate a one-time pad");
  cmd_gen_pad->add_option("--n", pad_n, "pad length in bits")->required();
  cmd_gen_pad->add_option("--seed", pad_seed, "generator seed");
  cmd_gen_pad->add_option("--out", pad_out, "pad file (default stdout)");

  // inject
  std::string inj_trace, inj_column = "value", inj_pad, inj_out;
  EpsilonOpts inj_eps;
  auto* cmd_inject = app.add_subcommand("inject", "apply the keyed micro-distortion");
  cmd_inject->add_option("--trace", inj_trace, "input trace CSV")->required();
  cmd_inject->add_option("--column", inj_column, "column name or 0-based index");
  cmd_inject->add_option("--pad", inj_pad, "pad file")->required();
  add_epsilon_opts(cmd_inject, inj_eps);
  cmd_inject->add_option("--out", inj_out, "output CSV (default distorted.csv)");

  // attack
  std::string atk_trace, atk_column = "value", atk_kind, atk_out;
  double atk_eps = 0.0, atk_amp = 0.0;
  std::uint64_t atk_seed = 1;
  auto* cmd_attack = app.add_subcommand("attack", "forge a fake sensor stream");
  cmd_attack->add_option("--trace", atk_trace, "true readings CSV")->required();
  cmd_attack->add_option("--column", atk_column);
  cmd_attack->add_option("--attack", atk_kind, "eda | rda | flood")->required();
  cmd_attack->add_option("--epsilon", atk_eps, "rda distortion magnitude");
  cmd_attack->add_option("--flood-amplitude", atk_amp, "flood noise amplitude");
  cmd_attack->add_option("--attack-seed", atk_seed);
  cmd_attack->add_option("--out", atk_out, "output CSV (default fake.csv)");

  // detect
  DetectOpts det;
  auto* cmd_detect = app.add_subcommand("detect", "run a detector over tumbling windows");
  cmd_detect->add_option("--input", det.input, "readings CSV")->required();
  cmd_detect->add_option("--column", det.column);
  cmd_detect->add_option("--pad", det.pad_path, "pad file")->required();
  cmd_detect->add_option("--algo", det.algo, "simple | delta | filtered")
      ->check(CLI::IsMember({"simple", "delta", "filtered"}));
  cmd_detect->add_option("--epsilon", det.epsilon, "distortion magnitude")->required();
  cmd_detect->add_option("--delta-th", det.delta_th, "filtration threshold");
  cmd_detect->add_option("--min-count", det.min_count,
                         "minimum retained samples (default ceil((n-1)/4))");
  double det_band_low = 0.0, det_band_high = 0.0;
  auto* bl = cmd_detect->add_option("--band-low", det_band_low);
  auto* bh = cmd_detect->add_option("--band-high", det_band_high);
  cmd_detect->add_option("--window", det.window, "window size n")->required();
  add_output_opts(cmd_detect, det.out);

  // calibrate
  std::string cal_history, cal_column = "value";
  double cal_quantile = 0.9;
  auto* cmd_calibrate =
      app.add_subcommand("calibrate", "derive the filtration threshold from history");
  cmd_calibrate->add_option("--history", cal_history, "attack-free history CSV")->required();
  cmd_calibrate->add_option("--column", cal_column);
  cmd_calibrate->add_option("--retain-quantile", cal_quantile,
                            "|delta| quantile to retain (default 0.9)");

  // evaluate
  EvaluateOpts ev;
  auto* cmd_evaluate =
      app.add_subcommand("evaluate", "Monte Carlo FP/FN tables over detectors x attacks x n");
  auto* preset_opt = cmd_evaluate->add_option("--preset", ev.preset, "house | solar | uniform")
                         ->check(CLI::IsMember({"house", "solar", "uniform"}));
  cmd_evaluate->add_option("--table", ev.preset, "alias for --preset")
      ->check(CLI::IsMember({"house", "solar", "uniform"}))
      ->excludes(preset_opt);
  cmd_evaluate->add_option("--detector", ev.detectors, "simple | delta | filtered (repeatable)");
  cmd_evaluate->add_option("--attack", ev.attacks, "none | eda | rda | flood (repeatable)");
  cmd_evaluate->add_option("--windows", ev.windows, "window sizes n (repeatable)");
  cmd_evaluate->add_option("--trials", ev.trials, "Monte Carlo trials per cell");
  add_epsilon_opts(cmd_evaluate, ev.eps);
  cmd_evaluate->add_option("--delta-th", ev.delta_th, "filtration threshold");
  cmd_evaluate->add_option("--min-count", ev.min_count);
  double ev_band_low = 0.0, ev_band_high = 0.0;
  auto* ebl = cmd_evaluate->add_option("--band-low", ev_band_low);
  auto* ebh = cmd_evaluate->add_option("--band-high", ev_band_high);
  cmd_evaluate->add_option("--flood-amplitude", ev.flood_amplitude,
                           "flood amplitude (default 10 x delta-th)");
  cmd_evaluate->add_option("--seed", ev.seed, "master seed");
  cmd_evaluate->add_option("--threads", ev.threads, "worker threads (0 = hardware)");
  cmd_evaluate->add_option("--input", ev.input, "evaluate a trace file instead of a model");
  cmd_evaluate->add_option("--column", ev.column);
  cmd_evaluate->add_option("--segment-length", ev.segment_length,
                           "confine windows to segments of this length");
  cmd_evaluate->add_flag("--required-samples", ev.required_mode,
                         "search the smallest n meeting --target-rate");
  cmd_evaluate->add_option("--target-rate", ev.target_rate,
                           "FP/FN target for --required-samples (default 0.01)");
  add_output_opts(cmd_evaluate, ev.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_gen_trace->parsed()) return run_gen_trace(gen_trace);
    if (cmd_gen_pad->parsed()) return run_gen_pad(pad_n, pad_seed, pad_out);
    if (cmd_inject->parsed())
      return run_inject(inj_trace, inj_column, inj_pad, inj_eps, inj_out);
    if (cmd_attack->parsed())
      return run_attack(atk_trace, atk_column, atk_kind, atk_eps, atk_amp, atk_seed, atk_out);
    if (cmd_detect->parsed()) {
      if (bl->count() > 0) det.band_low = det_band_low;
      if (bh->count() > 0) det.band_high = det_band_high;
      return run_detect(det);
    }
    if (cmd_calibrate->parsed()) return run_calibrate(cal_history, cal_column, cal_quantile);
    if (cmd_evaluate->parsed()) {
      if (ebl->count() > 0) ev.band_low = ev_band_low;
      if (ebh->count() > 0) ev.band_high = ev_band_high;
      return run_evaluate(ev);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
