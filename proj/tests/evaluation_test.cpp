#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "microdist/evaluation.hpp"
#include "microdist/presets.hpp"

using namespace microdist;
using Catch::Approx;

namespace {

TraceSource constant_source(double level, std::size_t len) {
  SensorTrace t;
  t.values.assign(len, level);
  return TraceSource::from_trace(std::move(t), "constant");
}

TrialConfig base_config(TraceSource source) {
  TrialConfig cfg;
  cfg.detector.kind = DetectorKind::filtered;
  cfg.detector.epsilon = 40.0;
  cfg.detector.delta_threshold = 200.0;
  cfg.window = 30;
  cfg.trials = 400;
  cfg.source = std::move(source);
  cfg.master_seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("run_trials: constant traces give zero FP and zero FN vs EDA") {
  TrialConfig cfg = base_config(constant_source(100.0, 20000));

  const RunResult clean = run_trials_detailed(cfg);
  REQUIRE(clean.row.fp_pct);
  REQUIRE_FALSE(clean.row.fn_pct);
  REQUIRE(*clean.row.fp_pct == 0.0);
  REQUIRE(clean.alarms == 0);

  cfg.attack.kind = AttackKind::exact_duplication;
  const RunResult eda_run = run_trials_detailed(cfg);
  REQUIRE(eda_run.row.fn_pct);
  REQUIRE_FALSE(eda_run.row.fp_pct);
  REQUIRE(*eda_run.row.fn_pct == 0.0);
  REQUIRE(eda_run.alarms == cfg.trials);  // every fake window detected
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  TrialConfig cfg = base_config(TraceSource::gradual_source(house_gradual_model()));
  cfg.trials = 600;

  cfg.threads = 1;
  const std::string serial = run_trials(cfg).to_csv();
  cfg.threads = 4;
  const std::string parallel = run_trials(cfg).to_csv();
  REQUIRE(serial == parallel);
  REQUIRE(run_trials(cfg).to_csv() == serial);

  cfg.master_seed = 8;
  REQUIRE(run_trials(cfg).to_csv() != serial);
}

TEST_CASE("report rows carry the config echo and schema") {
  TrialConfig cfg = base_config(constant_source(50.0, 5000));
  cfg.trials = 50;
  const FpFnReport report = run_trials(cfg);
  REQUIRE(report.rows.size() == 1);
  const ReportRow& row = report.rows[0];
  REQUIRE(row.detector == "filtered");
  REQUIRE(row.attack == "none");
  REQUIRE(row.n == 30);
  REQUIRE(row.trials == 50);
  REQUIRE(row.epsilon == 40.0);
  REQUIRE(row.delta_th == 200.0);
  REQUIRE(row.min_count == 8);  // ceil((30-1)/4)
  REQUIRE(row.seed == 7);

  const std::string csv = report.to_csv();
  REQUIRE(csv.find("detector,attack,n,trials,fp_pct,fn_pct,ci95,epsilon,"
                   "delta_th,min_count,seed") == 0);
  // 10 separators per data row.
  const std::string data_row = csv.substr(csv.find('\n') + 1);
  REQUIRE(std::count(data_row.begin(), data_row.end(), ',') == 10);
}

TEST_CASE("sweep emits one row per window in order") {
  TrialConfig cfg = base_config(constant_source(10.0, 40000));
  cfg.trials = 40;
  const FpFnReport report = sweep(cfg, {30, 60, 90});
  REQUIRE(report.rows.size() == 3);
  REQUIRE(report.rows[0].n == 30);
  REQUIRE(report.rows[1].n == 60);
  REQUIRE(report.rows[2].n == 90);
}

TEST_CASE("window limits are enforced per source") {
  TrialConfig cfg = base_config(constant_source(10.0, 100));
  cfg.window = 101;
  REQUIRE_THROWS_WITH(run_trials_detailed(cfg),
                      Catch::Matchers::ContainsSubstring("shorter"));

  TrialConfig solar = base_config(TraceSource::solar_source(solar_plant_model()));
  solar.detector.epsilon = 7.5;
  solar.detector.delta_threshold = 30.0;
  solar.window = 601;  // a day holds 600 points
  REQUIRE_THROWS(run_trials_detailed(solar));
  solar.window = 600;
  solar.trials = 20;
  REQUIRE_NOTHROW(run_trials_detailed(solar));
}

TEST_CASE("attack rows use the per-trial derived seeds deterministically") {
  TrialConfig cfg = base_config(TraceSource::gradual_source(house_gradual_model()));
  cfg.trials = 300;
  cfg.attack.kind = AttackKind::random_distortion;
  cfg.attack.epsilon = 40.0;
  const RunResult a = run_trials_detailed(cfg);
  const RunResult b = run_trials_detailed(cfg);
  REQUIRE(a.row.fn_pct == b.row.fn_pct);
  REQUIRE(a.band_alarms == b.band_alarms);
  REQUIRE(a.insufficient_alarms == b.insufficient_alarms);
}

TEST_CASE("noise flooding is caught mostly by the retained-count check") {
  TrialConfig cfg = base_config(TraceSource::gradual_source(house_gradual_model()));
  cfg.window = 60;
  cfg.trials = 500;
  cfg.attack.kind = AttackKind::noise_flood;
  cfg.attack.amplitude = 2000.0;  // 10x the filtration threshold
  const RunResult r = run_trials_detailed(cfg);
  REQUIRE(r.alarms >= 495);
  REQUIRE(r.insufficient_alarms > r.band_alarms);
}

TEST_CASE("FP estimates agree across master seeds within binomial error") {
  TrialConfig cfg = base_config(TraceSource::uniform_source(0.0, 10000.0));
  cfg.detector.kind = DetectorKind::simple;
  cfg.detector.epsilon = 50.0;
  cfg.window = 1000;
  cfg.trials = 500;

  std::vector<double> fps;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    cfg.master_seed = seed;
    fps.push_back(*run_trials_detailed(cfg).row.fp_pct);
  }
  for (double fp : fps) {
    const double p = fp / 100.0;
    const double se = 100.0 * std::sqrt(p * (1 - p) / cfg.trials);
    for (double other : fps) REQUIRE(std::fabs(fp - other) <= 3.0 * 1.4142 * se + 1e-9);
  }
}

TEST_CASE("required_samples finds the minimal window on a constant source") {
  DetectorSpec spec;
  spec.kind = DetectorKind::filtered;
  spec.epsilon = 40.0;
  spec.delta_threshold = 200.0;

  RequiredSamplesOptions opt;
  opt.trials_per_point = 400;
  opt.master_seed = 5;
  const RequiredSamplesResult res =
      required_samples(spec, constant_source(100.0, 100000), 0.01, opt);
  // Constant data passes as soon as the pad-split count noise clears the
  // min-count rule; that happens within a few dozen samples.
  REQUIRE(res.n >= 4);
  REQUIRE(res.n <= 64);
  REQUIRE(res.trials_per_point == 400);
  REQUIRE_FALSE(res.probes.empty());
  REQUIRE(res.probes.back().pass);

  // Identical options reproduce the identical search.
  const RequiredSamplesResult res2 =
      required_samples(spec, constant_source(100.0, 100000), 0.01, opt);
  REQUIRE(res2.n == res.n);
  REQUIRE(res2.probes.size() == res.probes.size());
}

TEST_CASE("required_samples reports unreachable targets") {
  DetectorSpec spec;
  spec.kind = DetectorKind::simple;
  spec.epsilon = 50.0;

  RequiredSamplesOptions opt;
  opt.trials_per_point = 100;
  opt.n_cap = 64;  // uniform readings need orders of magnitude more
  REQUIRE_THROWS_WITH(
      required_samples(spec, TraceSource::uniform_source(0.0, 10000.0), 0.001, opt),
      Catch::Matchers::ContainsSubstring("unreachable"));
}

TEST_CASE("calibration_stats reflects the source") {
  const TraceStats uniform = calibration_stats(TraceSource::uniform_source(0.0, 200.0), 3);
  REQUIRE(uniform.max == Approx(200.0).margin(1.0));
  REQUIRE(uniform.min == Approx(0.0).margin(1.0));

  const TraceStats file = calibration_stats(constant_source(42.0, 500), 3);
  REQUIRE(file.max == 42.0);

  // Feeds choose_epsilon: 0.5% of the observed maximum.
  REQUIRE(choose_epsilon(uniform, 0.005).value == Approx(1.0).margin(0.01));
}

TEST_CASE("trial config validation") {
  TrialConfig cfg = base_config(constant_source(1.0, 1000));
  cfg.window = 1;
  REQUIRE_THROWS(run_trials_detailed(cfg));
  cfg.window = 30;
  cfg.trials = 0;
  REQUIRE_THROWS(run_trials_detailed(cfg));
  cfg.trials = 10;
  cfg.detector.epsilon = 0.0;
  REQUIRE_THROWS(run_trials_detailed(cfg));
}
