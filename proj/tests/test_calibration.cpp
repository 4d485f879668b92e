#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "lrfbench/calibration.hpp"
#include "lrfbench/harness.hpp"

using namespace lrfbench;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SuiteTargets easy_targets(const Suite& suite) {
  SuiteTargets targets;
  for (const auto& wl : suite.workloads) {
    WorkloadTarget t;
    t.workload = wl->name();
    if (wl->name() == "w1_quadratic") t.best_metric = 0.5;
    else if (wl->name() == "w2_noisy_quadratic") t.best_metric = 0.5;
    else if (wl->name() == "w3_logistic") t.best_metric = 0.67;
    else if (wl->name() == "w4_mlp") t.best_metric = 0.5;
    else t.best_metric = 0.5;
    t.target = relax_target(t.best_metric, wl->direction());
    targets.entries.push_back(t);
  }
  return targets;
}

Suite small_suite() {
  Suite s;
  s.workloads.push_back(make_workload("w1_quadratic"));
  s.workloads.push_back(make_workload("w5_matfac"));
  return s;
}

CalibrationConfig small_config() {
  CalibrationConfig cfg;
  cfg.algorithms = {"dog"};
  cfg.horizons = {0.5};
  cfg.points_per_horizon = 3;
  cfg.shortlist = 2;
  cfg.final_seeds = 1;
  cfg.stream_seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("radical inverse matches hand values") {
  CHECK(van_der_corput(1, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(van_der_corput(2, 2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(van_der_corput(3, 2) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(van_der_corput(4, 2) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(van_der_corput(1, 3) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(van_der_corput(2, 3) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(van_der_corput(3, 3) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(van_der_corput(0, 2) == 0.0);
  CHECK_THROWS_AS(van_der_corput(1, 1), std::invalid_argument);
}

TEST_CASE("log map hits endpoints and geometric midpoint") {
  CHECK(log_uniform(0.0, 1e-4, 5e-2) == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(log_uniform(1.0, 1e-4, 5e-2) == doctest::Approx(5e-2).epsilon(1e-12));
  CHECK(log_uniform(0.5, 1e-4, 5e-2) ==
        doctest::Approx(std::sqrt(1e-4 * 5e-2)).epsilon(1e-12));
  CHECK(log_uniform(0.5, 1e-4, 5e-2) == doctest::Approx(2.2360679775e-3).epsilon(1e-9));
  CHECK_THROWS_AS(log_uniform(0.5, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("rotated sequence is deterministic per stream and stays in range") {
  auto a = halton_point(7, 42, 123);
  auto b = halton_point(7, 42, 123);
  auto c = halton_point(7, 42, 124);
  CHECK(a == b);
  CHECK(a != c);
  for (std::uint64_t i = 1; i <= 500; ++i) {
    auto u = halton_point(7, i, 99);
    for (double v : u) {
      CHECK(v >= 0.0);
      CHECK(v < 1.0);
    }
  }
  CHECK_THROWS_AS(halton_point(7, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(halton_point(0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(halton_point(64, 1, 1), std::invalid_argument);
}

TEST_CASE("search points land inside the advertised ranges") {
  CHECK(search_dims("adamw") == 7);
  CHECK(search_dims("nadamw") == 7);
  CHECK(search_dims("prodigy") == 6);
  CHECK(search_dims("dog") == 6);

  std::set<double> warmups;
  std::set<double> dropouts;
  std::set<double> smoothings;
  bool lr_varies = false;
  double first_lr = 0.0;
  for (std::uint64_t i = 1; i <= 1000; ++i) {
    SearchPoint p = resolve_search_point("adamw", i, 11);
    if (i == 1) first_lr = p.config.lr;
    if (p.config.lr != first_lr) lr_varies = true;
    CHECK(p.config.lr >= 1e-4);
    CHECK(p.config.lr <= 5e-2);
    CHECK(p.config.weight_decay >= 1e-5);
    CHECK(p.config.weight_decay <= 0.5);
    CHECK(p.config.beta1 >= 0.0);
    CHECK(p.config.beta1 <= 0.999);
    CHECK(p.config.beta2 >= 0.0);
    CHECK(p.config.beta2 <= 0.999);
    warmups.insert(p.warmup_fraction);
    dropouts.insert(p.knobs.dropout);
    smoothings.insert(p.knobs.label_smoothing);
  }
  CHECK(lr_varies);
  CHECK(warmups == std::set<double>{0.02, 0.05, 0.1});
  CHECK(dropouts == std::set<double>{0.0, 0.1});
  CHECK(smoothings == std::set<double>{0.0, 0.2});

  for (std::uint64_t i = 1; i <= 50; ++i) {
    SearchPoint p = resolve_search_point("prodigy", i, 11);
    CHECK(p.config.lr == 1.0);
    CHECK(p.config.weight_decay >= 1e-5);
    CHECK(p.config.weight_decay <= 0.5);
  }
}

TEST_CASE("shortlist ranking is cost-ascending with earlier points winning ties") {
  std::vector<double> costs = {5.0, 3.0, 3.0, 7.0};
  auto top = rank_points(costs, 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0] == 1);
  CHECK(top[1] == 2);
  CHECK(top[2] == 0);

  auto all = rank_points(costs, 10);
  CHECK(all.size() == 4);
  CHECK(all[3] == 3);

  std::vector<double> with_inf = {kInf, 2.0, kInf};
  auto t2 = rank_points(with_inf, 2);
  CHECK(t2[0] == 1);
  CHECK(t2[1] == 0);
}

TEST_CASE("median over seeds treats unreached as worst") {
  CHECK(median_time({100.0, 300.0, 200.0}) == 200.0);
  CHECK(median_time({100.0, kInf, 200.0}) == 200.0);
  CHECK(median_time({100.0, kInf, kInf}) == kInf);
  CHECK(median_time({100.0, 200.0}) == 150.0);
  CHECK(median_time({100.0, kInf}) == kInf);
  CHECK(median_time({kInf, kInf, kInf, 50.0, 60.0}) == kInf);
  CHECK(median_time({40.0, 50.0, 60.0, kInf, kInf}) == 60.0);
  CHECK_THROWS_AS(median_time({}), std::invalid_argument);
}

TEST_CASE("trial seeds separate every coordinate of the scheme") {
  std::set<std::uint64_t> seen;
  for (std::size_t h = 0; h < 4; ++h)
    for (std::size_t p = 0; p < 4; ++p)
      for (std::size_t w = 0; w < 5; ++w)
        for (std::size_t s = 0; s < 5; ++s)
          seen.insert(calibration_trial_seed(2026, h, p, w, s));
  CHECK(seen.size() == 4u * 4u * 5u * 5u);
  CHECK(calibration_trial_seed(2026, 0, 0, 0, 0) == calibration_trial_seed(2026, 0, 0, 0, 0));
  CHECK(calibration_trial_seed(2026, 0, 0, 0, 0) != calibration_trial_seed(2027, 0, 0, 0, 0));
}

TEST_CASE("sweep covers every horizon, point, and workload once") {
  Suite suite = Suite::desk();
  SuiteTargets targets = easy_targets(suite);

  CalibrationConfig cfg;
  cfg.algorithms = {"momo"};
  cfg.horizons = {0.33, 0.5};
  cfg.points_per_horizon = 2;
  cfg.shortlist = 2;
  cfg.stream_seed = 5;

  AlgoSweep sweep = run_sweep(suite, targets, "momo", cfg);
  CHECK(sweep.records.size() == 2u * 2u * 5u);
  REQUIRE(sweep.points.size() == 2);
  CHECK(sweep.points[0].size() == 2);
  CHECK(sweep.points[0][0].halton_index == 1);
  CHECK(sweep.points[0][1].halton_index == 2);
  CHECK(sweep.points[1][0].halton_index == 3);
  CHECK(sweep.points[1][1].halton_index == 4);

  for (std::size_t h = 0; h < 2; ++h) {
    for (std::size_t p = 0; p < 2; ++p) {
      for (std::size_t w = 0; w < 5; ++w) {
        const TrialRecord& rec = sweep.records[(h * 2 + p) * 5 + w];
        CHECK(rec.spec.workload == suite.workloads[w]->name());
        CHECK(rec.spec.schedule.alpha == cfg.horizons[h]);
        std::int64_t horizon =
            horizon_steps(rec.spec.schedule, suite.workloads[w]->t_max());
        CHECK(rec.steps_run == horizon);
        CHECK(rec.spec.seed ==
              calibration_trial_seed(5, h, p, w, 0));
      }
    }
    REQUIRE(sweep.gm_costs[h].size() == 2);
    for (double c : sweep.gm_costs[h]) {
      CHECK(c > 0.0);
      CHECK(c <= 2.0);
    }
    CHECK(sweep.shortlist[h].size() == 2);
  }
}

TEST_CASE("one-seed finalize replays the sweep records exactly") {
  Suite suite = small_suite();
  SuiteTargets targets = easy_targets(suite);
  CalibrationConfig cfg = small_config();

  CalibrationOutcome out = calibrate(suite, targets, cfg);
  REQUIRE(out.sweeps.size() == 1);
  REQUIRE(out.candidates.size() == 2);  // one horizon, shortlist of two

  const AlgoSweep& sweep = out.sweeps[0];
  for (const CandidateResult& cand : out.candidates) {
    std::size_t p = cand.point_slot;
    REQUIRE(cand.records.size() == suite.workloads.size());
    for (std::size_t w = 0; w < suite.workloads.size(); ++w) {
      const TrialRecord& fin = cand.records[w];
      const TrialRecord& swp = sweep.records[p * suite.workloads.size() + w];
      CHECK(fin.spec.seed == swp.spec.seed);
      CHECK(fin.final_metric == swp.final_metric);
      CHECK(fin.steps_run == swp.steps_run);
      CHECK(fin.steps_to_target == swp.steps_to_target);
      double frac = runtime_fraction(swp, suite.workloads[w]->t_max());
      CHECK(cand.median_fractions[w] == frac);
    }
  }

  REQUIRE(out.pool.rows.size() == 2);
  REQUIRE(out.scores.size() == 2);
  REQUIRE(out.best.size() == 1);
  CHECK(out.best[0].algorithm == "dog");
  CHECK(out.best[0].alpha == 0.5);
  std::size_t b = out.best[0].candidate_index;
  for (std::size_t i = 0; i < out.scores.size(); ++i) CHECK(out.scores[b] >= out.scores[i]);
}

TEST_CASE("calibration is bit-for-bit repeatable") {
  Suite suite = small_suite();
  SuiteTargets targets = easy_targets(suite);
  CalibrationConfig cfg = small_config();
  cfg.final_seeds = 2;

  CalibrationOutcome a = calibrate(suite, targets, cfg);
  CalibrationOutcome b = calibrate(suite, targets, cfg);

  REQUIRE(a.candidates.size() == b.candidates.size());
  CHECK(a.pool.times == b.pool.times);
  CHECK(a.scores == b.scores);
  REQUIRE(a.best.size() == b.best.size());
  for (std::size_t i = 0; i < a.best.size(); ++i)
    CHECK(a.best[i].candidate_index == b.best[i].candidate_index);
  for (std::size_t i = 0; i < a.candidates.size(); ++i) {
    REQUIRE(a.candidates[i].records.size() == b.candidates[i].records.size());
    for (std::size_t j = 0; j < a.candidates[i].records.size(); ++j) {
      CHECK(a.candidates[i].records[j].final_metric ==
            b.candidates[i].records[j].final_metric);
      CHECK(a.candidates[i].records[j].eval_history.size() ==
            b.candidates[i].records[j].eval_history.size());
    }
  }
}

TEST_CASE("reference rows run library defaults on the full budget") {
  Suite suite = small_suite();
  SuiteTargets targets = easy_targets(suite);
  CalibrationConfig cfg = small_config();
  cfg.final_seeds = 3;

  CandidateResult ref = run_reference(suite, targets, "prodigy", cfg);
  CHECK(ref.algorithm == "prodigy");
  CHECK(ref.alpha == 1.0);
  CHECK(ref.horizon_slot == cfg.horizons.size());
  REQUIRE(ref.records.size() == 3u * suite.workloads.size());
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t w = 0; w < suite.workloads.size(); ++w) {
      const TrialRecord& rec = ref.records[s * suite.workloads.size() + w];
      CHECK(rec.spec.schedule.shape == ScheduleShape::Constant);
      CHECK(rec.spec.label == "prodigy_naive");
      CHECK(rec.steps_run == suite.workloads[w]->t_max());
      CHECK(rec.spec.seed == calibration_trial_seed(7, cfg.horizons.size(), 0, w, s));
    }
  }
  REQUIRE(ref.median_fractions.size() == suite.workloads.size());

  // Distinct seeds per evaluation run even in the sentinel slot.
  std::set<std::uint64_t> seeds;
  for (const auto& rec : ref.records) seeds.insert(rec.spec.seed);
  CHECK(seeds.size() == ref.records.size());
}
