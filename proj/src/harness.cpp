#include "lrfbench/harness.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "lrfbench/rng.hpp"

namespace lrfbench {

std::optional<std::int64_t> first_meeting_step(const std::vector<EvalPoint>& history,
                                               double target, MetricDirection dir) {
  for (const auto& p : history)
    if (metric_meets_target(p.metric, target, dir)) return p.step;
  return std::nullopt;
}

std::int64_t eval_interval(std::int64_t t_max) { return std::max<std::int64_t>(1, t_max / 100); }

double runtime_fraction(const TrialRecord& record, std::int64_t t_max) {
  if (!record.steps_to_target) return std::numeric_limits<double>::infinity();
  return static_cast<double>(*record.steps_to_target) / static_cast<double>(t_max);
}

TrialRecord run_trial(const Workload& wl, const TrialSpec& spec, double target) {
  if (spec.workload != wl.name())
    throw std::invalid_argument("trial spec names workload " + spec.workload + ", got " +
                                wl.name());
  TrialRecord rec;
  rec.spec = spec;
  rec.target = target;
  RegularizerKnobs knobs = spec.knobs;
  if (!wl.supports_dropout()) knobs.dropout = 0.0;
  if (!wl.supports_label_smoothing()) knobs.label_smoothing = 0.0;
  rec.spec.knobs = knobs;

  const std::int64_t t_max = wl.t_max();
  const std::int64_t total = horizon_steps(spec.schedule, t_max);
  const std::int64_t interval = eval_interval(t_max);

  ParamVector w = wl.init(spec.seed);
  Optimizer opt(spec.config, w, warmup_end_step(spec.schedule, t_max));

  bool aborted = false;
  for (std::int64_t t = 0; t < total; ++t) {
    GradSample sample = wl.loss_grad(w, mix_seed(spec.seed, static_cast<std::uint64_t>(t)), knobs);
    StepContext ctx{t, schedule_multiplier(spec.schedule, t, t_max), spec.config.weight_decay};
    try {
      opt.step(w, sample, ctx);
    } catch (const std::domain_error&) {
      aborted = true;
      break;
    }
    if (!all_finite(w)) {
      aborted = true;
      break;
    }
    rec.steps_run = t + 1;
    const std::int64_t done = t + 1;
    if (done % interval == 0 || done == total) {
      const double metric = wl.eval(w);
      if (!std::isfinite(metric)) {
        aborted = true;
        break;
      }
      rec.eval_history.push_back({done, metric});
    }
  }
  rec.aborted = aborted;
  if (rec.eval_history.empty())
    rec.final_metric = wl.eval(wl.init(spec.seed));
  else
    rec.final_metric = rec.eval_history.back().metric;
  if (!aborted)
    rec.steps_to_target = first_meeting_step(rec.eval_history, target, wl.direction());
  return rec;
}

void run_parallel(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
  };
  const int n = std::min<int>(jobs, static_cast<int>(count));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) threads.emplace_back(worker);
  for (auto& th : threads) th.join();
}

const WorkloadTarget& SuiteTargets::at(const std::string& workload) const {
  for (const auto& e : entries)
    if (e.workload == workload) return e;
  throw std::invalid_argument("no target for workload: " + workload);
}

const std::vector<double>& oracle_lr_grid() {
  static const std::vector<double> grid = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2};
  return grid;
}

SuiteTargets derive_targets(const Suite& suite, int jobs) {
  SuiteTargets out;
  const auto& grid = oracle_lr_grid();
  constexpr std::uint64_t kSeeds[] = {1, 2, 3};
  for (const auto& wl : suite.workloads) {
    WorkloadTarget entry;
    entry.workload = wl->name();
    entry.runs.resize(grid.size() * std::size(kSeeds));
    run_parallel(entry.runs.size(), jobs, [&](std::size_t i) {
      const double lr = grid[i / std::size(kSeeds)];
      const std::uint64_t seed = kSeeds[i % std::size(kSeeds)];
      TrialSpec spec;
      spec.config = search_base_config("adamw");
      spec.config.lr = lr;
      spec.schedule = ScheduleSpec::warmup_cosine(0.05, 1.0);
      spec.workload = wl->name();
      spec.seed = seed;
      spec.label = "oracle";
      TrialRecord rec = run_trial(*wl, spec, std::numeric_limits<double>::quiet_NaN());
      OracleRun& run = entry.runs[i];
      run.lr = lr;
      run.seed = seed;
      run.aborted = rec.aborted;
      run.final_metric = rec.final_metric;
      double best = rec.final_metric;
      for (const auto& p : rec.eval_history)
        if (metric_meets_target(p.metric, best, wl->direction())) best = p.metric;
      run.best_metric = best;
    });
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const auto& run : entry.runs)
      if (std::isnan(best) || metric_meets_target(run.best_metric, best, wl->direction()))
        best = run.best_metric;
    entry.best_metric = best;
    entry.target = relax_target(best, wl->direction());
    out.entries.push_back(std::move(entry));
  }
  return out;
}

}  // namespace lrfbench
