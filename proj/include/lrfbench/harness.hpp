#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lrfbench/optimizer.hpp"
#include "lrfbench/schedule.hpp"
#include "lrfbench/workload.hpp"

namespace lrfbench {

struct TrialSpec {
  OptimizerConfig config;
  ScheduleSpec schedule;
  RegularizerKnobs knobs;
  std::string workload;
  std::uint64_t seed = 0;
  std::string label;
};

struct EvalPoint {
  std::int64_t step = 0;  // optimizer steps completed when measured
  double metric = 0.0;
};

struct TrialRecord {
  TrialSpec spec;
  std::vector<EvalPoint> eval_history;
  std::optional<std::int64_t> steps_to_target;
  double final_metric = 0.0;
  bool aborted = false;
  std::int64_t steps_run = 0;
  double target = 0.0;
};

// Steps-completed count of the first evaluation meeting the target, if any.
std::optional<std::int64_t> first_meeting_step(const std::vector<EvalPoint>& history,
                                               double target, MetricDirection dir);

// Evaluation cadence: every E steps plus the final step.
std::int64_t eval_interval(std::int64_t t_max);

// Fraction of the step budget spent reaching the target; +inf when unreached.
double runtime_fraction(const TrialRecord& record, std::int64_t t_max);

// Runs one trial to its schedule horizon (or the full budget for constant
// schedules). Pure: identical spec and target give an identical record.
// Knobs the workload does not support are silently zeroed. A non-finite
// loss, gradient, parameter, or metric aborts the trial as unreached.
TrialRecord run_trial(const Workload& wl, const TrialSpec& spec, double target);

// Runs `count` trials, `jobs` at a time, preserving result order.
void run_parallel(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

struct OracleRun {
  double lr = 0.0;
  std::uint64_t seed = 0;
  double best_metric = 0.0;
  double final_metric = 0.0;
  bool aborted = false;
};

struct WorkloadTarget {
  std::string workload;
  double best_metric = 0.0;
  double target = 0.0;
  std::vector<OracleRun> runs;
};

struct SuiteTargets {
  std::vector<WorkloadTarget> entries;
  const WorkloadTarget& at(const std::string& workload) const;
};

// Reference sweep that sets the bar on every workload: a tuned step-size grid
// for adamw under a full-length warmup-cosine schedule, three seeds, no
// regularizers. The target is the best metric seen at any evaluation,
// relaxed 5% in the chaser's favor.
SuiteTargets derive_targets(const Suite& suite, int jobs = 1);

const std::vector<double>& oracle_lr_grid();

}  // namespace lrfbench
