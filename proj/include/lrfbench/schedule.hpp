#pragma once

#include <cstdint>
#include <string>

namespace lrfbench {

enum class ScheduleShape { Constant, WarmupCosine };

// A relative schedule: a multiplier in [0, 1] applied on top of whatever step
// size the optimizer produces internally. Horizons are expressed as a
// fraction alpha of the workload's step budget.
struct ScheduleSpec {
  ScheduleShape shape = ScheduleShape::Constant;
  double warmup_fraction = 0.05;  // fraction of the horizon spent ramping up
  double alpha = 1.0;             // horizon as a fraction of t_max

  static ScheduleSpec constant();
  static ScheduleSpec warmup_cosine(double warmup_fraction, double alpha);
};

ScheduleShape schedule_shape_from_string(const std::string& s);
std::string to_string(ScheduleShape shape);

// Number of steps the schedule is defined over: round-half-up of alpha*t_max,
// at least 1. Constant schedules use t_max itself.
std::int64_t horizon_steps(const ScheduleSpec& spec, std::int64_t t_max);

// Multiplier at step t of a trial with the given budget. Exactly 0 at and
// beyond the horizon.
double schedule_multiplier(const ScheduleSpec& spec, std::int64_t t, std::int64_t t_max);

// Last step index (inclusive) still inside the warmup ramp, or -1 when the
// schedule has no warmup phase.
std::int64_t warmup_end_step(const ScheduleSpec& spec, std::int64_t t_max);

}  // namespace lrfbench
