#include "lrfbench/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lrfbench {

ScheduleSpec ScheduleSpec::constant() { return {}; }

ScheduleSpec ScheduleSpec::warmup_cosine(double warmup_fraction, double alpha) {
  return {ScheduleShape::WarmupCosine, warmup_fraction, alpha};
}

ScheduleShape schedule_shape_from_string(const std::string& s) {
  if (s == "constant") return ScheduleShape::Constant;
  if (s == "warmup_cosine") return ScheduleShape::WarmupCosine;
  throw std::invalid_argument("unknown schedule shape: " + s);
}

std::string to_string(ScheduleShape shape) {
  return shape == ScheduleShape::Constant ? "constant" : "warmup_cosine";
}

std::int64_t horizon_steps(const ScheduleSpec& spec, std::int64_t t_max) {
  if (spec.shape == ScheduleShape::Constant) return t_max;
  auto h = static_cast<std::int64_t>(std::floor(spec.alpha * static_cast<double>(t_max) + 0.5));
  return h < 1 ? 1 : h;
}

double schedule_multiplier(const ScheduleSpec& spec, std::int64_t t, std::int64_t t_max) {
  if (spec.shape == ScheduleShape::Constant) return t < t_max ? 1.0 : 0.0;
  const auto hor = horizon_steps(spec, t_max);
  const double u = static_cast<double>(t) / static_cast<double>(hor);
  if (u > 1.0) return 0.0;
  const double uw = spec.warmup_fraction;
  if (uw >= 1.0) return u;
  if (uw > 0.0 && u <= uw) return u / uw;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (u - uw) / (1.0 - uw)));
}

std::int64_t warmup_end_step(const ScheduleSpec& spec, std::int64_t t_max) {
  if (spec.shape == ScheduleShape::Constant || spec.warmup_fraction <= 0.0) return -1;
  const auto hor = horizon_steps(spec, t_max);
  return static_cast<std::int64_t>(std::floor(spec.warmup_fraction * static_cast<double>(hor)));
}

}  // namespace lrfbench
