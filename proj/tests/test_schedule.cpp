#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "lrfbench/schedule.hpp"

using namespace lrfbench;

TEST_CASE("horizon is round-half-up of alpha times the budget") {
  CHECK(horizon_steps(ScheduleSpec::warmup_cosine(0.05, 0.5), 31998) == 15999);
  CHECK(horizon_steps(ScheduleSpec::warmup_cosine(0.05, 0.33), 2000) == 660);
  CHECK(horizon_steps(ScheduleSpec::warmup_cosine(0.05, 0.66), 2000) == 1320);
  CHECK(horizon_steps(ScheduleSpec::warmup_cosine(0.05, 1.0), 10000) == 10000);
  // Tiny budgets still get a nonempty schedule.
  CHECK(horizon_steps(ScheduleSpec::warmup_cosine(0.05, 0.33), 1) == 1);
  CHECK(horizon_steps(ScheduleSpec::constant(), 5000) == 5000);
}

TEST_CASE("warmup ramp is linear from zero") {
  auto s = ScheduleSpec::warmup_cosine(0.1, 1.0);
  const std::int64_t t_max = 1000;  // warmup covers steps 0..100
  CHECK(schedule_multiplier(s, 0, t_max) == 0.0);
  CHECK(schedule_multiplier(s, 50, t_max) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(schedule_multiplier(s, 100, t_max) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cosine phase hits its midpoint and decays to zero") {
  auto s = ScheduleSpec::warmup_cosine(0.1, 1.0);
  const std::int64_t t_max = 1000;
  // Halfway through the cosine phase: u = 0.1 + 0.9/2 = 0.55.
  CHECK(schedule_multiplier(s, 550, t_max) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(schedule_multiplier(s, 1000, t_max) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(schedule_multiplier(s, 1001, t_max) == 0.0);
  CHECK(schedule_multiplier(s, 5000, t_max) == 0.0);
}

TEST_CASE("short horizons scale the same shape") {
  auto s = ScheduleSpec::warmup_cosine(0.05, 0.5);
  const std::int64_t t_max = 31998;  // horizon 15999
  // Every multiplier is a valid relative step size and the ramp peaks right
  // after warmup.
  double peak = 0.0;
  std::int64_t argpeak = -1;
  for (std::int64_t t = 0; t <= 16000; t += 1) {
    double m = schedule_multiplier(s, t, t_max);
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
    if (m > peak) {
      peak = m;
      argpeak = t;
    }
  }
  CHECK(peak == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(argpeak == warmup_end_step(s, t_max) + 1);
  // Past the horizon the trial earns no step size at all.
  CHECK(schedule_multiplier(s, 15999, t_max) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(schedule_multiplier(s, 16000, t_max) == 0.0);
}

TEST_CASE("cosine phase is nonincreasing") {
  auto s = ScheduleSpec::warmup_cosine(0.02, 0.66);
  const std::int64_t t_max = 5000;
  auto end = horizon_steps(s, t_max);
  double prev = 2.0;
  for (std::int64_t t = warmup_end_step(s, t_max) + 1; t <= end; ++t) {
    double m = schedule_multiplier(s, t, t_max);
    CHECK(m <= prev + 1e-15);
    prev = m;
  }
}

TEST_CASE("constant schedule is flat across the budget") {
  auto s = ScheduleSpec::constant();
  CHECK(schedule_multiplier(s, 0, 100) == 1.0);
  CHECK(schedule_multiplier(s, 99, 100) == 1.0);
  CHECK(schedule_multiplier(s, 100, 100) == 0.0);
  CHECK(warmup_end_step(s, 100) == -1);
}

TEST_CASE("warmup window bound is the last ramp step") {
  auto s = ScheduleSpec::warmup_cosine(0.05, 0.5);
  // horizon 15999, 5% of it is 799.95.
  CHECK(warmup_end_step(s, 31998) == 799);
}

TEST_CASE("shape names round-trip and bad names are rejected") {
  CHECK(schedule_shape_from_string("constant") == ScheduleShape::Constant);
  CHECK(schedule_shape_from_string("warmup_cosine") == ScheduleShape::WarmupCosine);
  CHECK(to_string(ScheduleShape::WarmupCosine) == "warmup_cosine");
  CHECK_THROWS_AS(schedule_shape_from_string("linear"), std::invalid_argument);
}
