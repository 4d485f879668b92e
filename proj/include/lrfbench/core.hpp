#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lrfbench {

// All parameter and gradient storage is double precision; reductions run
// strictly left to right so results are reproducible across builds.
using ParamVector = std::vector<double>;

struct GradSample {
  ParamVector gradient;
  double loss = 0.0;
  std::uint64_t batch_id = 0;
};

struct StepContext {
  std::int64_t step_index = 0;
  double schedule_multiplier = 1.0;
  double weight_decay = 0.0;
};

double dot(const ParamVector& a, const ParamVector& b);
double norm1(const ParamVector& a);
double norm2(const ParamVector& a);
double norm2_squared(const ParamVector& a);

// y += alpha * x
void axpy(double alpha, const ParamVector& x, ParamVector& y);

bool all_finite(const ParamVector& a);

// Throws std::invalid_argument naming `where` if sizes differ.
void require_same_size(const ParamVector& a, const ParamVector& b, const char* where);

// Throws std::domain_error naming `where` if any entry is not finite.
void require_finite(const ParamVector& a, const char* where);
void require_finite(double x, const char* where);

}  // namespace lrfbench
