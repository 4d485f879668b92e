#include "lrfbench/core.hpp"

#include <cmath>
#include <stdexcept>

namespace lrfbench {

double dot(const ParamVector& a, const ParamVector& b) {
  require_same_size(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm1(const ParamVector& a) {
  double acc = 0.0;
  for (double x : a) acc += std::abs(x);
  return acc;
}

double norm2_squared(const ParamVector& a) {
  double acc = 0.0;
  for (double x : a) acc += x * x;
  return acc;
}

double norm2(const ParamVector& a) { return std::sqrt(norm2_squared(a)); }

void axpy(double alpha, const ParamVector& x, ParamVector& y) {
  require_same_size(x, y, "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool all_finite(const ParamVector& a) {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

void require_same_size(const ParamVector& a, const ParamVector& b, const char* where) {
  if (a.size() != b.size())
    throw std::invalid_argument(std::string(where) + ": size mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

void require_finite(const ParamVector& a, const char* where) {
  if (!all_finite(a)) throw std::domain_error(std::string(where) + ": non-finite value");
}

void require_finite(double x, const char* where) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(where) + ": non-finite value");
}

}  // namespace lrfbench
