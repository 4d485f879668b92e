#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace lrfbench {

inline constexpr double kUnreached = std::numeric_limits<double>::infinity();

// Times to target (any common unit) for each submission on each workload;
// +inf marks a target that was never reached.
struct TimeTable {
  std::vector<std::string> rows;  // submission labels
  std::vector<std::string> cols;  // workload names
  std::vector<std::vector<double>> times;

  std::size_t row_index(const std::string& label) const;
  std::size_t col_index(const std::string& name) const;
};

// r[s][w] = time / best time in the column. Unreached entries stay +inf, and
// a column nobody reached is +inf throughout (it earns no credit but still
// counts toward the workload total).
std::vector<std::vector<double>> performance_ratios(const TimeTable& table);

// Right-continuous step function p(tau) = share of all workloads solved
// within a factor tau of the per-workload best.
struct PerformanceProfile {
  std::vector<double> ratios;  // finite ratios, sorted ascending
  std::size_t num_workloads = 0;

  double value(double tau) const;
  // (tau, p(tau)) at tau=1, each jump in (1, tau_max], and tau_max itself.
  std::vector<std::pair<double, double>> breakpoints(double tau_max) const;
};

PerformanceProfile performance_profile(const TimeTable& table, std::size_t row);

// Mean height of the profile over [1, tau_max], integrated exactly piece by
// piece. Throws std::invalid_argument unless tau_max > 1.
double benchmark_score(const PerformanceProfile& profile, double tau_max = 4.0);
double benchmark_score(const TimeTable& table, std::size_t row, double tau_max = 4.0);

std::size_t reached_count(const TimeTable& table, std::size_t row);

// Geometric mean of times with unreached entries charged twice their budget.
double geometric_mean_cost(const std::vector<double>& times,
                           const std::vector<double>& t_maxes);

}  // namespace lrfbench
