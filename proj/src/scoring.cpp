#include "lrfbench/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lrfbench {

std::size_t TimeTable::row_index(const std::string& label) const {
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i] == label) return i;
  throw std::invalid_argument("no such submission: " + label);
}

std::size_t TimeTable::col_index(const std::string& name) const {
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (cols[i] == name) return i;
  throw std::invalid_argument("no such workload: " + name);
}

namespace {

void check_table(const TimeTable& table) {
  if (table.rows.empty() || table.cols.empty())
    throw std::invalid_argument("time table must have rows and columns");
  if (table.times.size() != table.rows.size())
    throw std::invalid_argument("time table row count mismatch");
  for (const auto& row : table.times)
    if (row.size() != table.cols.size())
      throw std::invalid_argument("time table column count mismatch");
}

}  // namespace

std::vector<std::vector<double>> performance_ratios(const TimeTable& table) {
  check_table(table);
  const std::size_t nr = table.rows.size(), nc = table.cols.size();
  std::vector<std::vector<double>> ratios(nr, std::vector<double>(nc, kUnreached));
  for (std::size_t c = 0; c < nc; ++c) {
    double best = kUnreached;
    for (std::size_t r = 0; r < nr; ++r) best = std::min(best, table.times[r][c]);
    if (!std::isfinite(best)) continue;
    if (!(best > 0.0)) throw std::invalid_argument("times to target must be positive");
    for (std::size_t r = 0; r < nr; ++r)
      if (std::isfinite(table.times[r][c])) ratios[r][c] = table.times[r][c] / best;
  }
  return ratios;
}

double PerformanceProfile::value(double tau) const {
  const auto it = std::upper_bound(ratios.begin(), ratios.end(), tau);
  return static_cast<double>(it - ratios.begin()) / static_cast<double>(num_workloads);
}

std::vector<std::pair<double, double>> PerformanceProfile::breakpoints(double tau_max) const {
  if (!(tau_max > 1.0)) throw std::invalid_argument("tau_max must exceed 1");
  std::vector<std::pair<double, double>> out;
  out.emplace_back(1.0, value(1.0));
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double v = ratios[i];
    if (v <= 1.0 || v > tau_max) continue;
    if (i + 1 < ratios.size() && ratios[i + 1] == v) continue;  // last of a tie group
    out.emplace_back(v, value(v));
  }
  if (out.back().first != tau_max) out.emplace_back(tau_max, value(tau_max));
  return out;
}

PerformanceProfile performance_profile(const TimeTable& table, std::size_t row) {
  auto ratios = performance_ratios(table);
  if (row >= ratios.size()) throw std::invalid_argument("row out of range");
  PerformanceProfile p;
  p.num_workloads = table.cols.size();
  for (double r : ratios[row])
    if (std::isfinite(r)) p.ratios.push_back(r);
  std::sort(p.ratios.begin(), p.ratios.end());
  return p;
}

double benchmark_score(const PerformanceProfile& profile, double tau_max) {
  if (!(tau_max > 1.0)) throw std::invalid_argument("tau_max must exceed 1");
  if (profile.num_workloads == 0) throw std::invalid_argument("profile has no workloads");
  const double denom = static_cast<double>(profile.num_workloads);
  const auto& r = profile.ratios;
  std::size_t i = 0;
  while (i < r.size() && r[i] <= 1.0) ++i;
  double integral = 0.0;
  double level = static_cast<double>(i) / denom;
  double prev = 1.0;
  while (i < r.size() && r[i] <= tau_max) {
    const double v = r[i];
    integral += level * (v - prev);
    while (i < r.size() && r[i] == v) ++i;
    level = static_cast<double>(i) / denom;
    prev = v;
  }
  integral += level * (tau_max - prev);
  return integral / (tau_max - 1.0);
}

double benchmark_score(const TimeTable& table, std::size_t row, double tau_max) {
  return benchmark_score(performance_profile(table, row), tau_max);
}

std::size_t reached_count(const TimeTable& table, std::size_t row) {
  check_table(table);
  if (row >= table.rows.size()) throw std::invalid_argument("row out of range");
  std::size_t n = 0;
  for (double t : table.times[row])
    if (std::isfinite(t)) ++n;
  return n;
}

double geometric_mean_cost(const std::vector<double>& times,
                           const std::vector<double>& t_maxes) {
  if (times.empty() || times.size() != t_maxes.size())
    throw std::invalid_argument("times and budgets must align and be nonempty");
  double log_sum = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double cost = std::isfinite(times[i]) ? times[i] : 2.0 * t_maxes[i];
    if (!(cost > 0.0)) throw std::invalid_argument("costs must be positive");
    log_sum += std::log(cost);
  }
  return std::exp(log_sum / static_cast<double>(times.size()));
}

}  // namespace lrfbench
