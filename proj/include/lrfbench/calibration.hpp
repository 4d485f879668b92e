#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrfbench/harness.hpp"
#include "lrfbench/scoring.hpp"
#include "lrfbench/workload.hpp"

namespace lrfbench {

// Radical-inverse of index in the given base; index counts from 1.
double van_der_corput(std::uint64_t index, std::uint64_t base);

// u mapped onto [lo, hi] with uniform log density.
double log_uniform(double u, double lo, double hi);

// Quasi-random point in the unit cube: one prime base per dimension, rotated
// per dimension by an offset derived from the stream seed.
std::vector<double> halton_point(std::size_t dims, std::uint64_t index,
                                 std::uint64_t stream_seed);

// Number of searched dimensions; only the step-size baselines tune a base lr.
std::size_t search_dims(const std::string& algorithm);

struct SearchPoint {
  std::uint64_t halton_index = 0;
  OptimizerConfig config;
  double warmup_fraction = 0.05;
  RegularizerKnobs knobs;
};

// Deterministically expands one quasi-random index into a full configuration.
SearchPoint resolve_search_point(const std::string& algorithm, std::uint64_t halton_index,
                                 std::uint64_t stream_seed);

// Seed for one trial of the calibration scheme. Seed index 0 is the sweep
// seed, so a one-seed finalize replays sweep trials bit for bit.
std::uint64_t calibration_trial_seed(std::uint64_t stream_seed, std::size_t horizon_slot,
                                     std::size_t point_idx, std::size_t workload_idx,
                                     std::size_t seed_idx);

// Smallest-cost points first; ties prefer the earlier point.
std::vector<std::size_t> rank_points(const std::vector<double>& costs, int shortlist);

// Median of times to target over seeds, +inf treated as beyond every finite
// value. An even count averages the two middles only when both are finite.
double median_time(std::vector<double> times);

struct CalibrationConfig {
  std::vector<std::string> algorithms;
  std::vector<double> horizons = {0.33, 0.50, 0.66};
  int points_per_horizon = 32;
  int shortlist = 3;
  int final_seeds = 5;
  std::uint64_t stream_seed = 2026;
  double tau_max = 4.0;
  int jobs = 1;
};

struct AlgoSweep {
  std::string algorithm;
  // Indexed [horizon][point]; records flattened horizon-major, then point,
  // then workload in suite order.
  std::vector<std::vector<SearchPoint>> points;
  std::vector<std::vector<double>> gm_costs;
  std::vector<std::vector<std::size_t>> shortlist;
  std::vector<TrialRecord> records;
};

struct CandidateResult {
  std::string algorithm;
  double alpha = 0.0;
  std::size_t horizon_slot = 0;
  std::size_t point_slot = 0;  // position inside the horizon's point block
  std::size_t shortlist_rank = 0;
  SearchPoint point;
  double sweep_gm_cost = 0.0;
  std::vector<double> median_fractions;  // per workload, +inf unreached
  std::vector<TrialRecord> records;      // flattened seed-major, workload minor
  double score = 0.0;
};

struct BestPick {
  std::string algorithm;
  double alpha = 0.0;
  std::size_t candidate_index = 0;
};

struct CalibrationOutcome {
  CalibrationConfig config;
  std::vector<AlgoSweep> sweeps;
  std::vector<CandidateResult> candidates;
  TimeTable pool;               // one row per candidate, fractions of budget
  std::vector<double> scores;   // per pool row
  std::vector<BestPick> best;   // per (algorithm, horizon)
};

// Quasi-random sweep of one algorithm across every horizon and workload.
AlgoSweep run_sweep(const Suite& suite, const SuiteTargets& targets,
                    const std::string& algorithm, const CalibrationConfig& config);

// Full evidence-based pass: sweep, shortlist by geometric-mean time cost,
// re-run shortlisted configurations over the final seeds, then score every
// candidate in one shared pool and pick a winner per (algorithm, horizon).
CalibrationOutcome calibrate(const Suite& suite, const SuiteTargets& targets,
                             const CalibrationConfig& config);

// Out-of-the-box reference entry for one algorithm: constant schedule,
// library defaults, full budget, aggregated over the same final seeds.
CandidateResult run_reference(const Suite& suite, const SuiteTargets& targets,
                              const std::string& algorithm, const CalibrationConfig& config);

}  // namespace lrfbench
