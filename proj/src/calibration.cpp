#include "lrfbench/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lrfbench/rng.hpp"

namespace lrfbench {

namespace {

constexpr std::uint64_t kRotationTag = 0x4a1f0000ull;

const std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

std::string horizon_label(double alpha) {
  int pct = static_cast<int>(std::floor(alpha * 100.0 + 0.5));
  return "a" + std::to_string(pct);
}

std::string point_label(const std::string& algorithm, double alpha, std::uint64_t index) {
  return algorithm + "_" + horizon_label(alpha) + "_p" + std::to_string(index);
}

std::size_t pick(double u, std::size_t count) {
  auto idx = static_cast<std::size_t>(u * static_cast<double>(count));
  return idx < count ? idx : count - 1;
}

}  // namespace

double van_der_corput(std::uint64_t index, std::uint64_t base) {
  if (base < 2) throw std::invalid_argument("van_der_corput: base must be >= 2");
  double value = 0.0;
  double denom = 1.0;
  while (index > 0) {
    denom *= static_cast<double>(base);
    value += static_cast<double>(index % base) / denom;
    index /= base;
  }
  return value;
}

double log_uniform(double u, double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_uniform: bad range");
  double llo = std::log(lo);
  return std::exp(llo + u * (std::log(hi) - llo));
}

std::vector<double> halton_point(std::size_t dims, std::uint64_t index,
                                 std::uint64_t stream_seed) {
  if (dims == 0 || dims > std::size(kPrimes))
    throw std::invalid_argument("halton_point: unsupported dimension count");
  if (index == 0) throw std::invalid_argument("halton_point: index counts from 1");
  std::vector<double> u(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    Rng rot(mix_seed(stream_seed, kRotationTag + d));
    double v = van_der_corput(index, kPrimes[d]) + rot.uniform();
    v -= std::floor(v);
    u[d] = v < 1.0 ? v : 0.0;
  }
  return u;
}

std::size_t search_dims(const std::string& algorithm) {
  bool tunes_lr = algorithm == "adamw" || algorithm == "nadamw";
  return tunes_lr ? 7 : 6;
}

SearchPoint resolve_search_point(const std::string& algorithm, std::uint64_t halton_index,
                                 std::uint64_t stream_seed) {
  static const double kWarmups[] = {0.02, 0.05, 0.1};
  static const double kDropouts[] = {0.0, 0.1};
  static const double kSmoothings[] = {0.0, 0.2};

  std::size_t dims = search_dims(algorithm);
  std::vector<double> u = halton_point(dims, halton_index, stream_seed);

  SearchPoint point;
  point.halton_index = halton_index;
  point.config = search_base_config(algorithm);

  std::size_t d = 0;
  if (dims == 7) point.config.lr = log_uniform(u[d++], 1e-4, 5e-2);
  point.warmup_fraction = kWarmups[pick(u[d++], 3)];
  point.config.weight_decay = log_uniform(u[d++], 1e-5, 0.5);
  point.config.beta1 = 1.0 - log_uniform(u[d++], 1e-3, 1.0);
  point.config.beta2 = 1.0 - log_uniform(u[d++], 1e-3, 1.0);
  point.knobs.dropout = kDropouts[pick(u[d++], 2)];
  point.knobs.label_smoothing = kSmoothings[pick(u[d++], 2)];
  return point;
}

std::uint64_t calibration_trial_seed(std::uint64_t stream_seed, std::size_t horizon_slot,
                                     std::size_t point_idx, std::size_t workload_idx,
                                     std::size_t seed_idx) {
  std::uint64_t s = mix_seed(stream_seed, horizon_slot + 1);
  s = mix_seed(s, point_idx + 1);
  s = mix_seed(s, workload_idx + 1);
  return mix_seed(s, seed_idx);
}

std::vector<std::size_t> rank_points(const std::vector<double>& costs, int shortlist) {
  std::vector<std::size_t> order(costs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
  auto keep = std::min<std::size_t>(order.size(), shortlist > 0 ? shortlist : 0);
  order.resize(keep);
  return order;
}

double median_time(std::vector<double> times) {
  if (times.empty()) throw std::invalid_argument("median_time: empty");
  std::sort(times.begin(), times.end());
  std::size_t n = times.size();
  if (n % 2 == 1) return times[n / 2];
  double a = times[n / 2 - 1];
  double b = times[n / 2];
  if (std::isfinite(a) && std::isfinite(b)) return 0.5 * (a + b);
  return kUnreached;
}

namespace {

TrialRecord run_calibration_trial(const Suite& suite, const SuiteTargets& targets,
                                  const SearchPoint& point, const std::string& algorithm,
                                  double alpha, std::size_t horizon_slot,
                                  std::size_t point_idx, std::size_t workload_idx,
                                  std::size_t seed_idx, std::uint64_t stream_seed) {
  const Workload& wl = *suite.workloads[workload_idx];
  TrialSpec spec;
  spec.config = point.config;
  spec.schedule = ScheduleSpec::warmup_cosine(point.warmup_fraction, alpha);
  spec.knobs = point.knobs;
  spec.workload = wl.name();
  spec.seed = calibration_trial_seed(stream_seed, horizon_slot, point_idx, workload_idx, seed_idx);
  spec.label = point_label(algorithm, alpha, point.halton_index);
  return run_trial(wl, spec, targets.at(wl.name()).target);
}

std::vector<double> fractions_of(const Suite& suite, const TrialRecord* recs) {
  std::vector<double> f(suite.workloads.size());
  for (std::size_t w = 0; w < f.size(); ++w)
    f[w] = runtime_fraction(recs[w], suite.workloads[w]->t_max());
  return f;
}

}  // namespace

AlgoSweep run_sweep(const Suite& suite, const SuiteTargets& targets,
                    const std::string& algorithm, const CalibrationConfig& config) {
  if (config.points_per_horizon <= 0)
    throw std::invalid_argument("run_sweep: points_per_horizon must be positive");
  std::size_t n_h = config.horizons.size();
  auto n_p = static_cast<std::size_t>(config.points_per_horizon);
  std::size_t n_w = suite.workloads.size();

  AlgoSweep sweep;
  sweep.algorithm = algorithm;
  sweep.points.resize(n_h);
  for (std::size_t h = 0; h < n_h; ++h) {
    sweep.points[h].reserve(n_p);
    for (std::size_t p = 0; p < n_p; ++p)
      sweep.points[h].push_back(
          resolve_search_point(algorithm, h * n_p + p + 1, config.stream_seed));
  }

  sweep.records.resize(n_h * n_p * n_w);
  run_parallel(n_h * n_p * n_w, config.jobs, [&](std::size_t i) {
    std::size_t h = i / (n_p * n_w);
    std::size_t p = (i / n_w) % n_p;
    std::size_t w = i % n_w;
    sweep.records[i] = run_calibration_trial(suite, targets, sweep.points[h][p], algorithm,
                                             config.horizons[h], h, p, w, 0,
                                             config.stream_seed);
  });

  sweep.gm_costs.resize(n_h);
  sweep.shortlist.resize(n_h);
  std::vector<double> unit(n_w, 1.0);
  for (std::size_t h = 0; h < n_h; ++h) {
    sweep.gm_costs[h].resize(n_p);
    for (std::size_t p = 0; p < n_p; ++p) {
      auto f = fractions_of(suite, &sweep.records[(h * n_p + p) * n_w]);
      sweep.gm_costs[h][p] = geometric_mean_cost(f, unit);
    }
    sweep.shortlist[h] = rank_points(sweep.gm_costs[h], config.shortlist);
  }
  return sweep;
}

namespace {

// Reruns one configuration across the final seeds and reduces each workload
// to its median time. Seed 0 replays the supplied sweep records when given.
void finalize_candidate(const Suite& suite, const SuiteTargets& targets,
                        const CalibrationConfig& config, CandidateResult& cand,
                        const TrialRecord* sweep_recs) {
  std::size_t n_w = suite.workloads.size();
  auto n_s = static_cast<std::size_t>(std::max(config.final_seeds, 1));
  cand.records.resize(n_s * n_w);
  run_parallel(n_s * n_w, config.jobs, [&](std::size_t i) {
    std::size_t s = i / n_w;
    std::size_t w = i % n_w;
    if (s == 0 && sweep_recs != nullptr) {
      cand.records[i] = sweep_recs[w];
      return;
    }
    if (cand.horizon_slot < config.horizons.size()) {
      cand.records[i] = run_calibration_trial(suite, targets, cand.point, cand.algorithm,
                                              cand.alpha, cand.horizon_slot, cand.point_slot,
                                              w, s, config.stream_seed);
    } else {
      const Workload& wl = *suite.workloads[w];
      TrialSpec spec;
      spec.config = cand.point.config;
      spec.schedule = ScheduleSpec::constant();
      spec.knobs = cand.point.knobs;
      spec.workload = wl.name();
      spec.seed = calibration_trial_seed(config.stream_seed, cand.horizon_slot, 0, w, s);
      spec.label = cand.algorithm + "_naive";
      cand.records[i] = run_trial(wl, spec, targets.at(wl.name()).target);
    }
  });

  cand.median_fractions.resize(n_w);
  for (std::size_t w = 0; w < n_w; ++w) {
    std::vector<double> steps;
    steps.reserve(n_s);
    for (std::size_t s = 0; s < n_s; ++s) {
      const TrialRecord& rec = cand.records[s * n_w + w];
      steps.push_back(rec.steps_to_target ? static_cast<double>(*rec.steps_to_target)
                                          : kUnreached);
    }
    double med = median_time(std::move(steps));
    cand.median_fractions[w] =
        std::isfinite(med) ? med / static_cast<double>(suite.workloads[w]->t_max())
                           : kUnreached;
  }
}

}  // namespace

CalibrationOutcome calibrate(const Suite& suite, const SuiteTargets& targets,
                             const CalibrationConfig& config) {
  CalibrationOutcome out;
  out.config = config;

  std::size_t n_w = suite.workloads.size();
  auto n_p = static_cast<std::size_t>(config.points_per_horizon);

  for (const auto& algo : config.algorithms)
    out.sweeps.push_back(run_sweep(suite, targets, algo, config));

  for (std::size_t a = 0; a < out.sweeps.size(); ++a) {
    const AlgoSweep& sweep = out.sweeps[a];
    for (std::size_t h = 0; h < config.horizons.size(); ++h) {
      for (std::size_t r = 0; r < sweep.shortlist[h].size(); ++r) {
        std::size_t p = sweep.shortlist[h][r];
        CandidateResult cand;
        cand.algorithm = sweep.algorithm;
        cand.alpha = config.horizons[h];
        cand.horizon_slot = h;
        cand.point_slot = p;
        cand.shortlist_rank = r;
        cand.point = sweep.points[h][p];
        cand.sweep_gm_cost = sweep.gm_costs[h][p];
        finalize_candidate(suite, targets, config, cand,
                           &sweep.records[(h * n_p + p) * n_w]);
        out.candidates.push_back(std::move(cand));
      }
    }
  }

  out.pool.cols.reserve(n_w);
  for (const auto& wl : suite.workloads) out.pool.cols.push_back(wl->name());
  for (const auto& cand : out.candidates) {
    out.pool.rows.push_back(point_label(cand.algorithm, cand.alpha, cand.point.halton_index));
    out.pool.times.push_back(cand.median_fractions);
  }

  out.scores.resize(out.candidates.size());
  for (std::size_t i = 0; i < out.candidates.size(); ++i) {
    out.scores[i] = benchmark_score(out.pool, i, config.tau_max);
    out.candidates[i].score = out.scores[i];
  }

  for (const auto& algo : config.algorithms) {
    for (std::size_t h = 0; h < config.horizons.size(); ++h) {
      BestPick best;
      best.algorithm = algo;
      best.alpha = config.horizons[h];
      bool found = false;
      for (std::size_t i = 0; i < out.candidates.size(); ++i) {
        const CandidateResult& cand = out.candidates[i];
        if (cand.algorithm != algo || cand.horizon_slot != h) continue;
        if (!found || out.scores[i] > out.scores[best.candidate_index]) {
          best.candidate_index = i;
          found = true;
        }
      }
      if (found) out.best.push_back(best);
    }
  }
  return out;
}

CandidateResult run_reference(const Suite& suite, const SuiteTargets& targets,
                              const std::string& algorithm, const CalibrationConfig& config) {
  CandidateResult cand;
  cand.algorithm = algorithm;
  cand.alpha = 1.0;
  cand.horizon_slot = config.horizons.size();
  cand.shortlist_rank = 0;
  cand.point.halton_index = 0;
  cand.point.config = naive_defaults(algorithm);
  cand.point.warmup_fraction = 0.0;
  cand.sweep_gm_cost = kUnreached;
  finalize_candidate(suite, targets, config, cand, nullptr);
  return cand;
}

}  // namespace lrfbench
