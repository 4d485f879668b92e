#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "lrfbench/rng.hpp"
#include "lrfbench/workload.hpp"

namespace lrfbench::testing {

// Largest relative disagreement between analytic and central-difference
// gradients at w, over up to max_coords randomly chosen coordinates.
// For workloads that add seeded, parameter-independent noise to their
// gradient, the pure-noise component (the gradient at a stationary point of
// the clean loss, same batch) is subtracted before comparing.
inline double gradient_check(const Workload& wl, const ParamVector& w,
                             const RegularizerKnobs& knobs, std::uint64_t batch_seed,
                             std::size_t max_coords, Rng& pick) {
  const double h = 1e-6;
  GradSample base = wl.loss_grad(w, batch_seed, knobs);
  if (const ParamVector* wstar = wl.known_optimum()) {
    GradSample at_min = wl.loss_grad(*wstar, batch_seed, knobs);
    for (std::size_t i = 0; i < base.gradient.size(); ++i)
      base.gradient[i] -= at_min.gradient[i];
  }
  std::vector<std::size_t> coords(w.size());
  std::iota(coords.begin(), coords.end(), 0);
  if (coords.size() > max_coords) {
    for (std::size_t i = 0; i < max_coords; ++i) {
      const auto j = i + static_cast<std::size_t>(pick.below(coords.size() - i));
      std::swap(coords[i], coords[j]);
    }
    coords.resize(max_coords);
  }
  double worst = 0.0;
  ParamVector probe = w;
  for (auto i : coords) {
    probe[i] = w[i] + h;
    const double lp = wl.loss_grad(probe, batch_seed, knobs).loss;
    probe[i] = w[i] - h;
    const double lm = wl.loss_grad(probe, batch_seed, knobs).loss;
    probe[i] = w[i];
    const double num = (lp - lm) / (2.0 * h);
    const double denom = std::max({std::abs(num) + std::abs(base.gradient[i]), 1e-2});
    worst = std::max(worst, std::abs(num - base.gradient[i]) / denom);
  }
  return worst;
}

// A perturbed but training-plausible point for gradient checks: the seeded
// init plus a small random offset.
inline ParamVector random_point(const Workload& wl, std::uint64_t seed, double jitter) {
  ParamVector w = wl.init(seed);
  Rng rng(mix_seed(seed, 0x9e11));
  for (auto& x : w) x += jitter * rng.normal();
  return w;
}

}  // namespace lrfbench::testing
