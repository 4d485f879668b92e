#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lrfbench/core.hpp"

namespace lrfbench {

enum class MetricDirection { LowerIsBetter, HigherIsBetter };

std::string to_string(MetricDirection d);
MetricDirection direction_from_string(const std::string& s);

// True when the metric meets or beats the target in the given direction.
bool metric_meets_target(double metric, double target, MetricDirection dir);

// Targets are the best metric an exhaustively tuned reference run achieved,
// relaxed by 5% in the favorable direction.
double relax_target(double best_metric, MetricDirection dir);

struct RegularizerKnobs {
  double dropout = 0.0;
  double label_smoothing = 0.0;
};

// A training problem: fixed data, a loss with exact gradients, and a scalar
// benchmark metric. All stochasticity is funneled through explicit seeds so
// a trial is a pure function of its inputs.
class Workload {
 public:
  struct Traits {
    std::string name;
    std::size_t dim = 0;
    std::int64_t t_max = 0;
    MetricDirection direction = MetricDirection::LowerIsBetter;
    bool supports_dropout = false;
    bool supports_label_smoothing = false;
  };

  virtual ~Workload() = default;

  const std::string& name() const { return traits_.name; }
  std::size_t dim() const { return traits_.dim; }
  std::int64_t t_max() const { return traits_.t_max; }
  MetricDirection direction() const { return traits_.direction; }
  bool supports_dropout() const { return traits_.supports_dropout; }
  bool supports_label_smoothing() const { return traits_.supports_label_smoothing; }

  // Initial parameters for a trial. Deterministic in the seed.
  virtual ParamVector init(std::uint64_t trial_seed) const;

  // Loss and exact gradient on the batch drawn from batch_seed. Throws
  // std::invalid_argument when a nonzero knob is not supported here.
  virtual GradSample loss_grad(const ParamVector& w, std::uint64_t batch_seed,
                               const RegularizerKnobs& knobs) const = 0;

  // The benchmark metric at w (regularizers off, full evaluation split).
  virtual double eval(const ParamVector& w) const = 0;

  // Minimizer when one is known analytically, else nullptr.
  virtual const ParamVector* known_optimum() const { return nullptr; }

 protected:
  explicit Workload(Traits traits) : traits_(std::move(traits)) {}
  void check_input(const ParamVector& w, const RegularizerKnobs& knobs) const;

  Traits traits_;
};

const std::vector<std::string>& workload_names();
std::unique_ptr<Workload> make_workload(const std::string& name);

// The five desk problems, in canonical order.
struct Suite {
  std::vector<std::unique_ptr<Workload>> workloads;

  static Suite desk();
  const Workload& at(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;
};

}  // namespace lrfbench
