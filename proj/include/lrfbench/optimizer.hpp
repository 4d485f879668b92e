#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lrfbench/core.hpp"

namespace lrfbench {

enum class Algo {
  AdamW,
  NadamW,
  Dog,
  Dowg,
  DAdaptAdam,
  Prodigy,
  MechanicAdam,
  Momo,
  Cocob,
};

Algo algo_from_string(const std::string& name);
std::string to_string(Algo algo);
const std::vector<std::string>& algorithm_names();

struct OptimizerConfig {
  std::string algorithm = "adamw";
  double lr = 1.0;  // peak step size; the schedule multiplier scales it down
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  double d0 = 1e-6;             // initial distance estimate
  double dowg_r2_init = 1e-4;   // initial squared distance estimate
  double cocob_alpha = 100.0;   // bet-fraction damping
  double mech_s_init = 1e-8;    // initial wealth scale
  double mech_lambda = 0.01;    // scale regularization inside the inner product
  int mech_n = 6;               // number of parallel decay rates
  double momo_f_star = 0.0;     // lower bound on the attainable loss
  bool bias_correction = false;       // distance-estimating Adam variants only
  bool safeguard_warmup = true;       // freeze the distance estimate during warmup
};

// Out-of-the-box settings an unconfigured user would run.
OptimizerConfig naive_defaults(const std::string& name);
// Starting point for calibrated runs (peak-1 step sizes, searchable knobs).
OptimizerConfig search_base_config(const std::string& name);

struct AdamState {
  ParamVector m, v;
  std::int64_t t = 0;
};

struct DogState {
  double rbar = 0.0;
  double gsum = 0.0;  // running squared gradient norm, seeded with the guard
  ParamVector w0;
  bool first = true;
};

struct DowgState {
  double rbar2 = 0.0;
  double vsum = 0.0;
  ParamVector w0;
};

struct DAdaptState {
  double d = 0.0;
  double r = 0.0;
  ParamVector m, v, s;
  std::int64_t t = 0;
};

struct ProdigyState {
  double d = 0.0;
  double r = 0.0;
  ParamVector m, v, s, w0;
  std::int64_t t = 0;
};

struct MechanicState {
  std::vector<double> beta, m, v, r, s;
  ParamVector delta, w_ref;
  AdamState base;
  std::int64_t t = 0;
};

struct MomoState {
  double fbar = 0.0;
  double tau = 0.0;
  ParamVector d;
  bool initialized = false;
  double last_gamma = 0.0;
};

struct CocobState {
  ParamVector L, G, R, theta, w_init;
};

using OptimizerState = std::variant<AdamState, DogState, DowgState, DAdaptState, ProdigyState,
                                    MechanicState, MomoState, CocobState>;

// One optimizer instance drives one trial. step() is a pure deterministic
// function of (state, w, sample, ctx): same inputs, same outputs, bit for bit.
class Optimizer {
 public:
  // warmup_end: last step index of the schedule's warmup ramp (-1 when there
  // is none); used only by safeguards that freeze estimates during warmup.
  Optimizer(OptimizerConfig cfg, const ParamVector& w0, std::int64_t warmup_end = -1);

  void step(ParamVector& w, const GradSample& sample, const StepContext& ctx);

  const OptimizerConfig& config() const { return cfg_; }
  Algo algo() const { return algo_; }

  // Current scalar distance estimate, NaN for methods that do not keep one.
  double distance_estimate() const;

  template <class T>
  const T& state() const {
    return std::get<T>(state_);
  }

 private:
  void step_adam(ParamVector& w, const GradSample& s, const StepContext& ctx, bool nesterov);
  void step_dog(ParamVector& w, const GradSample& s, const StepContext& ctx);
  void step_dowg(ParamVector& w, const GradSample& s, const StepContext& ctx);
  void step_dadapt(ParamVector& w, const GradSample& s, const StepContext& ctx);
  void step_prodigy(ParamVector& w, const GradSample& s, const StepContext& ctx);
  void step_mechanic(ParamVector& w, const GradSample& s, const StepContext& ctx);
  void step_momo(ParamVector& w, const GradSample& s, const StepContext& ctx);
  void step_cocob(ParamVector& w, const GradSample& s, const StepContext& ctx);

  OptimizerConfig cfg_;
  Algo algo_;
  std::int64_t warmup_end_;
  OptimizerState state_;
};

}  // namespace lrfbench
