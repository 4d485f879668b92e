#include "lrfbench/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace lrfbench {

namespace {

const std::vector<std::string> kNames = {
    "adamw", "nadamw", "dog", "dowg", "dadapt_adam", "prodigy", "mechanic_adam", "momo", "cocob"};

void validate(const OptimizerConfig& c) {
  auto bad = [&](const std::string& what) {
    throw std::invalid_argument("optimizer config: " + what);
  };
  if (!(c.lr > 0.0)) bad("lr must be positive");
  if (!(c.beta1 >= 0.0 && c.beta1 < 1.0)) bad("beta1 must lie in [0,1)");
  if (!(c.beta2 >= 0.0 && c.beta2 < 1.0)) bad("beta2 must lie in [0,1)");
  if (!(c.eps > 0.0)) bad("eps must be positive");
  if (!(c.weight_decay >= 0.0)) bad("weight_decay must be nonnegative");
  if (!(c.d0 > 0.0)) bad("d0 must be positive");
  if (!(c.dowg_r2_init > 0.0)) bad("dowg_r2_init must be positive");
  if (!(c.cocob_alpha > 0.0)) bad("cocob_alpha must be positive");
  if (!(c.mech_s_init > 0.0)) bad("mech_s_init must be positive");
  if (c.mech_n < 1 || c.mech_n > 12) bad("mech_n must lie in [1,12]");
}

double dist_to(const ParamVector& w, const ParamVector& w0) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double di = w[i] - w0[i];
    acc += di * di;
  }
  return std::sqrt(acc);
}

}  // namespace

Algo algo_from_string(const std::string& name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<Algo>(i);
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string to_string(Algo algo) { return kNames[static_cast<std::size_t>(algo)]; }

const std::vector<std::string>& algorithm_names() { return kNames; }

OptimizerConfig naive_defaults(const std::string& name) {
  OptimizerConfig c;
  c.algorithm = name;
  switch (algo_from_string(name)) {
    case Algo::AdamW:
    case Algo::NadamW:
      c.lr = 1e-3;
      break;
    case Algo::MechanicAdam:
      c.mech_s_init = 1e-4;
      break;
    case Algo::Momo:
      c.lr = 1e-2;
      break;
    default:
      break;
  }
  return c;
}

OptimizerConfig search_base_config(const std::string& name) {
  OptimizerConfig c = naive_defaults(name);
  switch (algo_from_string(name)) {
    case Algo::MechanicAdam:
      c.mech_s_init = 1e-8;
      break;
    case Algo::Momo:
      c.lr = 1.0;
      break;
    default:
      break;
  }
  return c;
}

Optimizer::Optimizer(OptimizerConfig cfg, const ParamVector& w0, std::int64_t warmup_end)
    : cfg_(std::move(cfg)), algo_(algo_from_string(cfg_.algorithm)), warmup_end_(warmup_end) {
  validate(cfg_);
  require_finite(w0, "optimizer init");
  const std::size_t n = w0.size();
  const ParamVector zeros(n, 0.0);
  switch (algo_) {
    case Algo::AdamW:
    case Algo::NadamW:
      state_ = AdamState{zeros, zeros, 0};
      break;
    case Algo::Dog:
      state_ = DogState{0.0, cfg_.eps, w0, true};
      break;
    case Algo::Dowg:
      state_ = DowgState{cfg_.dowg_r2_init, 0.0, w0};
      break;
    case Algo::DAdaptAdam:
      state_ = DAdaptState{cfg_.d0, 0.0, zeros, zeros, zeros, 0};
      break;
    case Algo::Prodigy:
      state_ = ProdigyState{cfg_.d0, 0.0, zeros, zeros, zeros, w0, 0};
      break;
    case Algo::MechanicAdam: {
      MechanicState st;
      const int k = cfg_.mech_n;
      st.beta.resize(k);
      for (int j = 0; j < k; ++j) st.beta[j] = 1.0 - std::pow(10.0, -(j + 1));
      st.m.assign(k, 0.0);
      st.v.assign(k, 0.0);
      st.r.assign(k, 0.0);
      st.s.assign(k, 0.0);
      st.delta = zeros;
      st.w_ref = w0;
      st.base = AdamState{zeros, zeros, 0};
      state_ = std::move(st);
      break;
    }
    case Algo::Momo:
      state_ = MomoState{0.0, 0.0, zeros, false, 0.0};
      break;
    case Algo::Cocob:
      state_ = CocobState{ParamVector(n, 1.0), zeros, zeros, zeros, w0};
      break;
  }
}

double Optimizer::distance_estimate() const {
  switch (algo_) {
    case Algo::Dog:
      return std::get<DogState>(state_).rbar;
    case Algo::Dowg:
      return std::sqrt(std::get<DowgState>(state_).rbar2);
    case Algo::DAdaptAdam:
      return std::get<DAdaptState>(state_).d;
    case Algo::Prodigy:
      return std::get<ProdigyState>(state_).d;
    default:
      return std::nan("");
  }
}

void Optimizer::step(ParamVector& w, const GradSample& sample, const StepContext& ctx) {
  require_same_size(w, sample.gradient, "optimizer step");
  require_finite(w, "optimizer step: parameters");
  require_finite(sample.gradient, "optimizer step: gradient");
  require_finite(ctx.schedule_multiplier, "optimizer step: schedule multiplier");
  if (ctx.schedule_multiplier < 0.0 || ctx.schedule_multiplier > 1.0)
    throw std::domain_error("optimizer step: schedule multiplier outside [0,1]");
  switch (algo_) {
    case Algo::AdamW:
      step_adam(w, sample, ctx, false);
      break;
    case Algo::NadamW:
      step_adam(w, sample, ctx, true);
      break;
    case Algo::Dog:
      step_dog(w, sample, ctx);
      break;
    case Algo::Dowg:
      step_dowg(w, sample, ctx);
      break;
    case Algo::DAdaptAdam:
      step_dadapt(w, sample, ctx);
      break;
    case Algo::Prodigy:
      step_prodigy(w, sample, ctx);
      break;
    case Algo::MechanicAdam:
      step_mechanic(w, sample, ctx);
      break;
    case Algo::Momo:
      step_momo(w, sample, ctx);
      break;
    case Algo::Cocob:
      step_cocob(w, sample, ctx);
      break;
  }
}

void Optimizer::step_adam(ParamVector& w, const GradSample& s, const StepContext& ctx,
                          bool nesterov) {
  auto& st = std::get<AdamState>(state_);
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  st.t += 1;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(st.t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(st.t));
  const double eta = ctx.schedule_multiplier * cfg_.lr;
  const double decay = 1.0 - eta * ctx.weight_decay;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double g = s.gradient[i];
    st.m[i] = b1 * st.m[i] + (1.0 - b1) * g;
    st.v[i] = b2 * st.v[i] + (1.0 - b2) * g * g;
    const double mhat = st.m[i] / bc1;
    const double vhat = st.v[i] / bc2;
    const double num = nesterov ? b1 * mhat + (1.0 - b1) * g / bc1 : mhat;
    w[i] = w[i] * decay - eta * num / (std::sqrt(vhat) + cfg_.eps);
  }
}

void Optimizer::step_dog(ParamVector& w, const GradSample& s, const StepContext& ctx) {
  auto& st = std::get<DogState>(state_);
  st.gsum += norm2_squared(s.gradient);
  if (st.first) {
    st.rbar = cfg_.d0 * (1.0 + norm2(st.w0)) / std::sqrt(st.gsum);
    st.first = false;
  } else {
    st.rbar = std::max(st.rbar, dist_to(w, st.w0));
  }
  const double step_size = st.rbar / std::sqrt(st.gsum);
  const double eta = ctx.schedule_multiplier * cfg_.lr;
  const double decay = 1.0 - eta * step_size * ctx.weight_decay;
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = w[i] * decay - eta * step_size * s.gradient[i];
}

void Optimizer::step_dowg(ParamVector& w, const GradSample& s, const StepContext& ctx) {
  auto& st = std::get<DowgState>(state_);
  const double d = dist_to(w, st.w0);
  st.rbar2 = std::max(st.rbar2, d * d);
  st.vsum += st.rbar2 * norm2_squared(s.gradient);
  const double step_size = st.vsum > 0.0 ? st.rbar2 / std::sqrt(st.vsum) : 0.0;
  const double eta = ctx.schedule_multiplier * cfg_.lr;
  const double decay = 1.0 - eta * step_size * ctx.weight_decay;
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = w[i] * decay - eta * step_size * s.gradient[i];
}

void Optimizer::step_dadapt(ParamVector& w, const GradSample& s, const StepContext& ctx) {
  auto& st = std::get<DAdaptState>(state_);
  const double b1 = cfg_.beta1, b2 = cfg_.beta2, rb2 = std::sqrt(cfg_.beta2);
  const double eta = ctx.schedule_multiplier * cfg_.lr;
  const double d = st.d;
  st.t += 1;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double g = s.gradient[i];
    st.m[i] = b1 * st.m[i] + (1.0 - b1) * d * eta * g;
    st.v[i] = b2 * st.v[i] + (1.0 - b2) * g * g;
  }
  // The step-size signal pairs the fresh curvature estimate with the running
  // gradient sum from before this step.
  double sg = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    sg += s.gradient[i] * st.s[i] / (std::sqrt(st.v[i]) + cfg_.eps);
  for (std::size_t i = 0; i < w.size(); ++i)
    st.s[i] = rb2 * st.s[i] + (1.0 - rb2) * d * eta * s.gradient[i];
  st.r = rb2 * st.r + (1.0 - rb2) * d * eta * sg;
  const double s1 = norm1(st.s);
  const double dhat = s1 > 0.0 ? st.r / ((1.0 - rb2) * s1) : 0.0;
  const double bc1 =
      cfg_.bias_correction ? 1.0 - std::pow(b1, static_cast<double>(st.t)) : 1.0;
  const double bc2 =
      cfg_.bias_correction ? 1.0 - std::pow(b2, static_cast<double>(st.t)) : 1.0;
  const double decay = 1.0 - eta * d * ctx.weight_decay;
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = w[i] * decay - (st.m[i] / bc1) / (std::sqrt(st.v[i] / bc2) + cfg_.eps);
  st.d = std::max(st.d, dhat);
}

void Optimizer::step_prodigy(ParamVector& w, const GradSample& s, const StepContext& ctx) {
  auto& st = std::get<ProdigyState>(state_);
  const double b1 = cfg_.beta1, b2 = cfg_.beta2, rb2 = std::sqrt(cfg_.beta2);
  const double eta = ctx.schedule_multiplier * cfg_.lr;
  const double d = st.d;
  st.t += 1;
  double gw = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) gw += s.gradient[i] * (st.w0[i] - w[i]);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double g = s.gradient[i];
    st.m[i] = b1 * st.m[i] + (1.0 - b1) * d * g;
    st.v[i] = b2 * st.v[i] + (1.0 - b2) * d * d * g * g;
    st.s[i] = rb2 * st.s[i] + (1.0 - rb2) * eta * d * d * g;
  }
  st.r = rb2 * st.r + (1.0 - rb2) * eta * d * d * gw;
  const double s1 = norm1(st.s);
  const bool frozen =
      cfg_.safeguard_warmup && warmup_end_ >= 0 && ctx.step_index <= warmup_end_;
  const double dhat = (!frozen && s1 > 0.0) ? st.r / s1 : 0.0;
  const double bc1 =
      cfg_.bias_correction ? 1.0 - std::pow(b1, static_cast<double>(st.t)) : 1.0;
  const double bc2 =
      cfg_.bias_correction ? 1.0 - std::pow(b2, static_cast<double>(st.t)) : 1.0;
  const double decay = 1.0 - eta * d * ctx.weight_decay;
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = w[i] * decay - eta * d * (st.m[i] / bc1) / (std::sqrt(st.v[i] / bc2) + d * cfg_.eps);
  st.d = std::max(st.d, dhat);
}

void Optimizer::step_mechanic(ParamVector& w, const GradSample& s, const StepContext& ctx) {
  auto& st = std::get<MechanicState>(state_);
  st.t += 1;
  const int k = cfg_.mech_n;

  // Base update: bias-corrected AdamW displacement, schedule and decoupled
  // decay folded in so the learned scale multiplies the whole move.
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(st.t));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(st.t));
  const double eta = ctx.schedule_multiplier * cfg_.lr;
  ParamVector u(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double g = s.gradient[i];
    st.base.m[i] = b1 * st.base.m[i] + (1.0 - b1) * g;
    st.base.v[i] = b2 * st.base.v[i] + (1.0 - b2) * g * g;
    const double mhat = st.base.m[i] / bc1;
    const double vhat = st.base.v[i] / bc2;
    u[i] = -eta * (mhat / (std::sqrt(vhat) + cfg_.eps) + ctx.weight_decay * w[i]);
  }

  double s_sum_old = 0.0;
  for (int j = 0; j < k; ++j) s_sum_old += st.s[j];
  const double wnorm = norm2(w);
  const double reg = wnorm > 0.0 ? cfg_.mech_lambda * s_sum_old * norm2(s.gradient) / wnorm : 0.0;
  double h = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    h += (s.gradient[i] + reg * w[i]) * st.delta[i];

  for (std::size_t i = 0; i < w.size(); ++i) st.delta[i] += u[i];

  double s_sum = 0.0;
  for (int j = 0; j < k; ++j) {
    const double bj = st.beta[j];
    st.m[j] = std::max(bj * st.m[j], std::abs(h));
    st.v[j] = bj * bj * st.v[j] + h * h;
    st.r[j] = std::max(0.0, bj * st.r[j] - st.s[j] * h);
    const double wealth = cfg_.mech_s_init * st.m[j] + st.r[j];
    st.s[j] = std::sqrt(wealth / (st.v[j] + cfg_.eps));
    s_sum += st.s[j];
  }

  for (std::size_t i = 0; i < w.size(); ++i) w[i] = st.w_ref[i] + s_sum * st.delta[i];
}

void Optimizer::step_momo(ParamVector& w, const GradSample& s, const StepContext& ctx) {
  auto& st = std::get<MomoState>(state_);
  require_finite(s.loss, "optimizer step: loss");
  const double beta = cfg_.beta1;
  double gw = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) gw += s.gradient[i] * w[i];
  if (!st.initialized) {
    st.fbar = s.loss;
    st.tau = gw;
    st.d = s.gradient;
    st.initialized = true;
  } else {
    st.fbar = (1.0 - beta) * s.loss + beta * st.fbar;
    st.tau = (1.0 - beta) * gw + beta * st.tau;
    for (std::size_t i = 0; i < w.size(); ++i)
      st.d[i] = (1.0 - beta) * s.gradient[i] + beta * st.d[i];
  }
  double dw = 0.0, dn2 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    dw += st.d[i] * w[i];
    dn2 += st.d[i] * st.d[i];
  }
  const double h = st.fbar + dw - st.tau;
  const double cap = ctx.schedule_multiplier * cfg_.lr;
  const double gamma =
      dn2 > 0.0 ? std::min(cap, std::max(h - cfg_.momo_f_star, 0.0) / dn2) : 0.0;
  st.last_gamma = gamma;
  const double decay = 1.0 - gamma * ctx.weight_decay;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = w[i] * decay - gamma * st.d[i];
}

void Optimizer::step_cocob(ParamVector& w, const GradSample& s, const StepContext& ctx) {
  auto& st = std::get<CocobState>(state_);
  const double eta = ctx.schedule_multiplier * cfg_.lr;
  const double decay = 1.0 - eta * ctx.weight_decay;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double g = s.gradient[i];
    st.L[i] = std::max(st.L[i], std::abs(g));
    st.G[i] += std::abs(g);
    st.R[i] = std::max(st.R[i] - g * (w[i] - st.w_init[i]), 0.0);
    st.theta[i] -= g;
    const double target =
        st.w_init[i] +
        st.theta[i] / (st.L[i] * std::max(st.G[i] + st.L[i], cfg_.cocob_alpha * st.L[i])) *
            (st.L[i] + st.R[i]);
    w[i] = w[i] * decay + eta * (target - w[i]);
  }
}

}  // namespace lrfbench
