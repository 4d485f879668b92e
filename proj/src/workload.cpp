#include "lrfbench/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lrfbench/rng.hpp"

namespace lrfbench {

namespace {

constexpr std::uint64_t kQuadDataSeed = 0x51ad0001ull;
constexpr std::uint64_t kLogisticDataSeed = 0x51ad0003ull;
constexpr std::uint64_t kSpiralDataSeed = 0x51ad0004ull;
constexpr std::uint64_t kMatFacDataSeed = 0x51ad0005ull;
constexpr std::uint64_t kInitTag = 0x1717ull;
constexpr std::uint64_t kDropoutTag = 0xd0ull;
constexpr double kQuadLossFloor = 0.05;

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------
// Ill-conditioned diagonal quadratic sitting on an irreducible loss floor,
// optionally with gradient noise.

class QuadraticWorkload : public Workload {
 public:
  QuadraticWorkload(std::string name, std::int64_t t_max, double noise, double loss_floor)
      : Workload({std::move(name), kDim, t_max}), noise_(noise), floor_(loss_floor) {
    h_.resize(kDim);
    for (std::size_t i = 0; i < kDim; ++i)
      h_[i] = std::pow(10.0, -2.0 + 4.0 * static_cast<double>(i) / (kDim - 1));
    Rng rng(kQuadDataSeed);
    wstar_.resize(kDim);
    for (auto& x : wstar_) x = rng.normal();
    const double scale = 2.0 / norm2(wstar_);
    for (auto& x : wstar_) x *= scale;
  }

  GradSample loss_grad(const ParamVector& w, std::uint64_t batch_seed,
                       const RegularizerKnobs& knobs) const override {
    check_input(w, knobs);
    GradSample out;
    out.batch_id = batch_seed;
    out.gradient.resize(kDim);
    double loss = floor_;
    for (std::size_t i = 0; i < kDim; ++i) {
      const double e = w[i] - wstar_[i];
      out.gradient[i] = h_[i] * e;
      loss += 0.5 * h_[i] * e * e;
    }
    out.loss = loss;
    if (noise_ > 0.0) {
      Rng rng(batch_seed);
      for (std::size_t i = 0; i < kDim; ++i) out.gradient[i] += noise_ * rng.normal();
    }
    return out;
  }

  double eval(const ParamVector& w) const override {
    double loss = floor_;
    for (std::size_t i = 0; i < kDim; ++i) {
      const double e = w[i] - wstar_[i];
      loss += 0.5 * h_[i] * e * e;
    }
    return loss;
  }

  const ParamVector* known_optimum() const override { return &wstar_; }

 private:
  static constexpr std::size_t kDim = 100;
  std::vector<double> h_;
  ParamVector wstar_;
  double noise_;
  double floor_;
};

// ---------------------------------------------------------------------------
// Binary logistic regression on two Gaussian clouds.

class LogisticWorkload : public Workload {
 public:
  LogisticWorkload()
      : Workload({"w3_logistic", kDim, 5000, MetricDirection::LowerIsBetter, false, true}) {
    Rng rng(kLogisticDataSeed);
    std::vector<double> mu(kFeatures);
    for (auto& x : mu) x = rng.normal();
    const double scale = 1.5 / norm2(mu);
    for (auto& x : mu) x *= scale;
    auto draw_split = [&](std::vector<double>& xs, std::vector<int>& ys, std::size_t n) {
      xs.resize(n * kFeatures);
      ys.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        const int y = static_cast<int>(j % 2);
        ys[j] = y;
        const double sign = y == 1 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < kFeatures; ++i)
          xs[j * kFeatures + i] = sign * mu[i] + rng.normal();
      }
    };
    draw_split(train_x_, train_y_, kTrain);
    draw_split(val_x_, val_y_, kVal);
  }

  GradSample loss_grad(const ParamVector& w, std::uint64_t batch_seed,
                       const RegularizerKnobs& knobs) const override {
    check_input(w, knobs);
    GradSample out;
    out.batch_id = batch_seed;
    out.gradient.assign(kDim, 0.0);
    Rng rng(batch_seed);
    const double ls = knobs.label_smoothing;
    double loss = 0.0;
    for (int b = 0; b < kBatch; ++b) {
      const auto j = static_cast<std::size_t>(rng.below(kTrain));
      const double* x = &train_x_[j * kFeatures];
      double z = w[kFeatures];  // bias
      for (std::size_t i = 0; i < kFeatures; ++i) z += w[i] * x[i];
      const double y = (1.0 - ls) * train_y_[j] + 0.5 * ls;
      loss += softplus(z) - y * z;
      const double dz = sigmoid(z) - y;
      for (std::size_t i = 0; i < kFeatures; ++i) out.gradient[i] += dz * x[i];
      out.gradient[kFeatures] += dz;
    }
    const double inv = 1.0 / kBatch;
    loss *= inv;
    for (auto& g : out.gradient) g *= inv;
    out.loss = loss;
    return out;
  }

  double eval(const ParamVector& w) const override {
    double loss = 0.0;
    for (std::size_t j = 0; j < kVal; ++j) {
      const double* x = &val_x_[j * kFeatures];
      double z = w[kFeatures];
      for (std::size_t i = 0; i < kFeatures; ++i) z += w[i] * x[i];
      loss += softplus(z) - static_cast<double>(val_y_[j]) * z;
    }
    return loss / static_cast<double>(kVal);
  }

 private:
  static constexpr std::size_t kFeatures = 49;
  static constexpr std::size_t kDim = 50;
  static constexpr std::size_t kTrain = 512;
  static constexpr std::size_t kVal = 512;
  static constexpr int kBatch = 32;
  std::vector<double> train_x_, val_x_;
  std::vector<int> train_y_, val_y_;
};

// ---------------------------------------------------------------------------
// Two-layer tanh classifier on three interleaved spiral arms lifted to 50
// dimensions. Gradients are spelled out by hand.

class SpiralMlpWorkload : public Workload {
 public:
  SpiralMlpWorkload()
      : Workload({"w4_mlp", kDim, 10000, MetricDirection::LowerIsBetter, true, true}) {
    Rng rng(kSpiralDataSeed);
    std::vector<double> lift(kIn * 2);
    for (auto& a : lift) a = 0.8 * rng.normal();
    auto draw_split = [&](std::vector<double>& xs, std::vector<int>& ys, int per_arm) {
      const std::size_t n = static_cast<std::size_t>(3 * per_arm);
      xs.resize(n * kIn);
      ys.resize(n);
      std::size_t j = 0;
      for (int arm = 0; arm < 3; ++arm) {
        for (int k = 0; k < per_arm; ++k, ++j) {
          const double t = rng.uniform();
          const double r = 0.15 + 0.85 * t;
          const double theta =
              arm * 2.0943951023931953 + 4.0 * t + 0.35 * rng.normal();
          const double p0 = r * std::cos(theta);
          const double p1 = r * std::sin(theta);
          ys[j] = arm;
          for (std::size_t i = 0; i < kIn; ++i)
            xs[j * kIn + i] = lift[i * 2] * p0 + lift[i * 2 + 1] * p1 + 0.15 * rng.normal();
        }
      }
    };
    draw_split(train_x_, train_y_, kPerArm);
    draw_split(val_x_, val_y_, kPerArm);
  }

  ParamVector init(std::uint64_t trial_seed) const override {
    Rng rng(mix_seed(trial_seed, kInitTag));
    ParamVector w(kDim, 0.0);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(kIn));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(kHidden));
    for (std::size_t i = 0; i < kHidden * kIn; ++i) w[i] = s1 * rng.normal();
    for (std::size_t i = 0; i < kOut * kHidden; ++i) w[kW2 + i] = s2 * rng.normal();
    return w;
  }

  GradSample loss_grad(const ParamVector& w, std::uint64_t batch_seed,
                       const RegularizerKnobs& knobs) const override {
    check_input(w, knobs);
    GradSample out;
    out.batch_id = batch_seed;
    out.gradient.assign(kDim, 0.0);
    Rng rng(batch_seed);
    Rng mask_rng(mix_seed(batch_seed, kDropoutTag));
    const double ls = knobs.label_smoothing;
    const double p_drop = knobs.dropout;
    const double keep_scale = p_drop > 0.0 ? 1.0 / (1.0 - p_drop) : 1.0;
    double loss = 0.0;
    double h[kHidden], hd[kHidden], mask[kHidden], z[kOut], prob[kOut], dz[kOut], da[kHidden];
    for (int b = 0; b < kBatch; ++b) {
      const auto j = static_cast<std::size_t>(rng.below(kTrain));
      const double* x = &train_x_[j * kIn];
      for (std::size_t u = 0; u < kHidden; ++u) {
        double a = w[kB1 + u];
        const double* row = &w[u * kIn];
        for (std::size_t i = 0; i < kIn; ++i) a += row[i] * x[i];
        h[u] = std::tanh(a);
      }
      if (p_drop > 0.0) {
        for (std::size_t u = 0; u < kHidden; ++u) {
          mask[u] = mask_rng.uniform() >= p_drop ? keep_scale : 0.0;
          hd[u] = h[u] * mask[u];
        }
      } else {
        for (std::size_t u = 0; u < kHidden; ++u) {
          mask[u] = 1.0;
          hd[u] = h[u];
        }
      }
      for (std::size_t c = 0; c < kOut; ++c) {
        double zc = w[kB2 + c];
        const double* row = &w[kW2 + c * kHidden];
        for (std::size_t u = 0; u < kHidden; ++u) zc += row[u] * hd[u];
        z[c] = zc;
      }
      const double zmax = std::max(z[0], std::max(z[1], z[2]));
      double zsum = 0.0;
      for (std::size_t c = 0; c < kOut; ++c) zsum += std::exp(z[c] - zmax);
      const double logzsum = std::log(zsum);
      double target_dot = 0.0;
      for (std::size_t c = 0; c < kOut; ++c) {
        prob[c] = std::exp(z[c] - zmax) / zsum;
        const double y = (train_y_[j] == static_cast<int>(c) ? 1.0 - ls : 0.0) + ls / 3.0;
        dz[c] = (prob[c] - y) * kInvBatch;
        target_dot += y * z[c];
      }
      loss += (zmax + logzsum - target_dot) * kInvBatch;
      for (std::size_t u = 0; u < kHidden; ++u) {
        double dh = 0.0;
        for (std::size_t c = 0; c < kOut; ++c) dh += w[kW2 + c * kHidden + u] * dz[c];
        da[u] = dh * mask[u] * (1.0 - h[u] * h[u]);
      }
      for (std::size_t c = 0; c < kOut; ++c) {
        double* grow = &out.gradient[kW2 + c * kHidden];
        for (std::size_t u = 0; u < kHidden; ++u) grow[u] += dz[c] * hd[u];
        out.gradient[kB2 + c] += dz[c];
      }
      for (std::size_t u = 0; u < kHidden; ++u) {
        double* grow = &out.gradient[u * kIn];
        const double dau = da[u];
        for (std::size_t i = 0; i < kIn; ++i) grow[i] += dau * x[i];
        out.gradient[kB1 + u] += dau;
      }
    }
    out.loss = loss;
    return out;
  }

  double eval(const ParamVector& w) const override {
    int errors = 0;
    const auto n = val_y_.size();
    for (std::size_t j = 0; j < n; ++j) {
      const double* x = &val_x_[j * kIn];
      double h[kHidden], z[kOut];
      for (std::size_t u = 0; u < kHidden; ++u) {
        double a = w[kB1 + u];
        const double* row = &w[u * kIn];
        for (std::size_t i = 0; i < kIn; ++i) a += row[i] * x[i];
        h[u] = std::tanh(a);
      }
      for (std::size_t c = 0; c < kOut; ++c) {
        double zc = w[kB2 + c];
        const double* row = &w[kW2 + c * kHidden];
        for (std::size_t u = 0; u < kHidden; ++u) zc += row[u] * h[u];
        z[c] = zc;
      }
      std::size_t best = 0;
      if (z[1] > z[best]) best = 1;
      if (z[2] > z[best]) best = 2;
      if (static_cast<int>(best) != val_y_[j]) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(n);
  }

 private:
  static constexpr std::size_t kIn = 50;
  static constexpr std::size_t kHidden = 32;
  static constexpr std::size_t kOut = 3;
  static constexpr std::size_t kW2 = kIn * kHidden;          // 1600
  static constexpr std::size_t kB1 = kW2 + kOut * kHidden;   // 1696
  static constexpr std::size_t kB2 = kB1 + kHidden;          // 1728
  static constexpr std::size_t kDim = kB2 + kOut;            // 1731
  static constexpr int kPerArm = 200;
  static constexpr std::size_t kTrain = 600;
  static constexpr int kBatch = 64;
  static constexpr double kInvBatch = 1.0 / kBatch;
  std::vector<double> train_x_, val_x_;
  std::vector<int> train_y_, val_y_;
};

// ---------------------------------------------------------------------------
// Low-rank matrix factorization: fit a rank-5 model to a noisy rank-5 target,
// one minibatch of sampled cells per step. The full-rank residual leaves a
// positive misfit floor under the best fit.

class MatFacWorkload : public Workload {
 public:
  MatFacWorkload() : Workload({"w5_matfac", kDim, 5000}) {
    Rng rng(kMatFacDataSeed);
    std::vector<double> u(kSide * kRank), v(kSide * kRank);
    for (auto& x : u) x = rng.normal();
    for (auto& x : v) x = rng.normal();
    m_.assign(kSide * kSide, 0.0);
    for (std::size_t i = 0; i < kSide; ++i)
      for (std::size_t j = 0; j < kSide; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < kRank; ++k) acc += u[i * kRank + k] * v[j * kRank + k];
        m_[i * kSide + j] = acc + kResidSigma * rng.normal();
      }
  }

  ParamVector init(std::uint64_t trial_seed) const override {
    Rng rng(mix_seed(trial_seed, kInitTag));
    ParamVector w(kDim);
    for (auto& x : w) x = 0.3 * rng.normal();
    return w;
  }

  GradSample loss_grad(const ParamVector& w, std::uint64_t batch_seed,
                       const RegularizerKnobs& knobs) const override {
    check_input(w, knobs);
    GradSample out;
    out.batch_id = batch_seed;
    out.gradient.assign(kDim, 0.0);
    const double* U = w.data();
    const double* V = w.data() + kSide * kRank;
    double* gU = out.gradient.data();
    double* gV = out.gradient.data() + kSide * kRank;
    Rng rng(batch_seed);
    double loss = 0.0;
    for (std::size_t n = 0; n < kBatchCells; ++n) {
      const auto cell = static_cast<std::size_t>(rng.below(kSide * kSide));
      const std::size_t i = cell / kSide;
      const std::size_t j = cell % kSide;
      double acc = 0.0;
      for (std::size_t k = 0; k < kRank; ++k) acc += U[i * kRank + k] * V[j * kRank + k];
      const double err = acc - m_[cell];
      loss += 0.5 * err * err;
      const double scaled = err * kInvBatch;
      for (std::size_t k = 0; k < kRank; ++k) {
        gU[i * kRank + k] += scaled * V[j * kRank + k];
        gV[j * kRank + k] += scaled * U[i * kRank + k];
      }
    }
    out.loss = loss * kInvBatch;
    return out;
  }

  double eval(const ParamVector& w) const override {
    const double* U = w.data();
    const double* V = w.data() + kSide * kRank;
    double loss = 0.0;
    for (std::size_t i = 0; i < kSide; ++i)
      for (std::size_t j = 0; j < kSide; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < kRank; ++k) acc += U[i * kRank + k] * V[j * kRank + k];
        const double err = acc - m_[i * kSide + j];
        loss += 0.5 * err * err;
      }
    return loss * kInvCells;
  }

 private:
  static constexpr std::size_t kSide = 30;
  static constexpr std::size_t kRank = 5;
  static constexpr std::size_t kDim = 2 * kSide * kRank;
  static constexpr std::size_t kBatchCells = 300;
  static constexpr double kInvCells = 1.0 / (kSide * kSide);
  static constexpr double kInvBatch = 1.0 / kBatchCells;
  static constexpr double kResidSigma = 0.05;
  std::vector<double> m_;
};

}  // namespace

std::string to_string(MetricDirection d) {
  return d == MetricDirection::LowerIsBetter ? "lower" : "higher";
}

MetricDirection direction_from_string(const std::string& s) {
  if (s == "lower") return MetricDirection::LowerIsBetter;
  if (s == "higher") return MetricDirection::HigherIsBetter;
  throw std::invalid_argument("unknown metric direction: " + s);
}

bool metric_meets_target(double metric, double target, MetricDirection dir) {
  return dir == MetricDirection::LowerIsBetter ? metric <= target : metric >= target;
}

double relax_target(double best_metric, MetricDirection dir) {
  return dir == MetricDirection::LowerIsBetter ? best_metric * 1.05 : best_metric * 0.95;
}

ParamVector Workload::init(std::uint64_t) const { return ParamVector(traits_.dim, 0.0); }

void Workload::check_input(const ParamVector& w, const RegularizerKnobs& knobs) const {
  if (w.size() != traits_.dim)
    throw std::invalid_argument(traits_.name + ": parameter size " + std::to_string(w.size()) +
                                ", expected " + std::to_string(traits_.dim));
  if (knobs.dropout != 0.0 && !traits_.supports_dropout)
    throw std::invalid_argument(traits_.name + ": dropout is not supported");
  if (knobs.label_smoothing != 0.0 && !traits_.supports_label_smoothing)
    throw std::invalid_argument(traits_.name + ": label smoothing is not supported");
  if (knobs.dropout < 0.0 || knobs.dropout >= 1.0)
    throw std::invalid_argument(traits_.name + ": dropout must lie in [0,1)");
  if (knobs.label_smoothing < 0.0 || knobs.label_smoothing >= 1.0)
    throw std::invalid_argument(traits_.name + ": label smoothing must lie in [0,1)");
}

const std::vector<std::string>& workload_names() {
  static const std::vector<std::string> names = {"w1_quadratic", "w2_noisy_quadratic",
                                                 "w3_logistic", "w4_mlp", "w5_matfac"};
  return names;
}

std::unique_ptr<Workload> make_workload(const std::string& name) {
  if (name == "w1_quadratic")
    return std::make_unique<QuadraticWorkload>("w1_quadratic", 2000, 0.0, kQuadLossFloor);
  if (name == "w2_noisy_quadratic")
    return std::make_unique<QuadraticWorkload>("w2_noisy_quadratic", 5000, 0.1, kQuadLossFloor);
  if (name == "w3_logistic") return std::make_unique<LogisticWorkload>();
  if (name == "w4_mlp") return std::make_unique<SpiralMlpWorkload>();
  if (name == "w5_matfac") return std::make_unique<MatFacWorkload>();
  throw std::invalid_argument("unknown workload: " + name);
}

Suite Suite::desk() {
  Suite s;
  for (const auto& name : workload_names()) s.workloads.push_back(make_workload(name));
  return s;
}

const Workload& Suite::at(const std::string& name) const {
  for (const auto& w : workloads)
    if (w->name() == name) return *w;
  throw std::invalid_argument("workload not in suite: " + name);
}

std::size_t Suite::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < workloads.size(); ++i)
    if (workloads[i]->name() == name) return i;
  throw std::invalid_argument("workload not in suite: " + name);
}

}  // namespace lrfbench
