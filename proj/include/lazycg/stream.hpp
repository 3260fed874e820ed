#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "lazycg/core.hpp"

namespace lazycg {

/// One online round's loss in the closed form
///   f(x) = lin . x + offset + rho * ||x - anchor||^2.
/// Linear rounds have rho = 0 and no anchor. Keeping every round in this
/// shape is what lets the running sum of losses stay evaluable in O(n).
struct RoundLoss {
  Vector lin;
  double offset = 0.0;
  double rho = 0.0;
  Vector anchor;

  double value(const Vector& x) const {
    double s = dot(lin, x) + offset;
    if (rho != 0.0) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - anchor[i];
        s += rho * d * d;
      }
    }
    return s;
  }

  Vector gradient(const Vector& x) const {
    Vector g = lin;
    if (rho != 0.0) {
      for (std::size_t i = 0; i < x.size(); ++i) g[i] += 2.0 * rho * (x[i] - anchor[i]);
    }
    return g;
  }
};

/// Running sum F_t = f_1 + ... + f_t of round losses. Quadratic rounds must
/// share one anchor (the wrappers anchor every round at x_1); anything else
/// has no bounded closed form and is rejected.
class OnlineAggregate {
 public:
  explicit OnlineAggregate(int n) : lin_(n, 0.0) {}

  void add(const RoundLoss& loss) {
    if (loss.lin.size() != lin_.size()) throw InputError("aggregate: dimension mismatch");
    add_scaled(lin_, 1.0, loss.lin);
    offset_ += loss.offset;
    if (loss.rho != 0.0) {
      if (rho_ == 0.0) {
        anchor_ = loss.anchor;
      } else if (anchor_ != loss.anchor) {
        throw InputError("aggregate: quadratic rounds with distinct anchors are unsupported");
      }
      rho_ += loss.rho;
    }
    ++rounds_;
  }

  double value(const Vector& x) const {
    double s = dot(lin_, x) + offset_;
    if (rho_ != 0.0) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - anchor_[i];
        s += rho_ * d * d;
      }
    }
    return s;
  }

  Vector gradient(const Vector& x) const {
    Vector g = lin_;
    if (rho_ != 0.0) {
      for (std::size_t i = 0; i < x.size(); ++i) g[i] += 2.0 * rho_ * (x[i] - anchor_[i]);
    }
    return g;
  }

  int rounds() const { return rounds_; }
  const Vector& linear_part() const { return lin_; }
  double offset_part() const { return offset_; }
  double quadratic_weight() const { return rho_; }
  const Vector& anchor() const { return anchor_; }

 private:
  Vector lin_;
  double offset_ = 0.0;
  double rho_ = 0.0;
  Vector anchor_;
  int rounds_ = 0;
};

/// Sequence of online losses. Rounds may adapt to the current iterate; the
/// adversarial wrapper does, plain generated streams do not.
class LossStream {
 public:
  virtual ~LossStream() = default;
  virtual int rounds() const = 0;
  virtual int dimension() const = 0;
  virtual RoundLoss round(int t, const Vector& x_t) = 0;
  /// Upper bound on the raw losses' gradient norms (the streams below report
  /// their exact maximum).
  virtual double gradient_bound() const = 0;
};

/// Pre-generated linear losses f_t(x) = c_t . x + b_t.
class LinearLossStream : public LossStream {
 public:
  LinearLossStream(std::vector<Vector> cs, Vector bs) : cs_(std::move(cs)), bs_(std::move(bs)) {
    if (cs_.empty() || cs_.size() != bs_.size()) throw InputError("linear stream: inconsistent lengths");
    l_ = 0.0;
    for (const Vector& c : cs_) l_ = std::max(l_, norm2(c));
  }

  int rounds() const override { return static_cast<int>(cs_.size()); }
  int dimension() const override { return static_cast<int>(cs_[0].size()); }

  RoundLoss round(int t, const Vector&) override {
    if (t < 1 || t > rounds()) throw InputError("linear stream: round out of range");
    return RoundLoss{cs_[t - 1], bs_[t - 1], 0.0, {}};
  }

  double gradient_bound() const override { return l_; }

  const Vector& coefficients(int t) const { return cs_[t - 1]; }

 private:
  std::vector<Vector> cs_;
  Vector bs_;
  double l_ = 0.0;
};

/// Random linear stream: coefficients uniform on [-1,1], offsets uniform on
/// [0,1], bit-reproducible per seed. The reported gradient bound is the
/// realized max ||c_t||_2.
inline LinearLossStream generate_linear_stream(int n, int rounds, std::uint64_t seed) {
  if (n < 1 || rounds < 1) throw InputError("generate_linear_stream: need n >= 1 and rounds >= 1");
  Rng rng(seed);
  std::vector<Vector> cs(rounds, Vector(n));
  Vector bs(rounds);
  for (int t = 0; t < rounds; ++t) {
    for (int j = 0; j < n; ++j) cs[t][j] = rng.uniform(-1.0, 1.0);
    bs[t] = rng.uniform01();
  }
  return LinearLossStream(std::move(cs), std::move(bs));
}

/// Surrogate round built from a raw loss's gradient at the current iterate:
///   f~_t(x) = g . x + (2 L / sqrt(k)) t^{-1/4} ||x - x_1||^2,
/// where g = grad f_t(x_t) and k is the domain's l1 diameter. The family has
/// curvature constant L sqrt(k) with decay exponent 1/4 and strong convexity
/// constant L / sqrt(k) with the same exponent; its gradients stay within 3L.
inline RoundLoss adversarial_wrapper(const Vector& grad_at_xt, const Vector& x1, double L,
                                     double k, int t) {
  if (grad_at_xt.size() != x1.size()) throw InputError("adversarial_wrapper: dimension mismatch");
  if (!(L > 0.0) || !(k > 0.0) || t < 1) throw InputError("adversarial_wrapper: need L > 0, k > 0, t >= 1");
  const double rho = 2.0 * L / std::sqrt(k) * std::pow(static_cast<double>(t), -0.25);
  return RoundLoss{grad_at_xt, 0.0, rho, x1};
}

/// Stream of wrapped rounds over a raw stream. Also remembers the raw losses
/// it saw so regret can be reported against them.
class AdversarialWrapperStream : public LossStream {
 public:
  AdversarialWrapperStream(LossStream& raw, Vector x1, double k)
      : raw_(raw), x1_(std::move(x1)), k_(k), l_(raw.gradient_bound()) {
    if (!(l_ > 0.0)) throw InputError("adversarial wrapper: the raw stream must report a positive gradient bound");
  }

  int rounds() const override { return raw_.rounds(); }
  int dimension() const override { return raw_.dimension(); }

  RoundLoss round(int t, const Vector& x_t) override {
    RoundLoss raw_loss = raw_.round(t, x_t);
    // Per-round records of the raw stream: the realized loss and the running
    // linear sum, so regret against the raw losses can be reported afterwards.
    const double prev_value = raw_value_running_.empty() ? 0.0 : raw_value_running_.back();
    raw_value_running_.push_back(prev_value + raw_loss.value(x_t));
    if (raw_loss.rho != 0.0) raw_all_linear_ = false;
    if (raw_lin_running_.empty()) raw_lin_running_.assign(raw_loss.lin.size(), 0.0);
    add_scaled(raw_lin_running_, 1.0, raw_loss.lin);
    raw_lin_prefix_.push_back(raw_lin_running_);
    raw_offset_running_ += raw_loss.offset;
    raw_offset_prefix_.push_back(raw_offset_running_);
    raw_seen_.push_back(std::move(raw_loss));
    return adversarial_wrapper(raw_seen_.back().gradient(x_t), x1_, l_, k_, t);
  }

  // wrapped gradients are g + 2 rho (x - x_1) with ||2 rho (x - x_1)|| <= 2L
  double gradient_bound() const override { return 3.0 * l_; }

  double curvature_constant() const { return l_ * std::sqrt(k_); }       // C, decay b = 1/4
  double strong_convexity_constant() const { return l_ / std::sqrt(k_); }  // S, decay s = 1/4
  double raw_gradient_bound() const { return l_; }

  const std::vector<RoundLoss>& raw_rounds_seen() const { return raw_seen_; }

  /// True when every raw round so far was linear, which is what makes the
  /// prefix sums below an exact description of the raw aggregate.
  bool raw_all_linear() const { return raw_all_linear_; }
  /// Running sum of raw losses evaluated at the iterates, one entry per round.
  const std::vector<double>& raw_value_running() const { return raw_value_running_; }
  /// Coefficients of f_1 + ... + f_t for each t (valid when raw_all_linear()).
  const std::vector<Vector>& raw_lin_prefix() const { return raw_lin_prefix_; }
  const std::vector<double>& raw_offset_prefix() const { return raw_offset_prefix_; }

 private:
  LossStream& raw_;
  Vector x1_;
  double k_ = 0.0;
  double l_ = 0.0;
  std::vector<RoundLoss> raw_seen_;
  bool raw_all_linear_ = true;
  std::vector<double> raw_value_running_;
  Vector raw_lin_running_;
  double raw_offset_running_ = 0.0;
  std::vector<Vector> raw_lin_prefix_;
  std::vector<double> raw_offset_prefix_;
};

}  // namespace lazycg
