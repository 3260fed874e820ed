#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "lazycg/core.hpp"
#include "lazycg/domain.hpp"

namespace lazycg {

/// Convex objective with the constants the solvers consume.
///
/// Contract for implementations: value and gradient agree (finite
/// differences), curvature() bounds the curvature constant over the intended
/// domain, smoothness() is an l2 smoothness constant, strong_convexity() is 0
/// when the function is not strongly convex, gradient_bound() dominates
/// ||grad f(x)||_2 over the domain.
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;

  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;

  virtual double curvature() const = 0;         // C
  virtual double smoothness() const = 0;        // beta
  virtual double strong_convexity() const { return 0.0; }  // S
  virtual double gradient_bound() const = 0;    // L

  /// Second derivative of gamma -> f(x + gamma d) when it is constant in
  /// gamma (quadratics), empty otherwise. Lets the line search solve exactly.
  virtual std::optional<double> directional_curvature(const Vector& x, const Vector& d) const {
    (void)x;
    (void)d;
    return std::nullopt;
  }
};

// Largest eigenvalue of A^T A by power iteration on x -> A^T (A x).
// Stops when the Rayleigh quotient moves less than `tol` relatively.
inline double power_iteration_ata(const std::vector<Vector>& a, int n, double tol = 1e-8,
                                  int max_iters = 10000) {
  if (a.empty() || n == 0) return 0.0;
  Rng rng(0x243f6a8885a308d3ULL);  // fixed seed: the result must be deterministic
  Vector x(n);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    // y = A^T (A x)
    Vector y(n, 0.0);
    for (const Vector& row : a) {
      const double rx = dot(row, x);
      add_scaled(y, rx, row);
    }
    const double ny = norm2(y);
    if (ny == 0.0) return 0.0;
    const double next = dot(x, y) / dot(x, x);
    for (int i = 0; i < n; ++i) x[i] = y[i] / ny;
    if (it > 0 && std::fabs(next - lambda) <= tol * std::max(1.0, std::fabs(next))) {
      return next;
    }
    lambda = next;
  }
  return lambda;
}

// Smallest eigenvalue of A^T A via power iteration on the spectrum flipped
// around lambda_max. Values indistinguishable from zero at double precision
// are clamped to zero so rank deficiency is reported as no strong convexity.
inline double min_eigenvalue_ata(const std::vector<Vector>& a, int n, double lambda_max) {
  if (a.empty() || n == 0 || lambda_max == 0.0) return 0.0;
  if (static_cast<int>(a.size()) < n) return 0.0;  // fewer rows than columns: singular
  Rng rng(0x13198a2e03707344ULL);
  Vector x(n);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  const double shift = lambda_max * (1.0 + 1e-6);
  double nu = 0.0;
  for (int it = 0; it < 10000; ++it) {
    // y = shift * x - A^T (A x)
    Vector y(n, 0.0);
    for (const Vector& row : a) {
      const double rx = dot(row, x);
      add_scaled(y, rx, row);
    }
    for (int i = 0; i < n; ++i) y[i] = shift * x[i] - y[i];
    const double ny = norm2(y);
    if (ny == 0.0) break;
    const double next = dot(x, y) / dot(x, x);
    for (int i = 0; i < n; ++i) x[i] = y[i] / ny;
    if (it > 0 && std::fabs(next - nu) <= 1e-8 * std::max(1.0, std::fabs(next))) {
      nu = next;
      break;
    }
    nu = next;
  }
  double lambda_min = shift - nu;
  if (lambda_min < 1e-9 * std::max(1.0, lambda_max)) lambda_min = 0.0;
  return lambda_min;
}

/// Least squares objective f(x) = ||A x - b||^2 over a fixed domain.
/// The constants are derived from the extreme eigenvalues of A^T A and the
/// domain geometry: beta = 2 lambda_max, C = beta D^2, S = 2 lambda_min.
class QuadraticObjective : public SmoothObjective {
 public:
  QuadraticObjective(std::vector<Vector> a, Vector b, const Domain& domain) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.empty()) throw InputError("quadratic: A must have at least one row");
    n_ = static_cast<int>(a_[0].size());
    if (n_ != domain.dimension()) throw InputError("quadratic: A and domain dimensions differ");
    for (const Vector& row : a_) {
      if (static_cast<int>(row.size()) != n_) throw InputError("quadratic: ragged rows in A");
      if (!all_finite(row)) throw InputError("quadratic: non-finite entry in A");
    }
    if (b_.size() != a_.size()) throw InputError("quadratic: b length must match row count");
    if (!all_finite(b_)) throw InputError("quadratic: non-finite entry in b");
    lambda_max_ = power_iteration_ata(a_, n_);
    lambda_min_ = min_eigenvalue_ata(a_, n_, lambda_max_);
    diameter_ = domain.l2_diameter();
    // ||grad f(x)|| = 2 ||A^T A x - A^T b|| <= 2 (lambda_max ||x|| + ||A^T b||)
    Vector atb(n_, 0.0);
    for (std::size_t i = 0; i < a_.size(); ++i) add_scaled(atb, b_[i], a_[i]);
    gradient_bound_ = 2.0 * (lambda_max_ * domain.max_vertex_norm2() + norm2(atb));
  }

  double value(const Vector& x) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) {
      const double r = dot(a_[i], x) - b_[i];
      s += r * r;
    }
    return s;
  }

  Vector gradient(const Vector& x) const override {
    Vector g(n_, 0.0);
    for (std::size_t i = 0; i < a_.size(); ++i) {
      const double r = dot(a_[i], x) - b_[i];
      add_scaled(g, 2.0 * r, a_[i]);
    }
    return g;
  }

  double curvature() const override { return 2.0 * lambda_max_ * diameter_ * diameter_; }
  double smoothness() const override { return 2.0 * lambda_max_; }
  double strong_convexity() const override { return 2.0 * lambda_min_; }
  double gradient_bound() const override { return gradient_bound_; }

  std::optional<double> directional_curvature(const Vector& x, const Vector& d) const override {
    (void)x;
    double s = 0.0;
    for (const Vector& row : a_) {
      const double rd = dot(row, d);
      s += rd * rd;
    }
    return 2.0 * s;
  }

  double lambda_max() const { return lambda_max_; }
  double lambda_min() const { return lambda_min_; }
  const std::vector<Vector>& rows() const { return a_; }
  const Vector& rhs() const { return b_; }

 private:
  std::vector<Vector> a_;
  Vector b_;
  int n_ = 0;
  double lambda_max_ = 0.0;
  double lambda_min_ = 0.0;
  double diameter_ = 0.0;
  double gradient_bound_ = 0.0;
};

/// Step length for f along d = v - x from x, clamped to [0, 1].
///
/// Quadratics are minimized exactly; everything else backtracks from 1 under
/// the Armijo rule (slope factor 0.1, halving, floor 2^-30). The returned
/// step never increases f beyond f(x) + 1e-12.
inline double line_search(const SmoothObjective& f, const Vector& x, const Vector& d) {
  if (x.size() != d.size()) throw InputError("line_search: dimension mismatch");
  if (!all_finite(x) || !all_finite(d)) throw InputError("line_search: non-finite input");
  bool zero = true;
  for (double v : d) {
    if (v != 0.0) zero = false;
  }
  if (zero) return 0.0;
  const Vector grad = f.gradient(x);
  const double slope = dot(grad, d);
  if (const auto curv = f.directional_curvature(x, d)) {
    if (*curv > 0.0) {
      return std::clamp(-slope / *curv, 0.0, 1.0);
    }
    // flat direction: the objective is linear along d
    return slope < 0.0 ? 1.0 : 0.0;
  }
  if (slope >= 0.0) return 0.0;
  const double fx = f.value(x);
  double gamma = 1.0;
  while (gamma > 0x1.0p-30) {
    Vector y = x;
    add_scaled(y, gamma, d);
    if (f.value(y) <= fx + 0.1 * gamma * slope) return gamma;
    gamma *= 0.5;
  }
  Vector y = x;
  add_scaled(y, gamma, d);
  return f.value(y) <= fx + 1e-12 ? gamma : 0.0;
}

/// Step length min{1, phi / (K C)} used when a curvature bound is available.
inline double short_step(double phi, double K, double C) {
  if (!(phi >= 0.0) || !(K >= 1.0) || !(C > 0.0)) {
    throw InputError("short_step: need phi >= 0, K >= 1, C > 0");
  }
  return std::min(1.0, phi / (K * C));
}

/// Random least squares instance over `domain`: each entry of the m x n
/// matrix A is present with probability `density` and then uniform on [0,1];
/// b = A w for a uniform [0,1] weight vector, so the target is realizable.
/// The draw order is fixed, which makes instances bit-reproducible per seed.
inline QuadraticObjective generate_regression_instance(const Domain& domain, double density,
                                                       int rows, std::uint64_t seed) {
  if (!(density >= 0.0 && density <= 1.0)) throw InputError("generate_regression_instance: density must be in [0,1]");
  if (rows < 1) throw InputError("generate_regression_instance: need at least one row");
  const int n = domain.dimension();
  Rng rng(seed);
  std::vector<Vector> a(rows, Vector(n, 0.0));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < n; ++j) {
      if (rng.bernoulli(density)) a[i][j] = rng.uniform01();
    }
  }
  Vector w(n);
  for (double& v : w) v = rng.uniform01();
  Vector b(rows);
  for (int i = 0; i < rows; ++i) b[i] = dot(a[i], w);
  return QuadraticObjective(std::move(a), std::move(b), domain);
}

}  // namespace lazycg
