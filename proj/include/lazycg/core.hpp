#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lazycg {

using Vector = std::vector<double>;

/// Thrown on malformed caller input: dimension mismatches, non-finite data,
/// parameters outside their documented range, unsupported domain kinds.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an internal invariant fails. Indicates a bug in this library,
/// never bad caller input.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw InputError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm1(const Vector& a) {
  double s = 0.0;
  for (double v : a) s += std::fabs(v);
  return s;
}

inline double norm2(const Vector& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

inline bool all_finite(const Vector& a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// y += alpha * x
inline void add_scaled(Vector& y, double alpha, const Vector& x) {
  if (y.size() != x.size()) throw InputError("add_scaled: dimension mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

inline Vector subtract(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw InputError("subtract: dimension mismatch");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

// (1 - gamma) * x + gamma * v
inline Vector convex_combination(const Vector& x, double gamma, const Vector& v) {
  if (x.size() != v.size()) throw InputError("convex_combination: dimension mismatch");
  Vector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = (1.0 - gamma) * x[i] + gamma * v[i];
  return r;
}

/// Deterministic random source. Wraps std::mt19937_64 with a fixed
/// integer-to-double mapping so that streams are identical across standard
/// library implementations; std::uniform_real_distribution makes no such
/// guarantee.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // uniform on [0, 1) with 53 random bits
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // uniform integer in [0, bound)
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw InputError("Rng::below: bound must be positive");
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % bound;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lazycg
