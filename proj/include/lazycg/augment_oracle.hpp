#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "lazycg/active_set.hpp"
#include "lazycg/core.hpp"
#include "lazycg/domain.hpp"

namespace lazycg {

/// Coefficients 1 - 2 x_i. For 0/1 vectors x and v they satisfy
///   flip_penalty(x) . v + ||x||_1 = ||v - x||_1,
/// which is what turns an l1 proximity penalty into a linear objective.
inline Vector flip_penalty(const Vector& x) {
  Vector p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = 1.0 - 2.0 * x[i];
  return p;
}

/// Number of augmentation calls that guarantee accuracy K when vertices are
/// 0/1 with l1 diameter at most k: the smallest N with
/// (1 - 1/k)^N <= 1 - 1/K. Requires K > 1 strictly; k = 1 forces N = 1
/// because any improving move already reaches the vertex optimum.
inline long long call_budget(double K, double k) {
  if (!(K > 1.0) || !std::isfinite(K)) {
    throw InputError("call_budget: the augmentation oracle needs K > 1");
  }
  if (!(k >= 1.0) || !std::isfinite(k)) throw InputError("call_budget: need k >= 1");
  if (k == 1.0) return 1;
  const double ratio = std::log1p(-1.0 / K) / std::log1p(-1.0 / k);
  const long long n = static_cast<long long>(std::ceil(ratio));
  return n < 1 ? 1 : n;
}

/// Setup for augmentation-backed weak separation over a 0/1 domain.
struct AugSeparationConfig {
  double K = 2.0;  // accuracy, strictly above 1
  double k = 1.0;  // l1 diameter bound of the domain
  long long N = 1; // per-query augmentation budget

  AugSeparationConfig(double accuracy, double l1_diameter)
      : K(accuracy), k(l1_diameter), N(call_budget(accuracy, l1_diameter)) {}
};

/// First atom of the decomposition (in insertion order) at least as cheap as
/// the combination itself. One always exists because the cheapest atom of a
/// convex combination is at most the weighted average; the fallback below
/// covers the rounding-level case where no scored atom clears the average.
inline std::size_t select_start(const Vector& c, const ActiveSet& active) {
  if (active.size() == 0) throw InvariantError("select_start: empty active set");
  std::vector<double> score(active.size());
  double cx = 0.0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    score[i] = dot(c, active.vertex(i).coords);
    cx += active.weight(i) * score[i];
  }
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (score[i] <= cx) return i;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < active.size(); ++i) {
    if (score[i] < score[best]) best = i;
  }
  if (score[best] > cx + 1e-9 * (1.0 + std::fabs(cx))) {
    throw InvariantError("select_start: no atom at or below the average score");
  }
  return best;
}

/// Answer of augmentation-backed weak separation. `potentials` records
/// phi - c (x - x_i) after each augmentation step; each entry must shrink by
/// at least the factor 1 - 1/k relative to its predecessor.
struct AugAnswer {
  bool positive = false;
  Vertex vertex;
  double improvement = 0.0;  // c . (x - vertex) when positive
  long long aug_calls = 0;
  std::vector<double> potentials;
};

/// Weak separation realized with the domain's augmentation oracle instead of
/// linear minimization. Walks from a cheap atom of x through at most N
/// augmentation steps against the penalized objective
///   c + ((phi - c (x - x_i)) / k) * flip_penalty(x_i);
/// an early iterate with c (x - x_i) >= phi is returned immediately, a
/// stalled augmentation certifies c (x - z) <= phi for all feasible z, and
/// surviving all N steps guarantees c (x - x_N) >= phi / K.
inline AugAnswer augmenting_weak_separation(const Domain& domain, const AugSeparationConfig& config,
                                            const Vector& c, const ActiveSet& active, double phi) {
  if (!domain.is_zero_one()) {
    throw InputError("augmenting weak separation: only 0/1 domains are supported");
  }
  if (!(phi > 0.0) || !std::isfinite(phi)) {
    throw InputError("augmenting weak separation: phi must be positive and finite");
  }
  if (c.size() != static_cast<std::size_t>(domain.dimension())) {
    throw InputError("augmenting weak separation: dimension mismatch");
  }
  if (!all_finite(c)) throw InputError("augmenting weak separation: non-finite objective");

  const Vector x = active.point();
  const double cx = dot(c, x);
  Vertex current = active.vertex(select_start(c, active));

  AugAnswer answer;
  double potential = phi - (cx - dot(c, current.coords));
  for (long long i = 1; i <= config.N; ++i) {
    if (potential <= 0.0) {
      // c (x - current) >= phi already
      answer.positive = true;
      answer.vertex = current;
      answer.improvement = cx - dot(c, current.coords);
      return answer;
    }
    Vector penalized = c;
    add_scaled(penalized, potential / config.k, flip_penalty(current.coords));
    const Vertex next = domain.augment(penalized, current);
    ++answer.aug_calls;
    if (same_vertex(next, current)) {
      // current minimizes the penalized objective, which certifies
      // c (x - z) <= phi for every feasible z
      return answer;
    }
    const double next_potential = phi - (cx - dot(c, next.coords));
    // each step contracts the potential by at least 1 - 1/k
    if (!(next_potential < (1.0 - 1.0 / config.k) * potential + 1e-9 * (1.0 + std::fabs(phi)))) {
      throw InvariantError("augmenting weak separation: potential contraction violated");
    }
    answer.potentials.push_back(next_potential);
    current = next;
    potential = next_potential;
  }
  answer.positive = true;
  answer.vertex = current;
  answer.improvement = cx - dot(c, current.coords);
  return answer;
}

}  // namespace lazycg
