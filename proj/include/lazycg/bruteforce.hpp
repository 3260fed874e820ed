#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "lazycg/core.hpp"
#include "lazycg/domain.hpp"
#include "lazycg/objective.hpp"
#include "lazycg/stream.hpp"

namespace lazycg {

struct BruteForceResult {
  double value = 0.0;
  Vector point;
};

namespace detail {

/// Solves a dense square linear system by Gaussian elimination with partial
/// pivoting. Returns nullopt when a pivot is numerically zero.
inline std::optional<Vector> gaussian_solve(std::vector<Vector> m, Vector rhs) {
  const std::size_t n = rhs.size();
  double scale = 0.0;
  for (const Vector& row : m) {
    for (double v : row) scale = std::max(scale, std::abs(v));
  }
  const double tiny = 1e-12 * std::max(1.0, scale);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (std::abs(m[pivot][col]) < tiny) return std::nullopt;
    std::swap(m[pivot], m[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = m[r][col] / m[col][col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) m[r][c] -= factor * m[col][c];
      rhs[r] -= factor * rhs[col];
    }
  }
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / m[i][i];
  return x;
}

}  // namespace detail

/// Euclidean projection of t onto the unit simplex, by the sorted
/// threshold rule. Exact up to floating point.
inline Vector project_onto_simplex(const Vector& t) {
  const std::size_t n = t.size();
  Vector sorted = t;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double running = 0.0;
  double tau = 0.0;
  std::size_t k = 0;
  for (std::size_t j = 0; j < n; ++j) {
    running += sorted[j];
    const double cand = (running - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - cand > 0.0) {
      tau = cand;
      k = j + 1;
    }
  }
  if (k == 0) throw InvariantError("simplex projection: empty support");
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::max(t[i] - tau, 0.0);
  return x;
}

/// Exact linear minimum by exhaustive vertex enumeration. Independent of the
/// streamlined per-domain minimizers, so it can serve as their referee.
inline BruteForceResult minimize_linear_brute_force(const Domain& domain, const Vector& c) {
  if (c.size() != static_cast<std::size_t>(domain.dimension())) {
    throw InputError("brute force: objective dimension mismatch");
  }
  const auto vertices = domain.enumerate_vertices();
  if (vertices.empty()) throw InvariantError("brute force: domain has no vertices");
  BruteForceResult best{std::numeric_limits<double>::infinity(), {}};
  for (const Vertex& v : vertices) {
    const double val = dot(c, v.coords);
    if (val < best.value) {
      best.value = val;
      best.point = v.coords;
    }
  }
  return best;
}

/// Exact minimum of a least-squares objective over the unit simplex, found by
/// enumerating support sets and solving each face's optimality system. A face
/// whose system is singular or whose solution leaves the face is skipped: the
/// minimum over that face is then attained on an enumerated sub-face.
inline BruteForceResult minimize_quadratic_on_simplex(const Domain& domain,
                                                      const QuadraticObjective& f) {
  if (domain.kind() != DomainKind::ProbabilitySimplex) {
    throw InputError("face enumeration requires a simplex domain");
  }
  const int n = domain.dimension();
  if (n > 16) throw InputError("face enumeration supports at most 16 coordinates");
  const auto& rows = f.rows();
  const Vector& b = f.rhs();
  // Gram matrix of the design and its correlation with the target.
  std::vector<Vector> gram(n, Vector(n, 0.0));
  Vector atb(n, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int i = 0; i < n; ++i) {
      atb[i] += rows[r][i] * b[r];
      for (int j = 0; j < n; ++j) gram[i][j] += rows[r][i] * rows[r][j];
    }
  }
  BruteForceResult best{std::numeric_limits<double>::infinity(), {}};
  auto consider = [&](const Vector& x) {
    const double val = f.value(x);
    if (val < best.value) {
      best.value = val;
      best.point = x;
    }
  };
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> support;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) support.push_back(i);
    }
    const std::size_t m = support.size() + 1;
    std::vector<Vector> sys(m, Vector(m, 0.0));
    Vector rhs(m, 0.0);
    for (std::size_t r = 0; r + 1 < m; ++r) {
      for (std::size_t c = 0; c + 1 < m; ++c) sys[r][c] = 2.0 * gram[support[r]][support[c]];
      sys[r][m - 1] = 1.0;
      sys[m - 1][r] = 1.0;
      rhs[r] = 2.0 * atb[support[r]];
    }
    rhs[m - 1] = 1.0;
    const auto sol = detail::gaussian_solve(sys, rhs);
    if (!sol) continue;
    bool inside = true;
    for (std::size_t r = 0; r + 1 < m; ++r) {
      if ((*sol)[r] < -1e-12) {
        inside = false;
        break;
      }
    }
    if (!inside) continue;
    Vector x(n, 0.0);
    double sum = 0.0;
    for (std::size_t r = 0; r + 1 < m; ++r) {
      x[support[r]] = std::max((*sol)[r], 0.0);
      sum += x[support[r]];
    }
    if (sum <= 0.0) continue;
    for (double& xi : x) xi /= sum;
    consider(x);
  }
  for (const Vertex& v : domain.enumerate_vertices()) consider(v.coords);
  if (!std::isfinite(best.value)) throw InvariantError("face enumeration found no candidate");
  return best;
}

/// Exact minimum of lin.x + offset + weight*|x - anchor|^2 over the domain.
/// Supported closed forms: simplex (projection) and hypercube (coordinate
/// clamp); the pure linear case falls back to vertex enumeration.
inline std::optional<BruteForceResult> minimize_anchored_quadratic(const Domain& domain,
                                                                   const Vector& lin,
                                                                   double offset, double weight,
                                                                   const Vector& anchor) {
  const int n = domain.dimension();
  if (lin.size() != static_cast<std::size_t>(n)) {
    throw InputError("anchored quadratic: dimension mismatch");
  }
  auto value_at = [&](const Vector& x) {
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = x[i] - anchor[i];
      sq += d * d;
    }
    return dot(lin, x) + offset + weight * sq;
  };
  if (weight == 0.0) {
    if (domain.vertex_count_estimate() > 100000.0) return std::nullopt;
    BruteForceResult best = minimize_linear_brute_force(domain, lin);
    best.value += offset;
    return best;
  }
  if (weight < 0.0) throw InputError("anchored quadratic: negative curvature weight");
  Vector target(n);
  for (int i = 0; i < n; ++i) target[i] = anchor[i] - lin[i] / (2.0 * weight);
  if (domain.kind() == DomainKind::ProbabilitySimplex) {
    Vector x = project_onto_simplex(target);
    return BruteForceResult{value_at(x), x};
  }
  if (domain.kind() == DomainKind::Hypercube) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = std::clamp(target[i], 0.0, 1.0);
    return BruteForceResult{value_at(x), x};
  }
  return std::nullopt;
}

/// Exact minimum of an aggregated loss where a closed form exists; nullopt
/// otherwise. Used to report running regret against the best fixed point.
inline std::optional<BruteForceResult> minimize_aggregate(const Domain& domain,
                                                          const OnlineAggregate& agg) {
  if (agg.rounds() == 0) return std::nullopt;
  return minimize_anchored_quadratic(domain, agg.linear_part(), agg.offset_part(),
                                     agg.quadratic_weight(), agg.anchor());
}

}  // namespace lazycg
