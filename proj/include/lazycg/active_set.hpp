#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "lazycg/core.hpp"
#include "lazycg/domain.hpp"

namespace lazycg {

/// Convex combination of vertices representing the current iterate. Weights
/// stay nonnegative and sum to 1 within 1e-9; atoms whose weight falls below
/// 1e-12 are dropped. The solvers read their iterate back from point(), so
/// feasibility holds by construction.
class ActiveSet {
 public:
  static constexpr double kDropEps = 1e-12;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit ActiveSet(Vertex start) {
    atoms_.push_back({std::move(start), 1.0});
  }

  /// Builds a set from explicit atoms. Weights must be positive and are
  /// normalized to sum to 1; duplicate vertices merge.
  explicit ActiveSet(const std::vector<std::pair<Vertex, double>>& atoms) {
    if (atoms.empty()) throw InputError("active set: need at least one atom");
    double total = 0.0;
    for (const auto& [v, w] : atoms) {
      if (!(w > 0.0)) throw InputError("active set: weights must be positive");
      total += w;
    }
    for (const auto& [v, w] : atoms) bump(v, w / total);
    tidy();
  }

  std::size_t size() const { return atoms_.size(); }
  const Vertex& vertex(std::size_t i) const { return atoms_[i].first; }
  double weight(std::size_t i) const { return atoms_[i].second; }

  double weight_sum() const {
    double s = 0.0;
    for (const auto& [v, w] : atoms_) s += w;
    return s;
  }

  Vector point() const {
    Vector x(atoms_[0].first.coords.size(), 0.0);
    for (const auto& [v, w] : atoms_) add_scaled(x, w, v.coords);
    return x;
  }

  std::size_t find(const Vertex& v) const {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (same_vertex(atoms_[i].first, v)) return i;
    }
    return npos;
  }

  /// x <- (1 - gamma) x + gamma v.
  void fw_step(const Vertex& v, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InputError("fw_step: gamma must be in [0,1]");
    for (auto& [vtx, w] : atoms_) w *= 1.0 - gamma;
    bump(v, gamma);
    tidy();
  }

  /// Moves min(eta, weight(away)) mass from `away` to `toward` and returns
  /// the amount actually moved. An `away` that is not an atom contributes no
  /// mass, so the step degenerates to 0; callers flag that in their trace.
  double pairwise_step(const Vertex& toward, const Vertex& away, double eta) {
    if (!(eta >= 0.0)) throw InputError("pairwise_step: eta must be nonnegative");
    const std::size_t from = find(away);
    const double applied = from == npos ? 0.0 : std::min(eta, atoms_[from].second);
    if (applied > 0.0) {
      atoms_[from].second -= applied;
      bump(toward, applied);
    }
    tidy();
    return applied;
  }

  /// x <- x + alpha (y - x) for y = x - p + delta v*, where p is the donor
  /// combination described by (atom index, taken weight) pairs with total
  /// weight delta. Donor indices refer to this set's current atom order.
  void local_step(const std::vector<std::pair<std::size_t, double>>& donors, const Vertex& v_star,
                  double delta, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("local_step: alpha must be in [0,1]");
    for (const auto& [idx, taken] : donors) {
      if (idx >= atoms_.size()) throw InputError("local_step: donor index out of range");
      if (taken > atoms_[idx].second + 1e-9) throw InputError("local_step: donor weight exceeded");
      atoms_[idx].second = std::max(0.0, atoms_[idx].second - alpha * taken);
    }
    bump(v_star, alpha * delta);
    tidy();
  }

 private:
  void bump(const Vertex& v, double w) {
    const std::size_t at = find(v);
    if (at == npos) {
      if (w > 0.0) atoms_.push_back({v, w});
    } else {
      atoms_[at].second += w;
    }
  }

  void tidy() {
    for (std::size_t i = atoms_.size(); i-- > 0;) {
      if (atoms_[i].second < kDropEps) atoms_.erase(atoms_.begin() + static_cast<long>(i));
    }
    if (atoms_.empty()) throw InvariantError("active set: all atoms dropped");
    // keep the weight sum pinned to 1 so drift never accumulates over long runs
    const double sum = weight_sum();
    if (std::fabs(sum - 1.0) > 1e-12) {
      for (auto& [v, w] : atoms_) w /= sum;
    }
  }

  std::vector<std::pair<Vertex, double>> atoms_;
};

}  // namespace lazycg
