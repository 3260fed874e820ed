#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "lazycg/active_set.hpp"
#include "lazycg/core.hpp"
#include "lazycg/domain.hpp"

namespace lazycg {

/// Tallies over the lifetime of one oracle. cache_hits counts queries served
/// without touching the exact oracle, lp_calls counts exact oracle calls
/// (a product query that misses the cache makes two).
struct OracleStats {
  long long total_queries = 0;
  long long cache_hits = 0;
  long long lp_calls = 0;
  long long positive_answers = 0;
  long long negative_answers = 0;

  double cache_hit_rate() const {
    return total_queries == 0 ? 0.0 : static_cast<double>(cache_hits) / static_cast<double>(total_queries);
  }
};

/// Vertices returned by past exact oracle calls, scanned before paying for a
/// new one. Periodically shrunk to the most used entries: every
/// `eviction_period` queries only the `keep_size` entries with the highest
/// use counts survive, ties going to the most recently inserted.
class OracleCache {
 public:
  struct Entry {
    Vertex vertex;
    long long use_count = 0;
    long long inserted_seq = 0;
  };

  explicit OracleCache(bool enabled = true, std::size_t keep_size = 100,
                       long long eviction_period = 100)
      : enabled_(enabled), keep_size_(keep_size), eviction_period_(eviction_period) {
    if (keep_size_ == 0) throw InputError("cache: keep_size must be positive");
    if (eviction_period_ <= 0) throw InputError("cache: eviction_period must be positive");
  }

  bool enabled() const { return enabled_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  long long queries_since_eviction() const { return queries_since_eviction_; }

  /// Records a vertex that answered a query. Duplicate coordinates bump the
  /// existing entry instead of inserting a second copy.
  void insert_or_bump(const Vertex& v) {
    if (!enabled_) return;
    for (Entry& e : entries_) {
      if (same_vertex(e.vertex, v)) {
        ++e.use_count;
        return;
      }
    }
    entries_.push_back({v, 1, next_seq_++});
  }

  void bump(std::size_t index) {
    ++entries_[index].use_count;
  }

  /// Eviction bookkeeping, called once per oracle query after it is served.
  void note_query() {
    if (!enabled_) return;
    if (++queries_since_eviction_ >= eviction_period_) {
      evict();
      queries_since_eviction_ = 0;
    }
  }

  /// Keeps the keep_size entries with the highest use counts; on equal use
  /// counts the more recently inserted entry survives. Use counts persist.
  void evict() {
    if (entries_.size() <= keep_size_) return;
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      if (a.use_count != b.use_count) return a.use_count > b.use_count;
      return a.inserted_seq > b.inserted_seq;
    });
    entries_.resize(keep_size_);
  }

 private:
  bool enabled_ = true;
  std::size_t keep_size_ = 100;
  long long eviction_period_ = 100;
  long long queries_since_eviction_ = 0;
  long long next_seq_ = 0;
  std::vector<Entry> entries_;
};

/// Answer of a weak separation query at point x, objective c, bound phi,
/// accuracy K. Positive carries a vertex y with c (x - y) > phi / K; negative
/// certifies c (x - z) <= phi for every feasible z. A negative always comes
/// from an exact oracle call, which also yields the exact maximum of
/// c (x - z) over the domain in `exact_dual_gap`.
struct SeparationAnswer {
  bool positive = false;
  Vertex vertex;
  double improvement = 0.0;  // c . (x - vertex) when positive
  bool served_from_cache = false;
  bool lp_called = false;
  std::optional<double> exact_dual_gap;
};

namespace detail {

inline void check_query(const Domain& domain, const Vector& c, const Vector& x, double phi,
                        double K) {
  if (c.size() != static_cast<std::size_t>(domain.dimension()) || x.size() != c.size()) {
    throw InputError("weak separation: dimension mismatch");
  }
  if (!all_finite(c) || !all_finite(x)) throw InputError("weak separation: non-finite input");
  if (!(phi > 0.0) || !std::isfinite(phi)) throw InputError("weak separation: phi must be positive and finite");
  if (!(K >= 1.0) || !std::isfinite(K)) throw InputError("weak separation: K must be >= 1 and finite");
}

}  // namespace detail

/// Weak separation backed by the domain's linear minimization oracle and a
/// vertex cache. The cache is scanned first and the best cached witness (the
/// largest c (x - y)) is returned if it clears phi / K; only then is the
/// exact oracle paid for. A negative answer can never come from the cache.
inline SeparationAnswer weak_separation(const Domain& domain, const Vector& c, const Vector& x,
                                        double phi, double K, OracleCache& cache,
                                        OracleStats& stats) {
  detail::check_query(domain, c, x, phi, K);
  ++stats.total_queries;
  const double threshold = phi / K;
  const double cx = dot(c, x);

  SeparationAnswer answer;
  if (cache.enabled()) {
    std::size_t best = static_cast<std::size_t>(-1);
    double best_improvement = 0.0;
    const auto& entries = cache.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const double improvement = cx - dot(c, entries[i].vertex.coords);
      if (improvement > threshold &&
          (best == static_cast<std::size_t>(-1) || improvement > best_improvement)) {
        best = i;
        best_improvement = improvement;
      }
    }
    if (best != static_cast<std::size_t>(-1)) {
      answer.positive = true;
      answer.vertex = entries[best].vertex;
      answer.improvement = best_improvement;
      answer.served_from_cache = true;
      cache.bump(best);
      ++stats.cache_hits;
      ++stats.positive_answers;
      cache.note_query();
      return answer;
    }
  }

  const Vertex y = domain.lmo(c);
  ++stats.lp_calls;
  answer.lp_called = true;
  const double improvement = cx - dot(c, y.coords);
  if (improvement > threshold) {
    answer.positive = true;
    answer.vertex = y;
    answer.improvement = improvement;
    cache.insert_or_bump(y);
    ++stats.positive_answers;
  } else {
    // y minimizes c, so improvement is exactly max_z c (x - z)
    answer.exact_dual_gap = std::max(0.0, improvement);
    ++stats.negative_answers;
  }
  cache.note_query();
  return answer;
}

/// Exact separation: one linear minimization per query, positive whenever the
/// optimum improves on x at all. This is the threshold-free oracle that turns
/// the lazified solvers into their non-lazy baselines.
inline SeparationAnswer exact_separation(const Domain& domain, const Vector& c, const Vector& x,
                                         double phi, double K, OracleStats& stats) {
  detail::check_query(domain, c, x, phi, K);
  ++stats.total_queries;
  const Vertex y = domain.lmo(c);
  ++stats.lp_calls;
  SeparationAnswer answer;
  answer.lp_called = true;
  const double improvement = dot(c, x) - dot(c, y.coords);
  if (improvement > 0.0) {
    answer.positive = true;
    answer.vertex = y;
    answer.improvement = improvement;
    ++stats.positive_answers;
  } else {
    answer.exact_dual_gap = std::max(0.0, improvement);
    ++stats.negative_answers;
  }
  return answer;
}

/// Answer of a weak separation query over the product of the domain with
/// itself, specialized to the pairwise objective (grad, -masked grad): the
/// toward vertex lowers grad . v over the whole domain, the away vertex
/// raises grad . v over vertices supported inside supp(x). sigma is the
/// combined improvement grad . (away - toward).
struct ProductAnswer {
  bool positive = false;
  Vertex toward;
  std::optional<Vertex> away;  // empty when no vertex fits inside supp(x)
  double sigma = 0.0;
  bool served_from_cache = false;
  bool lp_called = false;
  std::optional<double> exact_dual_gap;
};

/// Weak separation for the pairwise step. Components are cached separately;
/// the cache scan combines the best toward and away candidates before any
/// exact call. A cache miss costs two exact oracle calls (one per factor).
/// When no vertex lives inside supp(x) the away component degenerates to x
/// itself, contributing nothing to sigma.
inline ProductAnswer weak_separation_product(const Domain& domain, const Vector& grad,
                                             const Vector& x, double phi, double K,
                                             OracleCache& toward_cache, OracleCache& away_cache,
                                             OracleStats& stats) {
  detail::check_query(domain, grad, x, phi, K);
  ++stats.total_queries;
  const double threshold = phi / K;
  const std::vector<char> mask = support_mask(x);

  ProductAnswer answer;
  if (toward_cache.enabled() && away_cache.enabled() && !toward_cache.entries().empty() &&
      !away_cache.entries().empty()) {
    // sigma splits into independent toward and away terms, so the best cached
    // pair is the best of each factor
    std::size_t best_toward = static_cast<std::size_t>(-1);
    double toward_score = 0.0;
    const auto& tw = toward_cache.entries();
    for (std::size_t i = 0; i < tw.size(); ++i) {
      const double s = dot(grad, tw[i].vertex.coords);
      if (best_toward == static_cast<std::size_t>(-1) || s < toward_score) {
        best_toward = i;
        toward_score = s;
      }
    }
    std::size_t best_away = static_cast<std::size_t>(-1);
    double away_score = 0.0;
    const auto& aw = away_cache.entries();
    for (std::size_t i = 0; i < aw.size(); ++i) {
      if (!support_contained_in(aw[i].vertex.coords, mask)) continue;
      const double s = dot(grad, aw[i].vertex.coords);
      if (best_away == static_cast<std::size_t>(-1) || s > away_score) {
        best_away = i;
        away_score = s;
      }
    }
    if (best_toward != static_cast<std::size_t>(-1) && best_away != static_cast<std::size_t>(-1)) {
      const double sigma = away_score - toward_score;
      if (sigma > threshold) {
        answer.positive = true;
        answer.toward = tw[best_toward].vertex;
        answer.away = aw[best_away].vertex;
        answer.sigma = sigma;
        answer.served_from_cache = true;
        toward_cache.bump(best_toward);
        away_cache.bump(best_away);
        ++stats.cache_hits;
        ++stats.positive_answers;
        toward_cache.note_query();
        away_cache.note_query();
        return answer;
      }
    }
  }

  const Vertex toward = domain.lmo(grad);
  std::optional<Vertex> away = domain.lmo_restricted(grad, mask);
  stats.lp_calls += 2;
  answer.lp_called = true;
  const double away_value = away ? dot(grad, away->coords) : dot(grad, x);
  const double sigma = away_value - dot(grad, toward.coords);
  answer.toward = toward;
  answer.away = away;
  answer.sigma = sigma;
  if (sigma > threshold) {
    answer.positive = true;
    toward_cache.insert_or_bump(toward);
    if (away) away_cache.insert_or_bump(*away);
    ++stats.positive_answers;
  } else {
    // both factors were solved exactly, so sigma is the true maximum
    answer.exact_dual_gap = std::max(0.0, sigma);
    ++stats.negative_answers;
  }
  toward_cache.note_query();
  away_cache.note_query();
  return answer;
}

/// Answer of a local weak separation query: a vertex v* together with the
/// weight transfer that realizes y = x - p + delta v*, where p collects
/// `delta` worth of the most expensive atoms of x under c. Donors are (atom
/// index, taken weight) pairs against the queried active set.
struct LocalAnswer {
  bool positive = false;
  Vertex vertex;
  double delta = 0.0;
  std::vector<std::pair<std::size_t, double>> donors;
  Vector y;
  double improvement = 0.0;  // c . (x - y) when positive
  bool served_from_cache = false;
  bool lp_called = false;
  std::optional<double> exact_dual_gap;
};

/// Donor selection for a local query: `delta` worth of weight taken greedily
/// from the most expensive atoms of the active set under c. `p` sums to
/// `realized` (which can fall short of delta only by weight rounding) and
/// `p_scaled = p / realized` is the convex combination actually queried.
struct LocalQueryPlan {
  double realized = 0.0;
  std::vector<std::pair<std::size_t, double>> donors;
  Vector p;
  Vector p_scaled;
};

inline LocalQueryPlan local_query_plan(const Domain& domain, const Vector& c,
                                       const ActiveSet& active, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InputError("weak local separation: r must be positive");
  if (!domain.has_mu()) throw InputError("weak local separation: the domain needs mu set");
  if (!(domain.l2_diameter() > 0.0)) throw InputError("weak local separation: degenerate domain diameter");
  if (active.size() == 0) throw InvariantError("weak local separation: empty active set");

  const double n = static_cast<double>(domain.dimension());
  const double delta = std::min(std::sqrt(n) * domain.mu() * r / domain.l2_diameter(), 1.0);

  // atoms sorted by c . v descending; the stable tie rule keeps insertion order
  std::vector<std::size_t> order(active.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> score(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) score[i] = dot(c, active.vertex(i).coords);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

  LocalQueryPlan plan;
  plan.p.assign(domain.dimension(), 0.0);
  double taken = 0.0;
  for (std::size_t i : order) {
    if (taken >= delta) break;
    const double take = std::min(active.weight(i), delta - taken);
    if (take <= 0.0) continue;
    plan.donors.push_back({i, take});
    add_scaled(plan.p, take, active.vertex(i).coords);
    taken += take;
  }
  plan.realized = taken;
  if (plan.realized <= 0.0) throw InvariantError("weak local separation: no donor weight collected");
  plan.p_scaled.resize(plan.p.size());
  for (std::size_t i = 0; i < plan.p.size(); ++i) plan.p_scaled[i] = plan.p[i] / plan.realized;
  return plan;
}

/// Lifts an inner answer at the rescaled donor point back to the local query:
/// a positive inner vertex v* yields y = x - p + realized v*, a negative
/// inner gap rescales by `realized`.
inline LocalAnswer assemble_local_answer(const LocalQueryPlan& plan, const SeparationAnswer& inner,
                                         const ActiveSet& active, const Vector& c) {
  LocalAnswer answer;
  answer.delta = plan.realized;
  answer.donors = plan.donors;
  answer.served_from_cache = inner.served_from_cache;
  answer.lp_called = inner.lp_called;
  if (!inner.positive) {
    if (inner.exact_dual_gap) answer.exact_dual_gap = *inner.exact_dual_gap * plan.realized;
    return answer;
  }
  answer.positive = true;
  answer.vertex = inner.vertex;
  const Vector x = active.point();
  answer.y = x;
  add_scaled(answer.y, -1.0, plan.p);
  add_scaled(answer.y, plan.realized, inner.vertex.coords);
  answer.improvement = dot(c, x) - dot(c, answer.y);
  return answer;
}

/// Weak separation restricted to the ball of radius r around the active
/// set's point. Positive answers move at most sqrt(n) mu r in l2; a negative
/// answer certifies c (x - z) <= phi for every feasible z with ||x - z|| <= r.
/// Implemented by one plain weak separation call at threshold phi / delta
/// against the rescaled donor combination, so it shares `cache` and `stats`
/// with the plain oracle. The inner call inherits the caller's K.
inline LocalAnswer weak_local_separation(const Domain& domain, const Vector& c,
                                         const ActiveSet& active, double r, double phi, double K,
                                         OracleCache& cache, OracleStats& stats) {
  const LocalQueryPlan plan = local_query_plan(domain, c, active, r);
  const SeparationAnswer inner =
      weak_separation(domain, c, plan.p_scaled, phi / plan.realized, K, cache, stats);
  return assemble_local_answer(plan, inner, active, c);
}

}  // namespace lazycg
