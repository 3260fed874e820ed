#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lazycg/active_set.hpp"
#include "lazycg/augment_oracle.hpp"
#include "lazycg/bruteforce.hpp"
#include "lazycg/core.hpp"
#include "lazycg/domain.hpp"
#include "lazycg/objective.hpp"
#include "lazycg/stream.hpp"
#include "lazycg/trace.hpp"
#include "lazycg/weaksep.hpp"

namespace lazycg {

enum class PhiInitPolicy { ExactLp, HalvingSearch, UserValue };
enum class StepRule { Schedule, LineSearch, ShortStep };
enum class OracleBackend { LmoCached, Augmentation };

inline const char* phi_init_name(PhiInitPolicy p) {
  switch (p) {
    case PhiInitPolicy::ExactLp:
      return "exact-lp";
    case PhiInitPolicy::HalvingSearch:
      return "halving-search";
    case PhiInitPolicy::UserValue:
      return "user";
  }
  return "user";
}

inline const char* step_rule_name(StepRule s) {
  switch (s) {
    case StepRule::Schedule:
      return "schedule";
    case StepRule::LineSearch:
      return "line-search";
    case StepRule::ShortStep:
      return "short-step";
  }
  return "schedule";
}

inline const char* backend_name(OracleBackend b) {
  return b == OracleBackend::Augmentation ? "augmentation" : "lmo";
}

/// Knobs shared by every solver. Unused fields are ignored by solvers they do
/// not apply to, except where noted in the solver itself.
struct SolverConfig {
  double K = 1.0;                 // oracle accuracy, >= 1
  long long max_iters = 1000;
  double time_limit_s = 0.0;      // 0: unlimited; checked at iteration starts
  double epsilon = 0.0;           // 0: run to max_iters; else certified stop
  PhiInitPolicy phi_init = PhiInitPolicy::ExactLp;
  double phi0_user = 0.0;         // used when phi_init == UserValue
  StepRule step_rule = StepRule::Schedule;
  bool cache_enabled = true;
  std::size_t cache_keep = 100;
  long long cache_period = 100;
  OracleBackend backend = OracleBackend::LmoCached;
  bool exact_oracle = false;      // threshold-free baseline: no cache, K = 1
  bool improved_phi_on_negative = false;  // parameter-free: reuse the exact gap
  std::optional<Vertex> start;    // default: the domain's canonical vertex
  double alpha_card = 0.0;        // pairwise: support bound of the optimum; 0 -> dimension
  double online_b = 0.0;          // online: curvature decay exponent, in [0,1)
  double online_s = 0.0;          // online: strong convexity decay exponent, in [0,1)
  int online_gamma_part = 0;      // online: step branch 1 or 2; 0 picks the solver default
  double online_curvature = 0.0;          // online: per-round curvature scale C
  double online_strong_convexity = 0.0;   // online: per-round strong convexity scale S
  bool record_wolfe_gap = true;
  bool record_regret = true;
};

// --- scalar schedules -------------------------------------------------------

/// Step length 2 (K^2 + 1) / (K (t + K^2 + 2)) of the scheduled lazy solver,
/// t counted from 1.
inline double lcg_schedule_gamma(long long t, double K) {
  if (t < 1) throw InputError("lcg_schedule_gamma: t must be >= 1");
  if (!(K >= 1.0)) throw InputError("lcg_schedule_gamma: K must be >= 1");
  const double k2 = K * K;
  return 2.0 * (k2 + 1.0) / (K * (static_cast<double>(t) + k2 + 2.0));
}

/// Bound update (phi + C gamma^2 / 2) / (1 + gamma / K) of the scheduled lazy
/// solver.
inline double lcg_phi_update(double phi_prev, double C, double gamma, double K) {
  if (!(phi_prev >= 0.0) || !(C >= 0.0) || !(gamma >= 0.0) || !(K >= 1.0)) {
    throw InputError("lcg_phi_update: invalid arguments");
  }
  return (phi_prev + C * gamma * gamma / 2.0) / (1.0 + gamma / K);
}

/// Derived constants of the pairwise solver. B is the per-round contraction
/// margin: the bound decays like ((1 + B) / (1 + 2 B))^t.
struct LpcgParams {
  double m1 = 0.0;
  double kappa = 0.0;
  double contraction_margin = 0.0;  // B
};

inline LpcgParams lpcg_parameters(double S, double alpha_card, double K, double C, double phi0) {
  if (!(S > 0.0)) throw InputError("lpcg_parameters: need strong convexity S > 0");
  if (!(alpha_card >= 1.0)) throw InputError("lpcg_parameters: need alpha_card >= 1");
  if (!(K >= 1.0)) throw InputError("lpcg_parameters: need K >= 1");
  if (!(C > 0.0)) throw InputError("lpcg_parameters: need curvature C > 0");
  if (!(phi0 > 0.0)) throw InputError("lpcg_parameters: need phi0 > 0");
  LpcgParams p;
  p.m1 = std::sqrt(S / (8.0 * alpha_card));
  p.kappa = std::min(p.m1 / (K * C), 1.0 / std::sqrt(phi0));
  p.contraction_margin = p.kappa * p.m1 / (2.0 * K);
  return p;
}

/// Bound update (2 phi + eta^2 C) / (2 + eta / (K delta)) of the pairwise
/// solver.
inline double lpcg_phi_update(double phi_prev, double eta, double C, double K, double delta) {
  if (!(phi_prev >= 0.0) || !(eta >= 0.0) || !(C >= 0.0) || !(K >= 1.0) || !(delta > 0.0)) {
    throw InputError("lpcg_phi_update: invalid arguments");
  }
  return (2.0 * phi_prev + eta * eta * C) / (2.0 + eta / (K * delta));
}

/// Largest power of two that does not exceed eta, computed by exact halving
/// or doubling so boundary cases land exactly.
inline double eta_round(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InputError("eta_round: eta must be positive");
  double g = 1.0;
  if (eta >= 1.0) {
    while (2.0 * g <= eta) g *= 2.0;
    return g;
  }
  while (g > eta) g *= 0.5;
  return g;
}

/// Mixing weight S / (2 K beta n mu^2) of the local solver, clamped to 1.
inline double llcg_alpha(double S, double K, double beta, int n, double mu) {
  if (!(S > 0.0) || !(beta > 0.0) || n < 1 || !(mu >= 1.0) || !(K >= 1.0)) {
    throw InputError("llcg_alpha: invalid arguments");
  }
  return std::min(1.0, S / (2.0 * K * beta * static_cast<double>(n) * mu * mu));
}

/// Locality radius sqrt(2 phi / S) of the local solver.
inline double llcg_radius(double phi_prev, double S) {
  if (!(phi_prev >= 0.0) || !(S > 0.0)) throw InputError("llcg_radius: invalid arguments");
  return std::sqrt(2.0 * phi_prev / S);
}

/// Bound update of the local solver: the quadratic penalty is capped by the
/// diameter because a step never leaves the domain.
inline double llcg_phi_update(double phi_prev, double beta, double alpha, int n, double mu,
                              double r, double D, double K) {
  const double moved = std::min(static_cast<double>(n) * mu * mu * r * r, D * D);
  return (phi_prev + (beta / 2.0) * alpha * alpha * moved) / (1.0 + alpha / K);
}

/// First-round gap bound of the online solver: min{||g|| D, 2 ||g||^2 / S},
/// degrading gracefully when S = 0 or the gradient vanishes.
inline double locg_h_first(double grad_norm, double D, double S) {
  if (!(grad_norm >= 0.0) || !(D >= 0.0) || !(S >= 0.0)) {
    throw InputError("locg_h_first: invalid arguments");
  }
  if (grad_norm == 0.0) return 0.0;
  if (S == 0.0) return grad_norm * D;
  return std::min(grad_norm * D, 2.0 * grad_norm * grad_norm / S);
}

/// Later-round gap bound of the online solver: the previous bound plus the
/// damage one new loss can do, again capped by the diameter term.
inline double locg_h_update(double phi_prev, double grad_norm, double D, double S, double s_exp,
                            long long t) {
  if (t < 2) throw InputError("locg_h_update: t must be >= 2");
  if (!(phi_prev >= 0.0) || !(grad_norm >= 0.0) || !(D >= 0.0) || !(S >= 0.0)) {
    throw InputError("locg_h_update: invalid arguments");
  }
  if (grad_norm == 0.0) return phi_prev;
  if (S == 0.0) return phi_prev + grad_norm * D;
  const double decay = std::pow(static_cast<double>(t), 1.0 - s_exp);
  const double q = grad_norm * grad_norm / (2.0 * S * decay);
  const double alt = 2.0 * q + 2.0 * std::sqrt(q * (q + phi_prev));
  return phi_prev + std::min(grad_norm * D, alt);
}

/// Step schedule of the online solver: branch 1 is t^{-(1-b)/2}, branch 2 is
/// t^{(b+s-2)/3}. Both equal 1 at t = 1 and decay for b, s in [0,1).
inline double locg_gamma(long long t, double b, double s, int part) {
  if (t < 1) throw InputError("locg_gamma: t must be >= 1");
  if (!(b >= 0.0 && b < 1.0) || !(s >= 0.0 && s < 1.0)) {
    throw InputError("locg_gamma: exponents must lie in [0,1)");
  }
  if (part == 1) return std::pow(static_cast<double>(t), -(1.0 - b) / 2.0);
  if (part == 2) return std::pow(static_cast<double>(t), (b + s - 2.0) / 3.0);
  throw InputError("locg_gamma: part must be 1 or 2");
}

/// Pre-answer bound of the online solver round t.
inline double locg_phi_pre(double h, double C, long long t, double b, double gamma, double K) {
  const double curvature_term =
      C * std::pow(static_cast<double>(t), 1.0 - b) * gamma * gamma / (2.0 * (1.0 - b));
  return (h + curvature_term) / (1.0 + gamma / K);
}

inline double ceil_log2(double x) {
  if (!(x > 0.0)) throw InputError("ceil_log2: x must be positive");
  return std::ceil(std::log2(x));
}

/// Worst-case iteration budget of the parameter-free solver run to the
/// certified stop 2 phi <= eps.
inline double pf_iteration_budget(double phi0, double eps, double K, double C) {
  if (!(phi0 > 0.0) || !(eps > 0.0) || !(K >= 1.0) || !(C > 0.0)) {
    throw InputError("pf_iteration_budget: invalid arguments");
  }
  const double halvings = std::max(0.0, ceil_log2(phi0 / eps)) + 1.0;
  const double mid = 4.0 * K * std::max(0.0, ceil_log2(phi0 / (K * C)));
  const double tail = 16.0 * K * K * C / eps;
  return halvings + mid + tail;
}

/// Worst-case number of negative answers of the parameter-free solver.
inline double pf_negative_budget(double phi0, double eps) {
  if (!(phi0 > 0.0) || !(eps > 0.0)) throw InputError("pf_negative_budget: invalid arguments");
  return std::max(0.0, ceil_log2(phi0 / eps)) + 1.0;
}

// --- oracle facade ----------------------------------------------------------

/// One oracle instance per run: owns the caches and tallies and routes each
/// query to the configured backend. `exact_oracle` turns every query into a
/// threshold-free exact call with no cache, which is the non-lazy baseline.
class SeparationOracle {
 public:
  SeparationOracle(const Domain& domain, const SolverConfig& cfg)
      : domain_(domain),
        exact_(cfg.exact_oracle),
        K_(cfg.exact_oracle ? 1.0 : cfg.K),
        backend_(cfg.backend),
        cache_(!cfg.exact_oracle && cfg.cache_enabled, cfg.cache_keep, cfg.cache_period),
        away_cache_(!cfg.exact_oracle && cfg.cache_enabled, cfg.cache_keep, cfg.cache_period) {
    if (!(cfg.K >= 1.0) || !std::isfinite(cfg.K)) throw InputError("solver: K must be >= 1 and finite");
    if (exact_ && backend_ == OracleBackend::Augmentation) {
      throw InputError("solver: the exact baseline runs on the linear oracle backend");
    }
    if (backend_ == OracleBackend::Augmentation) {
      aug_.emplace(K_, domain.l1_diameter());
    }
  }

  double accuracy() const { return K_; }
  OracleStats& stats() { return stats_; }
  const OracleStats& stats() const { return stats_; }
  const OracleCache& cache() const { return cache_; }

  /// Plain weak separation at the active set's point x.
  SeparationAnswer separate(const Vector& c, const ActiveSet& active, const Vector& x,
                            double phi) {
    if (exact_) return exact_separation(domain_, c, x, phi, K_, stats_);
    if (backend_ == OracleBackend::Augmentation) {
      return from_augmentation(augmenting_weak_separation(domain_, *aug_, c, active, phi));
    }
    return weak_separation(domain_, c, x, phi, K_, cache_, stats_);
  }

  /// Pairwise (toward, away) query; linear oracle backends only.
  ProductAnswer separate_product(const Vector& grad, const Vector& x, double phi) {
    if (backend_ == OracleBackend::Augmentation) {
      throw InputError("solver: the pairwise query needs the linear oracle backend");
    }
    if (!exact_) {
      return weak_separation_product(domain_, grad, x, phi, K_, cache_, away_cache_, stats_);
    }
    ++stats_.total_queries;
    const std::vector<char> mask = support_mask(x);
    const Vertex toward = domain_.lmo(grad);
    std::optional<Vertex> away = domain_.lmo_restricted(grad, mask);
    stats_.lp_calls += 2;
    ProductAnswer answer;
    answer.lp_called = true;
    answer.toward = toward;
    answer.away = away;
    const double away_value = away ? dot(grad, away->coords) : dot(grad, x);
    answer.sigma = away_value - dot(grad, toward.coords);
    if (answer.sigma > 0.0) {
      answer.positive = true;
      ++stats_.positive_answers;
    } else {
      answer.exact_dual_gap = std::max(0.0, answer.sigma);
      ++stats_.negative_answers;
    }
    return answer;
  }

  /// Local query around the active set's point with radius r.
  LocalAnswer separate_local(const Vector& c, const ActiveSet& active, double r, double phi) {
    if (exact_) {
      const LocalQueryPlan plan = local_query_plan(domain_, c, active, r);
      const SeparationAnswer inner =
          exact_separation(domain_, c, plan.p_scaled, phi / plan.realized, K_, stats_);
      return assemble_local_answer(plan, inner, active, c);
    }
    if (backend_ == OracleBackend::Augmentation) {
      const LocalQueryPlan plan = local_query_plan(domain_, c, active, r);
      std::vector<std::pair<Vertex, double>> atoms;
      atoms.reserve(plan.donors.size());
      for (const auto& [idx, take] : plan.donors) atoms.push_back({active.vertex(idx), take});
      ActiveSet donor_set(atoms);
      SeparationAnswer inner = from_augmentation(
          augmenting_weak_separation(domain_, *aug_, c, donor_set, phi / plan.realized));
      return assemble_local_answer(plan, inner, active, c);
    }
    return weak_local_separation(domain_, c, active, r, phi, K_, cache_, stats_);
  }

 private:
  SeparationAnswer from_augmentation(const AugAnswer& a) {
    ++stats_.total_queries;
    stats_.lp_calls += a.aug_calls;
    SeparationAnswer out;
    out.lp_called = a.aug_calls > 0;
    if (a.positive) {
      out.positive = true;
      out.vertex = a.vertex;
      out.improvement = a.improvement;
      ++stats_.positive_answers;
    } else {
      ++stats_.negative_answers;
    }
    return out;
  }

  const Domain& domain_;
  bool exact_ = false;
  double K_ = 1.0;
  OracleBackend backend_ = OracleBackend::LmoCached;
  OracleCache cache_;
  OracleCache away_cache_;
  std::optional<AugSeparationConfig> aug_;
  OracleStats stats_;
};

// --- run plumbing -----------------------------------------------------------

namespace detail {

class RunClock {
 public:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  template <class F>
  auto timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = f();
    oracle_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
  }

  double oracle_seconds = 0.0;

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline Vertex resolve_start(const Domain& domain, const SolverConfig& cfg) {
  if (cfg.start) {
    if (cfg.start->coords.size() != static_cast<std::size_t>(domain.dimension())) {
      throw InputError("solver: start vertex dimension mismatch");
    }
    if (!all_finite(cfg.start->coords)) throw InputError("solver: start vertex has non-finite coordinates");
    return *cfg.start;
  }
  return domain.canonical_vertex();
}

// The gap reported in the trace comes from a direct oracle call that is not
// billed to the run's query or call counters.
inline double wolfe_gap_at(const Domain& domain, const Vector& g, const Vector& x, bool enabled) {
  if (!enabled) return std::numeric_limits<double>::quiet_NaN();
  const Vertex v = domain.lmo(g);
  return dot(g, x) - dot(g, v.coords);
}

inline void push_row(RunTrace& trace, long long t, double f, double phi, double wolfe,
                     const OracleStats& stats, AnswerKind answer, double elapsed,
                     double loss = std::numeric_limits<double>::quiet_NaN(),
                     double regret = std::numeric_limits<double>::quiet_NaN(),
                     double phi_pre = std::numeric_limits<double>::quiet_NaN()) {
  TraceRow r;
  r.t = t;
  r.f = f;
  r.phi = phi;
  r.wolfe_gap = wolfe;
  r.lp_calls = stats.lp_calls;
  r.cache_hits = stats.cache_hits;
  r.answer = answer;
  r.elapsed_s = elapsed;
  r.loss = loss;
  r.regret = regret;
  r.phi_pre = phi_pre;
  trace.rows.push_back(r);
}

inline void fill_common_meta(RunTrace& trace, const std::string& algorithm,
                             const SolverConfig& cfg) {
  trace.set_meta("algorithm", algorithm);
  trace.set_meta("K", format_double(cfg.exact_oracle ? 1.0 : cfg.K));
  trace.set_meta("max_iters", std::to_string(cfg.max_iters));
  trace.set_meta("epsilon", format_double(cfg.epsilon));
  trace.set_meta("step_rule", step_rule_name(cfg.step_rule));
  trace.set_meta("oracle", cfg.exact_oracle ? "exact" : backend_name(cfg.backend));
  trace.set_meta("cache", !cfg.exact_oracle && cfg.cache_enabled ? "on" : "off");
  trace.set_meta("cache_keep", std::to_string(cfg.cache_keep));
  trace.set_meta("cache_period", std::to_string(cfg.cache_period));
}

inline void finish_trace(RunTrace& trace, const RunClock& clock, const std::string& stop) {
  trace.stop_reason = stop;
  trace.set_meta("stop", stop);
  trace.solver_seconds = clock.elapsed();
  trace.oracle_seconds = clock.oracle_seconds;
}

/// Initial bound resolution. `halved` selects the parameter-free convention
/// (half the exact initial gap); the other solvers need the full gap so the
/// bound dominates f(x1) - f(x*). Returns 0 when x1 is already optimal.
inline double resolve_phi0(const Domain& domain, const SmoothObjective& f, const Vector& x1,
                           const ActiveSet& active, SeparationOracle& oracle,
                           const SolverConfig& cfg, bool halved, RunClock& clock) {
  switch (cfg.phi_init) {
    case PhiInitPolicy::UserValue:
      if (!(cfg.phi0_user > 0.0) || !std::isfinite(cfg.phi0_user)) {
        throw InputError("solver: user phi0 must be positive and finite");
      }
      return cfg.phi0_user;
    case PhiInitPolicy::ExactLp: {
      const Vector g1 = f.gradient(x1);
      const Vertex v = clock.timed([&] { return domain.lmo(g1); });
      ++oracle.stats().lp_calls;
      const double gap = std::max(0.0, dot(g1, x1) - dot(g1, v.coords));
      return halved ? gap / 2.0 : gap;
    }
    case PhiInitPolicy::HalvingSearch: {
      const Vector g1 = f.gradient(x1);
      double phi = norm2(g1) * domain.l2_diameter();
      if (!(phi > 0.0)) return 0.0;
      while (phi > 1e-18) {
        const SeparationAnswer ans = clock.timed([&] { return oracle.separate(g1, active, x1, phi); });
        if (ans.positive) return 2.0 * phi;
        if (ans.exact_dual_gap && *ans.exact_dual_gap == 0.0) return 0.0;
        phi /= 2.0;
      }
      return 0.0;
    }
  }
  throw InputError("solver: unknown phi0 policy");
}

}  // namespace detail

// --- solvers ----------------------------------------------------------------

/// Reference conditional gradient method: one exact linear minimization per
/// iteration, no bound bookkeeping. The per-iteration improvement doubles as
/// the exact gap, so epsilon stops are certified.
inline RunTrace vanilla_fw(const Domain& domain, const SmoothObjective& f,
                           const SolverConfig& cfg) {
  SolverConfig base = cfg;
  base.exact_oracle = true;
  SeparationOracle oracle(domain, base);
  detail::RunClock clock;
  RunTrace trace;
  detail::fill_common_meta(trace, "vanilla_fw", base);

  ActiveSet active(detail::resolve_start(domain, base));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::string stop = "max_iters";
  long long t = 1;
  for (; t <= base.max_iters; ++t) {
    if (base.time_limit_s > 0.0 && clock.elapsed() >= base.time_limit_s) {
      stop = "time_limit";
      break;
    }
    const Vector x = active.point();
    const double fx = f.value(x);
    const Vector g = f.gradient(x);
    const SeparationAnswer ans =
        clock.timed([&] { return oracle.separate(g, active, x, 1.0); });
    const double gap = ans.positive ? ans.improvement : ans.exact_dual_gap.value_or(0.0);
    const double wolfe = base.record_wolfe_gap ? gap : nan;
    if (!ans.positive) {
      detail::push_row(trace, t, fx, nan, wolfe, oracle.stats(), AnswerKind::Negative,
                       clock.elapsed());
      stop = "optimal";
      ++t;
      break;
    }
    if (base.epsilon > 0.0 && gap <= base.epsilon) {
      detail::push_row(trace, t, fx, nan, wolfe, oracle.stats(), AnswerKind::Positive,
                       clock.elapsed());
      stop = "epsilon";
      ++t;
      break;
    }
    double gamma = 0.0;
    switch (base.step_rule) {
      case StepRule::Schedule:
        gamma = 2.0 / (static_cast<double>(t) + 1.0);
        break;
      case StepRule::LineSearch:
        gamma = line_search(f, x, subtract(ans.vertex.coords, x));
        break;
      case StepRule::ShortStep: {
        const double C = f.curvature();
        if (!(C > 0.0) || !std::isfinite(C)) throw InputError("solver: short-step needs a curvature bound");
        gamma = short_step(gap, 1.0, C);
        break;
      }
    }
    active.fw_step(ans.vertex, gamma);
    detail::push_row(trace, t, fx, nan, wolfe, oracle.stats(), AnswerKind::Positive,
                     clock.elapsed());
  }
  const Vector xf = active.point();
  const Vector gf = f.gradient(xf);
  detail::push_row(trace, t, f.value(xf), nan,
                   detail::wolfe_gap_at(domain, gf, xf, base.record_wolfe_gap), oracle.stats(),
                   AnswerKind::End, clock.elapsed());
  trace.stats = oracle.stats();
  detail::finish_trace(trace, clock, stop);
  return trace;
}

/// Lazy conditional gradients on the fixed step schedule. Keeps the bound
/// phi_t so that f(x_t) - f(x*) <= phi_{t-1} whenever phi_0 dominates the
/// initial gap; a negative answer holds the iterate and still contracts the
/// bound through the update.
inline RunTrace lazy_cg_textbook(const Domain& domain, const SmoothObjective& f,
                                 const SolverConfig& cfg) {
  const double C = f.curvature();
  if (!(C > 0.0) || !std::isfinite(C)) {
    throw InputError(
        "lazy_cg_textbook: the objective reports no curvature bound; use the parameter-free "
        "solver instead");
  }
  SeparationOracle oracle(domain, cfg);
  detail::RunClock clock;
  RunTrace trace;
  detail::fill_common_meta(trace, "lazy_cg_textbook", cfg);
  trace.set_meta("C", format_double(C));
  trace.set_meta("phi_init", phi_init_name(cfg.phi_init));

  ActiveSet active(detail::resolve_start(domain, cfg));
  const Vector x1 = active.point();
  double phi = detail::resolve_phi0(domain, f, x1, active, oracle, cfg, false, clock);
  trace.set_meta("phi0", format_double(phi));
  std::string stop = "max_iters";
  long long t = 1;
  if (phi <= 0.0) {
    stop = "initial_point_optimal";
  } else {
    for (; t <= cfg.max_iters; ++t) {
      if (cfg.time_limit_s > 0.0 && clock.elapsed() >= cfg.time_limit_s) {
        stop = "time_limit";
        break;
      }
      if (cfg.epsilon > 0.0 && phi <= cfg.epsilon) {
        stop = "epsilon";
        break;
      }
      const Vector x = active.point();
      const double fx = f.value(x);
      const Vector g = f.gradient(x);
      const double wolfe = detail::wolfe_gap_at(domain, g, x, cfg.record_wolfe_gap);
      const double gamma = lcg_schedule_gamma(t, oracle.accuracy());
      phi = lcg_phi_update(phi, C, gamma, oracle.accuracy());
      const SeparationAnswer ans =
          clock.timed([&] { return oracle.separate(g, active, x, phi); });
      if (ans.positive) {
        double step = gamma;
        if (cfg.step_rule == StepRule::LineSearch) {
          step = line_search(f, x, subtract(ans.vertex.coords, x));
        } else if (cfg.step_rule == StepRule::ShortStep) {
          step = short_step(phi, oracle.accuracy(), C);
        }
        active.fw_step(ans.vertex, step);
      }
      detail::push_row(trace, t, fx, phi, wolfe, oracle.stats(),
                       ans.positive ? AnswerKind::Positive : AnswerKind::Negative,
                       clock.elapsed());
    }
  }
  const Vector xf = active.point();
  const Vector gf = f.gradient(xf);
  detail::push_row(trace, t, f.value(xf), phi,
                   detail::wolfe_gap_at(domain, gf, xf, cfg.record_wolfe_gap), oracle.stats(),
                   AnswerKind::End, clock.elapsed());
  trace.stats = oracle.stats();
  detail::finish_trace(trace, clock, stop);
  return trace;
}

/// Parameter-free lazy conditional gradients: queries at the current bound,
/// halves it on a negative answer, and keeps it on a positive one. Stops with
/// a certificate once 2 phi <= epsilon. Needs no curvature bound unless the
/// short-step rule is chosen.
inline RunTrace lazy_cg_parameter_free(const Domain& domain, const SmoothObjective& f,
                                       const SolverConfig& cfg) {
  if (cfg.step_rule == StepRule::Schedule) {
    throw InputError("lazy_cg_parameter_free: pick line-search or short-step");
  }
  if (cfg.step_rule == StepRule::ShortStep) {
    const double C = f.curvature();
    if (!(C > 0.0) || !std::isfinite(C)) {
      throw InputError("lazy_cg_parameter_free: short-step needs a curvature bound");
    }
  }
  SeparationOracle oracle(domain, cfg);
  detail::RunClock clock;
  RunTrace trace;
  detail::fill_common_meta(trace, "lazy_cg_parameter_free", cfg);
  trace.set_meta("phi_init", phi_init_name(cfg.phi_init));
  trace.set_meta("improved_negative_update", cfg.improved_phi_on_negative ? "on" : "off");

  ActiveSet active(detail::resolve_start(domain, cfg));
  const Vector x1 = active.point();
  double phi = detail::resolve_phi0(domain, f, x1, active, oracle, cfg, true, clock);
  trace.set_meta("phi0", format_double(phi));
  std::string stop = "max_iters";
  long long t = 1;
  if (phi <= 0.0) {
    stop = "initial_point_optimal";
  } else {
    for (; t <= cfg.max_iters; ++t) {
      if (cfg.time_limit_s > 0.0 && clock.elapsed() >= cfg.time_limit_s) {
        stop = "time_limit";
        break;
      }
      if (cfg.epsilon > 0.0 && 2.0 * phi <= cfg.epsilon) {
        stop = "epsilon";
        break;
      }
      const Vector x = active.point();
      const double fx = f.value(x);
      const Vector g = f.gradient(x);
      const double wolfe = detail::wolfe_gap_at(domain, g, x, cfg.record_wolfe_gap);
      const SeparationAnswer ans =
          clock.timed([&] { return oracle.separate(g, active, x, phi); });
      if (ans.positive) {
        const double step = cfg.step_rule == StepRule::ShortStep
                                ? short_step(phi, oracle.accuracy(), f.curvature())
                                : line_search(f, x, subtract(ans.vertex.coords, x));
        active.fw_step(ans.vertex, step);
        detail::push_row(trace, t, fx, phi, wolfe, oracle.stats(), AnswerKind::Positive,
                         clock.elapsed());
      } else {
        // a negative at phi certifies the gap at most phi; the exact gap (when
        // the backend produced one) is at most phi and tightens the restart
        if (cfg.improved_phi_on_negative && ans.exact_dual_gap) {
          phi = *ans.exact_dual_gap / 2.0;
        } else {
          phi /= 2.0;
        }
        detail::push_row(trace, t, fx, phi, wolfe, oracle.stats(), AnswerKind::Negative,
                         clock.elapsed());
        if (phi <= 0.0) {
          stop = "optimal";
          ++t;
          break;
        }
      }
    }
  }
  const Vector xf = active.point();
  const Vector gf = f.gradient(xf);
  detail::push_row(trace, t, f.value(xf), phi,
                   detail::wolfe_gap_at(domain, gf, xf, cfg.record_wolfe_gap), oracle.stats(),
                   AnswerKind::End, clock.elapsed());
  trace.stats = oracle.stats();
  detail::finish_trace(trace, clock, stop);
  return trace;
}

/// Lazy pairwise conditional gradients for strongly convex objectives over
/// 0/1 polytopes. Each round asks one product query (toward and away) and on
/// a positive answer moves a power-of-two mass between them, which keeps all
/// iterate weights exactly representable.
inline RunTrace lazy_pairwise_cg(const Domain& domain, const SmoothObjective& f,
                                 const SolverConfig& cfg) {
  if (!domain.is_zero_one()) {
    throw InputError("lazy_pairwise_cg: the domain must have 0/1 vertices");
  }
  const double C = f.curvature();
  const double S = f.strong_convexity();
  if (!(C > 0.0) || !std::isfinite(C)) throw InputError("lazy_pairwise_cg: need a curvature bound");
  if (!(S > 0.0)) throw InputError("lazy_pairwise_cg: need strong convexity");
  const double alpha = cfg.alpha_card > 0.0 ? cfg.alpha_card : static_cast<double>(domain.dimension());
  SeparationOracle oracle(domain, cfg);
  detail::RunClock clock;
  RunTrace trace;
  detail::fill_common_meta(trace, "lazy_pairwise_cg", cfg);
  trace.set_meta("C", format_double(C));
  trace.set_meta("S", format_double(S));
  trace.set_meta("alpha_card", format_double(alpha));
  trace.set_meta("phi_init", phi_init_name(cfg.phi_init));

  ActiveSet active(detail::resolve_start(domain, cfg));
  const Vector x1 = active.point();
  double phi = detail::resolve_phi0(domain, f, x1, active, oracle, cfg, false, clock);
  trace.set_meta("phi0", format_double(phi));
  std::string stop = "max_iters";
  long long t = 1;
  if (phi <= 0.0) {
    stop = "initial_point_optimal";
  } else {
    const LpcgParams params = lpcg_parameters(S, alpha, oracle.accuracy(), C, phi);
    trace.set_meta("kappa", format_double(params.kappa));
    trace.set_meta("contraction_margin", format_double(params.contraction_margin));
    for (; t <= cfg.max_iters; ++t) {
      if (cfg.time_limit_s > 0.0 && clock.elapsed() >= cfg.time_limit_s) {
        stop = "time_limit";
        break;
      }
      if (cfg.epsilon > 0.0 && phi <= cfg.epsilon) {
        stop = "epsilon";
        break;
      }
      const Vector x = active.point();
      const double fx = f.value(x);
      const Vector g = f.gradient(x);
      const double wolfe = detail::wolfe_gap_at(domain, g, x, cfg.record_wolfe_gap);
      const double eta = params.kappa * std::sqrt(phi);
      const double delta = std::sqrt(2.0 * alpha * phi / S);
      phi = lpcg_phi_update(phi, eta, C, oracle.accuracy(), delta);
      const ProductAnswer ans =
          clock.timed([&] { return oracle.separate_product(g, x, phi / delta); });
      if (ans.positive) {
        const double eta_t = eta_round(eta);
        double applied = 0.0;
        if (ans.away) {
          applied = active.pairwise_step(ans.toward, *ans.away, eta_t);
        } else {
          // no vertex fits inside supp(x): the away part is x itself and the
          // transfer collapses to a plain step toward the improving vertex
          active.fw_step(ans.toward, eta_t);
          applied = eta_t;
        }
        if (applied < eta_t) ++trace.eta_truncations;
      }
      detail::push_row(trace, t, fx, phi, wolfe, oracle.stats(),
                       ans.positive ? AnswerKind::Positive : AnswerKind::Negative,
                       clock.elapsed());
    }
  }
  const Vector xf = active.point();
  const Vector gf = f.gradient(xf);
  detail::push_row(trace, t, f.value(xf), phi,
                   detail::wolfe_gap_at(domain, gf, xf, cfg.record_wolfe_gap), oracle.stats(),
                   AnswerKind::End, clock.elapsed());
  trace.stats = oracle.stats();
  trace.set_meta("eta_truncations", std::to_string(trace.eta_truncations));
  detail::finish_trace(trace, clock, stop);
  return trace;
}

/// Lazy local conditional gradients: queries are restricted to a shrinking
/// ball around the iterate, so positive steps stay short and the bound
/// contracts at a rate driven by alpha = S / (2 K beta n mu^2).
inline RunTrace lazy_local_cg(const Domain& domain, const SmoothObjective& f,
                              const SolverConfig& cfg) {
  const double S = f.strong_convexity();
  const double beta = f.smoothness();
  if (!(S > 0.0)) throw InputError("lazy_local_cg: need strong convexity");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InputError("lazy_local_cg: need a smoothness bound");
  if (!domain.has_mu()) throw InputError("lazy_local_cg: the domain needs mu set");
  const int n = domain.dimension();
  const double mu = domain.mu();
  const double D = domain.l2_diameter();
  SeparationOracle oracle(domain, cfg);
  const double alpha = llcg_alpha(S, oracle.accuracy(), beta, n, mu);
  detail::RunClock clock;
  RunTrace trace;
  detail::fill_common_meta(trace, "lazy_local_cg", cfg);
  trace.set_meta("S", format_double(S));
  trace.set_meta("beta", format_double(beta));
  trace.set_meta("mu", format_double(mu));
  trace.set_meta("alpha", format_double(alpha));
  trace.set_meta("phi_init", phi_init_name(cfg.phi_init));

  ActiveSet active(detail::resolve_start(domain, cfg));
  const Vector x1 = active.point();
  double phi = detail::resolve_phi0(domain, f, x1, active, oracle, cfg, false, clock);
  trace.set_meta("phi0", format_double(phi));
  std::string stop = "max_iters";
  long long t = 1;
  if (phi <= 0.0) {
    stop = "initial_point_optimal";
  } else {
    for (; t <= cfg.max_iters; ++t) {
      if (cfg.time_limit_s > 0.0 && clock.elapsed() >= cfg.time_limit_s) {
        stop = "time_limit";
        break;
      }
      if (cfg.epsilon > 0.0 && phi <= cfg.epsilon) {
        stop = "epsilon";
        break;
      }
      const Vector x = active.point();
      const double fx = f.value(x);
      const Vector g = f.gradient(x);
      const double wolfe = detail::wolfe_gap_at(domain, g, x, cfg.record_wolfe_gap);
      const double r = llcg_radius(phi, S);
      phi = llcg_phi_update(phi, beta, alpha, n, mu, r, D, oracle.accuracy());
      const LocalAnswer ans =
          clock.timed([&] { return oracle.separate_local(g, active, r, phi); });
      if (ans.positive) {
        active.local_step(ans.donors, ans.vertex, ans.delta, alpha);
      }
      detail::push_row(trace, t, fx, phi, wolfe, oracle.stats(),
                       ans.positive ? AnswerKind::Positive : AnswerKind::Negative,
                       clock.elapsed());
    }
  }
  const Vector xf = active.point();
  const Vector gf = f.gradient(xf);
  detail::push_row(trace, t, f.value(xf), phi,
                   detail::wolfe_gap_at(domain, gf, xf, cfg.record_wolfe_gap), oracle.stats(),
                   AnswerKind::End, clock.elapsed());
  trace.stats = oracle.stats();
  detail::finish_trace(trace, clock, stop);
  return trace;
}

/// Online lazy conditional gradients over a loss stream. Each round reveals
/// one loss, the solver queries the aggregated gradient at a bound derived
/// from the per-round bound h_t, and a positive answer takes a scheduled
/// step. The trace's f column holds F_t(x_t), the aggregate at the round's
/// iterate; regret (when an exact aggregate minimizer is available) is
/// reported against the best fixed feasible point.
inline RunTrace lazy_online_cg(const Domain& domain, LossStream& stream,
                               const SolverConfig& cfg) {
  if (stream.dimension() != domain.dimension()) {
    throw InputError("lazy_online_cg: stream and domain dimensions differ");
  }
  if (!(cfg.online_b >= 0.0 && cfg.online_b < 1.0) ||
      !(cfg.online_s >= 0.0 && cfg.online_s < 1.0)) {
    throw InputError("lazy_online_cg: decay exponents must lie in [0,1)");
  }
  if (!(cfg.online_curvature >= 0.0) || !(cfg.online_strong_convexity >= 0.0)) {
    throw InputError("lazy_online_cg: negative curvature or strong convexity scale");
  }
  const int gamma_part = cfg.online_gamma_part == 0 ? 1 : cfg.online_gamma_part;
  SeparationOracle oracle(domain, cfg);
  detail::RunClock clock;
  RunTrace trace;
  trace.online = true;
  detail::fill_common_meta(trace, "lazy_online_cg", cfg);
  trace.set_meta("C", format_double(cfg.online_curvature));
  trace.set_meta("S", format_double(cfg.online_strong_convexity));
  trace.set_meta("b", format_double(cfg.online_b));
  trace.set_meta("s", format_double(cfg.online_s));
  trace.set_meta("gamma_part", std::to_string(gamma_part));

  const int n = domain.dimension();
  const double D = domain.l2_diameter();
  ActiveSet active(detail::resolve_start(domain, cfg));
  OnlineAggregate agg(n);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  long long rounds = stream.rounds();
  if (cfg.max_iters > 0 && cfg.max_iters < rounds) rounds = cfg.max_iters;
  trace.set_meta("rounds", std::to_string(rounds));

  // exact vertex list, fetched once, for the linear-aggregate regret baseline
  std::optional<std::vector<Vertex>> vertex_list;
  auto aggregate_best = [&]() -> std::optional<double> {
    if (!cfg.record_regret) return std::nullopt;
    if (agg.quadratic_weight() == 0.0) {
      if (!vertex_list) {
        if (domain.vertex_count_estimate() > 100000.0) return std::nullopt;
        vertex_list = domain.enumerate_vertices();
      }
      double best = std::numeric_limits<double>::infinity();
      for (const Vertex& v : *vertex_list) best = std::min(best, agg.value(v.coords));
      return best;
    }
    const auto best = minimize_aggregate(domain, agg);
    if (!best) return std::nullopt;
    return best->value;
  };

  std::string stop = "rounds_done";
  double phi = 0.0;
  double running_loss = 0.0;
  long long t = 1;
  for (; t <= rounds; ++t) {
    if (cfg.time_limit_s > 0.0 && clock.elapsed() >= cfg.time_limit_s) {
      stop = "time_limit";
      break;
    }
    const Vector x = active.point();
    const RoundLoss loss = stream.round(static_cast<int>(t), x);
    agg.add(loss);
    const double f_now = agg.value(x);
    const double loss_now = loss.value(x);
    running_loss += loss_now;
    const Vector g_round = loss.gradient(x);
    const double gn = norm2(g_round);
    const double h = t == 1 ? locg_h_first(gn, D, cfg.online_strong_convexity)
                            : locg_h_update(phi, gn, D, cfg.online_strong_convexity,
                                            cfg.online_s, t);
    trace.online_h.push_back(h);
    const double gamma = locg_gamma(t, cfg.online_b, cfg.online_s, gamma_part);
    const double phi_pre =
        locg_phi_pre(h, cfg.online_curvature, t, cfg.online_b, gamma, oracle.accuracy());
    const Vector g_agg = agg.gradient(x);
    const double wolfe = detail::wolfe_gap_at(domain, g_agg, x, cfg.record_wolfe_gap);

    AnswerKind answer = AnswerKind::Negative;
    if (phi_pre > 0.0) {
      const SeparationAnswer ans =
          clock.timed([&] { return oracle.separate(g_agg, active, x, phi_pre); });
      if (ans.positive) {
        answer = AnswerKind::Positive;
        active.fw_step(ans.vertex, gamma);
        phi = h - f_now + agg.value(active.point());
      } else {
        phi = phi_pre;
      }
    } else {
      // the bound already collapsed to zero: nothing to ask, hold the iterate
      phi = 0.0;
    }

    double regret = nan;
    if (const auto best = aggregate_best()) regret = running_loss - *best;
    detail::push_row(trace, t, f_now, phi, wolfe, oracle.stats(), answer, clock.elapsed(),
                     loss_now, regret, phi_pre);
  }
  const Vector xf = active.point();
  double f_final = nan;
  double wolfe_final = nan;
  if (agg.rounds() > 0) {
    f_final = agg.value(xf);
    wolfe_final = detail::wolfe_gap_at(domain, agg.gradient(xf), xf, cfg.record_wolfe_gap);
  }
  detail::push_row(trace, t, f_final, phi, wolfe_final, oracle.stats(), AnswerKind::End,
                   clock.elapsed());
  trace.stats = oracle.stats();
  detail::finish_trace(trace, clock, stop);
  return trace;
}

/// Runs the online solver against adversarial (fully adaptive) losses by
/// wrapping each raw round into its regularized surrogate at the first
/// iterate. The returned trace reports the raw per-round losses and, for
/// linear raw streams over enumerable domains, regret against the best fixed
/// vertex in hindsight.
inline RunTrace run_adversarial(const Domain& domain, LossStream& raw, const SolverConfig& cfg) {
  SolverConfig inner = cfg;
  inner.start = detail::resolve_start(domain, cfg);
  inner.online_b = 0.25;
  inner.online_s = 0.25;
  inner.online_gamma_part = cfg.online_gamma_part == 0 ? 2 : cfg.online_gamma_part;
  AdversarialWrapperStream wrapped(raw, inner.start->coords, domain.l1_diameter());
  inner.online_curvature = wrapped.curvature_constant();
  inner.online_strong_convexity = wrapped.strong_convexity_constant();

  RunTrace trace = lazy_online_cg(domain, wrapped, inner);
  trace.set_meta("algorithm", "adversarial_online_cg");
  trace.set_meta("raw_gradient_bound", format_double(wrapped.raw_gradient_bound()));
  trace.set_meta("l1_diameter", format_double(domain.l1_diameter()));

  // rewrite the loss and regret columns against the raw stream
  const auto& running = wrapped.raw_value_running();
  const bool enumerable =
      cfg.record_regret && wrapped.raw_all_linear() && domain.vertex_count_estimate() <= 100000.0;
  std::optional<std::vector<Vertex>> vertex_list;
  if (enumerable) vertex_list = domain.enumerate_vertices();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    TraceRow& row = trace.rows[i];
    if (row.answer == AnswerKind::End) break;
    if (i >= running.size()) break;
    row.loss = running[i] - (i == 0 ? 0.0 : running[i - 1]);
    row.regret = nan;
    if (enumerable) {
      const Vector& lin = wrapped.raw_lin_prefix()[i];
      double best = std::numeric_limits<double>::infinity();
      for (const Vertex& v : *vertex_list) best = std::min(best, dot(lin, v.coords));
      best += wrapped.raw_offset_prefix()[i];
      row.regret = running[i] - best;
    }
  }
  return trace;
}

}  // namespace lazycg
