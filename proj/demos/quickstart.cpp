// Minimal end-to-end tour: build a seeded least-squares instance on the
// probability simplex, solve it twice (lazy parameter-free vs. the plain
// Frank-Wolfe baseline), and show where the oracle calls went.

#include <iostream>

#include "lazycg/lazycg.hpp"

int main() {
  const lazycg::Domain domain = lazycg::Domain::simplex(30);
  const lazycg::QuadraticObjective f = lazycg::generate_regression_instance(domain, 0.5, 20, 7);

  lazycg::SolverConfig lazy;
  lazy.K = 2.0;
  lazy.epsilon = 1e-6;
  lazy.max_iters = 2000;
  lazy.step_rule = lazycg::StepRule::LineSearch;
  const lazycg::RunTrace lazy_trace = lazycg::lazy_cg_parameter_free(domain, f, lazy);

  lazycg::SolverConfig plain;
  plain.epsilon = 1e-6;
  plain.max_iters = 2000;
  plain.step_rule = lazycg::StepRule::LineSearch;
  const lazycg::RunTrace plain_trace = lazycg::vanilla_fw(domain, f, plain);

  const auto report = [](const char* name, const lazycg::RunTrace& trace) {
    const lazycg::TraceRow& last = trace.last_row();
    std::cout << name << ": iterations=" << (last.t - 1) << "  f=" << last.f
              << "  lp_calls=" << trace.stats.lp_calls
              << "  cache_hit_rate=" << trace.stats.cache_hit_rate()
              << "  stop=" << trace.stop_reason << "\n";
  };
  report("lazy  ", lazy_trace);
  report("plain ", plain_trace);

  lazycg::write_trace_csv(lazy_trace, "quickstart_lazy.csv");
  lazycg::write_trace_csv(plain_trace, "quickstart_plain.csv");
  std::cout << "traces written to quickstart_lazy.csv and quickstart_plain.csv\n";
  return 0;
}
