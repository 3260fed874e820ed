#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "lazycg/config.hpp"
#include "lazycg/core.hpp"
#include "lazycg/experiment.hpp"
#include "lazycg/trace.hpp"

using lazycg::AnswerKind;
using lazycg::ConfigFile;
using lazycg::InputError;
using lazycg::ParsedTrace;
using lazycg::RunOptions;
using lazycg::RunTrace;
using lazycg::TraceRow;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;

  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  REQUIRE(out.good());
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ConfigFile parse_text(const std::string& text) {
  std::istringstream in(text);
  return lazycg::parse_config(in);
}

bool cell_equal(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b;
}

const std::string kOfflineConfig =
    "# two solvers over one seeded instance\n"
    "[domain]\n"
    "kind = simplex\n"
    "n = 4\n"
    "\n"
    "[objective]\n"
    "kind = regression\n"
    "density = 0.8\n"
    "rows = 6\n"
    "seed = 5\n"
    "\n"
    "[solver lazy]\n"
    "algorithm = textbook\n"
    "K = 1.5\n"
    "max_iters = 60\n"
    "\n"
    "[solver plain]\n"
    "algorithm = vanilla\n"
    "step_rule = line-search\n"
    "max_iters = 40\n";

}  // namespace

// --- trace serialization ------------------------------------------------------

TEST_CASE("trace header text is pinned") {
  CHECK(lazycg::trace_header(false) == "t,f,phi,wolfe_gap,lp_calls,cache_hits,answer,elapsed_s");
  CHECK(lazycg::trace_header(true) ==
        "t,f,phi,wolfe_gap,lp_calls,cache_hits,answer,elapsed_s,loss,regret,phi_pre");
}

TEST_CASE("trace csv round-trips every cell bit for bit") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  RunTrace trace;
  trace.online = true;
  TraceRow r1;
  r1.t = 1;
  r1.f = 1.0 / 3.0;
  r1.phi = 0.1;
  r1.wolfe_gap = 1e-300;
  r1.lp_calls = 7;
  r1.cache_hits = 2;
  r1.answer = AnswerKind::Positive;
  r1.elapsed_s = 0.25;
  r1.loss = -0.0;
  r1.regret = nan;
  r1.phi_pre = 6.02214076e23;
  TraceRow r2;
  r2.t = 2;
  r2.f = nan;
  r2.phi = 0.0;
  r2.wolfe_gap = -1.0 / 7.0;
  r2.lp_calls = 9;
  r2.cache_hits = 2;
  r2.answer = AnswerKind::End;
  r2.elapsed_s = 0.5;
  trace.rows = {r1, r2};
  trace.stats.total_queries = 3;
  trace.stats.lp_calls = 9;
  trace.stats.cache_hits = 1;
  trace.stats.positive_answers = 2;
  trace.stats.negative_answers = 1;
  trace.set_meta("algorithm", "lazy_online_cg");
  trace.set_meta("label", "sample");
  trace.solver_seconds = 0.125;
  trace.oracle_seconds = 0.0625;

  std::ostringstream out;
  lazycg::write_trace_csv(trace, out);
  const std::string text = out.str();

  // the same trace always serializes to the same bytes
  std::ostringstream again;
  lazycg::write_trace_csv(trace, again);
  CHECK(text == again.str());

  std::istringstream in(text);
  const ParsedTrace parsed = lazycg::read_trace_csv(in);
  REQUIRE(parsed.online);
  REQUIRE(parsed.rows.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const TraceRow& a = trace.rows[i];
    const TraceRow& b = parsed.rows[i];
    CHECK(a.t == b.t);
    CHECK(cell_equal(a.f, b.f));
    CHECK(cell_equal(a.phi, b.phi));
    CHECK(cell_equal(a.wolfe_gap, b.wolfe_gap));
    CHECK(a.lp_calls == b.lp_calls);
    CHECK(a.cache_hits == b.cache_hits);
    CHECK(a.answer == b.answer);
    CHECK(cell_equal(a.elapsed_s, b.elapsed_s));
    CHECK(cell_equal(a.loss, b.loss));
    CHECK(cell_equal(a.regret, b.regret));
    CHECK(cell_equal(a.phi_pre, b.phi_pre));
  }
  // the sign of a negative zero survives the decimal detour
  CHECK(std::signbit(parsed.rows[0].loss));
  CHECK(parsed.cache_hit_rate == trace.stats.cache_hit_rate());
  CHECK(parsed.positive == 2);
  CHECK(parsed.negative == 1);
  CHECK(parsed.meta.at("algorithm") == "lazy_online_cg");
  CHECK(parsed.meta.at("label") == "sample");
}

TEST_CASE("seventeen digits reproduce awkward doubles") {
  for (double v : {0.1, 1.0 / 3.0, 2.0 / 3.0, 1e-300, 1e300, -0.0, 4.9e-324,
                   0.30000000000000004}) {
    const std::string s = lazycg::format_double(v);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(back == v);
  }
}

TEST_CASE("trace parser reports the offending line") {
  {
    std::istringstream in("");
    CHECK_THROWS_WITH(lazycg::read_trace_csv(in), Catch::Matchers::ContainsSubstring("empty file"));
  }
  {
    std::istringstream in("not,a,header\n");
    CHECK_THROWS_WITH(lazycg::read_trace_csv(in),
                      Catch::Matchers::ContainsSubstring("line 1: unrecognized header"));
  }
  {
    std::istringstream in(lazycg::trace_header(false) + "\n1,2,3\n");
    CHECK_THROWS_WITH(lazycg::read_trace_csv(in),
                      Catch::Matchers::ContainsSubstring("line 2: expected 8 fields, got 3"));
  }
  {
    std::istringstream in(lazycg::trace_header(false) + "\nx,0,0,0,0,0,positive,0\n");
    CHECK_THROWS_WITH(lazycg::read_trace_csv(in),
                      Catch::Matchers::ContainsSubstring("line 2: bad integer 'x'"));
  }
  {
    std::istringstream in(lazycg::trace_header(false) + "\n1,0,0,0,0,0,maybe,0\n");
    CHECK_THROWS_WITH(lazycg::read_trace_csv(in),
                      Catch::Matchers::ContainsSubstring("line 2: bad answer 'maybe'"));
  }
  {
    std::istringstream in(lazycg::trace_header(false) + "\n1,0,0,0,0,0,positive,0\n" +
                          "# summary: cache_hit_rate\n");
    CHECK_THROWS_WITH(lazycg::read_trace_csv(in),
                      Catch::Matchers::ContainsSubstring("line 3: bad key=value"));
  }
}

// --- config parsing -----------------------------------------------------------

TEST_CASE("config parser splits sections, labels, comments") {
  const ConfigFile file = parse_text(
      "# leading comment\n"
      "[domain]\n"
      "kind = simplex  # trailing comment\n"
      "n = 3\n"
      "\n"
      "  [solver  my-label]  \n"
      "algorithm = vanilla\n"
      "cache = off\n");
  REQUIRE(file.sections.size() == 2);
  CHECK(file.sections[0].kind == "domain");
  CHECK(file.sections[0].label.empty());
  CHECK(file.sections[0].line == 2);
  CHECK(file.sections[0].require("kind").value == "simplex");
  CHECK(file.sections[0].require_int("n") == 3);
  CHECK(file.sections[1].kind == "solver");
  CHECK(file.sections[1].label == "my-label");
  CHECK(file.sections[1].get_bool("cache", true) == false);
  CHECK(file.sections[1].get_bool("absent", true) == true);
  CHECK(file.find("solver") == &file.sections[1]);
  CHECK(file.find("missing") == nullptr);
  CHECK(file.find_all("solver").size() == 1);
}

TEST_CASE("config parser rejects malformed input with line numbers") {
  CHECK_THROWS_WITH(parse_text("kind = simplex\n"),
                    Catch::Matchers::ContainsSubstring("line 1: entry before any section header"));
  CHECK_THROWS_WITH(parse_text("[domain\nkind = simplex\n"),
                    Catch::Matchers::ContainsSubstring("line 1: unterminated section header"));
  CHECK_THROWS_WITH(parse_text("[]\n"), Catch::Matchers::ContainsSubstring("empty section header"));
  CHECK_THROWS_WITH(parse_text("[domain]\nkind simplex\n"),
                    Catch::Matchers::ContainsSubstring("line 2: expected 'key = value'"));
  CHECK_THROWS_WITH(parse_text("[domain]\n= simplex\n"),
                    Catch::Matchers::ContainsSubstring("line 2: empty key"));
  CHECK_THROWS_WITH(parse_text("[domain]\nkind = a\nkind = b\n"),
                    Catch::Matchers::ContainsSubstring("line 3: duplicate key 'kind'"));
}

TEST_CASE("typed getters validate values and report entry lines") {
  const ConfigFile file = parse_text("[s]\nx = abc\nn = 1.5\nflag = maybe\ngood = 2\n");
  const auto& s = file.sections[0];
  CHECK_THROWS_WITH(s.require_double("x"),
                    Catch::Matchers::ContainsSubstring("line 2: key 'x': bad number 'abc'"));
  CHECK_THROWS_WITH(s.require_int("n"),
                    Catch::Matchers::ContainsSubstring("line 3: key 'n': bad integer '1.5'"));
  CHECK_THROWS_WITH(s.get_bool("flag", false),
                    Catch::Matchers::ContainsSubstring("expected a boolean"));
  CHECK_THROWS_WITH(s.require("missing"), Catch::Matchers::ContainsSubstring("missing key"));
  CHECK(s.get_double("good", 0.0) == 2.0);
  CHECK(s.get_int("absent", 9) == 9);
  CHECK(s.get_string("absent", "d") == "d");
}

TEST_CASE("list literals parse and reject junk") {
  CHECK(lazycg::parse_double_list("0.5, 1, -2e-3", 1) == std::vector<double>{0.5, 1.0, -2e-3});
  CHECK_THROWS_WITH(lazycg::parse_double_list("1,,2", 4),
                    Catch::Matchers::ContainsSubstring("line 4: empty element"));
  CHECK_THROWS_WITH(lazycg::parse_double_list("1, two", 4),
                    Catch::Matchers::ContainsSubstring("bad number 'two'"));

  const auto edges = lazycg::parse_edge_list("0-1, 1-2, 0-2", 1);
  REQUIRE(edges.size() == 3);
  CHECK(edges[1] == std::pair<int, int>{1, 2});
  CHECK_THROWS_WITH(lazycg::parse_edge_list("0:1", 2),
                    Catch::Matchers::ContainsSubstring("needs the form u-v"));

  const auto vecs = lazycg::parse_vector_list("(1,0,0); (0,1,0)", 1);
  REQUIRE(vecs.size() == 2);
  CHECK(vecs[1] == std::vector<double>{0.0, 1.0, 0.0});
  CHECK_THROWS_WITH(lazycg::parse_vector_list("1,0,0", 3),
                    Catch::Matchers::ContainsSubstring("must be parenthesized"));
}

// --- experiment loading --------------------------------------------------------

TEST_CASE("experiment loader validates the section layout") {
  TempDir tmp("lazycg_cfgload_test");
  auto load = [&](const std::string& name, const std::string& text) {
    const fs::path p = tmp.path / name;
    write_file(p, text);
    return lazycg::load_experiment(p.string());
  };

  CHECK_THROWS_WITH(load("a.cfg", "[objective]\nrows = 3\n[solver]\nalgorithm = vanilla\n"),
                    Catch::Matchers::ContainsSubstring("missing [domain]"));
  CHECK_THROWS_WITH(load("b.cfg", "[domain]\nkind = simplex\nn = 3\n"),
                    Catch::Matchers::ContainsSubstring("missing [objective] or [stream]"));
  CHECK_THROWS_WITH(
      load("c.cfg",
           "[domain]\nkind = simplex\nn = 3\n[objective]\nrows = 3\n[stream]\nrounds = 5\n"),
      Catch::Matchers::ContainsSubstring("either [objective] or [stream], not both"));
  CHECK_THROWS_WITH(load("d.cfg", "[domain]\nkind = simplex\nn = 3\n[objective]\nrows = 3\n"),
                    Catch::Matchers::ContainsSubstring("no [solver] sections"));
  CHECK_THROWS_WITH(load("e.cfg",
                         "[domain]\nkind = moebius\nn = 3\n[objective]\nrows = 3\n"
                         "[solver]\nalgorithm = vanilla\n"),
                    Catch::Matchers::ContainsSubstring("unknown domain kind 'moebius'"));
  CHECK_THROWS_WITH(load("f.cfg",
                         "[domain]\nkind = simplex\nn = 3\n[objective]\nrows = 3\n"
                         "[solver]\nalgorithm = genetic\n"),
                    Catch::Matchers::ContainsSubstring("unknown algorithm 'genetic'"));
  CHECK_THROWS_WITH(load("g.cfg",
                         "[domain]\nkind = simplex\nn = 3\n[objective]\nrows = 3\n"
                         "[solver x]\nalgorithm = vanilla\n[solver x]\nalgorithm = textbook\n"),
                    Catch::Matchers::ContainsSubstring("duplicate solver label 'x'"));
  CHECK_THROWS_WITH(load("h.cfg",
                         "[domain]\nkind = simplex\nn = 3\n[objective]\nrows = 3\n"
                         "[solver]\nalgorithm = online\n"),
                    Catch::Matchers::ContainsSubstring("needs a [stream] section"));
  CHECK_THROWS_WITH(load("i.cfg",
                         "[domain]\nkind = simplex\nn = 3\n[stream]\nrounds = 5\n"
                         "[solver]\nalgorithm = vanilla\n"),
                    Catch::Matchers::ContainsSubstring("needs an [objective] section"));
  CHECK_THROWS_WITH(load("j.cfg",
                         "[domain]\nkind = simplex\nn = 3\n[stream]\nkind = quadratic\n"
                         "rounds = 5\n[solver]\nalgorithm = online\n"),
                    Catch::Matchers::ContainsSubstring("unknown stream kind"));
  CHECK_THROWS_WITH(load("k.cfg",
                         "[domain]\nkind = simplex\nn = 3\n[objective]\nrows = 3\n"
                         "[solver bad label!]\nalgorithm = vanilla\n"),
                    Catch::Matchers::ContainsSubstring("may only contain"));
}

TEST_CASE("experiment loader fills solver configs from the sections") {
  TempDir tmp("lazycg_cfgfill_test");
  const fs::path p = tmp.path / "sample_exp.cfg";
  write_file(p,
             "[domain]\n"
             "kind = simplex\n"
             "n = 5\n"
             "mu = 2\n"
             "[objective]\n"
             "kind = regression\n"
             "density = 0.4\n"
             "rows = 7\n"
             "seed = 11\n"
             "[solver tuned]\n"
             "algorithm = parameter_free\n"
             "K = 2\n"
             "epsilon = 1e-5\n"
             "phi0 = 3.5\n"
             "cache_keep = 40\n"
             "cache_period = 17\n"
             "improved_negative = true\n"
             "[solver swept]\n"
             "algorithm = textbook\n"
             "step_rule = short-step\n"
             "oracle = augmentation\n"
             "cache = false\n");
  const lazycg::Experiment exp = lazycg::load_experiment(p.string());
  CHECK(exp.name == "sample_exp");
  CHECK_FALSE(exp.online);
  CHECK(exp.domain.dimension() == 5);
  CHECK(exp.domain.mu() == 2.0);
  CHECK(exp.objective.kind == "regression");
  CHECK(exp.objective.density == 0.4);
  CHECK(exp.objective.rows == 7);
  CHECK(exp.objective.seed == 11);
  REQUIRE(exp.solvers.size() == 2);

  const lazycg::SolverSpec& tuned = exp.solvers[0];
  CHECK(tuned.label == "tuned");
  CHECK(tuned.algorithm == "parameter_free");
  CHECK(tuned.cfg.K == 2.0);
  CHECK(tuned.cfg.epsilon == 1e-5);
  // a bare phi0 selects the user-value policy, and parameter_free defaults to
  // line search when no step rule is spelled out
  CHECK(tuned.cfg.phi_init == lazycg::PhiInitPolicy::UserValue);
  CHECK(tuned.cfg.phi0_user == 3.5);
  CHECK(tuned.cfg.step_rule == lazycg::StepRule::LineSearch);
  CHECK(tuned.cfg.cache_keep == 40);
  CHECK(tuned.cfg.cache_period == 17);
  CHECK(tuned.cfg.improved_phi_on_negative);

  const lazycg::SolverSpec& swept = exp.solvers[1];
  CHECK(swept.cfg.step_rule == lazycg::StepRule::ShortStep);
  CHECK(swept.cfg.backend == lazycg::OracleBackend::Augmentation);
  CHECK_FALSE(swept.cfg.cache_enabled);
}

TEST_CASE("explicit quadratic objectives come straight from the config") {
  TempDir tmp("lazycg_cfgquad_test");
  const fs::path p = tmp.path / "quad.cfg";
  write_file(p,
             "[domain]\n"
             "kind = simplex\n"
             "n = 2\n"
             "[objective]\n"
             "kind = quadratic\n"
             "a = (1,0); (0,1)\n"
             "b = 1, 0\n"
             "[solver plain]\n"
             "algorithm = vanilla\n"
             "step_rule = line-search\n"
             "max_iters = 30\n");
  const lazycg::Experiment exp = lazycg::load_experiment(p.string());
  const lazycg::QuadraticObjective f = lazycg::build_objective(exp, std::nullopt);
  CHECK(f.value({1.0, 0.0}) == 0.0);
  CHECK(f.value({0.0, 1.0}) == 2.0);
  const RunTrace trace = lazycg::run_solver(exp, exp.solvers[0], RunOptions{});
  CHECK(trace.last_row().f <= 1e-9);
}

// --- running and verifying -----------------------------------------------------

TEST_CASE("run_experiment writes one named trace per solver") {
  TempDir tmp("lazycg_runexp_test");
  const fs::path cfg = tmp.path / "duo.cfg";
  write_file(cfg, kOfflineConfig);
  const lazycg::Experiment exp = lazycg::load_experiment(cfg.string());

  RunOptions options;
  options.output_dir = (tmp.path / "out").string();
  std::ostringstream console;
  const std::vector<std::string> written = lazycg::run_experiment(exp, options, console);
  REQUIRE(written.size() == 2);
  CHECK(fs::path(written[0]).filename() == "duo_lazy.csv");
  CHECK(fs::path(written[1]).filename() == "duo_plain.csv");
  CHECK(fs::exists(written[0]));
  CHECK(fs::exists(written[1]));

  const std::string text = read_file(written[0]);
  CHECK(text.rfind(lazycg::trace_header(false) + "\n", 0) == 0);
  CHECK(text.find("# summary:") != std::string::npos);
  CHECK(text.find("# meta:") != std::string::npos);
  CHECK(text.find("# timing:") != std::string::npos);

  const std::string printed = console.str();
  CHECK(printed.find("lazy:") != std::string::npos);
  CHECK(printed.find("plain:") != std::string::npos);
  CHECK(printed.find("stop=") != std::string::npos);

  const ParsedTrace parsed = lazycg::read_trace_csv(written[0]);
  CHECK(parsed.meta.at("label") == "lazy");
  CHECK(parsed.meta.at("algorithm") == "lazy_cg_textbook");
}

TEST_CASE("sweeps fan out into suffixed files and tagged traces") {
  TempDir tmp("lazycg_sweep_test");
  const fs::path cfg = tmp.path / "k_sweep.cfg";
  write_file(cfg,
             "[domain]\nkind = simplex\nn = 4\n"
             "[objective]\nkind = regression\nrows = 6\nseed = 5\n"
             "[solver lazy]\nalgorithm = textbook\nmax_iters = 40\n");
  const lazycg::Experiment exp = lazycg::load_experiment(cfg.string());

  RunOptions options;
  options.output_dir = (tmp.path / "out").string();
  options.sweep_key = "K";
  options.sweep_values = {"1", "1.1", "2"};
  std::ostringstream console;
  const auto written = lazycg::run_experiment(exp, options, console);
  REQUIRE(written.size() == 3);
  CHECK(fs::path(written[0]).filename() == "k_sweep_lazy_K=1.csv");
  CHECK(fs::path(written[1]).filename() == "k_sweep_lazy_K=1.1.csv");
  CHECK(fs::path(written[2]).filename() == "k_sweep_lazy_K=2.csv");

  const ParsedTrace middle = lazycg::read_trace_csv(written[1]);
  CHECK(middle.meta.at("sweep") == "K=1.1");
  CHECK(middle.meta.at("K") == lazycg::format_double(1.1));

  // swept traces verify against the same config because the trace meta
  // carries the effective parameters
  const lazycg::VerifyReport report = lazycg::verify_run(exp, written[1]);
  CHECK(report.ok);

  // unsupported sweep keys and non-numeric values are input errors
  lazycg::SolverConfig probe;
  CHECK_THROWS_WITH(lazycg::detail::apply_sweep_value(probe, "density", "1", 0),
                    Catch::Matchers::ContainsSubstring("unsupported parameter 'density'"));
  CHECK_THROWS_WITH(lazycg::detail::apply_sweep_value(probe, "K", "fast", 0),
                    Catch::Matchers::ContainsSubstring("not a number"));
}

TEST_CASE("command-line overrides land in the trace meta") {
  TempDir tmp("lazycg_override_test");
  const fs::path cfg = tmp.path / "duo.cfg";
  write_file(cfg, kOfflineConfig);
  const lazycg::Experiment exp = lazycg::load_experiment(cfg.string());

  RunOptions options;
  options.output_dir = (tmp.path / "out").string();
  options.seed = 99;
  options.no_cache = true;
  std::ostringstream console;
  const auto written = lazycg::run_experiment(exp, options, console);
  const ParsedTrace parsed = lazycg::read_trace_csv(written[0]);
  CHECK(parsed.meta.at("seed_override") == "99");
  CHECK(parsed.meta.at("cache") == "off");

  // the override is part of the trace, so verification replays the same seed
  const lazycg::VerifyReport report = lazycg::verify_run(exp, written[0]);
  CHECK(report.ok);
}

TEST_CASE("verify_run replays a recorded offline trace and audits its bounds") {
  TempDir tmp("lazycg_verify_test");
  const fs::path cfg = tmp.path / "duo.cfg";
  write_file(cfg, kOfflineConfig);
  const lazycg::Experiment exp = lazycg::load_experiment(cfg.string());

  RunOptions options;
  options.output_dir = (tmp.path / "out").string();
  std::ostringstream console;
  const auto written = lazycg::run_experiment(exp, options, console);

  for (const std::string& path : written) {
    const lazycg::VerifyReport report = lazycg::verify_run(exp, path);
    CHECK(report.ok);
    CHECK(report.full_checks);
    REQUIRE_FALSE(report.messages.empty());
    CHECK(report.messages[0].find("replay matches") != std::string::npos);
  }
}

TEST_CASE("verify_run fails at the first corrupted row") {
  TempDir tmp("lazycg_corrupt_test");
  const fs::path cfg = tmp.path / "duo.cfg";
  write_file(cfg, kOfflineConfig);
  const lazycg::Experiment exp = lazycg::load_experiment(cfg.string());

  RunOptions options;
  options.output_dir = (tmp.path / "out").string();
  std::ostringstream console;
  const auto written = lazycg::run_experiment(exp, options, console);

  // hand-corrupt the phi column of the second data row
  std::istringstream in(read_file(written[0]));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() > 3);
  auto fields = lazycg::detail::split(lines[2], ',');
  REQUIRE(fields.size() == 8);
  fields[2] = "999";
  std::string rebuilt;
  for (std::size_t i = 0; i < fields.size(); ++i) rebuilt += (i ? "," : "") + fields[i];
  lines[2] = rebuilt;
  const fs::path bad = tmp.path / "out" / "corrupted.csv";
  std::string text;
  for (const std::string& l : lines) text += l + "\n";
  write_file(bad, text);

  const lazycg::VerifyReport report = lazycg::verify_run(exp, bad.string());
  CHECK_FALSE(report.ok);
  REQUIRE_FALSE(report.messages.empty());
  CHECK(report.messages[0].find("row t=2") != std::string::npos);
  CHECK(report.messages[0].find("column phi") != std::string::npos);

  // a label pointing at no solver section cannot be verified at all
  std::string ghost = read_file(written[0]);
  const std::size_t at = ghost.find("label=lazy");
  REQUIRE(at != std::string::npos);
  ghost.replace(at, 10, "label=ghost");
  const fs::path ghost_path = tmp.path / "out" / "ghost.csv";
  write_file(ghost_path, ghost);
  CHECK_THROWS_WITH(lazycg::verify_run(exp, ghost_path.string()),
                    Catch::Matchers::ContainsSubstring("no [solver ghost] section"));
}

TEST_CASE("verify_run audits online traces round by round") {
  TempDir tmp("lazycg_verify_online");
  const fs::path cfg = tmp.path / "web.cfg";
  write_file(cfg,
             "[domain]\nkind = hypercube\nn = 3\n"
             "[stream]\nkind = linear\nrounds = 40\nseed = 3\nadversarial = true\n"
             "[solver online]\nalgorithm = online\nK = 1.5\n");
  const lazycg::Experiment exp = lazycg::load_experiment(cfg.string());

  RunOptions options;
  options.output_dir = (tmp.path / "out").string();
  std::ostringstream console;
  const auto written = lazycg::run_experiment(exp, options, console);
  REQUIRE(written.size() == 1);

  const lazycg::VerifyReport report = lazycg::verify_run(exp, written[0]);
  CHECK(report.ok);
  CHECK(report.full_checks);
  bool audited = false;
  for (const std::string& msg : report.messages) {
    if (msg.find("per-round gap bound") != std::string::npos) audited = true;
  }
  CHECK(audited);
}
