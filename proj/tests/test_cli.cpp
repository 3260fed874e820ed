#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "lazycg/trace.hpp"

#ifndef LAZYCG_BENCH_PATH
#error "LAZYCG_BENCH_PATH must point at the benchmark executable"
#endif

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

/// Runs the benchmark binary with the given arguments, captures combined
/// stdout and stderr, and returns the process exit code.
int run_cli(const std::string& args, const fs::path& log, std::string* output = nullptr) {
  const std::string cmd =
      std::string(LAZYCG_BENCH_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  if (output) *output = read_file(log);
  return WEXITSTATUS(rc);
}

const std::string kConfig =
    "[domain]\n"
    "kind = simplex\n"
    "n = 4\n"
    "[objective]\n"
    "kind = regression\n"
    "density = 0.8\n"
    "rows = 6\n"
    "seed = 5\n"
    "[solver lazy]\n"
    "algorithm = textbook\n"
    "K = 1.5\n"
    "max_iters = 50\n";

bool rows_equal_modulo_timing(const lazycg::ParsedTrace& a, const lazycg::ParsedTrace& b) {
  if (a.rows.size() != b.rows.size()) return false;
  auto cell = [](double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; };
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& ra = a.rows[i];
    const auto& rb = b.rows[i];
    if (ra.t != rb.t || !cell(ra.f, rb.f) || !cell(ra.phi, rb.phi) ||
        !cell(ra.wolfe_gap, rb.wolfe_gap) || ra.lp_calls != rb.lp_calls ||
        ra.cache_hits != rb.cache_hits || ra.answer != rb.answer || !cell(ra.loss, rb.loss) ||
        !cell(ra.regret, rb.regret) || !cell(ra.phi_pre, rb.phi_pre)) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("run subcommand writes traces and exits cleanly") {
  TempDir tmp("lazycg_cli_run");
  const fs::path cfg = tmp.path / "exp.cfg";
  write_file(cfg, kConfig);
  const fs::path out = tmp.path / "out";

  std::string printed;
  const int rc = run_cli("run " + cfg.string() + " --output-dir " + out.string(),
                         tmp.path / "log.txt", &printed);
  CHECK(rc == 0);
  CHECK(fs::exists(out / "exp_lazy.csv"));
  CHECK(printed.find("lazy:") != std::string::npos);
  CHECK(printed.find("stop=") != std::string::npos);
}

TEST_CASE("malformed input exits with code 2 and writes nothing") {
  TempDir tmp("lazycg_cli_badcfg");
  const fs::path cfg = tmp.path / "broken.cfg";
  write_file(cfg,
             "[domain]\nkind = simplex\nn = 4\nn = 5\n"
             "[objective]\nrows = 3\n[solver]\nalgorithm = textbook\n");
  const fs::path out = tmp.path / "out";

  std::string printed;
  const int rc = run_cli("run " + cfg.string() + " --output-dir " + out.string(),
                         tmp.path / "log.txt", &printed);
  CHECK(rc == 2);
  CHECK(printed.find("error:") != std::string::npos);
  CHECK(printed.find("duplicate key 'n'") != std::string::npos);
  CHECK_FALSE(fs::exists(out));

  // a config path that does not exist is caught by argument validation
  const int rc2 = run_cli("run " + (tmp.path / "absent.cfg").string(), tmp.path / "log2.txt");
  CHECK(rc2 == 2);

  // as is a missing subcommand
  const int rc3 = run_cli("", tmp.path / "log3.txt");
  CHECK(rc3 == 2);
}

TEST_CASE("verify subcommand accepts intact traces and rejects corrupted ones") {
  TempDir tmp("lazycg_cli_verify");
  const fs::path cfg = tmp.path / "exp.cfg";
  write_file(cfg, kConfig);
  const fs::path out = tmp.path / "out";
  REQUIRE(run_cli("run " + cfg.string() + " --output-dir " + out.string(),
                  tmp.path / "log.txt") == 0);
  const fs::path trace = out / "exp_lazy.csv";

  std::string printed;
  const int ok = run_cli("verify " + trace.string() + " " + cfg.string(),
                         tmp.path / "verify_ok.txt", &printed);
  CHECK(ok == 0);
  CHECK(printed.find("verify: PASS") != std::string::npos);
  CHECK(printed.find("replay matches") != std::string::npos);

  // corrupt one phi cell: verification must fail with exit code 3
  std::string text = read_file(trace);
  std::istringstream in(text);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() > 3);
  auto fields = lazycg::detail::split(lines[2], ',');
  REQUIRE(fields.size() == 8);
  fields[2] = "999";
  lines[2].clear();
  for (std::size_t i = 0; i < fields.size(); ++i) lines[2] += (i ? "," : "") + fields[i];
  std::string rebuilt;
  for (const std::string& l : lines) rebuilt += l + "\n";
  const fs::path bad = out / "corrupted.csv";
  write_file(bad, rebuilt);

  const int fail = run_cli("verify " + bad.string() + " " + cfg.string(),
                           tmp.path / "verify_bad.txt", &printed);
  CHECK(fail == 3);
  CHECK(printed.find("verify: FAIL") != std::string::npos);
  CHECK(printed.find("column phi") != std::string::npos);
}

TEST_CASE("sweep subcommand fans out over the requested values") {
  TempDir tmp("lazycg_cli_sweep");
  const fs::path cfg = tmp.path / "exp.cfg";
  write_file(cfg, kConfig);
  const fs::path out = tmp.path / "out";

  const int rc = run_cli("sweep " + cfg.string() + " --param K=1,1.1,2 --output-dir " +
                             out.string(),
                         tmp.path / "log.txt");
  CHECK(rc == 0);
  CHECK(fs::exists(out / "exp_lazy_K=1.csv"));
  CHECK(fs::exists(out / "exp_lazy_K=1.1.csv"));
  CHECK(fs::exists(out / "exp_lazy_K=2.csv"));

  // sweep demands a --param, and the value list must be well formed
  CHECK(run_cli("sweep " + cfg.string(), tmp.path / "log2.txt") == 2);
  CHECK(run_cli("sweep " + cfg.string() + " --param K=", tmp.path / "log3.txt") == 2);
  CHECK(run_cli("sweep " + cfg.string() + " --param K", tmp.path / "log4.txt") == 2);
}

TEST_CASE("flag overrides reach the solver configuration") {
  TempDir tmp("lazycg_cli_flags");
  const fs::path cfg = tmp.path / "exp.cfg";
  write_file(cfg, kConfig);
  const fs::path out = tmp.path / "out";

  const int rc = run_cli("run " + cfg.string() + " --output-dir " + out.string() +
                             " --seed 123 --no-cache --oracle augmentation",
                         tmp.path / "log.txt");
  CHECK(rc == 0);
  const lazycg::ParsedTrace trace = lazycg::read_trace_csv((out / "exp_lazy.csv").string());
  CHECK(trace.meta.at("seed_override") == "123");
  CHECK(trace.meta.at("cache") == "off");
  CHECK(trace.meta.at("oracle") == "augmentation");

  // an unknown oracle name is rejected by the flag parser
  CHECK(run_cli("run " + cfg.string() + " --oracle quantum", tmp.path / "log2.txt") == 2);
}

TEST_CASE("two processes with the same seed produce the same trace") {
  TempDir tmp("lazycg_cli_determinism");
  const fs::path cfg = tmp.path / "exp.cfg";
  write_file(cfg, kConfig);
  const fs::path out_a = tmp.path / "a";
  const fs::path out_b = tmp.path / "b";

  REQUIRE(run_cli("run " + cfg.string() + " --seed 7 --output-dir " + out_a.string(),
                  tmp.path / "log_a.txt") == 0);
  REQUIRE(run_cli("run " + cfg.string() + " --seed 7 --output-dir " + out_b.string(),
                  tmp.path / "log_b.txt") == 0);

  const lazycg::ParsedTrace a = lazycg::read_trace_csv((out_a / "exp_lazy.csv").string());
  const lazycg::ParsedTrace b = lazycg::read_trace_csv((out_b / "exp_lazy.csv").string());
  CHECK(rows_equal_modulo_timing(a, b));
  CHECK(a.positive == b.positive);
  CHECK(a.negative == b.negative);
  CHECK(a.cache_hit_rate == b.cache_hit_rate);

  // the textual content must match too, once timing cells are blanked
  auto scrub = [](const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
      if (line.rfind("# timing:", 0) == 0) continue;
      const auto fields = lazycg::detail::split(line, ',');
      if (fields.size() == 8 && line.rfind("#", 0) != 0 && line.rfind("t,", 0) != 0) {
        for (std::size_t i = 0; i + 1 < fields.size(); ++i) out += (i ? "," : "") + fields[i];
        out += "\n";
      } else {
        out += line + "\n";
      }
    }
    return out;
  };
  CHECK(scrub(read_file(out_a / "exp_lazy.csv")) == scrub(read_file(out_b / "exp_lazy.csv")));
}
