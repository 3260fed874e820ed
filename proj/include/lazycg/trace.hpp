#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lazycg/core.hpp"
#include "lazycg/weaksep.hpp"

namespace lazycg {

enum class AnswerKind { Positive, Negative, End };

inline const char* answer_name(AnswerKind a) {
  switch (a) {
    case AnswerKind::Positive:
      return "positive";
    case AnswerKind::Negative:
      return "negative";
    case AnswerKind::End:
      return "end";
  }
  return "end";
}

/// One solver iteration. Offline runs use the first eight fields; online runs
/// additionally carry the round loss, the running regret, and the bound value
/// before the oracle answer could tighten it.
struct TraceRow {
  long long t = 0;
  double f = 0.0;
  double phi = 0.0;
  double wolfe_gap = 0.0;
  long long lp_calls = 0;
  long long cache_hits = 0;
  AnswerKind answer = AnswerKind::End;
  double elapsed_s = 0.0;
  double loss = std::numeric_limits<double>::quiet_NaN();
  double regret = std::numeric_limits<double>::quiet_NaN();
  double phi_pre = std::numeric_limits<double>::quiet_NaN();
};

/// Full record of one solver run: per-iteration rows, oracle tallies, and the
/// key/value metadata that ends up in the trace footer. Timing fields are the
/// only non-deterministic content.
struct RunTrace {
  bool online = false;
  std::vector<TraceRow> rows;
  OracleStats stats;
  std::vector<std::pair<std::string, std::string>> meta;
  double solver_seconds = 0.0;
  double oracle_seconds = 0.0;
  std::string stop_reason;
  long long eta_truncations = 0;
  // per-round gap bounds h_t of the online solver; kept in memory for audits,
  // not serialized
  std::vector<double> online_h;

  void set_meta(const std::string& key, const std::string& value) {
    for (auto& [k, v] : meta) {
      if (k == key) {
        v = value;
        return;
      }
    }
    meta.push_back({key, value});
  }

  std::string get_meta(const std::string& key) const {
    for (const auto& [k, v] : meta) {
      if (k == key) return v;
    }
    return {};
  }

  const TraceRow& last_row() const {
    if (rows.empty()) throw InvariantError("trace: no rows");
    return rows.back();
  }
};

// 17 significant digits round-trip doubles exactly through decimal text.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string trace_header(bool online) {
  std::string h = "t,f,phi,wolfe_gap,lp_calls,cache_hits,answer,elapsed_s";
  if (online) h += ",loss,regret,phi_pre";
  return h;
}

/// Serializes a run to CSV: one row per iteration, then footer lines holding
/// the oracle summary, the run metadata, and (kept apart because it is not
/// reproducible) the timing split.
inline void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  out << trace_header(trace.online) << "\n";
  for (const TraceRow& r : trace.rows) {
    out << r.t << ',' << format_double(r.f) << ',' << format_double(r.phi) << ','
        << format_double(r.wolfe_gap) << ',' << r.lp_calls << ',' << r.cache_hits << ','
        << answer_name(r.answer) << ',' << format_double(r.elapsed_s);
    if (trace.online) {
      out << ',' << format_double(r.loss) << ',' << format_double(r.regret) << ','
          << format_double(r.phi_pre);
    }
    out << "\n";
  }
  out << "# summary: cache_hit_rate=" << format_double(trace.stats.cache_hit_rate())
      << ",positive=" << trace.stats.positive_answers
      << ",negative=" << trace.stats.negative_answers << "\n";
  out << "# meta:";
  bool first = true;
  for (const auto& [k, v] : trace.meta) {
    out << (first ? " " : ",") << k << '=' << v;
    first = false;
  }
  out << "\n";
  out << "# timing: solver_s=" << format_double(trace.solver_seconds)
      << ",oracle_s=" << format_double(trace.oracle_seconds) << "\n";
}

inline void write_trace_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("trace: cannot open '" + path + "' for writing");
  write_trace_csv(trace, out);
}

/// Trace read back from CSV. Summary and meta come from the footer lines.
struct ParsedTrace {
  bool online = false;
  std::vector<TraceRow> rows;
  double cache_hit_rate = 0.0;
  long long positive = 0;
  long long negative = 0;
  std::map<std::string, std::string> meta;
};

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = line.find(sep, start);
    if (at == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, at - start));
    start = at + 1;
  }
}

inline double parse_double(const std::string& s, int line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw InputError("trace line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

inline long long parse_int(const std::string& s, int line_no) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') {
    throw InputError("trace line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

inline AnswerKind parse_answer(const std::string& s, int line_no) {
  if (s == "positive") return AnswerKind::Positive;
  if (s == "negative") return AnswerKind::Negative;
  if (s == "end") return AnswerKind::End;
  throw InputError("trace line " + std::to_string(line_no) + ": bad answer '" + s + "'");
}

inline std::map<std::string, std::string> parse_kv(const std::string& body, int line_no) {
  std::map<std::string, std::string> out;
  if (body.empty()) return out;
  for (const std::string& item : split(body, ',')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw InputError("trace line " + std::to_string(line_no) + ": bad key=value '" + item + "'");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

}  // namespace detail

inline ParsedTrace read_trace_csv(std::istream& in) {
  ParsedTrace trace;
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw InputError("trace: empty file");
  ++line_no;
  if (line == trace_header(false)) {
    trace.online = false;
  } else if (line == trace_header(true)) {
    trace.online = true;
  } else {
    throw InputError("trace line 1: unrecognized header");
  }
  const std::size_t columns = trace.online ? 11 : 8;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("# summary:", 0) == 0) {
      const std::string body = line.size() > 11 ? line.substr(11) : "";
      auto kv = detail::parse_kv(body, line_no);
      if (kv.count("cache_hit_rate")) trace.cache_hit_rate = detail::parse_double(kv["cache_hit_rate"], line_no);
      if (kv.count("positive")) trace.positive = detail::parse_int(kv["positive"], line_no);
      if (kv.count("negative")) trace.negative = detail::parse_int(kv["negative"], line_no);
      continue;
    }
    if (line.rfind("# meta:", 0) == 0) {
      const std::string body = line.size() > 8 ? line.substr(8) : "";
      trace.meta = detail::parse_kv(body, line_no);
      continue;
    }
    if (line.rfind("#", 0) == 0) continue;  // other footer lines (timing)
    const auto fields = detail::split(line, ',');
    if (fields.size() != columns) {
      throw InputError("trace line " + std::to_string(line_no) + ": expected " +
                       std::to_string(columns) + " fields, got " + std::to_string(fields.size()));
    }
    TraceRow r;
    r.t = detail::parse_int(fields[0], line_no);
    r.f = detail::parse_double(fields[1], line_no);
    r.phi = detail::parse_double(fields[2], line_no);
    r.wolfe_gap = detail::parse_double(fields[3], line_no);
    r.lp_calls = detail::parse_int(fields[4], line_no);
    r.cache_hits = detail::parse_int(fields[5], line_no);
    r.answer = detail::parse_answer(fields[6], line_no);
    r.elapsed_s = detail::parse_double(fields[7], line_no);
    if (trace.online) {
      r.loss = detail::parse_double(fields[8], line_no);
      r.regret = detail::parse_double(fields[9], line_no);
      r.phi_pre = detail::parse_double(fields[10], line_no);
    }
    trace.rows.push_back(r);
  }
  return trace;
}

inline ParsedTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("trace: cannot open '" + path + "'");
  return read_trace_csv(in);
}

}  // namespace lazycg
