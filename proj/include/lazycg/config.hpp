#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lazycg/core.hpp"

namespace lazycg {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] inline void config_error(int line, const std::string& what) {
  throw InputError("config line " + std::to_string(line) + ": " + what);
}

}  // namespace detail

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// One `[kind]` or `[kind label]` block with its key = value entries. Typed
/// getters report the entry's line number on bad input.
struct ConfigSection {
  std::string kind;
  std::string label;
  int line = 0;
  std::vector<ConfigEntry> entries;

  const ConfigEntry* find(const std::string& key) const {
    for (const ConfigEntry& e : entries) {
      if (e.key == key) return &e;
    }
    return nullptr;
  }

  bool has(const std::string& key) const { return find(key) != nullptr; }

  const ConfigEntry& require(const std::string& key) const {
    const ConfigEntry* e = find(key);
    if (!e) {
      detail::config_error(line, "section [" + kind + (label.empty() ? "" : " " + label) +
                                     "] is missing key '" + key + "'");
    }
    return *e;
  }

  std::string get_string(const std::string& key, const std::string& def) const {
    const ConfigEntry* e = find(key);
    return e ? e->value : def;
  }

  double parse_double(const ConfigEntry& e) const {
    char* end = nullptr;
    const double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0') {
      detail::config_error(e.line, "key '" + e.key + "': bad number '" + e.value + "'");
    }
    return v;
  }

  double get_double(const std::string& key, double def) const {
    const ConfigEntry* e = find(key);
    return e ? parse_double(*e) : def;
  }

  double require_double(const std::string& key) const { return parse_double(require(key)); }

  long long parse_int(const ConfigEntry& e) const {
    char* end = nullptr;
    const long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0') {
      detail::config_error(e.line, "key '" + e.key + "': bad integer '" + e.value + "'");
    }
    return v;
  }

  long long get_int(const std::string& key, long long def) const {
    const ConfigEntry* e = find(key);
    return e ? parse_int(*e) : def;
  }

  long long require_int(const std::string& key) const { return parse_int(require(key)); }

  bool get_bool(const std::string& key, bool def) const {
    const ConfigEntry* e = find(key);
    if (!e) return def;
    if (e->value == "true" || e->value == "on" || e->value == "1") return true;
    if (e->value == "false" || e->value == "off" || e->value == "0") return false;
    detail::config_error(e->line, "key '" + e->key + "': expected a boolean, got '" + e->value + "'");
  }
};

struct ConfigFile {
  std::vector<ConfigSection> sections;

  const ConfigSection* find(const std::string& kind) const {
    for (const ConfigSection& s : sections) {
      if (s.kind == kind) return &s;
    }
    return nullptr;
  }

  std::vector<const ConfigSection*> find_all(const std::string& kind) const {
    std::vector<const ConfigSection*> out;
    for (const ConfigSection& s : sections) {
      if (s.kind == kind) out.push_back(&s);
    }
    return out;
  }
};

/// INI-style parser: `[section]` or `[section label]` headers, `key = value`
/// entries, `#` comments. Every error message carries the offending line
/// number. Duplicate keys within a section are rejected.
inline ConfigFile parse_config(std::istream& in) {
  ConfigFile file;
  ConfigSection* current = nullptr;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') detail::config_error(line_no, "unterminated section header");
      const std::string inner = detail::trim(line.substr(1, line.size() - 2));
      if (inner.empty()) detail::config_error(line_no, "empty section header");
      ConfigSection section;
      section.line = line_no;
      const std::size_t space = inner.find_first_of(" \t");
      if (space == std::string::npos) {
        section.kind = inner;
      } else {
        section.kind = inner.substr(0, space);
        section.label = detail::trim(inner.substr(space + 1));
      }
      file.sections.push_back(std::move(section));
      current = &file.sections.back();
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) detail::config_error(line_no, "expected 'key = value'");
    if (!current) detail::config_error(line_no, "entry before any section header");
    ConfigEntry entry;
    entry.key = detail::trim(line.substr(0, eq));
    entry.value = detail::trim(line.substr(eq + 1));
    entry.line = line_no;
    if (entry.key.empty()) detail::config_error(line_no, "empty key");
    if (current->find(entry.key)) {
      detail::config_error(line_no, "duplicate key '" + entry.key + "' in section [" +
                                        current->kind + "]");
    }
    current->entries.push_back(std::move(entry));
  }
  return file;
}

inline ConfigFile parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config: cannot open '" + path + "'");
  return parse_config(in);
}

/// Comma-separated doubles: "0.5, 1, -2e-3".
inline std::vector<double> parse_double_list(const std::string& text, int line) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item.empty()) detail::config_error(line, "empty element in number list");
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0') {
      detail::config_error(line, "bad number '" + item + "' in list");
    }
    out.push_back(v);
  }
  if (out.empty()) detail::config_error(line, "empty number list");
  return out;
}

/// Comma-separated "u-v" pairs: "0-1, 1-2, 0-2".
inline std::vector<std::pair<int, int>> parse_edge_list(const std::string& text, int line) {
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item.empty()) detail::config_error(line, "empty element in edge list");
    const std::size_t dash = item.find('-', 1);  // position 0 would be a sign
    if (dash == std::string::npos) detail::config_error(line, "edge '" + item + "' needs the form u-v");
    const std::string a = detail::trim(item.substr(0, dash));
    const std::string b = detail::trim(item.substr(dash + 1));
    char* end = nullptr;
    const long u = std::strtol(a.c_str(), &end, 10);
    if (end == a.c_str() || *end != '\0') detail::config_error(line, "bad endpoint '" + a + "'");
    const long v = std::strtol(b.c_str(), &end, 10);
    if (end == b.c_str() || *end != '\0') detail::config_error(line, "bad endpoint '" + b + "'");
    out.push_back({static_cast<int>(u), static_cast<int>(v)});
  }
  if (out.empty()) detail::config_error(line, "empty edge list");
  return out;
}

/// Semicolon-separated parenthesized vectors: "(1,0,0); (0,1,0)".
inline std::vector<std::vector<double>> parse_vector_list(const std::string& text, int line) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = detail::trim(item);
    if (item.empty()) detail::config_error(line, "empty element in vector list");
    if (item.front() != '(' || item.back() != ')') {
      detail::config_error(line, "vector '" + item + "' must be parenthesized");
    }
    out.push_back(parse_double_list(item.substr(1, item.size() - 2), line));
  }
  if (out.empty()) detail::config_error(line, "empty vector list");
  return out;
}

}  // namespace lazycg
