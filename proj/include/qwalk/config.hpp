#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qwalk/error.hpp"

namespace qwalk {

// Flat key -> value settings. The file format is a TOML subset:
//   # comment
//   [section]          (headers are accepted and ignored; keys are global)
//   key = value        (value may be "quoted"; '-' in keys reads as '_')
class Settings {
 public:
  static std::string normalize_key(std::string_view key) {
    std::string k(key);
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
  }

  static Settings parse(std::istream& in) {
    Settings s;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto text = trim(strip_comment(line));
      if (text.empty()) continue;
      if (text.front() == '[') {
        if (text.back() != ']') throw ParseError(line_no, "unterminated section header");
        continue;
      }
      auto eq = text.find('=');
      if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
      auto key = trim(text.substr(0, eq));
      auto value = trim(text.substr(eq + 1));
      if (key.empty()) throw ParseError(line_no, "empty key");
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      s.values_[normalize_key(key)] = std::string(value);
    }
    return s;
  }

  static Settings parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file '" + path + "'");
    return parse(in);
  }

  void set(std::string_view key, std::string value) { values_[normalize_key(key)] = std::move(value); }
  bool has(std::string_view key) const { return values_.count(normalize_key(key)) > 0; }

  std::optional<std::string> get(std::string_view key) const {
    auto it = values_.find(normalize_key(key));
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string get_or(std::string_view key, std::string fallback) const { return get(key).value_or(std::move(fallback)); }

  long long get_int(std::string_view key, long long fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    long long out = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || p != v->data() + v->size()) throw Error("setting '" + std::string(key) + "' is not an integer: " + *v);
    return out;
  }

  std::uint64_t get_uint(std::string_view key, std::uint64_t fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || p != v->data() + v->size()) throw Error("setting '" + std::string(key) + "' is not an unsigned integer: " + *v);
    return out;
  }

  double get_double(std::string_view key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::istringstream in(*v);
    in.imbue(std::locale::classic());
    double out = 0;
    if (!(in >> out) || !in.eof()) throw Error("setting '" + std::string(key) + "' is not a number: " + *v);
    return out;
  }

  bool get_bool(std::string_view key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "on" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "off" || *v == "0" || *v == "no") return false;
    throw Error("setting '" + std::string(key) + "' is not a boolean: " + *v);
  }

  // Comma-separated integers; "a-b" expands to an inclusive range.
  std::vector<int> get_int_list(std::string_view key, std::vector<int> fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    return parse_int_list(*v);
  }

  static std::vector<int> parse_int_list(std::string_view text) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto comma = text.find(',', pos);
      auto item = trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      if (!item.empty()) {
        auto dash = item.find('-', 1);
        auto parse = [&](std::string_view s) {
          int x = 0;
          auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
          if (ec != std::errc() || p != s.data() + s.size()) throw Error("bad integer list item '" + std::string(s) + "'");
          return x;
        };
        if (dash == std::string_view::npos) {
          out.push_back(parse(item));
        } else {
          int lo = parse(trim(item.substr(0, dash))), hi = parse(trim(item.substr(dash + 1)));
          if (hi < lo) throw Error("descending range '" + std::string(item) + "'");
          for (int x = lo; x <= hi; ++x) out.push_back(x);
        }
      }
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return out;
  }

  // Sorted "key=value" lines; hashing this identifies a resolved configuration.
  std::string canonical(std::initializer_list<std::string_view> exclude = {}) const {
    std::string out;
    for (const auto& [k, v] : values_) {
      if (std::find(exclude.begin(), exclude.end(), k) != exclude.end()) continue;
      out += k + "=" + v + "\n";
    }
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static std::string_view strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
  }

  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  }

  std::map<std::string, std::string> values_;
};

struct DatasetProfile {
  std::string name;
  int steps;
};

// Walk depth per known benchmark.
inline std::optional<DatasetProfile> find_profile(std::string_view dataset) {
  static const DatasetProfile profiles[] = {
      {"cora", 2}, {"citeseer", 4}, {"pubmed", 3}, {"ogbl-collab", 2}, {"collab", 2}, {"ogbl-ddi", 2}, {"ddi", 2},
  };
  for (const auto& p : profiles) {
    if (p.name == dataset) return p;
  }
  return std::nullopt;
}

}  // namespace qwalk
