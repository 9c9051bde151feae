#pragma once

// Flat key = value configuration with [section] headers. '#' and ';' start
// comments. Keys before the first header belong to the section "".

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "quadratomo/errors.hpp"
#include "quadratomo/io.hpp"

namespace quadratomo::config {

class Config {
 public:
  static Config parse(const std::string& text, std::filesystem::path base_dir = {}) {
    Config c;
    c.base_ = std::move(base_dir);
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto cut = line.find_first_of("#;");
      if (cut != std::string::npos) line.erase(cut);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw ValidationError("config line " + std::to_string(lineno) + ": unclosed section");
        section = trim(line.substr(1, line.size() - 2));
        c.values_[section];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
      if (c.values_[section].count(key))
        throw ValidationError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      c.values_[section][key] = trim(line.substr(eq + 1));
    }
    return c;
  }

  static Config load(const std::filesystem::path& p) {
    return parse(io::read_text(p), std::filesystem::absolute(p).parent_path());
  }

  bool has_section(const std::string& s) const { return values_.count(s) > 0; }

  bool has(const std::string& s, const std::string& key) const {
    auto it = values_.find(s);
    return it != values_.end() && it->second.count(key);
  }

  std::optional<std::string> get(const std::string& s, const std::string& key) const {
    used_[s].insert(key);
    auto it = values_.find(s);
    if (it == values_.end()) return std::nullopt;
    auto k = it->second.find(key);
    if (k == it->second.end()) return std::nullopt;
    return k->second;
  }

  std::string str(const std::string& s, const std::string& key, const std::string& def) const {
    return get(s, key).value_or(def);
  }

  std::string required(const std::string& s, const std::string& key) const {
    auto v = get(s, key);
    if (!v) throw ValidationError("config is missing [" + s + "] " + key);
    return *v;
  }

  double number(const std::string& s, const std::string& key, double def) const {
    auto v = get(s, key);
    return v ? to_double(s, key, *v) : def;
  }

  std::optional<double> number(const std::string& s, const std::string& key) const {
    auto v = get(s, key);
    if (!v) return std::nullopt;
    return to_double(s, key, *v);
  }

  long long integer(const std::string& s, const std::string& key, long long def) const {
    auto v = get(s, key);
    return v ? to_integer(s, key, *v) : def;
  }

  std::optional<long long> integer(const std::string& s, const std::string& key) const {
    auto v = get(s, key);
    if (!v) return std::nullopt;
    return to_integer(s, key, *v);
  }

  bool boolean(const std::string& s, const std::string& key, bool def) const {
    auto v = get(s, key);
    if (!v) return def;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ValidationError("[" + s + "] " + key + ": expected true or false");
  }

  std::vector<int> int_list(const std::string& s, const std::string& key, std::vector<int> def) const {
    auto v = get(s, key);
    if (!v) return def;
    std::vector<int> out;
    for (const auto& part : io::split(*v))
      if (!part.empty()) out.push_back(static_cast<int>(to_integer(s, key, part)));
    return out;
  }

  // Relative paths are taken from the config file's directory.
  std::optional<std::filesystem::path> path(const std::string& s, const std::string& key) const {
    auto v = get(s, key);
    if (!v) return std::nullopt;
    std::filesystem::path p(*v);
    return p.is_absolute() || base_.empty() ? p : base_ / p;
  }

  std::filesystem::path existing_path(const std::string& s, const std::string& key) const {
    auto p = path(s, key);
    if (!p) throw ValidationError("config is missing [" + s + "] " + key);
    if (!std::filesystem::exists(*p)) throw ValidationError("[" + s + "] " + key + ": no such file " + p->string());
    return *p;
  }

  // Every key in the listed sections must have been read; catches typos.
  void reject_unknown(const std::vector<std::string>& sections) const {
    for (const auto& s : sections) {
      auto it = values_.find(s);
      if (it == values_.end()) continue;
      for (const auto& [k, v] : it->second)
        if (!used_[s].count(k)) throw ValidationError("unknown config key [" + s + "] " + k);
    }
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  static double to_double(const std::string& s, const std::string& key, const std::string& v) {
    try {
      return io::parse_double(v);
    } catch (const ValidationError&) {
      throw ValidationError("[" + s + "] " + key + ": not a number '" + v + "'");
    }
  }

  static long long to_integer(const std::string& s, const std::string& key, const std::string& v) {
    long long out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
      throw ValidationError("[" + s + "] " + key + ": not an integer '" + v + "'");
    return out;
  }

  std::map<std::string, std::map<std::string, std::string>> values_;
  mutable std::map<std::string, std::set<std::string>> used_;
  std::filesystem::path base_;
};

}  // namespace quadratomo::config
