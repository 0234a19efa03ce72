#include "grushin/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace grushin {

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  double v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    throw ConfigError(key, "not a number: '" + t + "'");
  return v;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(n) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(n) + ": empty key");
    if (c.values_.count(key)) throw ConfigError(key, "duplicate key");
    c.values_[key] = value;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string Config::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "missing required field");
  read_.insert(key);
  return it->second;
}

std::string Config::str(const std::string& key, const std::string& fallback) {
  if (!has(key)) values_[key] = fallback;
  return str(key);
}

double Config::num(const std::string& key) const { return parse_number(key, str(key)); }

double Config::num(const std::string& key, double fallback) {
  if (!has(key)) values_[key] = format_double(fallback);
  return num(key);
}

long Config::integer(const std::string& key) const {
  double v = num(key);
  if (v != std::floor(v) || std::fabs(v) > 9e15) throw ConfigError(key, "not an integer");
  return long(v);
}

long Config::integer(const std::string& key, long fallback) {
  if (!has(key)) values_[key] = std::to_string(fallback);
  return integer(key);
}

std::vector<double> Config::list(const std::string& key) const {
  std::string s = str(key);
  std::vector<double> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_number(key, item));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

std::vector<double> Config::list(const std::string& key, const std::vector<double>& fallback) {
  if (!has(key)) values_[key] = format_list(fallback);
  return list(key);
}

bool Config::flag(const std::string& key, bool fallback) {
  std::string v = str(key, fallback ? "true" : "false");
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key, "expected true or false");
}

std::vector<std::string> Config::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!read_.count(k)) out.push_back(k);
  return out;
}

std::string Config::resolved() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

}  // namespace grushin
