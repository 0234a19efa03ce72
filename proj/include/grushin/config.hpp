#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace grushin {

// Invalid or incomplete configuration; `key` names the offending field.
struct ConfigError : std::runtime_error {
  std::string key;
  ConfigError(const std::string& k, const std::string& what)
      : std::runtime_error(k.empty() ? what : k + ": " + what), key(k) {}
};

// Flat `key = value` text. Keys may be dotted (grid.X); lists are comma
// separated; `#` starts a comment.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback);
  double num(const std::string& key) const;
  double num(const std::string& key, double fallback);
  long integer(const std::string& key) const;
  long integer(const std::string& key, long fallback);
  std::vector<double> list(const std::string& key) const;
  std::vector<double> list(const std::string& key, const std::vector<double>& fallback);
  bool flag(const std::string& key, bool fallback);

  // Keys present in the file but never read.
  std::vector<std::string> unused() const;
  // Every key, defaults included, in sorted order.
  std::string resolved() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> read_;
};

std::string format_double(double v);
std::string format_list(const std::vector<double>& v);

}  // namespace grushin
