#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace grushin {

inline constexpr const char* kVersion = "grushin 1.0.0";

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
};

// Exit status: 0 success, 2 invalid configuration, 3 truncation or aliasing,
// 1 anything else. Errors are also written as one JSON line to `err`.
int run_experiment(const std::string& config_path, const RunOverrides& ov, std::ostream& out,
                   std::ostream& err);

void list_experiments(std::ostream& out);

}  // namespace grushin
