#pragma once

#include <vector>

namespace grushin {

struct MetricPoint {
  std::vector<double> x_prime;
  std::vector<double> x_second;
};

}  // namespace grushin
