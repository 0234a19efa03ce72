#pragma once

#include <stdexcept>
#include <string>

namespace grushin {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A spectral mode that should be active is not representable with the
// configured level cap or grid.
struct TruncationError : std::runtime_error {
  int level;
  double xi;
  TruncationError(const std::string& what, int k, double x)
      : std::runtime_error(what), level(k), xi(x) {}
};

// The torus or box is too small for the requested kernel support.
struct AliasingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WindowingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DiscretizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace grushin
