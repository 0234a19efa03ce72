#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace grushin {

using cvec = std::vector<std::complex<double>>;

// A linear map between weighted sequence spaces, norms
// ||v||_p = (w sum |v_i|^p)^{1/p}. The adjoint is taken with respect to the
// weighted pairings; when absent the operator is treated as self-adjoint.
struct LinearOperator {
  std::size_t dim_in = 0;
  std::size_t dim_out = 0;
  double w_in = 1.0;
  double w_out = 1.0;
  std::function<void(const cvec&, cvec&)> apply;
  std::function<void(const cvec&, cvec&)> adjoint;
};

enum class Certificate { exact, lower_bound };
std::string to_string(Certificate c);

struct NormEstimate {
  double value = 0.0;
  Certificate certificate = Certificate::exact;
  bool converged = true;
  int iterations = 0;
  std::string method;
};

struct OpNormOptions {
  int restarts = 8;
  int max_iter = 300;
  double tol = 1e-12;
  std::uint64_t seed = 1;
};

double weighted_norm(const cvec& v, double p, double w);

// p = 1: exact maximum over unit point masses. Otherwise a duality-map power
// iteration with random restarts, reported as a lower bound.
NormEstimate op_norm(const LinearOperator& A, double p, double q, const OpNormOptions& opt = {});

}  // namespace grushin
