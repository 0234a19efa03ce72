#include "grushin/opnorm.hpp"

#include <cmath>
#include <random>

#include "grushin/errors.hpp"

namespace grushin {

std::string to_string(Certificate c) { return c == Certificate::exact ? "exact" : "lower_bound"; }

double weighted_norm(const cvec& v, double p, double w) {
  double s = 0.0;
  if (p == 2.0) {
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(w * s);
  }
  if (p == 1.0) {
    for (const auto& x : v) s += std::abs(x);
    return w * s;
  }
  for (const auto& x : v) s += std::pow(std::abs(x), p);
  return std::pow(w * s, 1.0 / p);
}

namespace {

// Norming functional of v in L^r: |v|^{r-1} sgn(v) / ||v||_r^{r-1}.
cvec duality_map(const cvec& v, double r, double w) {
  double nv = weighted_norm(v, r, w);
  cvec out(v.size());
  if (nv == 0.0) return out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double a = std::abs(v[i]);
    if (a == 0.0) continue;
    out[i] = (v[i] / a) * std::pow(a / nv, r - 1.0);
  }
  return out;
}

}  // namespace

NormEstimate op_norm(const LinearOperator& A, double p, double q, const OpNormOptions& opt) {
  if (!(p >= 1.0 && p <= 2.0)) throw DomainError("op_norm: p must lie in [1, 2]");
  if (!(q >= 1.0)) throw DomainError("op_norm: q must be at least 1");
  if (A.dim_in == 0 || !A.apply) throw ContractError("op_norm: empty operator");
  NormEstimate est;
  cvec x(A.dim_in), y(A.dim_out);
  if (p == 1.0) {
    est.method = "column_max";
    est.certificate = Certificate::exact;
    for (std::size_t j = 0; j < A.dim_in; ++j) {
      std::fill(x.begin(), x.end(), 0.0);
      x[j] = 1.0 / A.w_in;
      A.apply(x, y);
      est.value = std::max(est.value, weighted_norm(y, q, A.w_out));
    }
    est.iterations = int(A.dim_in);
    return est;
  }
  est.method = "power_iteration";
  est.certificate = Certificate::lower_bound;
  est.converged = true;
  const double pd = p / (p - 1.0);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  cvec z(A.dim_in);
  for (int r = 0; r < opt.restarts; ++r) {
    for (auto& v : x) v = {gauss(rng), gauss(rng)};
    double nx = weighted_norm(x, p, A.w_in);
    for (auto& v : x) v /= nx;
    double prev = 0.0;
    bool conv = false;
    for (int it = 0; it < opt.max_iter; ++it) {
      A.apply(x, y);
      double val = weighted_norm(y, q, A.w_out);
      est.value = std::max(est.value, val);
      ++est.iterations;
      if (val == 0.0) {
        conv = true;
        break;
      }
      if (it > 0 && std::fabs(val - prev) <= opt.tol * val) {
        conv = true;
        break;
      }
      prev = val;
      cvec g = duality_map(y, q, A.w_out);
      if (A.adjoint)
        A.adjoint(g, z);
      else
        A.apply(g, z);
      x = duality_map(z, pd, A.w_in);
    }
    est.converged = est.converged && conv;
  }
  return est;
}

}  // namespace grushin
