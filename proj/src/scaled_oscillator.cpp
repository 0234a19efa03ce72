#include "grushin/scaled_oscillator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "grushin/errors.hpp"
#include "slice_ops.hpp"

namespace grushin {

void XiSlice::validate() const {
  if (!(xi_mag > 0.0) || !std::isfinite(xi_mag)) throw DomainError("xi slice: |xi| must be positive");
  if (d1 < 1 || d1 > 3) throw ContractError("xi slice: d1 must be 1, 2 or 3");
  if (K_max < 0) throw ContractError("xi slice: negative level cap");
}

double phi_xi_eval(const MultiIndex& nu, double xi_mag, std::span<const double> x) {
  if (!(xi_mag > 0.0)) throw DomainError("phi_xi_eval: |xi| must be positive");
  std::vector<double> u(x.begin(), x.end());
  double s = std::sqrt(xi_mag);
  for (auto& v : u) v *= s;
  return std::pow(xi_mag, x.size() / 4.0) * phi_eval(nu, u);
}

std::vector<cplx> level_factors(const MultiplierProfile& F, double xi, int d1, int K_max,
                                double lambda_max) {
  const double top = std::min(lambda_max, F.active_upper());
  std::vector<cplx> mult;
  double peak = 0.0;
  int last = -1;
  for (int k = 0;; ++k) {
    double lam = (2.0 * k + d1) * xi;
    if (lam > top) break;
    cplx v = F(lam);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw DomainError("multiplier is not finite at lambda = " + std::to_string(lam));
    if (k > K_max) {
      if (v != 0.0 && (F.compact() || std::abs(v) > 1e-14 * peak))
        throw TruncationError("active level " + std::to_string(k) + " at |xi| = " +
                                  std::to_string(xi) + " exceeds K_max = " + std::to_string(K_max),
                              k, xi);
      continue;
    }
    mult.push_back(v);
    peak = std::max(peak, std::abs(v));
    if (v != 0.0) last = k;
  }
  mult.resize(last + 1);
  return mult;
}

PrimeField apply_multiplier_oscillator(const MultiplierProfile& F, const XiSlice& slice,
                                       const PrimeField& f) {
  slice.validate();
  f.grid.validate();
  if (f.grid.d1 != slice.d1) throw ContractError("apply_multiplier_oscillator: dimension mismatch");
  auto mult = level_factors(F, slice.xi_mag, slice.d1, slice.K_max,
                            std::numeric_limits<double>::infinity());
  PrimeField out = f;
  if (mult.empty()) {
    std::fill(out.values.begin(), out.values.end(), 0.0);
    return out;
  }
  const int K = int(mult.size()) - 1;
  auto B = detail::slice_basis(f.grid, slice.xi_mag, K);
  int bad = detail::first_unresolved_level(B, f.grid.spacing(), kGramTolerance);
  if (bad <= K)
    throw TruncationError("level " + std::to_string(bad) + " at |xi| = " +
                              std::to_string(slice.xi_mag) + " is not resolved by the x' grid",
                          bad, slice.xi_mag);
  detail::apply_levels(B, f.grid.spacing(), f.grid.d1, mult, out.values);
  return out;
}

namespace {

double level_diag_sup(int k, int d1) {
  // the diagonal of the level kernel is radial
  auto diag = [&](double r) {
    std::vector<double> x(d1, 0.0);
    x[0] = r;
    return projection_kernel(k, x, x);
  };
  double rmax = std::sqrt(2.0 * k + d1) + 4.0;
  int n = 400 + 40 * int(std::sqrt(double(k)) + 1);
  double best = -1.0, br = 0.0;
  for (int i = 0; i <= n; ++i) {
    double r = rmax * i / n;
    double v = diag(r);
    if (v > best) {
      best = v;
      br = r;
    }
  }
  // golden-section refinement around the best sample
  double lo = std::max(0.0, br - rmax / n), hi = std::min(rmax, br + rmax / n);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = diag(c), fd = diag(d);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = diag(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = diag(d);
    }
  }
  return std::max({best, fc, fd});
}

}  // namespace

NormEstimate restriction_norm_level(int k, double xi_mag, double p, int d1) {
  if (!(p >= 1.0 && p <= 2.0)) throw DomainError("restriction_norm_level: p must lie in [1, 2]");
  if (!(xi_mag > 0.0)) throw DomainError("restriction_norm_level: |xi| must be positive");
  if (p != 1.0)
    throw ContractError("restriction_norm_level: p > 1 needs a grid for the power iteration");
  NormEstimate e;
  e.method = "kernel_diagonal_sup";
  e.certificate = Certificate::exact;
  e.value = std::pow(xi_mag, d1 / 4.0) * std::sqrt(level_diag_sup(k, d1));
  return e;
}

NormEstimate restriction_norm_level(int k, double xi_mag, double p, const PrimeGrid& grid,
                                    const OpNormOptions& opt) {
  if (p == 1.0) return restriction_norm_level(k, xi_mag, p, grid.d1);
  if (!(p > 1.0 && p <= 2.0)) throw DomainError("restriction_norm_level: p must lie in [1, 2]");
  grid.validate();
  auto F = MultiplierProfile::indicator((2.0 * k + grid.d1) * xi_mag, (2.0 * k + grid.d1) * xi_mag);
  XiSlice slice{xi_mag, grid.d1, k};
  LinearOperator A;
  A.dim_in = A.dim_out = grid.size();
  A.w_in = A.w_out = grid.weight();
  A.apply = [&](const cvec& x, cvec& y) {
    PrimeField f(grid);
    f.values = x;
    y = apply_multiplier_oscillator(F, slice, f).values;
  };
  return op_norm(A, p, 2.0, opt);
}

double weighted_oscillator_check(const PrimeField& f, const XiSlice& slice, double gamma) {
  slice.validate();
  if (!(gamma >= 0.0)) throw DomainError("weighted_oscillator_check: gamma must be non-negative");
  const PrimeGrid& g = f.grid;
  double num = 0.0;
  std::size_t stride0 = g.size();
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    double r2 = 0.0;
    std::size_t stride = stride0;
    for (int ax = 0; ax < g.d1; ++ax) {
      stride /= g.n;
      double x = g.point(int((idx / stride) % g.n));
      r2 += x * x;
    }
    double w = gamma == 0.0 ? 1.0 : std::pow(r2, gamma);
    num += w * std::norm(f.values[idx]);
  }
  num = std::sqrt(num * g.weight());
  // spectral side: sum over levels of lambda^gamma |P_k f|^2, scaled by xi^{-2 gamma}
  double den = 0.0;
  for (int k = 0; k <= slice.K_max; ++k) {
    auto F = MultiplierProfile::indicator(slice.eigenvalue(k), slice.eigenvalue(k));
    double pk = apply_multiplier_oscillator(F, slice, f).norm();
    den += std::pow(slice.eigenvalue(k), gamma) * pk * pk;
  }
  den = std::pow(slice.xi_mag, -gamma) * std::sqrt(den);
  if (den == 0.0) throw DegenerateInputError("weighted_oscillator_check: zero input");
  return num / den;
}

OscillatorNorms oscillator_norms_1d(std::span<const double> a) {
  const std::size_t n = a.size();
  // u h_n = sqrt((n+1)/2) h_{n+1} + sqrt(n/2) h_{n-1}
  auto mul_u = [](const std::vector<double>& c) {
    std::vector<double> out(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      out[k + 1] += std::sqrt((k + 1) / 2.0) * c[k];
      if (k > 0) out[k - 1] += std::sqrt(k / 2.0) * c[k];
    }
    return out;
  };
  auto l2 = [](const std::vector<double>& c) {
    double s = 0.0;
    for (double v : c) s += v * v;
    return std::sqrt(s);
  };
  std::vector<double> c(a.begin(), a.end());
  OscillatorNorms r;
  auto uc = mul_u(c);
  r.u_f = l2(uc);
  r.u2_f = l2(mul_u(uc));
  double hh = 0.0, h = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double lam = 2.0 * k + 1.0;
    hh += lam * c[k] * c[k];
    h += lam * lam * c[k] * c[k];
  }
  r.h_half_f = std::sqrt(hh);
  r.h_f = std::sqrt(h);
  return r;
}

}  // namespace grushin
