#include "grushin/cutoffs.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "fft.hpp"
#include "grushin/errors.hpp"

namespace grushin {

namespace {

double expinv(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

// bump in log2 coordinates on (1/4, 1)
double eta_raw(double lam, double a) {
  if (!(lam > 0.25 && lam < 1.0)) return 0.0;
  double u = std::log2(lam) + 1.0;
  return std::exp(-a / (1.0 - u * u));
}

}  // namespace

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double a = expinv(u), b = expinv(1.0 - u);
  return a / (a + b);
}

double bump(double lam, double lo, double hi) {
  if (!(lam > lo && lam < hi)) return 0.0;
  double u = (2.0 * lam - lo - hi) / (hi - lo);
  return std::exp(-1.0 / (1.0 - u * u));
}

MultiplierProfile smooth_bump(double lo, double hi) {
  if (!(lo >= 0.0 && hi > lo)) throw DomainError("smooth_bump: need 0 <= lo < hi");
  return MultiplierProfile::from_function([lo, hi](double l) { return cplx(bump(l, lo, hi)); },
                                          lo, hi, "bump");
}

double CutoffSpec::eta(double lam) const {
  double g = eta_raw(lam, sharpness);
  if (g == 0.0) return 0.0;
  // the denominator is invariant under lam -> 2 lam
  double n = std::floor(std::log2(lam));
  double den = 0.0;
  for (int j = -1; j <= 3; ++j) den += eta_raw(std::ldexp(lam, -int(n) - 2 + j), sharpness);
  return g / den;
}

double CutoffSpec::eta0(double lam) const {
  if (lam <= 0.25) return 1.0;
  if (lam >= 1.0) return 0.0;
  return eta(lam) + eta(2.0 * lam);
}

double CutoffSpec::eta_level(int level, double lam) const {
  if (level < 0) throw ContractError("eta_level: negative level");
  return level == 0 ? eta0(lam) : eta(std::ldexp(lam, -level));
}

double CutoffSpec::psi(double lam) const {
  if (!(lam > 0.0)) return 0.0;
  double v = std::log2(lam);
  return smooth_step(v + 4.0) * smooth_step(2.0 - v);
}

double CutoffSpec::phi_br(double u) const { return smooth_step(4.0 * (0.5 - std::abs(u))); }

std::vector<double> CutoffSpec::sample_eta(double lo, double hi, int n) const {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = eta(lo + (hi - lo) * i / std::max(n - 1, 1));
  return out;
}

double sobolev_norm(const std::vector<double>& samples, double step, double s) {
  if (!(s >= 0.0)) throw DomainError("sobolev_norm: order must be non-negative");
  if (samples.size() < 2 || !(step > 0.0)) throw ContractError("sobolev_norm: bad sampling");
  double peak = 0.0;
  for (double v : samples) peak = std::max(peak, std::abs(v));
  double edge = std::max(std::abs(samples.front()), std::abs(samples.back()));
  if (edge >= 1e-12 * std::max(1.0, peak))
    throw WindowingError("sobolev_norm: profile has not decayed at the sampling window edge");
  const int n = int(samples.size());
  std::vector<cplx> buf(samples.begin(), samples.end());
  detail::fft_inplace(buf.data(), {n}, FFTW_FORWARD);
  const double dtau = 2.0 * std::numbers::pi / (n * step);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    int ks = k <= n / 2 ? k : k - n;
    double tau = dtau * ks;
    acc += std::pow(1.0 + tau * tau, s) * std::norm(buf[k]);
  }
  return std::sqrt(acc * step / n);
}

double sobolev_norm(const MultiplierProfile& F, double lo, double hi, int n, double s) {
  std::vector<double> v(n);
  double step = (hi - lo) / n;
  for (int i = 0; i < n; ++i) v[i] = F(lo + i * step).real();
  return sobolev_norm(v, step, s);
}

std::vector<MultiplierProfile> dyadic_pieces(const MultiplierProfile& F, const CutoffSpec& cut,
                                             int levels, const DyadicOptions& opt) {
  if (levels < 0) throw ContractError("dyadic_pieces: negative level count");
  if (!F.real_valued) throw ContractError("dyadic_pieces: real profiles only");
  if (F.a < 0.25 - 1e-14 || F.b > 1.0 + 1e-14)
    throw DomainError("dyadic_pieces: profile must be supported in [1/4, 1]");
  if (!(opt.keep > 1.0 && opt.keep <= opt.window)) throw ContractError("dyadic_pieces: bad window");
  const double h = std::ldexp(1.0, -opt.log2_inverse_step);
  const std::size_t n = std::size_t(std::llround(2.0 * opt.window / h));
  const std::size_t nkeep = std::size_t(opt.keep / h) + 3;
  // even extension, index i <-> lambda = i h (mod n)
  std::vector<cplx> spec(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double lam = (i <= n / 2 ? double(i) : double(n) - double(i)) * h;
    spec[i] = F(lam).real();
  }
  detail::fft_inplace(spec.data(), {int(n)}, FFTW_FORWARD);
  const double dtau = 2.0 * std::numbers::pi / (double(n) * h);
  std::vector<MultiplierProfile> out;
  std::vector<cplx> buf(n);
  for (int l = 0; l <= levels; ++l) {
    for (std::size_t k = 0; k < n; ++k) {
      double tau = dtau * double(k <= n / 2 ? k : n - k);
      buf[k] = spec[k] * (cut.eta_level(l, tau) / double(n));
    }
    detail::fft_inplace(buf.data(), {int(n)}, FFTW_BACKWARD);
    auto samples = std::make_shared<std::vector<double>>(nkeep);
    for (std::size_t i = 0; i < nkeep; ++i) (*samples)[i] = buf[i].real();
    const double keep = opt.keep;
    auto eval = [samples, h, keep](double lam) -> cplx {
      lam = std::abs(lam);
      if (lam > keep) return 0.0;
      double u = lam / h;
      auto i = std::ptrdiff_t(std::floor(u));
      double f = u - double(i);
      auto at = [&](std::ptrdiff_t j) { return (*samples)[std::size_t(std::abs(j))]; };
      double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
      // cubic Lagrange through i-1, i, i+1, i+2
      return -f * (f - 1) * (f - 2) / 6 * p0 + (f + 1) * (f - 1) * (f - 2) / 2 * p1 -
             (f + 1) * f * (f - 2) / 2 * p2 + (f + 1) * f * (f - 1) / 6 * p3;
    };
    auto p = MultiplierProfile::from_function(eval, 0.0, keep, "dyadic_piece_" + std::to_string(l));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace grushin
