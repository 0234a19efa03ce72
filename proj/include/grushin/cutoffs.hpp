#pragma once

#include <vector>

#include "grushin/profile.hpp"

namespace grushin {

// 0 for u <= 0, 1 for u >= 1, built from exp(-1/u).
double smooth_step(double u);

// exp(-1/(1-u^2)) on (-1, 1) with u the affine image of lambda, zero elsewhere.
double bump(double lam, double lo, double hi);
MultiplierProfile smooth_bump(double lo, double hi);

struct CutoffSpec {
  // a in exp(-a / (1 - u^2)) for the log-coordinate bump behind eta
  double sharpness = 4.0;

  // supported in [1/4, 1]; sum over l in Z of eta(2^{-l} lam) is 1 for lam > 0
  double eta(double lam) const;
  // 1 - sum_{l>0} eta(2^{-l} lam)
  double eta0(double lam) const;
  double eta_level(int level, double lam) const;
  // supported in (1/16, 4), 1 on [1/8, 2]
  double psi(double lam) const;
  // supported in [-1/2, 1/2], 1 on [-1/4, 1/4]
  double phi_br(double u) const;
  std::vector<double> sample_eta(double lo, double hi, int n) const;
};

// ||(1 + tau^2)^{s/2} F^||_2 with continuum normalization, for samples
// F(lo + i step).
double sobolev_norm(const std::vector<double>& samples, double step, double s);
double sobolev_norm(const MultiplierProfile& F, double lo, double hi, int n, double s);

struct DyadicOptions {
  double window = 512.0;  // the even extension is sampled on [-window, window)
  int log2_inverse_step = 11;
  double keep = 256.0;    // pieces are stored and evaluated on [0, keep]
};

// F^(0), ..., F^(L): F^(l) = (1/pi) int eta_l(tau) F^(tau) cos(tau lam) dtau
// for the even extension of F. Each piece is real and even; profiles are
// cubic interpolants of the FFT samples and vanish beyond `keep`.
std::vector<MultiplierProfile> dyadic_pieces(const MultiplierProfile& F, const CutoffSpec& cut,
                                             int levels, const DyadicOptions& opt = {});

}  // namespace grushin
