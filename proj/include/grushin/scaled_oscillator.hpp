#pragma once

#include <span>
#include <vector>

#include "grushin/hermite.hpp"
#include "grushin/opnorm.hpp"
#include "grushin/profile.hpp"

namespace grushin {

struct XiSlice {
  double xi_mag = 1.0;
  int d1 = 1;
  int K_max = 0;
  double eigenvalue(int k) const { return (2.0 * k + d1) * xi_mag; }
  void validate() const;
};

double phi_xi_eval(const MultiIndex& nu, double xi_mag, std::span<const double> x);

// Tolerance on the discrete Gram matrix of sampled slice eigenfunctions.
inline constexpr double kGramTolerance = 1e-9;

// Per-level factors F((2k+d1) xi) for k = 0..K, where K is the highest level
// that must be retained. Throws TruncationError if a level above K_max is
// active.
std::vector<cplx> level_factors(const MultiplierProfile& F, double xi, int d1, int K_max,
                                double lambda_max);

PrimeField apply_multiplier_oscillator(const MultiplierProfile& F, const XiSlice& slice,
                                       const PrimeField& f);

// p = 1: exact sup over y' of the level kernel diagonal. p in (1,2): power
// iteration lower bound on the given grid.
NormEstimate restriction_norm_level(int k, double xi_mag, double p, int d1);
NormEstimate restriction_norm_level(int k, double xi_mag, double p, const PrimeGrid& grid,
                                    const OpNormOptions& opt = {});

// ||(|x'|^gamma) f|| / ||xi^{-gamma} L_xi^{gamma/2} f||.
double weighted_oscillator_check(const PrimeField& f, const XiSlice& slice, double gamma);

// One-dimensional oscillator H = -D^2 + u^2 acting on f = sum a_n h_n; all
// norms computed exactly in coefficient space.
struct OscillatorNorms {
  double u_f = 0.0;       // ||u f||
  double h_half_f = 0.0;  // ||H^{1/2} f||
  double u2_f = 0.0;      // ||u^2 f||
  double h_f = 0.0;       // ||H f||
};
OscillatorNorms oscillator_norms_1d(std::span<const double> coeffs);

}  // namespace grushin
