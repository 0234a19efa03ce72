#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "grushin/cutoffs.hpp"
#include "grushin/engine.hpp"
#include "grushin/opnorm.hpp"
#include "grushin/point.hpp"

namespace grushin {

struct ScalingReport {
  std::vector<double> abscissae;
  std::vector<double> norms;
  double fitted_slope = 0.0;
  double slope_stderr = 0.0;
  double predicted_slope = 0.0;
  double residual_max = 0.0;
  double intercept = 0.0;
  std::vector<std::string> certificates;
  std::string to_json() const;
};

// Least squares of log(norm) against log(abscissa).
ScalingReport fit_scaling(const std::vector<double>& abscissae, const std::vector<double>& norms,
                          double predicted_slope);

// Representatives of the x' grid points under axis permutations and the
// reflections i <-> n - i. Columns related by these maps differ only by the
// values on the box face x_i = -X.
std::vector<std::size_t> prime_representatives(const PrimeGrid& g);

// Norms ||(|x'|^gamma) K(., y)||_q for one kernel column, one entry per
// gamma; q is 1 or 2. The pole sits at x'' index 0.
std::vector<double> column_norms(const KernelSlices& ks, double q, const std::vector<double>& gammas);

// max over the listed y' of column_norms, i.e. the L^1 -> L^q norm of
// w_gamma F(L) restricted to inputs supported at those points.
struct ColumnMax {
  std::vector<double> value;        // per gamma
  std::vector<std::size_t> argmax;  // flat x' index per gamma
};
ColumnMax column_max(const MultiplierProfile& F, const GrushinGrid& g,
                     const SpectralTruncation& trunc, const std::vector<std::size_t>& ys, double q,
                     const std::vector<double>& gammas);

// Black-box operator on grid fields, weighted by the cell volume.
LinearOperator field_operator(const GrushinGrid& g, std::function<Field(const Field&)> apply,
                              std::function<Field(const Field&)> adjoint = {});

// L^p -> L^q norm: p = 1 exact by columns of the black box, otherwise a
// lower bound by duality-map power iteration.
NormEstimate op_norm(const GrushinGrid& g, const std::function<Field(const Field&)>& apply,
                     double p, double q, const OpNormOptions& opt = {});

// Column mass of F(L) at y' from the spectral side: sum over the xi lattice of
// the torus, xi != 0, and levels with eigenvalue in (lo, hi] of
// (2S)^{-d2} |F|^2 |Phi(y')|^2, plus the continuum xi = 0 term.
double column_spectral_mass(const MultiplierProfile& F, const GrushinGrid& g,
                            const std::vector<double>& y_prime, double lo, double hi,
                            bool include_zero_mode = true);

struct KernelSupportReport {
  int level = 0;
  double t = 0.0;
  double radius = 0.0;  // 2^level t
  std::vector<double> kappas;
  std::vector<double> inside_mass;       // grid mass of the computed column in rho <= kappa radius
  std::vector<double> outside_fraction;  // bound on the outside share of the full column mass
  double grid_mass = 0.0;                // computed column over the grid
  double retained_mass = 0.0;            // spectral mass below lambda_max
  double tail_mass = 0.0;                // spectral mass in (lambda_max, tail_factor lambda_max]
  std::string to_json() const;
};

struct KernelSupportOptions {
  std::vector<double> kappas{1.1, 1.5, 2.0};
  double tail_factor = 4.0;
};

// Column of piece(t sqrt(L)) at y (a grid point). The outside fraction for
// kappa is (sqrt(m_out) + sqrt(m_tail))^2 / (m_retained + m_tail), where
// m_out is the grid mass outside the ball plus any retained mass the box
// misses.
KernelSupportReport kernel_support_check(const MultiplierProfile& piece, int level, double t,
                                         const GrushinGrid& g, const SpectralTruncation& trunc,
                                         const MetricPoint& y,
                                         const KernelSupportOptions& opt = {});

// Largest |x'' - y''| such that rho(x, y) <= r, or -1 when |x' - y'| > r.
double second_reach(const std::vector<double>& x_prime, const MetricPoint& y, double r);

}  // namespace grushin
