#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grushin/estimate_lab.hpp"
#include "grushin/geometry.hpp"

namespace grushin {

struct NormRow {
  double R = 0.0;       // spectral scale (or t for multiplier sweeps)
  double gamma = 0.0;
  double y_abs = 0.0;   // |y'| for localized rows
  double delta = 0.0;
  double norm = 0.0;
  Certificate certificate = Certificate::exact;
  std::size_t argmax = 0;  // flat x' index of the maximizing column
};

// True when (p, gamma) lies in the admissible range of the weighted
// restriction estimate for these dimensions.
bool restriction_admissible(const Dims& dims, double p, double gamma);

// The profile lambda -> bump(sqrt(lambda) / R), i.e. F_R(sqrt(L)) with
// F_R = bump(./R) supported in [R/4, R].
MultiplierProfile restriction_profile(const MultiplierProfile& bump, double R);

struct RestrictionResult {
  std::vector<ScalingReport> reports;  // one per gamma
  std::vector<NormRow> rows;
};

// ||w_gamma F_R(sqrt L)||_{p->2} over R for each gamma, fitted in log-log.
// p = 1 is exact (maximum over representative columns); p in (1,2) is a
// power-iteration lower bound.
RestrictionResult weighted_restriction_experiment(const GrushinGrid& g,
                                                  const SpectralTruncation& trunc, double p,
                                                  const std::vector<double>& gammas,
                                                  const std::vector<double>& R_list,
                                                  const MultiplierProfile& bump,
                                                  const OpNormOptions& opt = {});

struct LocalizedResult {
  std::vector<ScalingReport> in_R;  // one per y, slope in R
  std::vector<ScalingReport> in_y;  // one per R, slope in |y'|
  std::vector<NormRow> rows;
};

// ||w_gamma F_R(sqrt L) P_{B(y,r)}||_{1->2}: the maximum over grid columns
// z with rho(z, y) < r. Every y needs |y'| > 4r.
LocalizedResult localized_restriction_experiment(const GrushinGrid& g,
                                                 const SpectralTruncation& trunc, double p,
                                                 double gamma, const std::vector<double>& R_list,
                                                 const std::vector<MetricPoint>& y_list, double r,
                                                 const MultiplierProfile& bump);

struct BochnerRieszResult {
  std::vector<NormRow> rows;
  std::vector<double> deltas;
  std::vector<double> max_min_ratio;  // per delta, across R
};

// ||(1 - L/R^2)_+^delta||_{p->p}. p = 1 uses the L^1 norms of the columns
// at `ys` (empty: all representatives, which makes the value exact).
BochnerRieszResult bochner_riesz_sweep(const GrushinGrid& g, const SpectralTruncation& trunc,
                                       double p, const std::vector<double>& deltas,
                                       const std::vector<double>& R_list,
                                       std::vector<std::size_t> ys = {},
                                       const OpNormOptions& opt = {});

struct MultiplierNormResult {
  std::vector<double> s_list, t_list;
  std::vector<double> sobolev;           // per s
  std::vector<NormRow> rows;             // norm of F(tL) per t (R field holds t)
  std::vector<std::vector<double>> ratio;  // [s][t]
};

MultiplierNormResult multiplier_norm_experiment(const GrushinGrid& g,
                                                const SpectralTruncation& trunc, double p,
                                                const MultiplierProfile& F,
                                                const std::vector<double>& s_list,
                                                const std::vector<double>& t_list,
                                                std::vector<std::size_t> ys = {},
                                                const OpNormOptions& opt = {});

struct HeatSample {
  double t = 0.0;
  double rho_sq_over_t = 0.0;
  double log_pv = 0.0;  // log(p_t(x, y) V(y, sqrt t))
};

struct HeatGaussianReport {
  double b = 0.0;          // decay rate, minus the fitted slope
  double log_C = 0.0;      // fitted intercept
  double r_squared = 0.0;  // fit of the binned upper envelope
  double raw_r_squared = 0.0;
  std::vector<double> diag_t;
  std::vector<double> diag_value;  // p_t(y, y) V(y, sqrt t)
  double diag_ratio = 0.0;         // max / min of diag_value
  double min_relative = 0.0;       // min p / max p over the columns
  std::size_t samples = 0;
  std::string to_json() const;
};

struct HeatGaussianOptions {
  int bins = 40;
  double rel_floor = 1e-9;     // pairs with p below this share of the column peak are skipped
  double ripple = 1e-6;
};

HeatGaussianReport heat_gaussian_check(const GrushinGrid& g, const SpectralTruncation& trunc,
                                       const std::vector<double>& t_list,
                                       const std::vector<MetricPoint>& ys,
                                       const HeatGaussianOptions& opt = {});

struct GeometrySuiteReport {
  bool interface_exact = true;
  std::uint64_t interface_points = 0;
  double quasi_triangle = 0.0;
  std::uint64_t triples = 0;
  double volume_C = 0.0;          // max over samples of max(v / model, model / v)
  double doubling_max = 0.0;      // max over samples of ratio / (1 + lambda)^Q
  std::vector<double> volume_ratio;
  std::string to_json() const;
};

struct GeometrySuiteOptions {
  std::uint64_t triples = 100000;
  std::uint64_t interface_points = 10000;
  std::uint64_t volume_samples = 200000;
  std::vector<double> x_norms{0.0, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> radii{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> lambdas{1.0, 2.0, 4.0, 8.0};
};

GeometrySuiteReport geometry_suite(const Dims& dims, std::uint64_t seed,
                                   const GeometrySuiteOptions& opt = {});

}  // namespace grushin
