#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace grushin {

using cplx = std::complex<double>;

// A spectral function F(lambda), lambda >= 0, with support metadata.
struct MultiplierProfile {
  std::function<cplx(double)> eval;
  double a = 0.0;
  double b = std::numeric_limits<double>::infinity();
  std::string label;
  bool real_valued = true;

  cplx operator()(double lam) const;
  bool compact() const { return b < std::numeric_limits<double>::infinity(); }
  // Upper end of the spectral range where modes must be retained; the
  // effective cutoff for profiles of unbounded support.
  double active_upper() const;
  double cutoff = std::numeric_limits<double>::infinity();

  static MultiplierProfile from_function(std::function<cplx(double)> f, double a, double b,
                                         std::string label, bool real = true);
  static MultiplierProfile constant(double c, double a, double b);
  static MultiplierProfile indicator(double a, double b);
  static MultiplierProfile heat(double t);
  static MultiplierProfile wave_cosine(double s);
  // max(0, 1 - t lambda)^delta
  static MultiplierProfile bochner_riesz(double t, double delta);
  static MultiplierProfile power(double exponent, double a, double b);

  MultiplierProfile times(const MultiplierProfile& g) const;
  // lambda -> F(R lambda)
  MultiplierProfile dilate(double R) const;
  std::vector<double> sample(double lo, double hi, int n) const;
};

}  // namespace grushin
