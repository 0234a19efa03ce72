#include "grushin/profile.hpp"

#include <cmath>
#include <sstream>

#include "grushin/errors.hpp"

namespace grushin {

cplx MultiplierProfile::operator()(double lam) const {
  if (lam < a || lam > b) return 0.0;
  return eval(lam);
}

double MultiplierProfile::active_upper() const { return std::min(b, cutoff); }

MultiplierProfile MultiplierProfile::from_function(std::function<cplx(double)> f, double a,
                                                   double b, std::string label, bool real) {
  if (!(a >= 0.0) || !(b >= a)) throw DomainError("profile support must satisfy 0 <= a <= b");
  MultiplierProfile p;
  p.eval = std::move(f);
  p.a = a;
  p.b = b;
  p.label = std::move(label);
  p.real_valued = real;
  return p;
}

MultiplierProfile MultiplierProfile::constant(double c, double a, double b) {
  std::ostringstream os;
  os << "const(" << c << ")";
  return from_function([c](double) { return cplx(c); }, a, b, os.str());
}

MultiplierProfile MultiplierProfile::indicator(double a, double b) {
  return from_function([](double) { return cplx(1.0); }, a, b, "indicator");
}

MultiplierProfile MultiplierProfile::heat(double t) {
  if (!(t > 0.0)) throw DomainError("heat: t must be positive");
  auto p = from_function([t](double l) { return cplx(std::exp(-t * l)); }, 0.0,
                         std::numeric_limits<double>::infinity(), "heat");
  // exp(-t lambda) < 1e-14 beyond this point
  p.cutoff = std::log(1e14) / t;
  return p;
}

MultiplierProfile MultiplierProfile::wave_cosine(double s) {
  if (!(s >= 0.0)) throw DomainError("wave: s must be non-negative");
  return from_function([s](double l) { return cplx(std::cos(s * std::sqrt(l))); }, 0.0,
                       std::numeric_limits<double>::infinity(), "wave_cosine");
}

MultiplierProfile MultiplierProfile::bochner_riesz(double t, double delta) {
  if (!(t > 0.0)) throw DomainError("bochner_riesz: t must be positive");
  if (!(delta >= 0.0)) throw DomainError("bochner_riesz: delta must be non-negative");
  return from_function(
      [t, delta](double l) {
        double u = 1.0 - t * l;
        if (u < 0.0) return cplx(0.0);
        return cplx(delta == 0.0 ? 1.0 : std::pow(u, delta));
      },
      0.0, 1.0 / t, "bochner_riesz");
}

MultiplierProfile MultiplierProfile::power(double exponent, double a, double b) {
  return from_function([exponent](double l) { return cplx(std::pow(l, exponent)); }, a, b,
                       "power");
}

MultiplierProfile MultiplierProfile::times(const MultiplierProfile& g) const {
  auto f = *this;
  MultiplierProfile p = from_function([f, g](double l) { return f(l) * g(l); }, std::max(a, g.a),
                                      std::max(std::max(a, g.a), std::min(b, g.b)),
                                      label + "*" + g.label, real_valued && g.real_valued);
  p.cutoff = std::min(cutoff, g.cutoff);
  return p;
}

MultiplierProfile MultiplierProfile::dilate(double R) const {
  if (!(R > 0.0)) throw DomainError("dilate: R must be positive");
  auto f = *this;
  MultiplierProfile p = from_function([f, R](double l) { return f(R * l); }, a / R, b / R,
                                      label + "(R.)", real_valued);
  p.cutoff = cutoff / R;
  return p;
}

std::vector<double> MultiplierProfile::sample(double lo, double hi, int n) const {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    double l = lo + (hi - lo) * i / (n - 1);
    out[i] = (*this)(l).real();
  }
  return out;
}

}  // namespace grushin
