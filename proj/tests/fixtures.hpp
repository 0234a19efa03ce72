#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "grushin/engine.hpp"
#include "grushin/scaled_oscillator.hpp"

namespace fixture {

using namespace grushin;

// 64^2 x 128 grid whose xi lattice is 2Z; with lambda_max = 16 only levels
// k <= 3 are active.
inline GrushinGrid identity_grid() {
  GrushinGrid g;
  g.prime = PrimeGrid{6.0, 64, 2};
  g.S = std::numbers::pi / 2;
  g.n_second = 128;
  g.d2 = 1;
  return g;
}

inline SpectralTruncation identity_trunc() { return SpectralTruncation{3, 16.0, XiZeroMode::fourier_multiplier}; }

// Phi_nu^{xi}(x') exp(i xi x'') for the lattice index m (d2 = 1).
inline Field eigenmode(const GrushinGrid& g, const MultiIndex& nu, int m) {
  Field f(g);
  double xi = g.xi_unit() * m;
  for (std::size_t ip = 0; ip < g.prime_size(); ++ip) {
    double phi = phi_xi_eval(nu, std::fabs(xi), g.prime_point(ip));
    for (std::size_t is = 0; is < g.second_size(); ++is)
      f.at(ip, is) = phi * std::exp(std::complex<double>(0.0, xi * g.second_point(int(is))));
  }
  return f;
}

// Random combination of eigenmodes with eigenvalue <= lambda_max and xi != 0.
inline Field band_limited(const GrushinGrid& g, double lambda_max, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Field f(g);
  const int d1 = g.prime.d1;
  for (int m = -g.n_second / 2 + 1; m < g.n_second / 2; ++m) {
    if (m == 0) continue;
    double xi = g.xi_unit() * std::abs(m);
    for (int k = 0; (2.0 * k + d1) * xi <= lambda_max; ++k)
      for (const auto& nu : multiindex_enum(d1, k)) {
        std::complex<double> c(gauss(rng), gauss(rng));
        auto e = eigenmode(g, nu, m);
        for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += c * e.values[i];
      }
  }
  return f;
}

inline Field random_field(const GrushinGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Field f(g);
  for (auto& v : f.values) v = {gauss(rng), gauss(rng)};
  return f;
}

}  // namespace fixture
