#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace grushin {

using MultiIndex = std::vector<int>;
using cplx = std::complex<double>;

// Normalized Hermite function h_n(u).
double hermite_eval(int n, double u);

// Writes h_0(u), ..., h_K(u) into out[0..K]. The recurrence carries a
// separate exponent so large u and K neither underflow nor overflow early.
void hermite_table(int K, double u, double* out);
std::vector<double> hermite_table(int K, double u);

struct HermiteLevel {
  int k = 0;
  int d1 = 1;
  double eigenvalue() const { return 2.0 * k + d1; }
  long multiplicity() const;
};

// Multi-indices of length d1 with |nu| = k, lexicographic order.
std::vector<MultiIndex> multiindex_enum(int d1, int k);

double phi_eval(const MultiIndex& nu, std::span<const double> x);

// Sum over |nu| = k of Phi_nu(x) Phi_nu(y).
double projection_kernel(int k, std::span<const double> x, std::span<const double> y);

// Uniform grid on [-X, X)^d1.
struct PrimeGrid {
  double X = 1.0;
  int n = 1;
  int d1 = 1;
  double margin = 6.0;

  double spacing() const { return 2.0 * X / n; }
  double weight() const;
  double point(int i) const { return -X + i * spacing(); }
  std::size_t size() const;
  // Largest level whose turning point plus margin fits inside the box and
  // below the grid Nyquist frequency; -1 if none.
  int reliable_cap() const;
  void validate() const;

  // Box sized by X = sqrt(2 K_max + d1) + margin.
  static PrimeGrid for_level_cap(int K_max, int d1, int n, double margin = 6.0);
};

struct PrimeField {
  PrimeGrid grid;
  std::vector<cplx> values;

  explicit PrimeField(const PrimeGrid& g) : grid(g), values(g.size()) {}
  double norm() const;
};

// Samples Phi_nu on the grid.
PrimeField sample_phi(const PrimeGrid& g, const MultiIndex& nu);

PrimeField project_onto_level(const PrimeField& f, int k);

// Fitted envelope sum_{|nu|=k} Phi_nu(x)^2 <= C exp(-c |x|^2) on |x|^2 >= 2(2k+d1).
struct DecayFit {
  double c = 0.0;
  double C = 0.0;
  int samples = 0;
};
DecayFit fit_level_decay(int k, int d1, int samples = 200);

}  // namespace grushin
