#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "grushin/hermite.hpp"
#include "grushin/point.hpp"
#include "grushin/profile.hpp"

namespace grushin {

struct Dims {
  int d1 = 2;
  int d2 = 1;
  int Q() const { return d1 + 2 * d2; }
  int D() const { return std::max(d1 + d2, 2 * d2); }
  void validate() const;
};

enum class XiZeroMode { fourier_multiplier, drop };
XiZeroMode parse_xi_zero_mode(const std::string& s);
std::string to_string(XiZeroMode m);

struct SpectralTruncation {
  int K_max = 64;
  double lambda_max = 1e3;
  XiZeroMode xi_zero_mode = XiZeroMode::fourier_multiplier;
  void validate() const;
};

// x' box [-X, X)^d1 times the x'' torus [-S, S)^d2.
struct GrushinGrid {
  PrimeGrid prime;
  double S = 1.0;
  int n_second = 2;
  int d2 = 1;

  Dims dims() const { return {prime.d1, d2}; }
  std::size_t prime_size() const { return prime.size(); }
  std::size_t second_size() const;
  std::size_t size() const { return prime_size() * second_size(); }
  double second_spacing() const { return 2.0 * S / n_second; }
  double second_point(int j) const { return -S + j * second_spacing(); }
  double cell_volume() const;
  double xi_unit() const;
  // Largest |xi| per axis represented by the DFT band.
  double xi_band() const;
  // Signed lattice index of DFT index m in [0, n_second).
  int signed_index(int m) const { return m <= n_second / 2 ? m : m - n_second; }
  // |xi| for a flat x'' DFT index.
  double xi_mag(std::size_t flat) const;
  std::vector<int> prime_index(std::size_t ip) const;
  std::vector<int> second_index(std::size_t is) const;
  MetricPoint point(std::size_t ip, std::size_t is) const;
  std::vector<double> prime_point(std::size_t ip) const;
  // Flat indices of a grid point; throws ContractError if off-grid.
  std::pair<std::size_t, std::size_t> locate(const MetricPoint& y) const;
  void validate() const;
};

// Values stored row-major with the x' index outermost: values[ip * second_size() + is].
struct Field {
  GrushinGrid grid;
  std::vector<cplx> values;

  Field() = default;
  explicit Field(const GrushinGrid& g) : grid(g), values(g.size()) {}
  cplx& at(std::size_t ip, std::size_t is) { return values[ip * grid.second_size() + is]; }
  cplx at(std::size_t ip, std::size_t is) const { return values[ip * grid.second_size() + is]; }
  double norm(double p = 2.0) const;
  double sup_norm() const;
};

double inner(const Field& f, const Field& g);  // real part of the cell-weighted pairing
cplx inner_complex(const Field& f, const Field& g);
double distance(const Field& f, const Field& g);

// Slices f^(x', xi), stored with the xi index outermost: data[is * prime_size() + ip].
struct PartialFourier {
  GrushinGrid grid;
  std::vector<cplx> data;
  cplx* slice(std::size_t m) { return data.data() + m * grid.prime_size(); }
  const cplx* slice(std::size_t m) const { return data.data() + m * grid.prime_size(); }
  // Sum over xi of the x'-L2 norms squared.
  double norm_sq() const;
};

PartialFourier partial_fourier(const Field& f);
Field inverse_partial_fourier(const PartialFourier& pf);

// Rejects configurations whose xi lattice or truncation cannot carry the
// active spectral range of F.
void check_spectral_coverage(const MultiplierProfile& F, const GrushinGrid& g,
                             const SpectralTruncation& trunc);

Field apply_multiplier(const MultiplierProfile& F, const Field& f, const SpectralTruncation& trunc);
Field heat_apply(double t, const Field& f, const SpectralTruncation& trunc);
Field bochner_riesz_apply(double t, double delta, const Field& f, const SpectralTruncation& trunc);
Field wave_cosine_apply(double s, const Field& f, const SpectralTruncation& trunc);

// Point mass at a grid point divided by the cell volume.
Field grid_delta(const GrushinGrid& g, std::size_t ip, std::size_t is);

// Slices g_xi(x') of the kernel column at y' for a real profile; the column is
// (2S)^{-d2} sum_xi g_xi(x') exp(i xi (x'' - y'')).
class KernelSlices {
 public:
  // y' is the x' grid point with flat index ip_y.
  KernelSlices(const GrushinGrid& g, const MultiplierProfile& F, const SpectralTruncation& trunc,
               std::size_t ip_y);

  const GrushinGrid& grid() const { return grid_; }
  // int |column|^2 w(x') dx over the grid, by Parseval in x''.
  double l2_sq(const std::function<double(std::size_t)>& weight = {}) const;
  // Real column values for x' rows [ip0, ip0 + count), all x'', with the pole
  // at x'' index is_y. out holds count * second_size() values.
  void synthesize_rows(std::size_t ip0, std::size_t count, std::size_t is_y, double* out) const;
  std::vector<double> synthesize(std::size_t is_y) const;
  // Streams the column in blocks of x' rows.
  void for_each_block(std::size_t rows, std::size_t is_y,
                      const std::function<void(std::size_t ip0, std::size_t count,
                                               const double* block)>& fn) const;

 private:
  struct Level {
    double xi = 0.0;
    std::vector<double> G;  // F at the eigenvalues of levels 0..K
  };
  GrushinGrid grid_;
  std::vector<double> y_;
  std::size_t half_size_ = 0;
  std::vector<Level> levels_;
  std::vector<std::ptrdiff_t> level_of_half_;  // -1: zero mode, -2: empty
  std::vector<double> mult_;                   // multiplicity of each half-spectrum entry
  std::vector<double> zero_slice_;
  std::vector<std::vector<double>> cache_;     // full slices per level, when small
  // Slices of every level on first-axis x' indices [a0, a0 + na).
  std::vector<std::vector<double>> level_rows(std::size_t a0, std::size_t na) const;
  std::size_t block_extent() const;
};

Field schwartz_kernel_column(const MultiplierProfile& F, const GrushinGrid& g, std::size_t ip,
                             std::size_t is, const SpectralTruncation& trunc);
Field schwartz_kernel_column(const MultiplierProfile& F, const GrushinGrid& g,
                             const MetricPoint& y, const SpectralTruncation& trunc);

// Relative L2 gap between a fourth-order finite-difference L and the spectral
// action of lambda on f.
double fd_conjugation_residual(const Field& f, const SpectralTruncation& trunc);

// Little-endian snapshot: magic, version, d1, d2, n_prime, n_second, X, S,
// count, then (re, im) pairs in storage order.
void save_field(const Field& f, std::ostream& os);
Field load_field(std::istream& is);
void save_field(const Field& f, const std::string& path);
Field load_field(const std::string& path);

}  // namespace grushin
