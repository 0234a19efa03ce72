#include "grushin/engine.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "grushin/errors.hpp"
#include "grushin/parallel.hpp"
#include "grushin/scaled_oscillator.hpp"
#include "slice_ops.hpp"

namespace grushin {

namespace detail {

std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

void fft_inplace(std::complex<double>* data, const std::vector<int>& dims, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft(int(dims.size()), dims.data(), p, p, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

fftw_plan cached_plan_1d(int n, int sign) {
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  auto it = plans.find({n, sign});
  if (it != plans.end()) return it->second;
  auto* a = fftw_alloc_complex(std::size_t(n));
  auto* b = fftw_alloc_complex(std::size_t(n));
  fftw_plan p = fftw_plan_dft_1d(n, a, b, sign, FFTW_ESTIMATE);
  fftw_free(a);
  fftw_free(b);
  plans[{n, sign}] = p;
  return p;
}

std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b,
                                 std::size_t keep) {
  std::vector<double> out(keep, 0.0);
  if (a.empty() || b.empty() || keep == 0) return out;
  if (a.size() * b.size() <= 4096) {
    for (std::size_t i = 0; i < a.size() && i < keep; ++i)
      for (std::size_t j = 0; j < b.size() && i + j < keep; ++j) out[i + j] += a[i] * b[j];
    return out;
  }
  int L = 1;
  while (std::size_t(L) < a.size() + b.size()) L *= 2;
  std::vector<std::complex<double>> x(L, 0.0), y(L, 0.0), fx(L), fy(L);
  for (std::size_t i = 0; i < a.size(); ++i) x[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) y[i] = b[i];
  auto exec = [](fftw_plan p, std::vector<std::complex<double>>& in,
                 std::vector<std::complex<double>>& o) {
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(o.data()));
  };
  exec(cached_plan_1d(L, FFTW_FORWARD), x, fx);
  exec(cached_plan_1d(L, FFTW_FORWARD), y, fy);
  for (int i = 0; i < L; ++i) fx[i] *= fy[i];
  exec(cached_plan_1d(L, FFTW_BACKWARD), fx, x);
  for (std::size_t i = 0; i < keep && i < std::size_t(L); ++i) out[i] = x[i].real() / L;
  return out;
}

}  // namespace detail

void Dims::validate() const {
  if (d1 < 1 || d2 < 1) throw ContractError("dims: d1 and d2 must be positive");
  if (d1 > 3 || d2 > 2 || d1 + d2 > 5) throw ContractError("dims: supported range is d1 <= 3, d2 <= 2");
}

XiZeroMode parse_xi_zero_mode(const std::string& s) {
  if (s == "fourier_multiplier") return XiZeroMode::fourier_multiplier;
  if (s == "drop") return XiZeroMode::drop;
  throw ContractError("unknown xi_zero_mode '" + s + "'");
}

std::string to_string(XiZeroMode m) {
  return m == XiZeroMode::fourier_multiplier ? "fourier_multiplier" : "drop";
}

void SpectralTruncation::validate() const {
  if (K_max < 0) throw ContractError("truncation: K_max must be non-negative");
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max))
    throw ContractError("truncation: lambda_max must be positive and finite");
}

std::size_t GrushinGrid::second_size() const {
  std::size_t s = 1;
  for (int i = 0; i < d2; ++i) s *= std::size_t(n_second);
  return s;
}

double GrushinGrid::cell_volume() const { return prime.weight() * std::pow(second_spacing(), d2); }

double GrushinGrid::xi_unit() const { return std::numbers::pi / S; }

double GrushinGrid::xi_band() const { return xi_unit() * (n_second / 2); }

double GrushinGrid::xi_mag(std::size_t flat) const {
  double s2 = 0.0;
  for (int m : second_index(flat)) {
    double v = signed_index(m);
    s2 += v * v;
  }
  return xi_unit() * std::sqrt(s2);
}

std::vector<int> GrushinGrid::prime_index(std::size_t ip) const {
  std::vector<int> idx(prime.d1);
  for (int ax = prime.d1 - 1; ax >= 0; --ax) {
    idx[ax] = int(ip % prime.n);
    ip /= prime.n;
  }
  return idx;
}

std::vector<int> GrushinGrid::second_index(std::size_t is) const {
  std::vector<int> idx(d2);
  for (int ax = d2 - 1; ax >= 0; --ax) {
    idx[ax] = int(is % n_second);
    is /= n_second;
  }
  return idx;
}

std::vector<double> GrushinGrid::prime_point(std::size_t ip) const {
  std::vector<double> x;
  for (int i : prime_index(ip)) x.push_back(prime.point(i));
  return x;
}

MetricPoint GrushinGrid::point(std::size_t ip, std::size_t is) const {
  MetricPoint p;
  p.x_prime = prime_point(ip);
  for (int j : second_index(is)) p.x_second.push_back(second_point(j));
  return p;
}

std::pair<std::size_t, std::size_t> GrushinGrid::locate(const MetricPoint& y) const {
  if (int(y.x_prime.size()) != prime.d1 || int(y.x_second.size()) != d2)
    throw ContractError("point dimension does not match the grid");
  auto snap = [](double v, double lo, double h, int n) {
    double q = (v - lo) / h;
    double r = std::round(q);
    if (std::fabs(q - r) > 1e-9 || r < 0 || r >= n)
      throw ContractError("point is not on the grid");
    return std::size_t(r);
  };
  std::size_t ip = 0, is = 0;
  for (double v : y.x_prime) ip = ip * prime.n + snap(v, -prime.X, prime.spacing(), prime.n);
  for (double v : y.x_second) is = is * n_second + snap(v, -S, second_spacing(), n_second);
  return {ip, is};
}

void GrushinGrid::validate() const {
  prime.validate();
  dims().validate();
  if (!(S > 0.0) || !std::isfinite(S)) throw ContractError("grid: torus half period S must be positive");
  if (n_second < 2 || n_second % 2 != 0) throw ContractError("grid: n_second must be even and >= 2");
}

double Field::norm(double p) const {
  double s = 0.0;
  if (p == 2.0) {
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s * grid.cell_volume());
  }
  for (const auto& v : values) s += std::pow(std::abs(v), p);
  return std::pow(s * grid.cell_volume(), 1.0 / p);
}

double Field::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

cplx inner_complex(const Field& f, const Field& g) {
  if (f.values.size() != g.values.size()) throw ContractError("inner: grid mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * std::conj(g.values[i]);
  return s * f.grid.cell_volume();
}

double inner(const Field& f, const Field& g) { return inner_complex(f, g).real(); }

double distance(const Field& f, const Field& g) {
  if (f.values.size() != g.values.size()) throw ContractError("distance: grid mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) s += std::norm(f.values[i] - g.values[i]);
  return std::sqrt(s * f.grid.cell_volume());
}

double PartialFourier::norm_sq() const {
  double s = 0.0;
  for (const auto& v : data) s += std::norm(v);
  return s * grid.prime.weight();
}

namespace {

fftw_plan plan_second_axes(const GrushinGrid& g, cplx* in, cplx* out, int sign, bool to_slices) {
  std::vector<int> n(g.d2, g.n_second);
  int howmany = int(g.prime_size());
  int ms = int(g.second_size());
  auto* pi = reinterpret_cast<fftw_complex*>(in);
  auto* po = reinterpret_cast<fftw_complex*>(out);
  std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
  if (to_slices)
    return fftw_plan_many_dft(g.d2, n.data(), howmany, pi, nullptr, 1, ms, po, nullptr, howmany, 1,
                              sign, FFTW_ESTIMATE);
  return fftw_plan_many_dft(g.d2, n.data(), howmany, pi, nullptr, howmany, 1, po, nullptr, 1, ms,
                            sign, FFTW_ESTIMATE);
}

void destroy(fftw_plan p) {
  std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
  fftw_destroy_plan(p);
}

// (-1)^{sum of signed indices}
double lattice_sign(const GrushinGrid& g, std::size_t is) {
  int s = 0;
  for (int m : g.second_index(is)) s += g.signed_index(m);
  return (s % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

PartialFourier partial_fourier(const Field& f) {
  f.grid.validate();
  PartialFourier pf;
  pf.grid = f.grid;
  pf.data.assign(f.values.size(), 0.0);
  std::vector<cplx> in = f.values;
  fftw_plan plan = plan_second_axes(f.grid, in.data(), pf.data.data(), FFTW_FORWARD, true);
  fftw_execute(plan);
  destroy(plan);
  const GrushinGrid& g = f.grid;
  const double c = std::pow(2.0 * g.S, -0.5 * g.d2) * std::pow(g.second_spacing(), g.d2);
  const std::size_t np = g.prime_size();
  for (std::size_t is = 0; is < g.second_size(); ++is) {
    double s = c * lattice_sign(g, is);
    cplx* sl = pf.slice(is);
    for (std::size_t ip = 0; ip < np; ++ip) sl[ip] *= s;
  }
  return pf;
}

Field inverse_partial_fourier(const PartialFourier& pf) {
  const GrushinGrid& g = pf.grid;
  std::vector<cplx> in = pf.data;
  const double c = std::pow(2.0 * g.S, -0.5 * g.d2);
  const std::size_t np = g.prime_size();
  for (std::size_t is = 0; is < g.second_size(); ++is) {
    double s = c * lattice_sign(g, is);
    cplx* sl = in.data() + is * np;
    for (std::size_t ip = 0; ip < np; ++ip) sl[ip] *= s;
  }
  Field f(g);
  fftw_plan plan = plan_second_axes(g, in.data(), f.values.data(), FFTW_BACKWARD, false);
  fftw_execute(plan);
  destroy(plan);
  return f;
}

void check_spectral_coverage(const MultiplierProfile& F, const GrushinGrid& g,
                             const SpectralTruncation& trunc) {
  g.validate();
  trunc.validate();
  double top = std::min(trunc.lambda_max, F.active_upper());
  if (g.prime.d1 * g.xi_band() < top)
    throw AliasingError("xi lattice band " + std::to_string(g.xi_band()) +
                        " cannot carry the spectral range up to " + std::to_string(top) +
                        "; increase n_second");
}

namespace {

void apply_zero_mode(const MultiplierProfile& F, const PrimeGrid& pg, double top, cplx* slice) {
  detail::padded_laplacian_multiplier(slice, pg.n, pg.d1, pg.spacing(), [&](double k2) {
    return k2 <= top ? F(k2) : cplx(0.0);
  });
}

long lattice_key(const GrushinGrid& g, std::size_t is) {
  long s = 0;
  for (int m : g.second_index(is)) {
    long v = g.signed_index(m);
    s += v * v;
  }
  return s;
}

struct SliceOp {
  std::vector<cplx> mult;
  detail::RowMat B;
};

}  // namespace

Field apply_multiplier(const MultiplierProfile& F, const Field& f, const SpectralTruncation& trunc) {
  f.grid.validate();
  trunc.validate();
  const GrushinGrid& g = f.grid;
  const int d1 = g.prime.d1;
  const double h = g.prime.spacing();
  const double top = std::min(trunc.lambda_max, F.active_upper());
  for (int i = 0; i <= 4096; ++i) {
    double lam = top * i / 4096.0;
    cplx v = F(lam);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw DomainError("multiplier is not finite at lambda = " + std::to_string(lam));
  }
  PartialFourier pf = partial_fourier(f);

  // one basis per distinct |xi|
  std::map<long, SliceOp> ops;
  for (std::size_t is = 0; is < g.second_size(); ++is) {
    long key = lattice_key(g, is);
    if (key == 0 || ops.count(key)) continue;
    SliceOp op;
    op.mult = level_factors(F, g.xi_mag(is), d1, trunc.K_max, trunc.lambda_max);
    ops.emplace(key, std::move(op));
  }
  std::vector<std::pair<long, SliceOp*>> todo;
  for (auto& [key, op] : ops)
    if (!op.mult.empty()) todo.push_back({key, &op});
  parallel_for(todo.size(), [&](std::size_t i) {
    long key = todo[i].first;
    SliceOp& op = *todo[i].second;
    double xi = g.xi_unit() * std::sqrt(double(key));
    int K = int(op.mult.size()) - 1;
    op.B = detail::slice_basis(g.prime, xi, K);
    int bad = detail::first_unresolved_level(op.B, h, kGramTolerance);
    if (bad <= K)
      throw TruncationError("level " + std::to_string(bad) + " at |xi| = " + std::to_string(xi) +
                                " is not resolved by the x' grid",
                            bad, xi);
  });

  const std::size_t np = g.prime_size();
  parallel_for(g.second_size(), [&](std::size_t is) {
    cplx* sl = pf.slice(is);
    long key = lattice_key(g, is);
    if (key == 0) {
      if (trunc.xi_zero_mode == XiZeroMode::drop)
        std::fill(sl, sl + np, cplx(0.0));
      else
        apply_zero_mode(F, g.prime, top, sl);
      return;
    }
    const SliceOp& op = ops.at(key);
    if (op.mult.empty()) {
      std::fill(sl, sl + np, cplx(0.0));
      return;
    }
    std::vector<cplx> v(sl, sl + np);
    detail::apply_levels(op.B, h, d1, op.mult, v);
    std::copy(v.begin(), v.end(), sl);
  });
  return inverse_partial_fourier(pf);
}

Field heat_apply(double t, const Field& f, const SpectralTruncation& trunc) {
  if (!(t > 0.0)) throw DomainError("heat_apply: t must be positive");
  return apply_multiplier(MultiplierProfile::heat(t), f, trunc);
}

Field bochner_riesz_apply(double t, double delta, const Field& f, const SpectralTruncation& trunc) {
  return apply_multiplier(MultiplierProfile::bochner_riesz(t, delta), f, trunc);
}

Field wave_cosine_apply(double s, const Field& f, const SpectralTruncation& trunc) {
  return apply_multiplier(MultiplierProfile::wave_cosine(s), f, trunc);
}

Field grid_delta(const GrushinGrid& g, std::size_t ip, std::size_t is) {
  g.validate();
  if (ip >= g.prime_size() || is >= g.second_size()) throw ContractError("grid_delta: index off grid");
  Field f(g);
  f.at(ip, is) = 1.0 / g.cell_volume();
  return f;
}

double fd_conjugation_residual(const Field& f, const SpectralTruncation& trunc) {
  const GrushinGrid& g = f.grid;
  g.validate();
  const int d1 = g.prime.d1, d2 = g.d2;
  const double h = g.prime.spacing(), hs = g.second_spacing();
  const std::size_t ms = g.second_size();
  Field Lf(g);
  // fourth-order second difference: (-f[i-2] + 16 f[i-1] - 30 f[i] + 16 f[i+1] - f[i+2]) / 12h^2
  const double c[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  for (std::size_t ip = 0; ip < g.prime_size(); ++ip) {
    auto pi = g.prime_index(ip);
    auto x = g.prime_point(ip);
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    for (std::size_t is = 0; is < ms; ++is) {
      auto si = g.second_index(is);
      cplx lap1 = 0.0, lap2 = 0.0;
      for (int ax = 0; ax < d1; ++ax) {
        for (int o = -2; o <= 2; ++o) {
          int j = pi[ax] + o;
          if (j < 0 || j >= g.prime.n) continue;
          std::size_t stride = 1;
          for (int b = ax + 1; b < d1; ++b) stride *= g.prime.n;
          std::size_t jp = ip + std::ptrdiff_t(o) * std::ptrdiff_t(stride);
          lap1 += c[o + 2] * f.at(jp, is);
        }
      }
      for (int ax = 0; ax < d2; ++ax) {
        for (int o = -2; o <= 2; ++o) {
          int j = ((si[ax] + o) % g.n_second + g.n_second) % g.n_second;
          std::size_t stride = 1;
          for (int b = ax + 1; b < d2; ++b) stride *= g.n_second;
          std::size_t js = is + (std::ptrdiff_t(j) - si[ax]) * std::ptrdiff_t(stride);
          lap2 += c[o + 2] * f.at(ip, js);
        }
      }
      Lf.at(ip, is) = -lap1 / (h * h) - r2 * lap2 / (hs * hs);
    }
  }
  auto lam = MultiplierProfile::power(1.0, 0.0, std::numeric_limits<double>::infinity());
  Field spec = apply_multiplier(lam, f, trunc);
  double den = spec.norm();
  if (den == 0.0) throw DegenerateInputError("fd_conjugation_residual: zero spectral action");
  return distance(Lf, spec) / den;
}

}  // namespace grushin
