#include <cmath>
#include <map>
#include <string>

#include "fft.hpp"
#include "grushin/engine.hpp"
#include "grushin/errors.hpp"
#include "grushin/parallel.hpp"
#include "grushin/scaled_oscillator.hpp"
#include "slice_ops.hpp"

namespace grushin {

namespace {

constexpr std::size_t kCacheBudget = std::size_t(1) << 25;  // doubles
constexpr std::size_t kBlockBudget = std::size_t(1) << 23;

// Signed lattice indices of a half-spectrum entry (last axis halved).
std::vector<int> half_entry_index(const GrushinGrid& g, std::size_t h) {
  const int half = g.n_second / 2 + 1;
  std::vector<int> idx(g.d2);
  idx[g.d2 - 1] = int(h % half);
  h /= half;
  for (int ax = g.d2 - 2; ax >= 0; --ax) {
    idx[ax] = g.signed_index(int(h % g.n_second));
    h /= g.n_second;
  }
  return idx;
}

std::vector<double> zero_mode_slice(const MultiplierProfile& F, const GrushinGrid& g, double top,
                                    std::size_t ip_y) {
  std::vector<cplx> v(g.prime_size(), 0.0);
  v[ip_y] = 1.0 / g.prime.weight();
  detail::padded_laplacian_multiplier(v.data(), g.prime.n, g.prime.d1, g.prime.spacing(),
                                      [&](double k2) { return k2 <= top ? F(k2) : cplx(0.0); });
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
  return out;
}

// out(x, r) = sum_n U(x, n) t(n + r) for r = 0..K, with t(m) = 0 beyond K.
class Correlator {
 public:
  explicit Correlator(int K) : K_(K) {
    L_ = 1;
    while (L_ < 2 * (K + 1)) L_ *= 2;
    fwd_ = detail::cached_plan_1d(L_, FFTW_FORWARD);
    bwd_ = detail::cached_plan_1d(L_, FFTW_BACKWARD);
    a_.resize(L_);
    b_.resize(L_);
    tb_.resize(L_);
  }
  void set_target(const double* t) {
    for (int i = 0; i < L_; ++i) a_[i] = i <= K_ ? t[i] : 0.0;
    exec(fwd_, a_, tb_);
  }
  void correlate(const double* u, double* out) {
    for (int i = 0; i < L_; ++i) a_[i] = i <= K_ ? u[i] : 0.0;
    exec(fwd_, a_, b_);
    for (int i = 0; i < L_; ++i) b_[i] = std::conj(b_[i]) * tb_[i];
    exec(bwd_, b_, a_);
    for (int r = 0; r <= K_; ++r) out[r] = a_[r].real() / L_;
  }

 private:
  static void exec(fftw_plan p, std::vector<cplx>& in, std::vector<cplx>& out) {
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }
  int K_, L_;
  fftw_plan fwd_, bwd_;
  std::vector<cplx> a_, b_, tb_;
};

// Slice values g(x') = sum_nu G(|nu|) prod_i U_i(x_i, nu_i) on the rows with
// first index in [a0, a0 + na), where U_i(x, n) = sqrt(xi) h_n(s x) h_n(s y_i).
std::vector<double> level_slice_rows(const PrimeGrid& pg, double xi, const std::vector<double>& G,
                                     const std::vector<double>& y, std::size_t a0, std::size_t na) {
  const int d1 = pg.d1, K = int(G.size()) - 1;
  const std::size_t n = std::size_t(pg.n), W = std::size_t(K + 1);
  const double s = std::sqrt(xi), amp = std::sqrt(xi);
  // U tables for each axis: row x, column level
  auto table = [&](int axis, std::size_t x0, std::size_t cnt) {
    std::vector<double> hy = hermite_table(K, s * y[axis]);
    std::vector<double> U(cnt * W);
    for (std::size_t i = 0; i < cnt; ++i) {
      hermite_table(K, s * pg.point(int(x0 + i)), U.data() + i * W);
      for (std::size_t k = 0; k < W; ++k) U[i * W + k] *= amp * hy[k];
    }
    return U;
  };
  if (d1 == 1) {
    auto U = table(0, a0, na);
    std::vector<double> out(na, 0.0);
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t k = 0; k < W; ++k) out[i] += U[i * W + k] * G[k];
    return out;
  }
  Correlator corr(K);
  // T(prefix, r), prefix over the axes contracted so far
  std::vector<double> T;
  {
    auto U = table(0, a0, na);
    T.assign(na * W, 0.0);
    corr.set_target(G.data());
    for (std::size_t i = 0; i < na; ++i) corr.correlate(U.data() + i * W, T.data() + i * W);
  }
  std::size_t prefixes = na;
  for (int ax = 1; ax + 1 < d1; ++ax) {
    auto U = table(ax, 0, n);
    std::vector<double> next(prefixes * n * W);
    for (std::size_t p = 0; p < prefixes; ++p) {
      corr.set_target(T.data() + p * W);
      for (std::size_t x = 0; x < n; ++x)
        corr.correlate(U.data() + x * W, next.data() + (p * n + x) * W);
    }
    T.swap(next);
    prefixes *= n;
  }
  auto U = table(d1 - 1, 0, n);
  using Map = Eigen::Map<const detail::RowMat>;
  Map Tm(T.data(), Eigen::Index(prefixes), Eigen::Index(W));
  Map Um(U.data(), Eigen::Index(n), Eigen::Index(W));
  std::vector<double> out(prefixes * n);
  Eigen::Map<detail::RowMat> Om(out.data(), Eigen::Index(prefixes), Eigen::Index(n));
  Om.noalias() = Tm * Um.transpose();
  return out;
}

}  // namespace

KernelSlices::KernelSlices(const GrushinGrid& g, const MultiplierProfile& F,
                           const SpectralTruncation& trunc, std::size_t ip_y)
    : grid_(g) {
  check_spectral_coverage(F, g, trunc);
  if (!F.real_valued) throw ContractError("kernel slices need a real profile");
  if (ip_y >= g.prime_size()) throw ContractError("kernel column: y off grid");
  const int half = g.n_second / 2 + 1;
  half_size_ = std::size_t(half);
  for (int i = 0; i + 1 < g.d2; ++i) half_size_ *= std::size_t(g.n_second);
  level_of_half_.assign(half_size_, -2);
  mult_.assign(half_size_, 0.0);
  const double top = std::min(trunc.lambda_max, F.active_upper());
  y_ = g.prime_point(ip_y);

  std::map<long, std::vector<std::size_t>> by_key;
  for (std::size_t h = 0; h < half_size_; ++h) {
    auto idx = half_entry_index(g, h);
    int last = idx.back();
    mult_[h] = (last == 0 || last == g.n_second / 2) ? 1.0 : 2.0;
    long key = 0;
    for (int v : idx) key += long(v) * v;
    by_key[key].push_back(h);
  }
  std::vector<long> keys;
  for (const auto& kv : by_key) keys.push_back(kv.first);
  std::vector<Level> found(keys.size());
  parallel_for(keys.size(), [&](std::size_t i) {
    if (keys[i] == 0) return;
    double xi = g.xi_unit() * std::sqrt(double(keys[i]));
    auto m = level_factors(F, xi, g.prime.d1, trunc.K_max, trunc.lambda_max);
    found[i].xi = xi;
    found[i].G.resize(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) found[i].G[k] = m[k].real();
  });
  for (std::size_t i = 0; i < keys.size(); ++i) {
    std::ptrdiff_t tag = -2;
    if (keys[i] == 0) {
      if (trunc.xi_zero_mode == XiZeroMode::fourier_multiplier) {
        zero_slice_ = zero_mode_slice(F, g, top, ip_y);
        tag = -1;
      }
    } else if (!found[i].G.empty()) {
      tag = std::ptrdiff_t(levels_.size());
      levels_.push_back(std::move(found[i]));
    }
    for (std::size_t h : by_key.at(keys[i])) level_of_half_[h] = tag;
  }
  if (levels_.size() * g.prime_size() <= kCacheBudget) cache_ = level_rows(0, std::size_t(g.prime.n));
}

std::size_t KernelSlices::block_extent() const {
  const std::size_t n = std::size_t(grid_.prime.n);
  const std::size_t per_row = grid_.prime_size() / n * std::max<std::size_t>(levels_.size(), 1);
  return std::clamp<std::size_t>(kBlockBudget / std::max<std::size_t>(per_row, 1), 1, n);
}

std::vector<std::vector<double>> KernelSlices::level_rows(std::size_t a0, std::size_t na) const {
  std::vector<std::vector<double>> out(levels_.size());
  parallel_for(levels_.size(), [&](std::size_t i) {
    out[i] = level_slice_rows(grid_.prime, levels_[i].xi, levels_[i].G, y_, a0, na);
  });
  return out;
}

double KernelSlices::l2_sq(const std::function<double(std::size_t)>& weight) const {
  const std::size_t np = grid_.prime_size(), n = std::size_t(grid_.prime.n);
  const std::size_t per_first = np / n;
  std::vector<double> w(np, 1.0);
  if (weight)
    for (std::size_t ip = 0; ip < np; ++ip) w[ip] = weight(ip);
  // multiplicity summed over the half entries of each level
  std::vector<double> lm(levels_.size(), 0.0);
  double zm = 0.0;
  for (std::size_t h = 0; h < half_size_; ++h) {
    if (level_of_half_[h] >= 0) lm[std::size_t(level_of_half_[h])] += mult_[h];
    if (level_of_half_[h] == -1) zm += mult_[h];
  }
  double s = 0.0;
  for (std::size_t ip = 0; ip < zero_slice_.size(); ++ip)
    s += zm * w[ip] * zero_slice_[ip] * zero_slice_[ip];
  const std::size_t step = cache_.empty() ? block_extent() : n;
  for (std::size_t a0 = 0; a0 < n; a0 += step) {
    std::size_t na = std::min(step, n - a0);
    auto fresh = cache_.empty() ? level_rows(a0, na) : std::vector<std::vector<double>>{};
    const auto& rows = cache_.empty() ? fresh : cache_;
    const std::size_t base = cache_.empty() ? 0 : a0 * per_first;
    for (std::size_t l = 0; l < levels_.size(); ++l) {
      double t = 0.0;
      for (std::size_t r = 0; r < na * per_first; ++r) {
        double v = rows[l][base + r];
        t += w[a0 * per_first + r] * v * v;
      }
      s += lm[l] * t;
    }
  }
  return s * grid_.prime.weight() * std::pow(2.0 * grid_.S, -grid_.d2);
}

void KernelSlices::synthesize_rows(std::size_t ip0, std::size_t count, std::size_t is_y,
                                   double* out) const {
  const GrushinGrid& g = grid_;
  if (ip0 + count > g.prime_size()) throw ContractError("synthesize_rows: rows off grid");
  if (is_y >= g.second_size()) throw ContractError("synthesize_rows: y'' off grid");
  if (count == 0) return;
  const std::size_t ms = g.second_size();
  const std::size_t per_first = g.prime_size() / std::size_t(g.prime.n);
  std::vector<std::vector<double>> fresh;
  std::size_t base = ip0;
  if (cache_.empty()) {
    std::size_t a0 = ip0 / per_first, a1 = (ip0 + count + per_first - 1) / per_first;
    fresh = level_rows(a0, a1 - a0);
    base = ip0 - a0 * per_first;
  }
  const auto& rows = cache_.empty() ? fresh : cache_;
  std::vector<cplx> in(count * half_size_, 0.0);
  for (std::size_t h = 0; h < half_size_; ++h) {
    auto tag = level_of_half_[h];
    if (tag == -2) continue;
    const double* src = tag == -1 ? zero_slice_.data() + ip0 : rows[std::size_t(tag)].data() + base;
    for (std::size_t r = 0; r < count; ++r) in[r * half_size_ + h] = src[r];
  }
  std::vector<double> raw(count * ms);
  std::vector<int> n(g.d2, g.n_second);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    plan = fftw_plan_many_dft_c2r(g.d2, n.data(), int(count),
                                  reinterpret_cast<fftw_complex*>(in.data()), nullptr, 1,
                                  int(half_size_), raw.data(), nullptr, 1, int(ms), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = std::pow(2.0 * g.S, -g.d2);
  // shift so the pole sits at x'' index is_y
  auto yi = g.second_index(is_y);
  std::vector<std::size_t> src(ms);
  for (std::size_t is = 0; is < ms; ++is) {
    auto xi = g.second_index(is);
    std::size_t s = 0;
    for (int ax = 0; ax < g.d2; ++ax) {
      int d = ((xi[ax] - yi[ax]) % g.n_second + g.n_second) % g.n_second;
      s = s * g.n_second + std::size_t(d);
    }
    src[is] = s;
  }
  for (std::size_t r = 0; r < count; ++r)
    for (std::size_t is = 0; is < ms; ++is) out[r * ms + is] = scale * raw[r * ms + src[is]];
}

std::vector<double> KernelSlices::synthesize(std::size_t is_y) const {
  std::vector<double> out(grid_.size());
  synthesize_rows(0, grid_.prime_size(), is_y, out.data());
  return out;
}

void KernelSlices::for_each_block(
    std::size_t rows, std::size_t is_y,
    const std::function<void(std::size_t, std::size_t, const double*)>& fn) const {
  const std::size_t per_first = grid_.prime_size() / std::size_t(grid_.prime.n);
  if (rows == 0) rows = block_extent() * per_first;
  std::vector<double> buf;
  for (std::size_t ip0 = 0; ip0 < grid_.prime_size(); ip0 += rows) {
    std::size_t count = std::min(rows, grid_.prime_size() - ip0);
    buf.resize(count * grid_.second_size());
    synthesize_rows(ip0, count, is_y, buf.data());
    fn(ip0, count, buf.data());
  }
}

Field schwartz_kernel_column(const MultiplierProfile& F, const GrushinGrid& g, std::size_t ip,
                             std::size_t is, const SpectralTruncation& trunc) {
  if (!F.real_valued) return apply_multiplier(F, grid_delta(g, ip, is), trunc);
  KernelSlices ks(g, F, trunc, ip);
  auto v = ks.synthesize(is);
  Field f(g);
  for (std::size_t i = 0; i < v.size(); ++i) f.values[i] = v[i];
  return f;
}

Field schwartz_kernel_column(const MultiplierProfile& F, const GrushinGrid& g, const MetricPoint& y,
                             const SpectralTruncation& trunc) {
  auto [ip, is] = g.locate(y);
  return schwartz_kernel_column(F, g, ip, is, trunc);
}

}  // namespace grushin
