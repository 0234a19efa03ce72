#include "grushin/hermite.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "grushin/errors.hpp"

namespace grushin {

namespace {

constexpr double kRescale = 1e150;
const double kLogRescale = std::log(kRescale);

inline double scaled_value(double m, double s, double es) {
  if (m == 0.0) return 0.0;
  if (es > 0.0) return m * es;
  return std::copysign(std::exp(s + std::log(std::fabs(m))), m);
}

}  // namespace

void hermite_table(int K, double u, double* out) {
  if (!std::isfinite(u)) throw DomainError("hermite: non-finite argument");
  if (K < 0) throw DomainError("hermite: negative degree");
  // h_n(u) = m_n * exp(s)
  double s = -0.5 * u * u;
  double es = s > -700.0 ? std::exp(s) : 0.0;
  double a = std::pow(std::numbers::pi, -0.25);
  out[0] = scaled_value(a, s, es);
  if (K == 0) return;
  double b = std::numbers::sqrt2 * u * a;
  out[1] = scaled_value(b, s, es);
  for (int n = 1; n < K; ++n) {
    double c = std::sqrt(2.0 / (n + 1)) * u * b - std::sqrt(double(n) / (n + 1)) * a;
    a = b;
    b = c;
    if (std::fabs(b) > kRescale) {
      a /= kRescale;
      b /= kRescale;
      s += kLogRescale;
      es = s > -700.0 ? std::exp(s) : 0.0;
    }
    out[n + 1] = scaled_value(b, s, es);
  }
}

std::vector<double> hermite_table(int K, double u) {
  std::vector<double> out(K + 1);
  hermite_table(K, u, out.data());
  return out;
}

double hermite_eval(int n, double u) {
  if (n < 0) throw DomainError("hermite: negative degree");
  return hermite_table(n, u).back();
}

long HermiteLevel::multiplicity() const {
  // C(k + d1 - 1, d1 - 1)
  long r = 1;
  for (int i = 1; i < d1; ++i) r = r * (k + i) / i;
  return r;
}

std::vector<MultiIndex> multiindex_enum(int d1, int k) {
  if (d1 < 1 || k < 0) throw ContractError("multiindex_enum: need d1 >= 1, k >= 0");
  std::vector<MultiIndex> out;
  MultiIndex cur(d1, 0);
  // fill positions left to right; the last entry takes the remainder
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == d1 - 1) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, k);
  return out;
}

double phi_eval(const MultiIndex& nu, std::span<const double> x) {
  if (nu.size() != x.size()) throw ContractError("phi_eval: dimension mismatch");
  double v = 1.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (nu[i] < 0) throw ContractError("phi_eval: negative index");
    v *= hermite_eval(nu[i], x[i]);
  }
  return v;
}

double projection_kernel(int k, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractError("projection_kernel: dimension mismatch");
  int d1 = int(x.size());
  std::vector<std::vector<double>> hx(d1), hy(d1);
  for (int i = 0; i < d1; ++i) {
    hx[i] = hermite_table(k, x[i]);
    hy[i] = hermite_table(k, y[i]);
  }
  double sum = 0.0;
  for (const auto& nu : multiindex_enum(d1, k)) {
    double px = 1.0, py = 1.0;
    for (int i = 0; i < d1; ++i) {
      px *= hx[i][nu[i]];
      py *= hy[i][nu[i]];
    }
    sum += px * py;
  }
  return sum;
}

double PrimeGrid::weight() const { return std::pow(spacing(), d1); }

std::size_t PrimeGrid::size() const {
  std::size_t s = 1;
  for (int i = 0; i < d1; ++i) s *= std::size_t(n);
  return s;
}

int PrimeGrid::reliable_cap() const {
  double lim = std::min(X, std::numbers::pi / spacing()) - margin;
  if (lim <= 0.0) return -1;
  double k = (lim * lim - d1) / 2.0;
  return k < 0.0 ? -1 : int(std::floor(k + 1e-9));
}

void PrimeGrid::validate() const {
  if (!(X > 0.0) || !std::isfinite(X)) throw ContractError("PrimeGrid: half width must be positive");
  if (n < 2) throw ContractError("PrimeGrid: need at least two points per axis");
  if (d1 < 1 || d1 > 3) throw ContractError("PrimeGrid: d1 must be 1, 2 or 3");
}

PrimeGrid PrimeGrid::for_level_cap(int K_max, int d1, int n, double margin) {
  PrimeGrid g;
  g.X = std::sqrt(2.0 * K_max + d1) + margin;
  g.n = n;
  g.d1 = d1;
  g.margin = margin;
  g.validate();
  return g;
}

double PrimeField::norm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s * grid.weight());
}

namespace {

// tables[i][a] for grid index i, degree a
std::vector<std::vector<double>> axis_tables(const PrimeGrid& g, int K) {
  std::vector<std::vector<double>> t(g.n);
  for (int i = 0; i < g.n; ++i) t[i] = hermite_table(K, g.point(i));
  return t;
}

void sample_into(const PrimeGrid& g, const std::vector<std::vector<double>>& tab,
                 const MultiIndex& nu, std::vector<double>& out) {
  out.assign(g.size(), 1.0);
  std::size_t stride = g.size();
  for (int ax = 0; ax < g.d1; ++ax) {
    stride /= g.n;
    for (std::size_t idx = 0; idx < out.size(); ++idx) {
      int i = int((idx / stride) % g.n);
      out[idx] *= tab[i][nu[ax]];
    }
  }
}

}  // namespace

PrimeField sample_phi(const PrimeGrid& g, const MultiIndex& nu) {
  g.validate();
  if (int(nu.size()) != g.d1) throw ContractError("sample_phi: dimension mismatch");
  int K = 0;
  for (int v : nu) K = std::max(K, v);
  auto tab = axis_tables(g, K);
  std::vector<double> vals;
  sample_into(g, tab, nu, vals);
  PrimeField f(g);
  for (std::size_t i = 0; i < vals.size(); ++i) f.values[i] = vals[i];
  return f;
}

PrimeField project_onto_level(const PrimeField& f, int k) {
  const PrimeGrid& g = f.grid;
  g.validate();
  if (k < 0) throw ContractError("project_onto_level: negative level");
  if (k > g.reliable_cap())
    throw TruncationError("level " + std::to_string(k) + " exceeds the grid's reliable cap " +
                              std::to_string(g.reliable_cap()),
                          k, 0.0);
  auto tab = axis_tables(g, k);
  PrimeField out(g);
  std::vector<double> phi;
  double w = g.weight();
  for (const auto& nu : multiindex_enum(g.d1, k)) {
    sample_into(g, tab, nu, phi);
    cplx c = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) c += f.values[i] * phi[i];
    c *= w;
    for (std::size_t i = 0; i < phi.size(); ++i) out.values[i] += c * phi[i];
  }
  return out;
}

DecayFit fit_level_decay(int k, int d1, int samples) {
  if (samples < 3) throw ContractError("fit_level_decay: need at least 3 samples");
  double r0 = std::sqrt(2.0 * (2.0 * k + d1));
  double r1 = r0 + 12.0;
  std::vector<double> xs, ys;
  for (int i = 0; i < samples; ++i) {
    double r = r0 + (r1 - r0) * i / (samples - 1);
    std::vector<double> x(d1, 0.0);
    x[0] = r;
    double v = projection_kernel(k, x, x);
    if (v <= 0.0) continue;
    xs.push_back(r * r);
    ys.push_back(std::log(v));
  }
  DecayFit fit;
  fit.samples = int(xs.size());
  if (fit.samples < 3) return fit;
  double mx = 0, my = 0;
  for (int i = 0; i < fit.samples; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= fit.samples;
  my /= fit.samples;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < fit.samples; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  fit.c = -sxy / sxx;
  double logC = -1e300;
  for (int i = 0; i < fit.samples; ++i) logC = std::max(logC, ys[i] + fit.c * xs[i]);
  fit.C = std::exp(logC);
  return fit;
}

}  // namespace grushin
