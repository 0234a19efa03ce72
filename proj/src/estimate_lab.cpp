#include "grushin/estimate_lab.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "fft.hpp"
#include "grushin/errors.hpp"
#include "grushin/geometry.hpp"
#include "grushin/hermite.hpp"
#include "grushin/parallel.hpp"

namespace grushin {

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

ScalingReport fit_scaling(const std::vector<double>& abscissae, const std::vector<double>& norms,
                          double predicted_slope) {
  if (abscissae.size() != norms.size()) throw ContractError("fit_scaling: size mismatch");
  if (abscissae.size() < 3) throw ContractError("fit_scaling: need at least 3 points");
  for (std::size_t i = 0; i < abscissae.size(); ++i) {
    if (!(abscissae[i] > 0.0) || !(norms[i] > 0.0))
      throw DegenerateInputError("fit_scaling: abscissae and norms must be positive");
    if (i > 0 && !(abscissae[i] > abscissae[i - 1]))
      throw ContractError("fit_scaling: abscissae must increase strictly");
  }
  const std::size_t n = abscissae.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(abscissae[i]);
    y[i] = std::log(norms[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  ScalingReport r;
  r.abscissae = abscissae;
  r.norms = norms;
  r.predicted_slope = predicted_slope;
  r.fitted_slope = sxy / sxx;
  r.intercept = my - r.fitted_slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = y[i] - r.intercept - r.fitted_slope * x[i];
    ssr += e * e;
    r.residual_max = std::max(r.residual_max, std::abs(e));
  }
  r.slope_stderr = n > 2 ? std::sqrt(ssr / double(n - 2) / sxx) : 0.0;
  return r;
}

std::string ScalingReport::to_json() const {
  nlohmann::json j;
  j["abscissae"] = abscissae;
  j["norms"] = norms;
  j["fitted_slope"] = fitted_slope;
  j["slope_stderr"] = slope_stderr;
  j["predicted_slope"] = predicted_slope;
  j["residual_max"] = residual_max;
  j["intercept"] = intercept;
  j["certificates"] = certificates;
  return j.dump();
}

std::vector<std::size_t> prime_representatives(const PrimeGrid& g) {
  const int n = g.n;
  std::vector<int> cand{0};
  for (int i = n / 2; i < n; ++i) cand.push_back(i);
  std::vector<std::size_t> out;
  std::vector<std::size_t> pos(g.d1, 0);
  // non-decreasing tuples over the candidate list
  std::function<void(int, std::size_t)> rec = [&](int ax, std::size_t from) {
    if (ax == g.d1) {
      std::size_t flat = 0;
      for (int a = 0; a < g.d1; ++a) flat = flat * std::size_t(n) + std::size_t(cand[pos[a]]);
      out.push_back(flat);
      return;
    }
    for (std::size_t c = from; c < cand.size(); ++c) {
      pos[ax] = c;
      rec(ax + 1, c);
    }
  };
  rec(0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> column_norms(const KernelSlices& ks, double q,
                                 const std::vector<double>& gammas) {
  const GrushinGrid& g = ks.grid();
  const std::size_t np = g.prime_size();
  std::vector<double> rad(np);
  for (std::size_t ip = 0; ip < np; ++ip) rad[ip] = norm2(g.prime_point(ip));
  auto wpow = [&](std::size_t ip, double e) { return e == 0.0 ? 1.0 : std::pow(rad[ip], e); };
  std::vector<double> out(gammas.size(), 0.0);
  if (q == 2.0) {
    for (std::size_t k = 0; k < gammas.size(); ++k) {
      double gam = gammas[k];
      out[k] = std::sqrt(ks.l2_sq([&](std::size_t ip) { return wpow(ip, 2 * gam); }));
    }
    return out;
  }
  if (q != 1.0) throw ContractError("column_norms: q must be 1 or 2");
  const std::size_t ms = g.second_size();
  ks.for_each_block(0, 0, [&](std::size_t ip0, std::size_t count, const double* block) {
    for (std::size_t r = 0; r < count; ++r) {
      double s = 0;
      for (std::size_t is = 0; is < ms; ++is) s += std::abs(block[r * ms + is]);
      for (std::size_t k = 0; k < gammas.size(); ++k) out[k] += s * wpow(ip0 + r, gammas[k]);
    }
  });
  for (auto& v : out) v *= g.cell_volume();
  return out;
}

ColumnMax column_max(const MultiplierProfile& F, const GrushinGrid& g,
                     const SpectralTruncation& trunc, const std::vector<std::size_t>& ys, double q,
                     const std::vector<double>& gammas) {
  if (ys.empty()) throw ContractError("column_max: no columns");
  ColumnMax m;
  m.value.assign(gammas.size(), 0.0);
  m.argmax.assign(gammas.size(), ys.front());
  for (std::size_t ip : ys) {
    KernelSlices ks(g, F, trunc, ip);
    auto v = column_norms(ks, q, gammas);
    for (std::size_t k = 0; k < gammas.size(); ++k)
      if (v[k] > m.value[k]) {
        m.value[k] = v[k];
        m.argmax[k] = ip;
      }
  }
  return m;
}

LinearOperator field_operator(const GrushinGrid& g, std::function<Field(const Field&)> apply,
                              std::function<Field(const Field&)> adjoint) {
  LinearOperator A;
  A.dim_in = A.dim_out = g.size();
  A.w_in = A.w_out = g.cell_volume();
  auto wrap = [g](std::function<Field(const Field&)> f) {
    return [g, f](const cvec& in, cvec& out) {
      Field x(g);
      x.values = in;
      out = f(x).values;
    };
  };
  A.apply = wrap(apply);
  if (adjoint) A.adjoint = wrap(adjoint);
  return A;
}

NormEstimate op_norm(const GrushinGrid& g, const std::function<Field(const Field&)>& apply,
                     double p, double q, const OpNormOptions& opt) {
  return op_norm(field_operator(g, apply), p, q, opt);
}

double column_spectral_mass(const MultiplierProfile& F, const GrushinGrid& g,
                            const std::vector<double>& y_prime, double lo, double hi,
                            bool include_zero_mode) {
  const int d1 = g.prime.d1, d2 = g.d2;
  if (int(y_prime.size()) != d1) throw ContractError("column_spectral_mass: y' dimension");
  if (!(hi > lo) || !(lo >= 0.0)) return 0.0;
  const double unit = g.xi_unit();
  const long rmax = long(std::floor(hi / d1 / unit)) + 1;
  // lattice points grouped by squared length
  std::map<long, double> keys;
  if (d2 == 1) {
    for (long m = 1; m <= rmax; ++m) keys[m * m] += 2.0;
  } else {
    if (double(2 * rmax + 1) * double(2 * rmax + 1) > 5e7)
      throw ContractError("column_spectral_mass: lattice too large");
    for (long a = -rmax; a <= rmax; ++a)
      for (long b = -rmax; b <= rmax; ++b)
        if (a != 0 || b != 0) keys[a * a + b * b] += 1.0;
  }
  std::vector<std::pair<long, double>> list(keys.begin(), keys.end());
  std::vector<double> part(list.size(), 0.0);
  parallel_for(list.size(), [&](std::size_t i) {
    double xi = unit * std::sqrt(double(list[i].first));
    int K = int(std::floor((hi / xi - d1) / 2.0 + 1e-12));
    if (K < 0) return;
    const double s = std::sqrt(xi);
    std::vector<double> P;
    for (int ax = 0; ax < d1; ++ax) {
      auto h = hermite_table(K, s * y_prime[ax]);
      for (auto& v : h) v = s * v * v;
      P = ax == 0 ? h : detail::fft_convolve(P, h, std::size_t(K + 1));
    }
    double acc = 0;
    for (int k = 0; k <= K; ++k) {
      double lam = (2.0 * k + d1) * xi;
      if (lam <= lo || lam > hi) continue;
      acc += std::norm(F(lam)) * P[k];
    }
    part[i] = list[i].second * acc;
  });
  double total = 0;
  for (double v : part) total += v;
  if (include_zero_mode) {
    // (2 pi)^{-d1} int_{lo < |k|^2 <= hi} |F(|k|^2)|^2 dk
    const double omega = d1 == 1 ? 2.0 : d1 == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
    const double a = std::sqrt(lo), b = std::sqrt(hi);
    const int n = 20000;
    double acc = 0;
    for (int i = 0; i <= n; ++i) {
      double k = a + (b - a) * i / n;
      double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * std::norm(F(k * k)) * std::pow(k, d1 - 1);
    }
    acc *= (b - a) / n / 3.0;
    total += omega * acc / std::pow(2.0 * std::numbers::pi, d1);
  }
  return total * std::pow(2.0 * g.S, -d2);
}

double second_reach(const std::vector<double>& x_prime, const MetricPoint& y, double r) {
  double dp = 0;
  for (std::size_t i = 0; i < x_prime.size(); ++i)
    dp += (x_prime[i] - y.x_prime[i]) * (x_prime[i] - y.x_prime[i]);
  dp = std::sqrt(dp);
  if (dp > r) return -1.0;
  double c = r - dp, sp = norm2(x_prime) + norm2(y.x_prime);
  return c <= sp ? c * sp : c * c;
}

KernelSupportReport kernel_support_check(const MultiplierProfile& piece, int level, double t,
                                         const GrushinGrid& g, const SpectralTruncation& trunc,
                                         const MetricPoint& y, const KernelSupportOptions& opt) {
  if (level < 0) throw ContractError("kernel_support_check: negative level");
  if (!(t > 0.0)) throw DomainError("kernel_support_check: t must be positive");
  if (opt.kappas.empty()) throw ContractError("kernel_support_check: no kappa values");
  if (!piece.real_valued) throw ContractError("kernel_support_check: real profiles only");
  g.validate();
  trunc.validate();
  KernelSupportReport rep;
  rep.level = level;
  rep.t = t;
  rep.radius = std::ldexp(t, level);
  rep.kappas = opt.kappas;
  const double rmax = *std::max_element(opt.kappas.begin(), opt.kappas.end()) * rep.radius;
  auto [ip_y, is_y] = g.locate(y);
  for (double v : y.x_prime)
    if (std::abs(v) + rmax > g.prime.X)
      throw AliasingError("kernel_support_check: x' box does not contain the support ball");
  double ny = norm2(y.x_prime);
  double reach = std::max(rmax * rmax, rmax * (2 * ny + rmax));
  if (reach > g.S)
    throw AliasingError("kernel_support_check: torus is too small for radius 2^l t");

  auto Fc = MultiplierProfile::from_function(
      [piece, t](double lam) { return piece(t * std::sqrt(std::max(lam, 0.0))); }, 0.0,
      std::numeric_limits<double>::infinity(), piece.label + "(t sqrt)");
  if (piece.b < std::numeric_limits<double>::infinity()) Fc.cutoff = (piece.b / t) * (piece.b / t);

  KernelSlices ks(g, Fc, trunc, ip_y);
  rep.grid_mass = ks.l2_sq();
  const double top = std::min(trunc.lambda_max, Fc.active_upper());
  const bool zm = trunc.xi_zero_mode == XiZeroMode::fourier_multiplier;
  rep.retained_mass = column_spectral_mass(Fc, g, y.x_prime, 0.0, top, zm);
  const double hi = std::min(opt.tail_factor * trunc.lambda_max, Fc.active_upper());
  rep.tail_mass = column_spectral_mass(Fc, g, y.x_prime, top, hi, true);
  if (!zm) {
    auto zero = column_spectral_mass(Fc, g, y.x_prime, 0.0, top, true) -
                column_spectral_mass(Fc, g, y.x_prime, 0.0, top, false);
    rep.tail_mass += zero;
  }

  const std::size_t ms = g.second_size();
  std::vector<double> dist(ms);
  const auto yi = g.second_index(is_y);
  for (std::size_t is = 0; is < ms; ++is) {
    auto xi = g.second_index(is);
    double s = 0;
    for (int ax = 0; ax < g.d2; ++ax) {
      int d = ((xi[ax] - yi[ax]) % g.n_second + g.n_second) % g.n_second;
      if (d > g.n_second / 2) d -= g.n_second;
      double v = d * 2.0 * g.S / g.n_second;
      s += v * v;
    }
    dist[is] = std::sqrt(s);
  }
  std::vector<double> inside(opt.kappas.size(), 0.0);
  ks.for_each_block(0, is_y, [&](std::size_t ip0, std::size_t count, const double* block) {
    for (std::size_t r = 0; r < count; ++r) {
      auto xp = g.prime_point(ip0 + r);
      for (std::size_t k = 0; k < opt.kappas.size(); ++k) {
        double D = second_reach(xp, y, opt.kappas[k] * rep.radius);
        if (D < 0) continue;
        double acc = 0;
        for (std::size_t is = 0; is < ms; ++is)
          if (dist[is] <= D) acc += block[r * ms + is] * block[r * ms + is];
        inside[k] += acc;
      }
    }
  });
  const double total = rep.retained_mass + rep.tail_mass;
  for (std::size_t k = 0; k < opt.kappas.size(); ++k) {
    rep.inside_mass.push_back(inside[k] * g.cell_volume());
    // outside the ball within the box, plus whatever lies beyond the box
    double out = std::max(rep.grid_mass - rep.inside_mass.back(), 0.0) +
                 std::max(rep.retained_mass - rep.grid_mass, 0.0);
    double f = total > 0 ? std::pow(std::sqrt(out) + std::sqrt(rep.tail_mass), 2) / total : 0.0;
    rep.outside_fraction.push_back(f);
  }
  return rep;
}

std::string KernelSupportReport::to_json() const {
  nlohmann::json j;
  j["level"] = level;
  j["t"] = t;
  j["radius"] = radius;
  j["kappas"] = kappas;
  j["inside_mass"] = inside_mass;
  j["outside_fraction"] = outside_fraction;
  j["grid_mass"] = grid_mass;
  j["retained_mass"] = retained_mass;
  j["tail_mass"] = tail_mass;
  return j.dump();
}

}  // namespace grushin
