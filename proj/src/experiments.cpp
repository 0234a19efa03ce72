#include "grushin/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "grushin/errors.hpp"

namespace grushin {

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void require_unit_support(const MultiplierProfile& F, const char* who) {
  if (F.a < 0.25 - 1e-14 || F.b > 1.0 + 1e-14)
    throw DomainError(std::string(who) + ": profile must be supported in [1/4, 1]");
}

void require_increasing(const std::vector<double>& v, const char* who) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw ContractError(std::string(who) + ": list must increase strictly");
}

void require_within(const MultiplierProfile& F, const SpectralTruncation& trunc, double R,
                    const char* who) {
  if (F.b > trunc.lambda_max)
    throw TruncationError(std::string(who) + ": spectral support exceeds lambda_max; enlarge "
                                             "lambda_max and the grid",
                          -1, R);
}

Field weighted(const Field& f, double gamma) {
  if (gamma == 0.0) return f;
  Field out = f;
  const GrushinGrid& g = f.grid;
  for (std::size_t ip = 0; ip < g.prime_size(); ++ip) {
    double w = std::pow(norm2(g.prime_point(ip)), gamma);
    for (std::size_t is = 0; is < g.second_size(); ++is) out.at(ip, is) *= w;
  }
  return out;
}

}  // namespace

bool restriction_admissible(const Dims& dims, double p, double gamma) {
  const double eps = 1e-12;
  if (!(p >= 1.0 - eps && p <= 2.0 + eps) || gamma < 0.0) return false;
  const double a = 1.0 / p - 0.5;
  const double p_second = (2.0 * dims.d2 + 2.0) / (dims.d2 + 3.0);
  const double p_first = 2.0 * dims.d1 / (dims.d1 + 2.0);
  if (gamma == 0.0) return p <= p_second + eps;
  return gamma < dims.d2 * a && p <= std::min(p_first, p_second) + eps;
}

MultiplierProfile restriction_profile(const MultiplierProfile& bump, double R) {
  require_unit_support(bump, "restriction_profile");
  if (!(R > 0.0)) throw DomainError("restriction_profile: R must be positive");
  auto p = MultiplierProfile::from_function(
      [bump, R](double lam) { return bump(std::sqrt(std::max(lam, 0.0)) / R); },
      (R * bump.a) * (R * bump.a), (R * bump.b) * (R * bump.b), bump.label + "_R",
      bump.real_valued);
  return p;
}

RestrictionResult weighted_restriction_experiment(const GrushinGrid& g,
                                                  const SpectralTruncation& trunc, double p,
                                                  const std::vector<double>& gammas,
                                                  const std::vector<double>& R_list,
                                                  const MultiplierProfile& bump,
                                                  const OpNormOptions& opt) {
  g.validate();
  trunc.validate();
  Dims dims{g.prime.d1, g.d2};
  if (gammas.empty()) throw ContractError("weighted_restriction: no gamma values");
  for (double gam : gammas)
    if (!restriction_admissible(dims, p, gam))
      throw ContractError("weighted_restriction: (p, gamma) outside the admissible range");
  require_increasing(R_list, "weighted_restriction");
  RestrictionResult res;
  std::vector<std::vector<double>> norms(gammas.size());
  std::vector<std::vector<std::string>> certs(gammas.size());
  const auto reps = prime_representatives(g.prime);
  for (double R : R_list) {
    auto F = restriction_profile(bump, R);
    require_within(F, trunc, R, "weighted_restriction");
    if (p == 1.0) {
      auto m = column_max(F, g, trunc, reps, 2.0, gammas);
      for (std::size_t k = 0; k < gammas.size(); ++k) {
        res.rows.push_back({R, gammas[k], 0.0, 0.0, m.value[k], Certificate::exact, m.argmax[k]});
        norms[k].push_back(m.value[k]);
        certs[k].push_back(to_string(Certificate::exact));
      }
    } else {
      for (std::size_t k = 0; k < gammas.size(); ++k) {
        double gam = gammas[k];
        auto op = field_operator(
            g, [&](const Field& f) { return weighted(apply_multiplier(F, f, trunc), gam); },
            [&](const Field& f) { return apply_multiplier(F, weighted(f, gam), trunc); });
        auto est = op_norm(op, p, 2.0, opt);
        res.rows.push_back({R, gam, 0.0, 0.0, est.value, est.certificate, 0});
        norms[k].push_back(est.value);
        certs[k].push_back(to_string(est.certificate));
      }
    }
  }
  for (std::size_t k = 0; k < gammas.size(); ++k) {
    double pred = (2.0 * dims.d2 + dims.d1) * (1.0 / p - 0.5) - gammas[k];
    auto rep = fit_scaling(R_list, norms[k], pred);
    rep.certificates = certs[k];
    res.reports.push_back(rep);
  }
  return res;
}

LocalizedResult localized_restriction_experiment(const GrushinGrid& g,
                                                 const SpectralTruncation& trunc, double p,
                                                 double gamma, const std::vector<double>& R_list,
                                                 const std::vector<MetricPoint>& y_list, double r,
                                                 const MultiplierProfile& bump) {
  g.validate();
  trunc.validate();
  Dims dims{g.prime.d1, g.d2};
  if (!restriction_admissible(dims, p, gamma))
    throw ContractError("localized_restriction: (p, gamma) outside the admissible range");
  if (!(r > 0.0)) throw DomainError("localized_restriction: r must be positive");
  if (p != 1.0) throw ContractError("localized_restriction: only p = 1 is supported");
  require_increasing(R_list, "localized_restriction");
  std::vector<double> yabs;
  for (const auto& y : y_list) {
    double a = norm2(y.x_prime);
    if (!(a > 4.0 * r)) throw ContractError("localized_restriction: need |y'| > 4r");
    yabs.push_back(a);
  }
  require_increasing(yabs, "localized_restriction (|y'|)");
  // columns z with rho(z, y) < r: z'' = y'' and |z' - y'| < r
  std::vector<std::vector<std::size_t>> balls;
  for (const auto& y : y_list) {
    std::vector<std::size_t> zs;
    for (std::size_t ip = 0; ip < g.prime_size(); ++ip) {
      auto z = g.prime_point(ip);
      double d = 0;
      for (std::size_t i = 0; i < z.size(); ++i) d += (z[i] - y.x_prime[i]) * (z[i] - y.x_prime[i]);
      if (std::sqrt(d) < r) zs.push_back(ip);
    }
    if (zs.empty()) throw DegenerateInputError("localized_restriction: ball holds no grid point");
    balls.push_back(zs);
  }
  LocalizedResult res;
  std::vector<std::vector<double>> n(y_list.size(), std::vector<double>(R_list.size()));
  for (std::size_t iR = 0; iR < R_list.size(); ++iR) {
    auto F = restriction_profile(bump, R_list[iR]);
    require_within(F, trunc, R_list[iR], "localized_restriction");
    for (std::size_t iy = 0; iy < y_list.size(); ++iy) {
      auto m = column_max(F, g, trunc, balls[iy], 2.0, {gamma});
      n[iy][iR] = m.value[0];
      res.rows.push_back(
          {R_list[iR], gamma, yabs[iy], 0.0, m.value[0], Certificate::exact, m.argmax[0]});
    }
  }
  const double a = 1.0 / p - 0.5;
  for (std::size_t iy = 0; iy < y_list.size(); ++iy) {
    auto rep = fit_scaling(R_list, n[iy], (dims.d1 + dims.d2) * a);
    rep.certificates.assign(R_list.size(), to_string(Certificate::exact));
    res.in_R.push_back(rep);
  }
  if (y_list.size() >= 3)
    for (std::size_t iR = 0; iR < R_list.size(); ++iR) {
      std::vector<double> col;
      for (std::size_t iy = 0; iy < y_list.size(); ++iy) col.push_back(n[iy][iR]);
      auto rep = fit_scaling(yabs, col, gamma - dims.d2 * a);
      rep.certificates.assign(y_list.size(), to_string(Certificate::exact));
      res.in_y.push_back(rep);
    }
  return res;
}

BochnerRieszResult bochner_riesz_sweep(const GrushinGrid& g, const SpectralTruncation& trunc,
                                       double p, const std::vector<double>& deltas,
                                       const std::vector<double>& R_list,
                                       std::vector<std::size_t> ys, const OpNormOptions& opt) {
  g.validate();
  trunc.validate();
  if (deltas.empty() || R_list.empty()) throw ContractError("bochner_riesz_sweep: empty sweep");
  const bool full = ys.empty();
  if (full) ys = prime_representatives(g.prime);
  BochnerRieszResult res;
  res.deltas = deltas;
  for (double delta : deltas) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double R : R_list) {
      auto F = MultiplierProfile::bochner_riesz(1.0 / (R * R), delta);
      require_within(F, trunc, R, "bochner_riesz_sweep");
      NormRow row{R, 0.0, 0.0, delta, 0.0, Certificate::exact, 0};
      if (p == 1.0) {
        auto m = column_max(F, g, trunc, ys, 1.0, {0.0});
        row.norm = m.value[0];
        row.argmax = m.argmax[0];
        row.certificate = full ? Certificate::exact : Certificate::lower_bound;
      } else {
        auto est = op_norm(g, [&](const Field& f) { return apply_multiplier(F, f, trunc); }, p, p, opt);
        row.norm = est.value;
        row.certificate = est.certificate;
      }
      lo = std::min(lo, row.norm);
      hi = std::max(hi, row.norm);
      res.rows.push_back(row);
    }
    res.max_min_ratio.push_back(lo > 0 ? hi / lo : std::numeric_limits<double>::infinity());
  }
  return res;
}

MultiplierNormResult multiplier_norm_experiment(const GrushinGrid& g,
                                                const SpectralTruncation& trunc, double p,
                                                const MultiplierProfile& F,
                                                const std::vector<double>& s_list,
                                                const std::vector<double>& t_list,
                                                std::vector<std::size_t> ys,
                                                const OpNormOptions& opt) {
  g.validate();
  trunc.validate();
  require_unit_support(F, "multiplier_norm");
  const bool full = ys.empty();
  if (full) ys = prime_representatives(g.prime);
  MultiplierNormResult res;
  res.s_list = s_list;
  res.t_list = t_list;
  for (double s : s_list) res.sobolev.push_back(sobolev_norm(F, -4.0, 5.0, 1 << 16, s));
  std::vector<double> norms;
  for (double t : t_list) {
    if (!(t > 0.0)) throw DomainError("multiplier_norm: t must be positive");
    auto G = F.dilate(t);
    require_within(G, trunc, t, "multiplier_norm");
    NormRow row{t, 0.0, 0.0, 0.0, 0.0, Certificate::exact, 0};
    if (p == 1.0) {
      auto m = column_max(G, g, trunc, ys, 1.0, {0.0});
      row.norm = m.value[0];
      row.argmax = m.argmax[0];
      row.certificate = full ? Certificate::exact : Certificate::lower_bound;
    } else {
      auto est = op_norm(g, [&](const Field& f) { return apply_multiplier(G, f, trunc); }, p, p, opt);
      row.norm = est.value;
      row.certificate = est.certificate;
    }
    norms.push_back(row.norm);
    res.rows.push_back(row);
  }
  for (double sob : res.sobolev) {
    std::vector<double> r;
    for (double v : norms) r.push_back(sob > 0 ? v / sob : 0.0);
    res.ratio.push_back(r);
  }
  return res;
}

HeatGaussianReport heat_gaussian_check(const GrushinGrid& g, const SpectralTruncation& trunc,
                                       const std::vector<double>& t_list,
                                       const std::vector<MetricPoint>& ys,
                                       const HeatGaussianOptions& opt) {
  g.validate();
  trunc.validate();
  if (t_list.empty() || ys.empty()) throw ContractError("heat_gaussian_check: empty sample");
  if (opt.bins < 3) throw ContractError("heat_gaussian_check: need at least 3 bins");
  const std::size_t ms = g.second_size();
  HeatGaussianReport rep;
  rep.min_relative = std::numeric_limits<double>::infinity();
  struct Acc {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    void add(double x, double y) {
      n += 1;
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      syy += y * y;
    }
  } raw;
  struct Sample {
    double x, y;
  };
  std::vector<std::pair<double, double>> envelope(std::size_t(opt.bins),
                                                  {0.0, -std::numeric_limits<double>::infinity()});
  double xcap = 0.0;
  // bins span the observed range of accepted pairs
  struct Column {
    double t;
    std::vector<Sample> pts;
  };
  std::vector<Column> cols;
  for (double t : t_list) {
    if (!(t > 0.0)) throw DomainError("heat_gaussian_check: t must be positive");
    auto F = MultiplierProfile::heat(t);
    for (const auto& y : ys) {
      auto [ip_y, is_y] = g.locate(y);
      KernelSlices ks(g, F, trunc, ip_y);
      auto v = ks.synthesize(is_y);
      double peak = 0, low = 0, edge = 0;
      for (double x : v) {
        peak = std::max(peak, x);
        low = std::min(low, x);
      }
      if (!(peak > 0)) throw DiscretizationError("heat_gaussian_check: non-positive kernel");
      rep.min_relative = std::min(rep.min_relative, low / peak);
      if (low < -opt.ripple * peak)
        throw DiscretizationError("heat_gaussian_check: negative kernel values beyond ripple");
      const double V = ball_volume_model(y, std::sqrt(t));
      Column col{t, {}};
      const auto yi = g.second_index(is_y);
      for (std::size_t ip = 0; ip < g.prime_size(); ++ip) {
        auto xp = g.prime_point(ip);
        for (std::size_t is = 0; is < ms; ++is) {
          auto xi = g.second_index(is);
          MetricPoint x{xp, std::vector<double>(g.d2)};
          double off = 0;
          for (int ax = 0; ax < g.d2; ++ax) {
            int d = ((xi[ax] - yi[ax]) % g.n_second + g.n_second) % g.n_second;
            if (d > g.n_second / 2) d -= g.n_second;
            x.x_second[ax] = y.x_second[ax] + d * 2.0 * g.S / g.n_second;
            off = std::max(off, std::abs(d * 2.0 / g.n_second));
          }
          double p = v[ip * ms + is];
          if (off >= 0.9) edge = std::max(edge, std::abs(p));
          if (off > 0.5 || p < opt.rel_floor * peak) continue;
          double rho = grushin_distance(x, y);
          col.pts.push_back({rho * rho / t, std::log(p * V)});
        }
      }
      if (edge > 1e-8 * peak)
        throw AliasingError("heat_gaussian_check: kernel reaches the torus edge; enlarge S");
      rep.diag_t.push_back(t);
      rep.diag_value.push_back(v[ip_y * ms + is_y] * V);
      for (const auto& s : col.pts) xcap = std::max(xcap, s.x);
      cols.push_back(std::move(col));
    }
  }
  for (const auto& col : cols)
    for (const auto& s : col.pts) {
      raw.add(s.x, s.y);
      auto b = std::min<std::size_t>(std::size_t(s.x / xcap * opt.bins), std::size_t(opt.bins - 1));
      if (s.y > envelope[b].second) envelope[b] = {s.x, s.y};
      ++rep.samples;
    }
  auto fit = [](const std::vector<std::pair<double, double>>& pts, double& slope, double& icpt) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : pts) {
      n += 1;
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      syy += y * y;
    }
    double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
    slope = cxy / cxx;
    icpt = (sy - slope * sx) / n;
    return cyy > 0 ? cxy * cxy / (cxx * cyy) : 1.0;
  };
  std::vector<std::pair<double, double>> env;
  for (const auto& e : envelope)
    if (std::isfinite(e.second)) env.push_back(e);
  if (env.size() < 3) throw DegenerateInputError("heat_gaussian_check: too few populated bins");
  double slope = 0, icpt = 0;
  rep.r_squared = fit(env, slope, icpt);
  rep.b = -slope;
  rep.log_C = icpt;
  {
    double cxx = raw.sxx - raw.sx * raw.sx / raw.n, cxy = raw.sxy - raw.sx * raw.sy / raw.n,
           cyy = raw.syy - raw.sy * raw.sy / raw.n;
    rep.raw_r_squared = cyy > 0 ? cxy * cxy / (cxx * cyy) : 1.0;
  }
  double lo = *std::min_element(rep.diag_value.begin(), rep.diag_value.end());
  double hi = *std::max_element(rep.diag_value.begin(), rep.diag_value.end());
  rep.diag_ratio = hi / lo;
  return rep;
}

std::string HeatGaussianReport::to_json() const {
  nlohmann::json j;
  j["b"] = b;
  j["log_C"] = log_C;
  j["r_squared"] = r_squared;
  j["raw_r_squared"] = raw_r_squared;
  j["diag_t"] = diag_t;
  j["diag_value"] = diag_value;
  j["diag_ratio"] = diag_ratio;
  j["min_relative"] = min_relative;
  j["samples"] = samples;
  return j.dump();
}

GeometrySuiteReport geometry_suite(const Dims& dims, std::uint64_t seed,
                                   const GeometrySuiteOptions& opt) {
  dims.validate();
  GeometrySuiteReport rep;
  std::uint64_t state = split_seed(seed, 0);
  // interface points with |x'| + |y'| = 2^k and |dz| = 4^k, where both
  // branches are exact in floating point
  rep.interface_points = opt.interface_points;
  for (std::uint64_t i = 0; i < opt.interface_points; ++i) {
    int k = int(uniform01(state) * 7) - 3;
    double s = std::ldexp(1.0, k);
    double a = s * std::floor(uniform01(state) * 1024) / 1024;
    MetricPoint x{std::vector<double>(dims.d1, 0.0), std::vector<double>(dims.d2, 0.0)};
    MetricPoint y = x;
    int ax = int(uniform01(state) * dims.d1), bx = int(uniform01(state) * dims.d1);
    x.x_prime[ax] = uniform01(state) < 0.5 ? a : -a;
    y.x_prime[bx] = uniform01(state) < 0.5 ? s - a : a - s;
    y.x_second[int(uniform01(state) * dims.d2)] = s * s;
    double dp = norm2({x.x_prime[ax] - (ax == bx ? y.x_prime[bx] : 0.0),
                       ax == bx ? 0.0 : -y.x_prime[bx]});
    double first = dp + (s * s) / s, second = dp + std::sqrt(s * s);
    double got = grushin_distance(x, y);
    if (!(first == second && got == first)) rep.interface_exact = false;
  }
  rep.triples = opt.triples;
  rep.quasi_triangle = quasi_triangle_constant(dims, opt.triples, split_seed(seed, 1)).constant;
  const double Q = dims.d1 + 2.0 * dims.d2;
  std::uint64_t stream = 2;
  for (double xn : opt.x_norms)
    for (double r : opt.radii) {
      MetricPoint x{std::vector<double>(dims.d1, 0.0), std::vector<double>(dims.d2, 0.0)};
      // random direction for x'
      std::vector<double> dir(dims.d1);
      double nn = 0;
      for (auto& v : dir) {
        v = 2 * uniform01(state) - 1;
        nn += v * v;
      }
      nn = std::sqrt(nn);
      for (int i = 0; i < dims.d1; ++i) x.x_prime[i] = nn > 0 ? xn * dir[i] / nn : 0.0;
      for (auto& v : x.x_second) v = 2 * uniform01(state) - 1;
      auto v = mc_ball_volume(x, r, opt.volume_samples, split_seed(seed, stream++));
      double ratio = v.volume / ball_volume_model(x, r);
      rep.volume_ratio.push_back(ratio);
      rep.volume_C = std::max({rep.volume_C, ratio, 1.0 / ratio});
      for (double lam : opt.lambdas) {
        double d = doubling_ratio(x, r, lam, opt.volume_samples, split_seed(seed, stream++));
        rep.doubling_max = std::max(rep.doubling_max, d / std::pow(1.0 + lam, Q));
      }
    }
  return rep;
}

std::string GeometrySuiteReport::to_json() const {
  nlohmann::json j;
  j["interface_exact"] = interface_exact;
  j["interface_points"] = interface_points;
  j["quasi_triangle"] = quasi_triangle;
  j["triples"] = triples;
  j["volume_C"] = volume_C;
  j["doubling_max"] = doubling_max;
  j["volume_ratio"] = volume_ratio;
  return j.dump();
}

}  // namespace grushin
