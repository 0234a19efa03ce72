#include <doctest.h>

#include <cmath>
#include <numbers>

#include "grushin/errors.hpp"
#include "grushin/experiments.hpp"

using namespace grushin;

namespace {

template <class Fn>
double simpson(Fn f, double a, double b, int n) {
  double h = (b - a) / n, s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

GrushinGrid small_grid(double X, int n, double S, int m) {
  GrushinGrid g;
  g.prime = PrimeGrid{X, n, 2};
  g.S = S;
  g.n_second = m;
  return g;
}

std::size_t origin(const GrushinGrid& g) {
  return std::size_t(g.prime.n / 2) * g.prime.n + g.prime.n / 2;
}

}  // namespace

TEST_CASE("Sobolev norms against closed forms") {
  const double h = 1.0 / 64;
  std::vector<double> gauss;
  for (int i = -1024; i < 1024; ++i) gauss.push_back(std::exp(-0.5 * (i * h) * (i * h)));
  // ||F||^2 = sqrt(pi), ||F'||^2 = sqrt(pi)/2
  CHECK(sobolev_norm(gauss, h, 0.0) == doctest::Approx(std::pow(std::numbers::pi, 0.25)).epsilon(1e-12));
  CHECK(sobolev_norm(gauss, h, 1.0) ==
        doctest::Approx(std::sqrt(1.5 * std::sqrt(std::numbers::pi))).epsilon(1e-10));
  auto F = smooth_bump(0.25, 1.0);
  double prev = 0;
  for (double s : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    double v = sobolev_norm(F, -4.0, 5.0, 1 << 14, s);
    CHECK(v > prev);
    prev = v;
  }
  std::vector<double> flat(256, 1.0);
  CHECK_THROWS_AS(sobolev_norm(flat, h, 1.0), WindowingError);
  CHECK_THROWS_AS(sobolev_norm(gauss, h, -1.0), DomainError);
}

TEST_CASE("dyadic cutoffs form a partition of unity") {
  CutoffSpec c;
  double worst = 0, worst0 = 0;
  for (double v = -10; v <= 10; v += 1.0 / 97) {
    double lam = std::exp2(v), s = 0, s0 = c.eta0(lam);
    for (int l = -30; l <= 30; ++l) s += c.eta(std::ldexp(lam, -l));
    for (int l = 1; l <= 30; ++l) s0 += c.eta_level(l, lam);
    worst = std::max(worst, std::fabs(s - 1));
    worst0 = std::max(worst0, std::fabs(s0 - 1));
  }
  CHECK(worst <= 1e-10);
  CHECK(worst0 <= 1e-10);
  CHECK(c.eta(0.25) == 0.0);
  CHECK(c.eta(1.0) == 0.0);
  CHECK(c.eta(0.2) == 0.0);
  CHECK(c.eta(0.5) > 0.0);
  CHECK(c.eta0(0.1) == 1.0);
  CHECK(c.eta0(1.5) == 0.0);
  for (double lam : {0.125, 0.3, 1.0, 2.0}) CHECK(c.psi(lam) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.psi(1.0 / 16) == 0.0);
  CHECK(c.psi(4.0) == 0.0);
  CHECK(c.phi_br(0.2) == 1.0);
  CHECK(c.phi_br(-0.25) == 1.0);
  CHECK(c.phi_br(0.5) == 0.0);
  CHECK(c.phi_br(0.4) > 0.0);
  CHECK_THROWS_AS(c.eta_level(-1, 1.0), ContractError);
}

TEST_CASE("dyadic pieces") {
  CutoffSpec c;
  auto F = smooth_bump(0.25, 1.0);
  auto P = dyadic_pieces(F, c, 12);
  REQUIRE(P.size() == 13);
  double resid = 0;
  for (double lam = 0; lam <= 3.0; lam += 1.0 / 512) {
    double s = 0;
    for (const auto& q : P) s += q(lam).real();
    resid = std::max(resid, std::fabs(s - F(lam).real()));
  }
  CHECK(resid <= 1e-6);

  // one piece by direct quadrature of the cosine transform
  auto Fhat = [&](double tau) {
    return 2 * simpson([&](double l) { return F(l).real() * std::cos(tau * l); }, 0.25, 1.0, 2000);
  };
  const int l = 2;
  for (double lam : {0.0, 0.5, 3.0, 10.0}) {
    double direct = simpson([&](double tau) { return c.eta_level(l, tau) * Fhat(tau) * std::cos(tau * lam); },
                            std::ldexp(0.25, l), std::ldexp(1.0, l), 2000) /
                    std::numbers::pi;
    CHECK(std::fabs(P[l](lam).real() - direct) <= 1e-8);
  }

  // ||F^(l)||_2 decays like 4^-l against the W^2 norm of F
  double w2 = sobolev_norm(F, -4.0, 5.0, 1 << 14, 2.0);
  for (int k = 1; k <= 8; ++k) {
    double n2 = std::sqrt(2 * simpson([&](double x) { return std::norm(P[k](x)); }, 0.0, 256.0, 1 << 17));
    CHECK(n2 <= 16 * std::pow(4.0, -k) * w2);
  }
  CHECK(P[0](300.0) == 0.0);

  auto zero = MultiplierProfile::constant(0.0, 0.25, 1.0);
  for (const auto& q : dyadic_pieces(zero, c, 3)) CHECK(q(0.7) == 0.0);
  CHECK_THROWS_AS(dyadic_pieces(smooth_bump(0.1, 1.0), c, 3), DomainError);
  CHECK_THROWS_AS(dyadic_pieces(F, c, -1), ContractError);
}

TEST_CASE("power-law fits") {
  std::vector<double> R{2, 4, 8, 16}, v;
  for (double r : R) v.push_back(3 * std::pow(r, 1.25));
  auto rep = fit_scaling(R, v, 1.0);
  CHECK(rep.fitted_slope == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(rep.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(rep.residual_max <= 1e-12);
  CHECK(rep.predicted_slope == 1.0);
  CHECK_THROWS_AS(fit_scaling({1, 2}, {1, 2}, 0), ContractError);
  CHECK_THROWS_AS(fit_scaling({1, 3, 2}, {1, 2, 3}, 0), ContractError);
  CHECK_THROWS_AS(fit_scaling({1, 2, 3}, {1, 0, 3}, 0), DegenerateInputError);
}

TEST_CASE("representative columns") {
  PrimeGrid p{1.0, 8, 2};
  auto reps = prime_representatives(p);
  // per-axis candidates {0, 4, 5, 6, 7}, unordered pairs
  CHECK(reps.size() == 15);
  CHECK(std::find(reps.begin(), reps.end(), std::size_t(4 * 8 + 4)) != reps.end());
  // every point is a representative up to reflections and axis swaps
  auto canon = [](int i) { return (i == 0 || i >= 4) ? i : 8 - i; };
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      int u = canon(a), w = canon(b);
      std::size_t lo = std::min(u, w), hi = std::max(u, w);
      bool hit = std::find(reps.begin(), reps.end(), lo * 8 + hi) != reps.end() ||
                 std::find(reps.begin(), reps.end(), hi * 8 + lo) != reps.end();
      CHECK(hit);
    }
}

TEST_CASE("column norms match the synthesized column") {
  auto g = small_grid(3.0, 32, 2.0, 64);
  SpectralTruncation tr{200, 60.0};
  auto F = MultiplierProfile::from_function([](double l) { return std::exp(-l / 8) * std::cos(l / 3); }, 0, 60,
                                            "F");
  std::size_t ip = 13 * 32 + 20;
  KernelSlices ks(g, F, tr, ip);
  auto v = ks.synthesize(0);
  double l1 = 0, l2 = 0, l1w = 0;
  const std::size_t ms = g.second_size();
  for (std::size_t jp = 0; jp < g.prime_size(); ++jp) {
    auto x = g.prime_point(jp);
    double w = std::pow(std::hypot(x[0], x[1]), 0.5);
    for (std::size_t js = 0; js < ms; ++js) {
      double a = v[jp * ms + js];
      l1 += std::fabs(a);
      l2 += a * a;
      l1w += w * std::fabs(a);
    }
  }
  auto q1 = column_norms(ks, 1.0, {0.0, 0.5});
  auto q2 = column_norms(ks, 2.0, {0.0});
  CHECK(q1[0] == doctest::Approx(l1 * g.cell_volume()).epsilon(1e-12));
  CHECK(q1[1] == doctest::Approx(l1w * g.cell_volume()).epsilon(1e-12));
  CHECK(q2[0] == doctest::Approx(std::sqrt(l2 * g.cell_volume())).epsilon(1e-10));
  CHECK_THROWS_AS(column_norms(ks, 3.0, {0.0}), ContractError);

  // the column against the operator applied to a point mass
  auto col = schwartz_kernel_column(F, g, ip, 0, tr);
  double gap = 0;
  for (std::size_t i = 0; i < v.size(); ++i) gap = std::max(gap, std::fabs(col.values[i].real() - v[i]));
  CHECK(gap <= 1e-10 * col.sup_norm());

  // blocks of different heights agree
  std::vector<double> rows(v.size());
  ks.for_each_block(5, 0, [&](std::size_t ip0, std::size_t count, const double* b) {
    std::copy(b, b + count * ms, rows.begin() + ip0 * ms);
  });
  double gap2 = 0;
  for (std::size_t i = 0; i < v.size(); ++i) gap2 = std::max(gap2, std::fabs(rows[i] - v[i]));
  CHECK(gap2 <= 1e-13 * col.sup_norm());
}

TEST_CASE("spectral column mass against the grid") {
  auto g = small_grid(5.0, 48, 2.0, 128);
  SpectralTruncation tr{400, 80.0, XiZeroMode::drop};
  auto F = MultiplierProfile::from_function([](double l) { return std::exp(-l / 20); }, 0, 80, "F");
  std::size_t ip = 26 * 48 + 24;
  KernelSlices ks(g, F, tr, ip);
  double spec = column_spectral_mass(F, g, g.prime_point(ip), 0.0, 80.0, false);
  CHECK(ks.l2_sq() == doctest::Approx(spec).epsilon(1e-6));
}

TEST_CASE("operator norms on grid fields") {
  auto g = small_grid(1.0, 4, 1.0, 4);
  auto id = [](const Field& f) { return f; };
  CHECK(op_norm(g, id, 1.0, 1.0).value == doctest::Approx(1.0));
  auto est = op_norm(g, id, 1.5, 1.5);
  CHECK(est.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(est.certificate == Certificate::lower_bound);
  // multiplication by a function: the p -> p norm is its sup
  auto mul = [](const Field& f) {
    Field o = f;
    for (std::size_t i = 0; i < o.values.size(); ++i) o.values[i] *= 1.0 + 0.1 * double(i % 7);
    return o;
  };
  CHECK(op_norm(g, mul, 1.0, 1.0).value == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(op_norm(g, mul, 1.7, 1.7).value == doctest::Approx(1.6).epsilon(1e-6));
}

TEST_CASE("kernel support at the top level scale") {
  auto F = smooth_bump(0.25, 1.0);
  CutoffSpec c;
  auto P = dyadic_pieces(F, c, 1);
  auto g = small_grid(2.1, 96, 4.0, 5376);
  SpectralTruncation tr{int(std::ceil(4096 * 4 / (2 * std::numbers::pi))) + 10, 4096.0};
  MetricPoint y{{0.0, 0.0}, {0.0}};
  auto rep = kernel_support_check(P[0], 0, 1.0, g, tr, y);
  REQUIRE(rep.outside_fraction.size() == 3);
  CHECK(rep.outside_fraction[1] <= 0.01);
  CHECK(rep.inside_mass[0] <= rep.inside_mass[1]);
  CHECK(rep.inside_mass[1] <= rep.inside_mass[2]);
  CHECK(rep.tail_mass <= 1e-3 * rep.retained_mass);
  CHECK_THROWS_AS(kernel_support_check(P[0], 0, 1.0, small_grid(2.1, 96, 2.0, 64), tr, y), AliasingError);
  CHECK(second_reach({0.0, 0.0}, y, 1.0) == doctest::Approx(1.0));
  CHECK(second_reach({3.0, 0.0}, y, 1.0) == -1.0);
  MetricPoint y1{{1.0, 0.0}, {0.0}};
  double reach = second_reach({1.0, 0.0}, y1, 0.5);
  CHECK(reach == doctest::Approx(1.0));
  CHECK(grushin_distance({{1.0, 0.0}, {reach}}, y1) == doctest::Approx(0.5));
}

TEST_CASE("weighted restriction experiment") {
  Dims d{2, 1};
  CHECK(restriction_admissible(d, 1.0, 0.0));
  CHECK(restriction_admissible(d, 1.0, 0.25));
  CHECK_FALSE(restriction_admissible(d, 1.0, 0.5));
  CHECK(restriction_admissible(d, 1.0, 0.49));
  CHECK_FALSE(restriction_admissible(d, 1.1, 0.1));
  CHECK(restriction_admissible(Dims{3, 2}, 1.1, 0.1));
  CHECK_FALSE(restriction_admissible(Dims{3, 1}, 1.1, 0.1));
  CHECK_FALSE(restriction_admissible(d, 2.5, 0.0));

  auto g = small_grid(2.0, 32, 1.0, 128);
  SpectralTruncation tr{int(64 / (2 * std::numbers::pi)) + 10, 64.0};
  auto bump = smooth_bump(0.25, 1.0);
  auto prof = restriction_profile(bump, 4.0);
  CHECK(prof.a == 1.0);
  CHECK(prof.b == 16.0);
  CHECK(prof(9.0).real() == doctest::Approx(bump(0.75).real()));
  auto res = weighted_restriction_experiment(g, tr, 1.0, {0.0, 0.25}, {2, 4, 8}, bump);
  REQUIRE(res.reports.size() == 2);
  // gamma = 0 is the unweighted column maximum, bit for bit
  auto plain = column_max(restriction_profile(bump, 8.0), g, tr, prime_representatives(g.prime), 2.0, {0.0});
  CHECK(res.reports[0].norms.back() == plain.value[0]);
  CHECK(res.reports[0].fitted_slope > 1.0);
  CHECK(res.reports[1].fitted_slope < res.reports[0].fitted_slope);
  CHECK_THROWS_AS(weighted_restriction_experiment(g, tr, 1.0, {0.6}, {2, 4, 8}, bump), ContractError);
  CHECK_THROWS_AS(weighted_restriction_experiment(g, tr, 1.0, {0.0}, {2, 4, 16}, bump), TruncationError);
  CHECK_THROWS_AS(restriction_profile(smooth_bump(0.1, 1.0), 2.0), DomainError);
}

TEST_CASE("localized restriction experiment") {
  auto g = small_grid(4.0, 64, 2.0, 256);
  SpectralTruncation tr{int(64 * 2 / (2 * std::numbers::pi)) + 10, 64.0};
  auto bump = smooth_bump(0.25, 1.0);
  std::vector<MetricPoint> ys{{{1.0, 0.0}, {0.0}}, {{2.0, 0.0}, {0.0}}, {{3.0, 0.0}, {0.0}}};
  auto res = localized_restriction_experiment(g, tr, 1.0, 0.25, {2, 4, 8}, ys, 0.2, bump);
  CHECK(res.in_R.size() == 3);
  CHECK(res.in_y.size() == 3);
  CHECK(res.rows.size() == 9);
  // a single-point ball is one column
  KernelSlices ks(g, restriction_profile(bump, 4.0), tr, g.locate(ys[1]).first);
  auto one = localized_restriction_experiment(g, tr, 1.0, 0.25, {2, 4, 8}, ys, 0.1, bump);
  CHECK(one.rows[4].norm == doctest::Approx(column_norms(ks, 2.0, {0.25})[0]).epsilon(1e-14));
  CHECK_THROWS_AS(localized_restriction_experiment(g, tr, 1.0, 0.25, {2, 4, 8}, ys, 0.3, bump), ContractError);
  std::vector<MetricPoint> rev{ys[1], ys[0]};
  CHECK_THROWS_AS(localized_restriction_experiment(g, tr, 1.0, 0.25, {2, 4, 8}, rev, 0.2, bump), ContractError);
}

TEST_CASE("Bochner-Riesz sweep") {
  auto g = small_grid(1.5, 32, 2.0, 512);
  SpectralTruncation tr{int(256 * 2 / (2 * std::numbers::pi)) + 10, 256.0};
  std::vector<std::size_t> ys{origin(g)};
  auto res = bochner_riesz_sweep(g, tr, 1.0, {0.0, 0.5, 2.0}, {4, 8, 16}, ys);
  REQUIRE(res.rows.size() == 9);
  for (const auto& r : res.rows) {
    CHECK(r.certificate == Certificate::lower_bound);
    // the column integrates to the multiplier at 0
    CHECK(r.norm >= 0.99);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(res.rows[i].norm >= res.rows[3 + i].norm);
    CHECK(res.rows[3 + i].norm >= res.rows[6 + i].norm);
  }
  CHECK(res.max_min_ratio[0] >= res.max_min_ratio[2]);
  CHECK_THROWS_AS(bochner_riesz_sweep(g, tr, 1.0, {1.0}, {32}, ys), TruncationError);
}

TEST_CASE("multiplier norms against Sobolev norms") {
  auto g = small_grid(2.0, 32, 2.0, 256);
  SpectralTruncation tr{int(128 * 2 / (2 * std::numbers::pi)) + 10, 128.0};
  auto F = smooth_bump(0.25, 1.0);
  std::vector<std::size_t> ys{origin(g)};
  auto res = multiplier_norm_experiment(g, tr, 1.0, F, {1.0, 2.0}, {1.0 / 16, 1.0 / 64}, ys);
  REQUIRE(res.sobolev.size() == 2);
  CHECK(res.sobolev[0] < res.sobolev[1]);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t t = 0; t < 2; ++t) CHECK(res.ratio[s][t] == doctest::Approx(res.rows[t].norm / res.sobolev[s]));
  // F(t L) at t is the column of the dilated profile
  auto direct = column_max(F.dilate(1.0 / 16), g, tr, ys, 1.0, {0.0});
  CHECK(res.rows[0].norm == direct.value[0]);
  CHECK_THROWS_AS(multiplier_norm_experiment(g, tr, 1.0, F, {1.0}, {1.0 / 256}, ys), TruncationError);
}

TEST_CASE("heat kernel Gaussian bound") {
  auto g = small_grid(4.0, 48, 12.0, 4096);
  SpectralTruncation tr{int(700 * 12 / (2 * std::numbers::pi)) + 10, 700.0};
  std::vector<MetricPoint> ys{{{0.0, 0.0}, {0.0}}, {{1.0, 0.0}, {0.0}}};
  auto rep = heat_gaussian_check(g, tr, {0.1}, ys);
  CHECK(rep.b > 0);
  CHECK(rep.r_squared >= 0.9);
  CHECK(rep.min_relative >= -1e-6);
  // p_t(0, 0) = (2 pi)^-1 int xi / (2 pi sinh(2 t |xi|)) dxi = 1 / (32 t^2), V(0, sqrt t) = t^2
  CHECK(rep.diag_value[0] == doctest::Approx(1.0 / 32).epsilon(1e-8));
  CHECK_THROWS_AS(heat_gaussian_check(small_grid(4.0, 48, 1.0, 512), tr, {0.1}, ys), AliasingError);
}

TEST_CASE("geometry suite") {
  GeometrySuiteOptions opt;
  opt.triples = 20000;
  opt.interface_points = 2000;
  opt.volume_samples = 20000;
  opt.x_norms = {0.0, 2.0};
  opt.radii = {0.5, 2.0};
  opt.lambdas = {2.0, 8.0};
  auto a = geometry_suite(Dims{2, 1}, 5, opt);
  CHECK(a.interface_exact);
  CHECK(a.quasi_triangle <= 4.0);
  CHECK(a.quasi_triangle >= 1.0);
  CHECK(a.volume_C <= 16.0);
  CHECK(a.doubling_max <= 1.5);
  auto b = geometry_suite(Dims{2, 1}, 5, opt);
  CHECK(a.to_json() == b.to_json());
}
