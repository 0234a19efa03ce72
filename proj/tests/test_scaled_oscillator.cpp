#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "grushin/errors.hpp"
#include "grushin/scaled_oscillator.hpp"
#include "oracles.hpp"

using namespace grushin;

namespace {

PrimeField random_span(const PrimeGrid& g, double xi, int K, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  PrimeField f(g);
  for (int k = 0; k <= K; ++k)
    for (const auto& nu : multiindex_enum(g.d1, k)) {
      std::complex<double> c(gauss(rng), gauss(rng));
      for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
        std::vector<double> x;
        std::size_t r = idx;
        for (int ax = 0; ax < g.d1; ++ax) {
          x.insert(x.begin(), g.point(int(r % g.n)));
          r /= g.n;
        }
        f.values[idx] += c * phi_xi_eval(nu, xi, x);
      }
    }
  return f;
}

double dist(const PrimeField& a, const PrimeField& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::norm(a.values[i] - b.values[i]);
  return std::sqrt(s * a.grid.weight());
}

}  // namespace

TEST_CASE("scaled eigenfunctions") {
  std::vector<double> x{0.7, -0.2};
  CHECK(phi_xi_eval({0, 0}, 1.0, x) == doctest::Approx(phi_eval({0, 0}, x)).epsilon(1e-15));
  CHECK_THROWS_AS(phi_xi_eval({0, 0}, 0.0, x), DomainError);
  CHECK_THROWS_AS(phi_xi_eval({0, 0}, -1.0, x), DomainError);
  for (double xi : {0.5, 2.0, 8.0}) {
    PrimeGrid g{9.0 / std::sqrt(xi) + 1.0, 128, 2};
    for (const auto& nu : {MultiIndex{0, 0}, MultiIndex{2, 1}, MultiIndex{0, 5}}) {
      PrimeField f(g);
      for (std::size_t idx = 0; idx < f.values.size(); ++idx)
        f.values[idx] = phi_xi_eval(nu, xi, std::vector<double>{g.point(int(idx / g.n)), g.point(int(idx % g.n))});
      CHECK(std::fabs(f.norm() - 1.0) <= 1e-8);
    }
  }
}

TEST_CASE("eigen relation of the scaled oscillator by finite differences") {
  const double xi = 2.0;
  const int n = 1200;
  PrimeGrid g{6.0, n, 1};
  for (int k : {0, 1, 3, 5}) {
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = phi_xi_eval({k}, xi, std::vector<double>{g.point(i)});
    auto d2 = oracle::fd4_d2(f, g.spacing());
    double r = 0, nn = 0;
    for (int i = 0; i < n; ++i) {
      double x = g.point(i);
      double v = -d2[i] + x * x * xi * xi * f[i] - (2 * k + 1) * xi * f[i];
      r += v * v;
      nn += f[i] * f[i];
    }
    CHECK(std::sqrt(r / nn) / ((2 * k + 1) * xi) <= 1e-5);
  }
}

TEST_CASE("oscillator multipliers") {
  std::mt19937_64 rng(11);
  const double xi = 4.0;
  PrimeGrid g{5.0, 64, 2};
  const int K = 5;
  XiSlice slice{xi, 2, 12};
  auto f = random_span(g, xi, K, rng);

  SUBCASE("resolution of identity") {
    auto one = MultiplierProfile::constant(1.0, 2 * xi - 0.1, (2 * K + 2) * xi + 0.1);
    CHECK(dist(apply_multiplier_oscillator(one, slice, f), f) <= 1e-8 * f.norm());
  }
  SUBCASE("indicator matches the unscaled projection on the dilated grid") {
    PrimeGrid gs{g.X * std::sqrt(xi), g.n, 2};
    PrimeField fs(gs);
    fs.values = f.values;  // f(x) = fs(sqrt(xi) x) on matching indices
    for (int k = 0; k <= K; ++k) {
      auto ind = MultiplierProfile::indicator((2 * k + 2) * xi, (2 * k + 2) * xi);
      auto a = apply_multiplier_oscillator(ind, slice, f);
      auto b = project_onto_level(fs, k);
      double s = 0, nb = 0;
      for (std::size_t i = 0; i < a.values.size(); ++i) {
        s += std::norm(a.values[i] - b.values[i]);
        nb += std::norm(b.values[i]);
      }
      CHECK(std::sqrt(s) <= 1e-8 * std::sqrt(nb) + 1e-12);
    }
  }
  SUBCASE("linearity, calculus and unitarity") {
    auto F = MultiplierProfile::from_function([](double l) { return std::sin(l) + 2.0; }, 0, 100, "F");
    auto G = MultiplierProfile::from_function([](double l) { return std::exp(-l / 20); }, 0, 100, "G");
    auto aFbG = MultiplierProfile::from_function(
        [&](double l) { return 2.5 * F(l) - 1.5 * G(l); }, 0, 100, "aFbG");
    auto lhs = apply_multiplier_oscillator(aFbG, slice, f);
    auto fa = apply_multiplier_oscillator(F, slice, f);
    auto ga = apply_multiplier_oscillator(G, slice, f);
    PrimeField rhs(g);
    for (std::size_t i = 0; i < rhs.values.size(); ++i) rhs.values[i] = 2.5 * fa.values[i] - 1.5 * ga.values[i];
    CHECK(dist(lhs, rhs) <= 1e-12 * f.norm());
    auto comp = apply_multiplier_oscillator(F, slice, ga);
    auto prod = apply_multiplier_oscillator(F.times(G), slice, f);
    CHECK(dist(comp, prod) <= 1e-9 * f.norm());
    double s = 0;
    for (int k = 0; k <= K; ++k) {
      auto ind = MultiplierProfile::indicator((2 * k + 2) * xi, (2 * k + 2) * xi);
      double p = apply_multiplier_oscillator(ind, slice, f).norm();
      s += p * p;
    }
    CHECK(std::fabs(s - f.norm() * f.norm()) <= 1e-8 * f.norm() * f.norm());
  }
  SUBCASE("truncation is reported with the level") {
    XiSlice small{xi, 2, 2};
    auto one = MultiplierProfile::constant(1.0, 0, 100);
    try {
      apply_multiplier_oscillator(one, small, f);
      FAIL("expected a truncation error");
    } catch (const TruncationError& e) {
      CHECK(e.level == 3);
      CHECK(e.xi == xi);
    }
  }
}

TEST_CASE("scaling covariance") {
  std::mt19937_64 rng(5);
  const double s = 3.0;
  PrimeGrid g1{7.0, 72, 1};
  PrimeGrid gs{7.0 / std::sqrt(s), 72, 1};
  auto F = MultiplierProfile::from_function([](double l) { return 1.0 / (1.0 + l); }, 0, 40, "F");
  std::normal_distribution<double> gauss;
  PrimeField f1(g1);
  for (int k = 0; k <= 6; ++k) {
    double c = gauss(rng);
    for (int i = 0; i < g1.n; ++i) f1.values[i] += c * hermite_eval(k, g1.point(i));
  }
  PrimeField fs(gs);
  fs.values = f1.values;  // fs(x) = f1(sqrt(s) x)
  auto a = apply_multiplier_oscillator(F.dilate(s), XiSlice{1.0, 1, 40}, f1);
  auto b = apply_multiplier_oscillator(F, XiSlice{s, 1, 40}, fs);
  double d = 0, nn = 0;
  for (int i = 0; i < g1.n; ++i) {
    d += std::norm(a.values[i] - b.values[i]);
    nn += std::norm(a.values[i]);
  }
  CHECK(std::sqrt(d / nn) <= 1e-7);
}

TEST_CASE("level restriction norms") {
  for (int d1 : {1, 2, 3}) {
    auto e0 = restriction_norm_level(0, 2.0, 1.0, d1);
    CHECK(e0.certificate == Certificate::exact);
    CHECK(e0.value == doctest::Approx(std::pow(2.0 / std::numbers::pi, d1 / 4.0)).epsilon(1e-12));
    for (int k : {1, 5}) {
      double a = restriction_norm_level(k, 1.5, 1.0, d1).value;
      double b = restriction_norm_level(k, 3.0, 1.0, d1).value;
      CHECK(std::fabs(b / a / std::pow(2.0, d1 / 4.0) - 1.0) <= 0.05);
    }
  }
  std::vector<double> lx, ly;
  for (int k = 4; k <= 64; k *= 2) {
    lx.push_back(std::log(2.0 * k + 3));
    ly.push_back(std::log(restriction_norm_level(k, 1.0, 1.0, 3).value));
  }
  CHECK(std::fabs(oracle::ols_slope(lx, ly) - 0.25) <= 0.15);
  CHECK_THROWS_AS(restriction_norm_level(1, 1.0, 2.5, 2), DomainError);
  PrimeGrid g{7.0, 40, 2};
  auto l2 = restriction_norm_level(2, 1.0, 2.0, g);
  CHECK(l2.certificate == Certificate::lower_bound);
  CHECK(l2.value == doctest::Approx(1.0).epsilon(1e-9));
  auto mid = restriction_norm_level(2, 1.0, 1.5, g, OpNormOptions{4, 200, 1e-10, 3});
  CHECK(mid.certificate == Certificate::lower_bound);
  CHECK(mid.value > 0.0);
}

TEST_CASE("weighted oscillator ratio") {
  std::mt19937_64 rng(21);
  const double xi = 2.0;
  PrimeGrid g{7.0, 64, 2};
  XiSlice slice{xi, 2, 6};
  auto f = random_span(g, xi, 6, rng);
  CHECK(weighted_oscillator_check(f, slice, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
  double worst = 0;
  for (int i = 0; i < 5; ++i) {
    auto h = random_span(g, xi, 6, rng);
    worst = std::max(worst, weighted_oscillator_check(h, slice, 0.5));
  }
  CHECK(worst < 10.0);
  PrimeField zero(g);
  CHECK_THROWS_AS(weighted_oscillator_check(zero, slice, 0.5), DegenerateInputError);
}

TEST_CASE("one-dimensional oscillator inequalities, coefficient and quadrature routes") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss;
  const int N = 1024;
  const double X = 22.0, h = 2 * X / N;
  std::vector<std::vector<double>> tab(N);
  for (int i = 0; i < N; ++i) tab[i] = hermite_table(40, -X + i * h);
  for (int s = 0; s < 20; ++s) {
    std::vector<double> a(41);
    for (auto& v : a) v = gauss(rng);
    auto r = oscillator_norms_1d(a);
    CHECK(r.u_f <= r.h_half_f + 1e-12);
    CHECK(r.u2_f <= std::sqrt(5.0) * r.h_f + 1e-12);
    std::vector<double> f(N, 0.0);
    for (int i = 0; i < N; ++i)
      for (int k = 0; k <= 40; ++k) f[i] += a[k] * tab[i][k];
    auto d2 = oracle::spectral_d2(f, h);
    double uf = 0, u2f = 0, hf = 0, hh = 0;
    for (int i = 0; i < N; ++i) {
      double u = -X + i * h;
      uf += u * u * f[i] * f[i];
      u2f += u * u * u * u * f[i] * f[i];
      double Hf = -d2[i] + u * u * f[i];
      hf += Hf * Hf;
      hh += f[i] * Hf;
    }
    CHECK(std::sqrt(uf * h) == doctest::Approx(r.u_f).epsilon(1e-8));
    CHECK(std::sqrt(u2f * h) == doctest::Approx(r.u2_f).epsilon(1e-8));
    CHECK(std::sqrt(hf * h) == doctest::Approx(r.h_f).epsilon(1e-8));
    CHECK(std::sqrt(hh * h) == doctest::Approx(r.h_half_f).epsilon(1e-8));
  }
}
