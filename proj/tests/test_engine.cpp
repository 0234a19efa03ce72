#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "grushin/errors.hpp"

#include "oracles.hpp"

using namespace grushin;

TEST_CASE("dims and grid plumbing") {
  Dims d{2, 1};
  CHECK(d.Q() == 4);
  CHECK(d.D() == 3);
  CHECK(Dims{1, 2}.D() == 4);
  auto g = fixture::identity_grid();
  CHECK(g.cell_volume() == doctest::Approx(std::pow(12.0 / 64, 2) * (std::numbers::pi / 128)));
  CHECK(g.xi_unit() == doctest::Approx(2.0));
  auto p = g.point(77, 5);
  auto [ip, is] = g.locate(p);
  CHECK(ip == 77);
  CHECK(is == 5);
  p.x_prime[0] += 0.01;
  CHECK_THROWS_AS(g.locate(p), ContractError);
  GrushinGrid bad = g;
  bad.n_second = 7;
  CHECK_THROWS_AS(bad.validate(), ContractError);
}

TEST_CASE("partial Fourier transform") {
  std::mt19937_64 rng(1);
  auto g = fixture::identity_grid();
  g.prime.n = 16;
  g.n_second = 32;
  auto f = fixture::random_field(g, rng);
  auto pf = partial_fourier(f);
  CHECK(std::fabs(pf.norm_sq() - f.norm() * f.norm()) <= 1e-10 * f.norm() * f.norm());
  auto back = inverse_partial_fourier(pf);
  CHECK(distance(back, f) <= 1e-12 * f.norm());

  Field c(g);
  for (std::size_t ip = 0; ip < g.prime_size(); ++ip)
    for (std::size_t is = 0; is < g.second_size(); ++is) c.at(ip, is) = std::sin(0.3 * ip);
  auto pc = partial_fourier(c);
  double zero = 0, rest = 0;
  for (std::size_t is = 0; is < g.second_size(); ++is)
    for (std::size_t ip = 0; ip < g.prime_size(); ++ip)
      (is == 0 ? zero : rest) += std::norm(pc.slice(is)[ip]);
  CHECK(rest <= 1e-24 * zero);

  // an exponential lands on its lattice slice with amplitude sqrt(2S)
  auto e = fixture::eigenmode(g, {0, 0}, 3);
  auto pe = partial_fourier(e);
  auto phi0 = phi_xi_eval({0, 0}, 6.0, g.prime_point(40));
  CHECK(std::abs(pe.slice(3)[40] - std::sqrt(2 * g.S) * phi0) <= 1e-12);
}

TEST_CASE("engine identities on the 64^2 x 128 grid") {
  std::mt19937_64 rng(2);
  auto g = fixture::identity_grid();
  auto tr = fixture::identity_trunc();
  auto f = fixture::band_limited(g, tr.lambda_max, rng);

  SUBCASE("resolution of identity") {
    auto one = MultiplierProfile::constant(1.0, 0.0, tr.lambda_max);
    CHECK(distance(apply_multiplier(one, f, tr), f) <= 1e-8 * f.norm());
  }
  SUBCASE("heat semigroup and contraction") {
    auto a = heat_apply(0.05, heat_apply(0.07, f, tr), tr);
    auto b = heat_apply(0.12, f, tr);
    CHECK(distance(a, b) <= 1e-8 * f.norm());
    CHECK(b.norm() <= f.norm());
  }
  SUBCASE("eigenvectors") {
    for (auto [nu, m] : {std::pair{MultiIndex{0, 0}, 1}, std::pair{MultiIndex{1, 2}, -1},
                         std::pair{MultiIndex{1, 0}, 2}, std::pair{MultiIndex{0, 0}, -4}}) {
      auto e = fixture::eigenmode(g, nu, m);
      double lam = (2.0 * (nu[0] + nu[1]) + 2) * g.xi_unit() * std::abs(m);
      auto F = MultiplierProfile::from_function([](double l) { return std::cos(l) + 0.5 * l; }, 0, 1e3, "F");
      auto out = apply_multiplier(F, e, tr);
      Field want = e;
      for (auto& v : want.values) v *= F(lam);
      CHECK(distance(out, want) <= 1e-8 * want.norm());
    }
  }
  SUBCASE("multiplicativity and Plancherel") {
    auto F = MultiplierProfile::from_function([](double l) { return std::sin(l); }, 0, 1e3, "sin");
    auto G = MultiplierProfile::from_function([](double l) { return 1.0 / (1 + l); }, 0, 1e3, "G");
    auto a = apply_multiplier(F, apply_multiplier(G, f, tr), tr);
    auto b = apply_multiplier(F.times(G), f, tr);
    CHECK(distance(a, b) <= 1e-8 * f.norm());
    auto r = fixture::random_field(g, rng);
    CHECK(apply_multiplier(F, r, tr).norm() <= r.norm() + 1e-9);
  }
  SUBCASE("self-adjointness on unrestricted fields") {
    auto F = MultiplierProfile::from_function([](double l) { return std::exp(-l / 5) * std::cos(l); }, 0, 1e3, "F");
    auto u = fixture::random_field(g, rng);
    auto v = fixture::random_field(g, rng);
    auto lhs = inner_complex(apply_multiplier(F, u, tr), v);
    auto rhs = inner_complex(u, apply_multiplier(F, v, tr));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * u.norm() * v.norm());
  }
}

TEST_CASE("truncation and domain errors") {
  std::mt19937_64 rng(4);
  auto g = fixture::identity_grid();
  g.n_second = 16;
  auto f = fixture::random_field(g, rng);
  SpectralTruncation tr{2, 16.0};
  try {
    apply_multiplier(MultiplierProfile::constant(1.0, 0, 100), f, tr);
    FAIL("expected truncation");
  } catch (const TruncationError& e) {
    CHECK(e.level == 3);
    CHECK(e.xi == doctest::Approx(2.0));
  }
  auto bad = MultiplierProfile::from_function([](double l) { return 1.0 / (l - 6.0); }, 0, 100, "pole");
  CHECK_THROWS_AS(apply_multiplier(bad, f, SpectralTruncation{10, 16.0}), DomainError);
  CHECK_THROWS_AS(heat_apply(0.0, f, tr), DomainError);
  // a grid too coarse for the requested levels
  SpectralTruncation deep{400, 400.0};
  CHECK_THROWS_AS(apply_multiplier(MultiplierProfile::constant(1.0, 0, 400), f, deep), TruncationError);
  CHECK_THROWS_AS(schwartz_kernel_column(MultiplierProfile::heat(0.01), g, 0, 0, SpectralTruncation{4000, 3000.0}),
                  AliasingError);
}

TEST_CASE("Bochner-Riesz and wave propagators") {
  std::mt19937_64 rng(6);
  auto g = fixture::identity_grid();
  g.n_second = 32;
  auto tr = fixture::identity_trunc();
  auto f = fixture::band_limited(g, tr.lambda_max, rng);
  SpectralTruncation drop = tr;
  drop.xi_zero_mode = XiZeroMode::drop;
  auto r = fixture::random_field(g, rng);
  auto p1 = bochner_riesz_apply(1.0 / 9.0, 0.0, r, drop);
  auto p2 = bochner_riesz_apply(1.0 / 9.0, 0.0, p1, drop);
  CHECK(distance(p1, p2) <= 1e-8 * r.norm());
  CHECK(distance(bochner_riesz_apply(1e-8, 1.0, f, tr), f) <= 1e-6 * f.norm());
  double prev = 1e300;
  for (double delta : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    double n = bochner_riesz_apply(1.0 / 12.0, delta, f, tr).norm();
    CHECK(n <= prev + 1e-12);
    prev = n;
  }
  CHECK(distance(wave_cosine_apply(0.0, f, tr), f) <= 1e-8 * f.norm());
  CHECK(wave_cosine_apply(0.7, r, tr).norm() <= r.norm() + 1e-9);
}

TEST_CASE("heat kernel columns") {
  GrushinGrid g;
  g.prime = PrimeGrid{4.0, 64, 2};
  g.S = 4.0;
  g.n_second = 512;
  SpectralTruncation tr{2000, 1000.0};
  const double t = 0.1;
  auto heat = MultiplierProfile::heat(t);
  std::size_t ip = 32 * 64 + 36, is = 256;
  auto col = schwartz_kernel_column(heat, g, ip, is, tr);
  double mass = 0, mx = 0, mn = 0;
  for (const auto& v : col.values) {
    mass += v.real();
    mx = std::max(mx, v.real());
    mn = std::min(mn, v.real());
  }
  CHECK(std::fabs(mass * g.cell_volume() - 1.0) <= 0.02);
  CHECK(mn >= -1e-6 * mx);
  // symmetry of the kernel between two grid points
  std::size_t ip2 = 30 * 64 + 41, is2 = 250;
  auto col2 = schwartz_kernel_column(heat, g, ip2, is2, tr);
  CHECK(std::fabs(col.at(ip2, is2).real() - col2.at(ip, is).real()) <= 1e-9 * mx);
  // closed form: the x' factors are Mehler kernels on each xi slice
  auto y = g.prime_point(ip);
  auto x = g.prime_point(ip2);
  double dz = g.second_point(int(is2)) - g.second_point(int(is));
  // xi = 0 slice is the Euclidean heat kernel in x'
  double r2 = (x[0] - y[0]) * (x[0] - y[0]) + (x[1] - y[1]) * (x[1] - y[1]);
  double sum = std::exp(-r2 / (4 * t)) / (4 * std::numbers::pi * t);
  for (int m = 1; m <= 2000; ++m) {
    double xi = g.xi_unit() * m;
    double k = oracle::mehler(t, xi, x[0], y[0]) * oracle::mehler(t, xi, x[1], y[1]);
    sum += 2 * k * std::cos(xi * dz);
  }
  CHECK(col.at(ip2, is).real() != 0.0);
  CHECK(col2.at(ip, is).real() == doctest::Approx(sum / (2 * g.S)).epsilon(1e-6));
}

TEST_CASE("kernel column agrees with applying the operator to a grid delta") {
  GrushinGrid g;
  g.prime = PrimeGrid{4.5, 56, 2};
  g.S = 1.0;
  g.n_second = 64;
  SpectralTruncation tr{40, 20.0};
  auto F = MultiplierProfile::from_function([](double l) { return std::exp(-l / 10.0) * (1 + std::sin(l)); }, 0, 20, "F");
  std::size_t ip = 25 * 56 + 30, is = 7;
  auto fast = schwartz_kernel_column(F, g, ip, is, tr);
  auto slow = apply_multiplier(F, grid_delta(g, ip, is), tr);
  CHECK(distance(fast, slow) <= 1e-10 * slow.norm());
  // Hermitian symmetry across two columns
  std::size_t ip2 = 22 * 56 + 33, is2 = 20;
  auto other = schwartz_kernel_column(F, g, ip2, is2, tr);
  CHECK(std::abs(fast.at(ip2, is2) - std::conj(other.at(ip, is))) <= 1e-9 * fast.sup_norm());
  // the projector column reproduces band-limited fields by quadrature
  std::mt19937_64 rng(8);
  auto f = fixture::band_limited(g, 12.0, rng);
  SpectralTruncation band{40, 12.0};
  auto one = MultiplierProfile::constant(1.0, 0.0, 12.0);
  auto col = schwartz_kernel_column(one, g, ip, is, band);
  cplx rep = 0.0;
  for (std::size_t jp = 0; jp < g.prime_size(); ++jp)
    for (std::size_t js = 0; js < g.second_size(); ++js) rep += col.at(jp, js) * f.at(jp, js);
  rep *= g.cell_volume();
  CHECK(std::abs(rep - f.at(ip, is)) <= 1e-8 * f.sup_norm());
  // Parseval route for the column norm
  KernelSlices ks(g, F, tr, ip);
  CHECK(std::sqrt(ks.l2_sq()) == doctest::Approx(fast.norm()).epsilon(1e-10));
}

TEST_CASE("finite-difference conjugation") {
  std::mt19937_64 rng(10);
  GrushinGrid g;
  g.prime = PrimeGrid{7.0, 256, 2};
  g.S = std::numbers::pi;
  g.n_second = 128;
  SpectralTruncation tr{10, 8.0};
  auto f = fixture::band_limited(g, 8.0, rng);
  CHECK(fd_conjugation_residual(f, tr) <= 1e-4);
}

TEST_CASE("field snapshots round trip") {
  std::mt19937_64 rng(12);
  auto g = fixture::identity_grid();
  g.prime.n = 12;
  g.n_second = 8;
  auto f = fixture::random_field(g, rng);
  std::stringstream ss;
  save_field(f, ss);
  auto h = load_field(ss);
  CHECK(h.grid.prime.n == 12);
  CHECK(h.grid.S == g.S);
  REQUIRE(h.values.size() == f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(h.values[i] == f.values[i]);
  std::stringstream junk("not a field");
  CHECK_THROWS_AS(load_field(junk), ContractError);
}
