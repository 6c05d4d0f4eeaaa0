#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wsym/measure.hpp"
#include "wsym/profiles.hpp"

using namespace wsym;
using std::numbers::pi;

TEST_CASE("euclidean ball profile") {
  auto p2 = euclidean_ball_profile(2);
  CHECK(p2.M(1.0) == doctest::Approx(pi));
  CHECK(p2.q(pi) == doctest::Approx(2 * pi));
  CHECK(p2.M_inverse(p2.M(0.37)) == doctest::Approx(0.37));
  auto p1 = euclidean_ball_profile(1);
  CHECK(p1.M(0.8) == doctest::Approx(1.6));
  CHECK(p1.q(0.3) == doctest::Approx(2.0));
  CHECK(p1.q(1.7) == doctest::Approx(2.0));
  auto p3 = euclidean_ball_profile(3);
  CHECK(p3.M(1.0) == doctest::Approx(4.0 * pi / 3.0));
  CHECK(std::isinf(p2.total_mass));
}

TEST_CASE("ball shape follows 1/(1+t^2)") {
  auto p = euclidean_ball_profile(2);
  const double x[] = {1.0, 1.0};
  CHECK(p.f(x) == doctest::Approx(1.0 / 3.0));
  CHECK(p.shape(0.0) == 1.0);
}

TEST_CASE("radial log-convex profile") {
  SUBCASE("w = 0 reduces to the euclidean profile") {
    auto r = radial_logconvex_profile([](double) { return 0.0; }, 2, 2.0);
    auto e = euclidean_ball_profile(2);
    for (double t : {0.1, 0.5, 1.0, 1.7}) {
      CHECK(r.M(t) == doctest::Approx(e.M(t)).epsilon(1e-7));
      CHECK(r.q(r.M(t)) == doctest::Approx(e.q(e.M(t))).epsilon(1e-6));
    }
  }
  SUBCASE("w = s^2 in one dimension") {
    auto r = radial_logconvex_profile([](double s) { return s * s; }, 1, 2.0);
    const double oracle_m = 2.0 * oracle::simpson([](double s) { return std::exp(s * s); }, 0, 1);
    CHECK(oracle_m == doctest::Approx(2.9253).epsilon(1e-4));
    CHECK(r.M(1.0) == doctest::Approx(oracle_m).epsilon(1e-8));
    CHECK(r.q(r.M(1.0)) == doctest::Approx(2 * std::numbers::e).epsilon(1e-6));
    CHECK_FALSE(r.closed_form);
  }
  SUBCASE("round trips through the table") {
    auto r = radial_logconvex_profile([](double s) { return 0.5 * s * s; }, 2, 1.5);
    for (double t : {0.01, 0.3, 0.9, 1.4}) CHECK(r.M_inverse(r.M(t)) == doctest::Approx(t).epsilon(1e-9));
    for (double m : {0.05, 1.0, 4.0}) CHECK(r.M(r.M_inverse(m)) == doctest::Approx(m).epsilon(1e-9));
  }
  SUBCASE("concave w is rejected") {
    CHECK_THROWS_WITH_AS(radial_logconvex_profile([](double s) { return -s * s; }, 2, 1.0),
                         "radial log-convexity violated", InvalidArgument);
  }
  SUBCASE("from a potential and grid") {
    Potential w{[](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; },
                [](std::span<const double> x, std::span<double> g) {
                  g[0] = 2 * x[0];
                  g[1] = 2 * x[1];
                },
                "W=|x|^2"};
    auto g = make_grid(DomainSpec::full_space(2), w, 16, 1e-6, Box::cube(2, -1, 1));
    auto r = radial_logconvex_profile(w, 2, *g);
    const double oracle_m = 2 * pi * oracle::simpson([](double s) { return s * std::exp(s * s); }, 0, 1);
    CHECK(r.M(1.0) == doctest::Approx(oracle_m).epsilon(1e-7));
  }
}

TEST_CASE("cone monomial profile") {
  auto c1 = cone_monomial_profile({1.0}, 2);
  const double C1 = oracle::cone_constant_2d({1.0});
  CHECK(C1 == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
  CHECK(c1.M(1.0) == doctest::Approx(C1).epsilon(1e-10));
  // homogeneity of degree N + alpha
  for (double s : {0.3, 2.0, 7.0}) CHECK(c1.M(s * 0.8) == doctest::Approx(std::pow(s, 3) * c1.M(0.8)).epsilon(1e-12));

  auto c2 = cone_monomial_profile({1.0, 1.0}, 2);
  const double C2 = oracle::cone_constant_2d({1.0, 1.0});
  CHECK(C2 == doctest::Approx(0.125).epsilon(1e-8));
  CHECK(c2.M(1.0) == doctest::Approx(C2).epsilon(1e-10));
  CHECK(c2.M(2.0) == doctest::Approx(16 * C2).epsilon(1e-12));
  CHECK(c2.q(c2.M(0.5)) == doctest::Approx(4 * C2 * 0.125).epsilon(1e-12));

  auto c3 = cone_monomial_profile({0.5, 2.5}, 2);
  CHECK(c3.M(1.0) == doctest::Approx(oracle::cone_constant_2d({0.5, 2.5})).epsilon(1e-6));

  CHECK_THROWS_AS(cone_monomial_profile({0.0}, 2), InvalidArgument);
  CHECK_THROWS_AS(cone_monomial_profile({1.0, 1.0, 1.0}, 2), InvalidArgument);
}

TEST_CASE("gaussian half-space profile") {
  auto g1 = gaussian_halfspace_profile({1.0}, 1);
  const double tail = oracle::normal_tail(1.0);
  CHECK(tail == doctest::Approx(0.15866).epsilon(1e-4));
  CHECK(g1.M(1.0) / g1.total_mass == doctest::Approx(tail).epsilon(1e-9));
  CHECK(g1.q(0.5 * g1.total_mass) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g1.M_inverse(g1.M(-0.7)) == doctest::Approx(-0.7).epsilon(1e-12));
  auto g2 = gaussian_halfspace_profile({0.6, 0.8}, 2);
  CHECK(g2.total_mass == doctest::Approx(2 * pi));
  const double x[] = {1.0, 1.0};
  CHECK(g2.param(x) == doctest::Approx(1.4));
  CHECK(g2.shape(0.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(gaussian_halfspace_profile({1.0, 1.0}, 2), InvalidArgument);
}

TEST_CASE("anisotropic gaussian profile") {
  auto iso = anisotropic_gaussian_profile({1, 0, 0, 1}, 2);
  auto std2 = gaussian_halfspace_profile({1.0, 0.0}, 2);
  for (int j = 0; j < 10; ++j) {
    const double t = -2.0 + 0.45 * j;
    CHECK(std::abs(iso.M(t) - std2.M(t)) <= 1e-10);
    CHECK(std::abs(iso.q(iso.M(t)) - std2.q(std2.M(t))) <= 1e-10);
  }
  auto a = anisotropic_gaussian_profile({4, 0, 0, 1}, 2);
  CHECK(std::abs(a.theta[0]) < 1e-12);
  CHECK(std::abs(a.theta[1]) == doctest::Approx(1.0));
  const double oracle_mass = std::sqrt(2 * pi / 4.0) * std::sqrt(2 * pi / 1.0);
  CHECK(a.total_mass == doctest::Approx(oracle_mass));
  CHECK(a.total_mass == doctest::Approx(pi));
  // marginal of <x, e2> has variance 1
  CHECK(a.M(0.0) == doctest::Approx(0.5 * pi));
  CHECK(iso.notes.size() == 1);  // degenerate eigenspace recorded
  CHECK_THROWS_AS(anisotropic_gaussian_profile({1, 2, 2, 1}, 2), InvalidArgument);
  CHECK_THROWS_AS(anisotropic_gaussian_profile({1, 0.5, 0, 1}, 2), InvalidArgument);
}

TEST_CASE("perturbed gaussian profile") {
  ConcaveFunction zero{[](double) { return 0.0; }, [](double) { return 0.0; }, "0"};
  auto flat = perturbed_gaussian_profile(zero, 0.5, -kInfinity, kInfinity, 2);
  auto std2 = gaussian_halfspace_profile({1.0, 0.0}, 2);
  for (int j = 0; j < 10; ++j) {
    const double t = -2.0 + 0.45 * j;
    CHECK(std::abs(flat.M(t) - std2.M(t)) <= 1e-10);
  }
  ConcaveFunction quad{[](double t) { return -t * t; }, [](double t) { return -2 * t; }, "-t^2"};
  auto pq = perturbed_gaussian_profile(quad, 0.5, -kInfinity, kInfinity, 2);
  // vertical factor times the horizontal gaussian factor sqrt(2 pi)
  const double vertical = std::sqrt(2 * pi / 3.0);
  CHECK(pq.total_mass == doctest::Approx(vertical * std::sqrt(2 * pi)).epsilon(1e-10));
  CHECK(std::abs(pq.theta[1]) < 1e-15);

  ConcaveFunction lin{[](double t) { return 5 * t; }, {}, "5t"};
  auto pl = perturbed_gaussian_profile(lin, 0.5, -kInfinity, kInfinity, 2);
  CHECK(pl.theta[0] == 1.0);
  bool any_dir = false;
  for (const auto& n : pl.notes) any_dir = any_dir || n.find("any direction admissible") != std::string::npos;
  CHECK(any_dir);

  ConcaveFunction convex{[](double t) { return t * t; }, {}, "t^2"};
  CHECK_THROWS_WITH_AS(perturbed_gaussian_profile(convex, 0.5, -kInfinity, kInfinity, 2),
                       "concavity violated", InvalidArgument);
  CHECK_THROWS_AS(perturbed_gaussian_profile(quad, 0.5, -kInfinity, kInfinity, 2, Point{0.0, 1.0}),
                  InvalidArgument);
  CHECK_THROWS_AS(perturbed_gaussian_profile(zero, 0.0, -1, 1, 2), InvalidArgument);

  // slab: vertical factor over (a, b)
  auto ps = perturbed_gaussian_profile(quad, 0.5, 0.0, 1.0, 2);
  const double v = oracle::simpson([](double t) { return std::exp(-1.5 * t * t); }, 0, 1);
  CHECK(ps.total_mass == doctest::Approx(v * std::sqrt(2 * pi)).epsilon(1e-9));
  CHECK(ps.domain.kind == DomainSpec::Kind::Slab);
}

TEST_CASE("tabulated M is monotone and exports a table") {
  auto g = gaussian_halfspace_profile({1.0}, 1);
  auto tab = g.table(-3, 3, 4096);
  CHECK(tab.size() == 4096);
  for (std::size_t j = 1; j < tab.size(); ++j) CHECK(tab[j].second <= tab[j - 1].second);
  MonotoneTable t({0, 1, 2}, {0, 1, 1});
  CHECK(t.inverse(1.0) == doctest::Approx(1.0));
  CHECK(t(0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(MonotoneTable({0, 1}, {1, 0}), InvalidArgument);
}

TEST_CASE("validate_profile") {
  SUBCASE("euclidean disk: all checks pass, saturation within 2%") {
    auto p = euclidean_ball_profile(2);
    auto g = profile_grid(p, 192);
    auto rep = validate_profile(p, g, 20, 11);
    CHECK(rep.pass());
    CHECK(rep.saturation_gap <= 0.02);
    CHECK(rep.isoperimetric_worst_ratio >= 0.95);
  }
  SUBCASE("gaussian: random sets obey the profile") {
    auto p = gaussian_halfspace_profile({1.0, 0.0}, 2);
    auto g = profile_grid(p, 128);
    auto rep = validate_profile(p, g, 20, 5);
    CHECK(rep.pass());
    CHECK(rep.isoperimetric_worst_ratio >= 0.95);
  }
  SUBCASE("shape saturating at 0.9 fails (H1)") {
    auto p = gaussian_halfspace_profile({1.0}, 1);
    p.shape = [](double t) { return 0.9 / (1.0 + std::exp(-t)); };
    auto g = profile_grid(p, 256);
    auto rep = validate_profile(p, g, 0, 1);
    CHECK(rep.f_sup == doctest::Approx(0.9));
    CHECK_FALSE(rep.checks[0].pass);
    CHECK_FALSE(rep.pass());
  }
  SUBCASE("profile/grid mismatch is rejected") {
    auto p = gaussian_halfspace_profile({1.0, 0.0}, 2);
    auto g = profile_grid(euclidean_ball_profile(1), 32);
    CHECK_THROWS_AS(validate_profile(p, g, 1, 1), InvalidArgument);
  }
}
