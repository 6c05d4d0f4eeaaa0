#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wsym/measure.hpp"
#include "wsym/sets.hpp"

using namespace wsym;

namespace {

GridPtr unit_square_box(std::size_t res) {
  return make_grid(DomainSpec::make_box(Box::cube(2, 0.0, 1.0)), Potential::zero(), res, 1e-6);
}

GridPtr unit_square_in_plane(std::size_t res) {
  return make_grid(DomainSpec::full_space(2), Potential::zero(), res, 1e-6, Box::cube(2, 0.0, 1.0));
}

}  // namespace

TEST_CASE("perimeter of a disk converges to its circumference") {
  double prev = kInfinity;
  for (std::size_t res : {64, 128, 256}) {
    auto g = unit_square_in_plane(res);
    auto disk = BorelSet::from_predicate(g, [](std::span<const double> x) {
      return std::hypot(x[0] - 0.5, x[1] - 0.5) < 0.5;
    });
    const double err = std::abs(weighted_perimeter(disk, *g) - std::numbers::pi) / std::numbers::pi;
    if (res == 256) CHECK(err <= 0.03);
    CHECK(err <= prev * 1.05);
    prev = err;
  }
}

TEST_CASE("gaussian half-line and half-plane") {
  auto g1 = make_grid(DomainSpec::full_space(1), Potential::standard_gaussian(), 2048, 1e-8);
  auto half = BorelSet::from_predicate(g1, [](std::span<const double> x) { return x[0] > 0; });
  CHECK(weighted_perimeter(half, *g1) == doctest::Approx(1.0).epsilon(0.02));

  auto g2 = make_grid(DomainSpec::full_space(2), Potential::standard_gaussian(), 256, 1e-8);
  auto hp = BorelSet::from_predicate(g2, [](std::span<const double> x) { return x[0] > 0.5; });
  const double exact = std::sqrt(2 * std::numbers::pi) * std::exp(-0.125);
  CHECK(weighted_perimeter(hp, *g2) == doctest::Approx(exact).epsilon(0.03));
}

TEST_CASE("relative perimeter ignores the boundary of X") {
  auto g = unit_square_box(128);
  CHECK(weighted_perimeter(BorelSet::all(g), *g) == 0.0);
  CHECK(weighted_perimeter(BorelSet(g), *g) == 0.0);
  auto left = BorelSet::from_predicate(g, [](std::span<const double> x) { return x[0] < 0.5; });
  CHECK(weighted_perimeter(left, *g) == doctest::Approx(1.0).epsilon(0.01));

  auto q = make_grid(DomainSpec::orthant(2, 2), Potential::zero(), 128, 1e-6, Box::cube(2, 0.0, 1.0));
  auto corner = BorelSet::from_predicate(q, [](std::span<const double> x) { return x[0] < 0.5 && x[1] < 0.5; });
  CHECK(weighted_perimeter(corner, *q) == doctest::Approx(1.0).epsilon(0.03));

  // the plane continues past an explicit box, so its faces count
  auto p = make_grid(DomainSpec::full_space(2), Potential::zero(), 128, 1e-6, Box::cube(2, -1.0, 1.0));
  CHECK(weighted_perimeter(BorelSet::all(p), *p) == doctest::Approx(8.0).epsilon(0.03));
}

TEST_CASE("random sets hit the requested mass deterministically") {
  auto g = make_grid(DomainSpec::full_space(2), Potential::standard_gaussian(), 96, 1e-8);
  for (std::uint64_t seed : {0u, 1u, 2u, 99u}) {
    for (double frac : {0.1, 0.5, 0.9}) {
      const double target = frac * g->total_mass();
      auto a = random_borel_set(g, target, seed);
      CHECK(std::abs(measure_of(a, *g) - target) <= g->max_cell_weight());
      CHECK(a.mask == random_borel_set(g, target, seed).mask);
      for (std::size_t i = 0; i < g->size(); ++i) {
        if (!g->inside(i)) CHECK_FALSE(a.contains(i));
      }
    }
  }
  CHECK(random_borel_set(g, 0.5, 1).mask != random_borel_set(g, 0.5, 2).mask);
  CHECK_THROWS_AS(random_borel_set(g, 0.0, 1), InvalidArgument);
  CHECK_THROWS_AS(random_borel_set(g, g->total_mass(), 1), InvalidArgument);
  CHECK_THROWS_AS(random_borel_set(g, -1.0, 1), InvalidArgument);
}

TEST_CASE("random sets of area 0.3 respect the planar isoperimetric bound") {
  auto g = unit_square_in_plane(128);
  const double bound = 2.0 * std::sqrt(std::numbers::pi * 0.3) * 0.95;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto s = random_borel_set(g, 0.3, seed);
    CHECK(weighted_perimeter(s, *g) >= bound);
  }
}

TEST_CASE("superlevel sets") {
  auto g = unit_square_box(32);
  CHECK(superlevel_set(GridFunction(g), 0.0).empty());

  auto omega = BorelSet::from_predicate(g, [](std::span<const double> x) { return x[0] + x[1] < 0.8; });
  GridFunction chi(g);
  for (std::size_t i = 0; i < g->size(); ++i) chi.values[i] = omega.mask[i];
  CHECK(superlevel_set(chi, 0.5).mask == omega.mask);

  auto u = GridFunction::sample(g, [](std::span<const double> x) { return std::sin(9 * x[0]) * x[1]; });
  CHECK(superlevel_set(u, lp_norm(u, kInfinity)).empty());
  double prev_count = g->size() + 1.0;
  for (double t = 0.0; t < 1.0; t += 0.05) {
    auto a = superlevel_set(u, t), b = superlevel_set(u, t + 0.05);
    CHECK(b.subset_of(a));
    CHECK(double(a.count()) <= prev_count);
    prev_count = double(a.count());
  }

  // cells outside X never enter
  auto c = make_grid(DomainSpec::orthant(2, 1), Potential::zero(), 16, 1e-6, Box::cube(2, -1, 1));
  auto s = superlevel_set(GridFunction(c, 1.0), 0.5);
  for (std::size_t i = 0; i < c->size(); ++i) CHECK(s.contains(i) == c->inside(i));
}

TEST_CASE("random zero-trace functions") {
  auto g = make_grid(DomainSpec::full_space(2), Potential::standard_gaussian(), 64, 1e-8);
  auto omega = random_borel_set(g, 0.4 * g->total_mass(), 3);
  auto u = random_zero_trace_function(omega, 3);
  double sup = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(u[i] >= 0.0);
    if (!omega.contains(i)) CHECK(u[i] == 0.0);
    sup = std::max(sup, u[i]);
  }
  CHECK(sup > 0.0);
  CHECK(u.values == random_zero_trace_function(omega, 3).values);
  CHECK(u.values != random_zero_trace_function(omega, 4).values);
}
