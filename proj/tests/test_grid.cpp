#include <doctest.h>

#include <cmath>
#include <random>

#include "mdpabs/errors.hpp"
#include "mdpabs/grid.hpp"

using namespace mdpabs;

TEST_CASE("grid geometry") {
  const Grid g(StateBox({-0.5, -0.5}, {0.5, 0.5}), {20, 20});
  CHECK(g.widths()[0] == doctest::Approx(0.05));
  CHECK(g.cell_diameter() == doctest::Approx(0.0707106781).epsilon(1e-6));
  CHECK(g.cell_count() == 400);

  const Grid one(StateBox({0.0}, {1.0}), {1});
  CHECK(one.cell_count() == 1);
  CHECK(one.center(0)[0] == doctest::Approx(0.5));
  CHECK(one.cell_diameter() == doctest::Approx(1.0));

  const Grid ten(StateBox({-0.5, -0.5}, {0.5, 0.5}), {10, 10});
  CHECK(ten.cell_diameter() == doctest::Approx(0.1414213562).epsilon(1e-6));

  CHECK_THROWS_AS(Grid(StateBox({0.0}, {1.0}), {0}), Error);
}

TEST_CASE("projection picks the containing cell") {
  const Grid g(StateBox({-0.5, -0.5}, {0.5, 0.5}), {10, 10});
  const Projection p = project(g, std::vector<double>{0.14, -0.44});
  REQUIRE(!p.absorbing);
  CHECK(g.center(p.cell)[0] == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(g.center(p.cell)[1] == doctest::Approx(-0.45).epsilon(1e-12));

  // Interior boundary points belong to the upper (half-open) cell.
  const Grid line(StateBox({-0.5}, {0.5}), {10});
  const Projection b = project(line, std::vector<double>{0.1});
  REQUIRE(!b.absorbing);
  CHECK(line.center(b.cell)[0] == doctest::Approx(0.15).epsilon(1e-12));

  CHECK(project(g, std::vector<double>{0.6, 0.0}).absorbing);
  CHECK(project(g, std::vector<double>{0.0, -0.6}).absorbing);
  // The box boundary itself is inside (last cell closed).
  CHECK(!project(g, std::vector<double>{0.5, 0.5}).absorbing);
}

TEST_CASE("projection bound and idempotence") {
  const Grid g(StateBox({-0.5, -0.25}, {0.5, 0.75}), {7, 13});
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100000; ++t) {
    const std::vector<double> x{-0.5 + u(rng), -0.25 + u(rng)};
    const Projection p = project(g, x);
    REQUIRE(!p.absorbing);
    const auto c = g.center(p.cell);
    const double dist = std::hypot(c[0] - x[0], c[1] - x[1]);
    CHECK(dist <= g.cell_diameter());
  }
  for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
    const Projection p = project(g, g.center(cell));
    REQUIRE(!p.absorbing);
    CHECK(p.cell == cell);
  }
}

TEST_CASE("cells partition the box") {
  const Grid g(StateBox({0.0, -1.0}, {2.0, 3.0}), {5, 4});
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(0.0, 2.0);
  std::uniform_real_distribution<double> uy(-1.0, 3.0);
  std::vector<int> multi(2);
  for (int t = 0; t < 2000; ++t) {
    const std::vector<double> x{ux(rng), uy(rng)};
    // Brute-force membership scan over all cells using the boundary arrays.
    std::size_t hits = 0;
    std::size_t hit_cell = 0;
    for (std::size_t cell = 0; cell < g.cell_count(); ++cell) {
      g.multi_index(cell, multi);
      bool inside = true;
      for (int d = 0; d < 2; ++d) {
        const int j = multi[static_cast<std::size_t>(d)];
        const double lo = g.boundary(d, j);
        const double hi = g.boundary(d, j + 1);
        const bool last = j == g.counts()[static_cast<std::size_t>(d)] - 1;
        inside = inside && x[static_cast<std::size_t>(d)] >= lo &&
                 (last ? x[static_cast<std::size_t>(d)] <= hi
                       : x[static_cast<std::size_t>(d)] < hi);
      }
      if (inside) {
        ++hits;
        hit_cell = cell;
      }
    }
    CHECK(hits == 1);
    CHECK(project(g, x).cell == hit_cell);
  }
}

TEST_CASE("nearest cell clamps out-of-box points") {
  const Grid g(StateBox({-0.5, -0.5}, {0.5, 0.5}), {10, 10});
  const std::size_t cell = nearest_cell(g, std::vector<double>{0.6, 0.0});
  const auto c = g.center(cell);
  CHECK(c[0] == doctest::Approx(0.45).epsilon(1e-12));
  CHECK(c[1] == doctest::Approx(0.05).epsilon(1e-12));
  // Inside the box it coincides with project.
  const std::vector<double> x{0.14, -0.44};
  CHECK(nearest_cell(g, x) == project(g, x).cell);
}

TEST_CASE("deflation shrinks interior sides only") {
  const StateBox domain({-0.5, -0.5}, {0.5, 0.5});
  // The whole domain has no interior boundary.
  const DeflatedBox same = deflate(domain, 0.1, domain);
  CHECK(!same.empty);
  CHECK(same.box.lo(0) == -0.5);
  CHECK(same.box.hi(1) == 0.5);

  const StateBox inner({-0.3, -0.3}, {0.3, 0.3});
  const DeflatedBox shrunk = deflate(inner, 0.1, domain);
  CHECK(!shrunk.empty);
  for (int d = 0; d < 2; ++d) {
    CHECK(shrunk.box.lo(d) == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(shrunk.box.hi(d) == doctest::Approx(0.2).epsilon(1e-12));
  }

  const DeflatedBox zero = deflate(inner, 0.0, domain);
  CHECK(zero.box.lo(0) == inner.lo(0));
  CHECK(zero.box.hi(1) == inner.hi(1));

  CHECK(deflate(inner, 0.4, domain).empty);
  CHECK_THROWS_AS(deflate(inner, -0.1, domain), Error);
}

TEST_CASE("deflation agrees with the pointwise distance definition") {
  const StateBox domain({-0.5, -0.5}, {0.5, 0.5});
  const StateBox region({-0.3, -0.1}, {0.25, 0.5});  // top side flush with the domain
  const double radius = 0.07;
  const DeflatedBox deflated = deflate(region, radius, domain);
  // Fine grid over the domain: a point belongs to the deflated set iff it is
  // in the region and at distance >= radius from every in-domain point
  // outside the region. For boxes that distance is the minimum over
  // non-flush faces.
  const int steps = 160;
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j <= steps; ++j) {
      const double x = -0.5 + static_cast<double>(i) / steps;
      const double y = -0.5 + static_cast<double>(j) / steps;
      const bool in_region = x >= region.lo(0) && x <= region.hi(0) && y >= region.lo(1) &&
                             y <= region.hi(1);
      double dist = 1e9;
      if (in_region) {
        dist = std::min(dist, x - region.lo(0));
        dist = std::min(dist, region.hi(0) - x);
        dist = std::min(dist, y - region.lo(1));
        // region.hi(1) is flush with the domain: no complement beyond it.
      }
      const bool expected = in_region && dist >= radius;
      const bool got = x >= deflated.box.lo(0) && x <= deflated.box.hi(0) &&
                       y >= deflated.box.lo(1) && y <= deflated.box.hi(1);
      if (std::abs(dist - radius) > 1e-9) {  // skip knife-edge grid points
        CHECK(expected == got);
      }
    }
  }
}
