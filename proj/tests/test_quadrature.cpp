#include <cmath>
#include <vector>

#include "doctest.h"
#include "epsharm/common.hpp"
#include "epsharm/sphere.hpp"

using namespace epsharm;

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  REQUIRE(x.size() == 5);
  // ascending order, symmetric about zero
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);
  CHECK(x[2] == doctest::Approx(0.0).epsilon(1e-14));

  // exact for degree <= 2n-1 = 9
  for (int p = 0; p <= 9; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], p);
    double exact = (p % 2 == 1) ? 0.0 : 2.0 / (p + 1);
    CHECK(s == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("surface grid weights sum to the sphere area") {
  QuadratureGrid g = build_grid(6, 12);
  double s = 0.0;
  for (const auto& node : g.nodes) s += node.w;
  CHECK(s == doctest::Approx(4.0 * kPi).epsilon(1e-13));
}

TEST_CASE("zonal polynomial moments are exact") {
  // x3^2 needs polar degree 2; x3^4 needs degree 4 -> three polar nodes.
  QuadratureGrid g = build_grid(3, 8);
  double m2 = integrate([](const SpherePoint& p) { return p[2] * p[2]; }, g);
  double m4 = integrate(
      [](const SpherePoint& p) { return p[2] * p[2] * p[2] * p[2]; }, g);
  CHECK(m2 == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-13));
  CHECK(m4 == doctest::Approx(4.0 * kPi / 5.0).epsilon(1e-13));
}

TEST_CASE("azimuthal harmonics integrate to zero") {
  QuadratureGrid g = build_grid(4, 16);
  for (int m = 1; m <= 6; ++m) {
    double s = integrate(
        [m](const SpherePoint& p) {
          double phi = std::atan2(p[1], p[0]);
          return std::cos(m * phi) * (1.0 + p[2] * p[2]);
        },
        g);
    CHECK(std::abs(s) < 1e-12);
  }
}

TEST_CASE("degenerate grids are rejected") {
  CHECK_THROWS_AS(build_grid(0, 8), InvalidResolution);
  CHECK_THROWS_AS(build_grid(4, 0), InvalidResolution);
  CHECK_THROWS_AS(build_grid(-2, -2), InvalidResolution);
}

TEST_CASE("parallel and serial integration agree") {
  QuadratureGrid g = build_grid(24, 48);
  auto f = [](const SpherePoint& p) {
    return std::exp(p[0]) * std::cos(2.0 * p[1]) + p[2];
  };
  double a = integrate(f, g, true);
  double b = integrate(f, g, false);
  CHECK(a == doctest::Approx(b).epsilon(1e-14));
}
