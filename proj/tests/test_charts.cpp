#include <cmath>

#include "doctest.h"
#include "epsharm/common.hpp"
#include "epsharm/mobius.hpp"
#include "epsharm/profile.hpp"
#include "epsharm/sphere.hpp"

using namespace epsharm;

namespace {

SpherePoint on_sphere(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta)};
}

}  // namespace

TEST_CASE("projection round trips in both charts") {
  for (double theta : {0.3, 1.1, 1.9, 2.8}) {
    for (double phi : {0.0, 1.0, 3.5, 5.9}) {
      SpherePoint p = on_sphere(theta, phi);
      for (Chart ch : {Chart::North, Chart::South}) {
        StereoCoord sc = stereo_project(p, ch);
        SpherePoint q = stereo_unproject(sc);
        CHECK(norm(p - q) < 1e-14);
      }
    }
  }
}

TEST_CASE("chart centers and poles") {
  // North chart: origin is the south pole; projecting the north pole blows up.
  SpherePoint south{0.0, 0.0, -1.0}, north{0.0, 0.0, 1.0};
  CHECK(std::abs(stereo_project(south, Chart::North).xi) < 1e-15);
  CHECK(std::abs(stereo_project(north, Chart::South).xi) < 1e-15);
  CHECK_THROWS_AS(stereo_project(north, Chart::North), PoleError);
  CHECK_THROWS_AS(stereo_project(south, Chart::South), PoleError);

  CHECK(preferred_chart(south) == Chart::North);
  CHECK(preferred_chart(north) == Chart::South);
  // preferred chart keeps |xi| <= 1
  for (double theta : {0.1, 0.7, 1.5708, 2.3, 3.0}) {
    SpherePoint p = on_sphere(theta, 0.8);
    CHECK(std::abs(stereo_project(p, preferred_chart(p)).xi) <= 1.0 + 1e-12);
  }
}

TEST_CASE("chart transition is the reciprocal") {
  SpherePoint p = on_sphere(1.2, 0.7);
  cplx zn = stereo_project(p, Chart::North).xi;
  cplx zs = stereo_project(p, Chart::South).xi;
  CHECK(std::abs(zn * zs - cplx(1.0, 0.0)) < 1e-13);
}

TEST_CASE("conformal factor and the north chart radius") {
  SpherePoint p = on_sphere(2.1, 0.4);
  cplx z = stereo_project(p, Chart::North).xi;
  CHECK(north_abs2(p) == doctest::Approx(std::norm(z)).epsilon(1e-13));
  double s = std::norm(z);
  CHECK(conformal_factor({z, Chart::North}) ==
        doctest::Approx(4.0 / ((1.0 + s) * (1.0 + s))).epsilon(1e-15));
  CHECK(conformal_factor({cplx(0.0, 0.0), Chart::North}) == 4.0);
  CHECK(conformal_factor({cplx(1.0, 0.0), Chart::South}) == 1.0);
  CHECK(conformal_factor({cplx(3.0, 0.0), Chart::North}) ==
        doctest::Approx(0.04).epsilon(1e-15));
}

TEST_CASE("unproject jet matches finite differences") {
  for (Chart ch : {Chart::North, Chart::South}) {
    cplx z(0.37, -0.62);
    Jet2 j = unproject_jet(ch, z);
    const double h = 1e-5;
    auto at = [&](double dx, double dy) {
      return stereo_unproject({z + cplx(dx, dy), ch});
    };
    Vec3 ux = (at(h, 0) - at(-h, 0)) * (0.5 / h);
    Vec3 uy = (at(0, h) - at(0, -h)) * (0.5 / h);
    Vec3 uxx = (at(h, 0) - j.u * 2.0 + at(-h, 0)) * (1.0 / (h * h));
    CHECK(norm(j.u - at(0, 0)) < 1e-14);
    CHECK(norm(j.ux - ux) < 1e-8);
    CHECK(norm(j.uy - uy) < 1e-8);
    CHECK(norm(j.uxx - uxx) < 1e-5);
  }
}

TEST_CASE("gradient and laplacian agree across charts") {
  // Sample in the overlap band where both charts are well-conditioned.
  MapField u = mobius_map(compose(dilation(1.4), MobiusMatrix{cplx(0.96, 0.0), cplx(0.2, 0.1), cplx(-0.2, 0.1), cplx(0.96, 0.0)}));
  for (double theta : {1.1, 1.35, 1.6, 1.9}) {
    SpherePoint p = on_sphere(theta, 2.2);
    double gn, gs, ln, ls;
    // Flat chart derivatives become intrinsic ones on division by the
    // metric factor: |grad u|² = (|u_x|²+|u_y|²)/cf, Δu = (u_xx+u_yy)/cf.
    {
      Jet2 j = map_jet_in_chart(u, p, Chart::North);
      cplx z = stereo_project(p, Chart::North).xi;
      double cf = conformal_factor({z, Chart::North});
      gn = (dot(j.ux, j.ux) + dot(j.uy, j.uy)) / cf;
      ln = norm(j.uxx + j.uyy) / cf;
    }
    {
      Jet2 j = map_jet_in_chart(u, p, Chart::South);
      cplx z = stereo_project(p, Chart::South).xi;
      double cf = conformal_factor({z, Chart::South});
      gs = (dot(j.ux, j.ux) + dot(j.uy, j.uy)) / cf;
      ls = norm(j.uxx + j.uyy) / cf;
    }
    CHECK(gn == doctest::Approx(gs).epsilon(1e-7));
    CHECK(ln == doctest::Approx(ls).epsilon(1e-6));
  }
}

TEST_CASE("analytic jets match finite-difference jets") {
  MobiusMatrix m = compose(dilation(1.7), MobiusMatrix{cplx(0.9, 0.1), cplx(0.3, 0.0), cplx(-0.3, 0.0), cplx(0.9, -0.1)});
  MapField exact = mobius_map(m);
  MapField fd = exact;
  fd.mode = DerivMode::FiniteDifference;
  fd.chart_jet = nullptr;

  for (double theta : {0.4, 1.2, 2.0, 2.7}) {
    SpherePoint p = on_sphere(theta, 1.3);
    Jet2 ja = map_jet(exact, p);
    Jet2 jf = map_jet(fd, p);
    CHECK(norm(ja.u - jf.u) < 1e-12);
    CHECK(norm(ja.ux - jf.ux) < 1e-7);
    CHECK(norm(ja.uy - jf.uy) < 1e-7);
    CHECK(norm(ja.uxx - jf.uxx) < 1e-5);
    CHECK(norm(ja.uxy - jf.uxy) < 1e-5);
    CHECK(norm(ja.uyy - jf.uyy) < 1e-5);
  }
}

TEST_CASE("profile lifts expose correct analytic jets") {
  Profile f{1, {0.25, -0.15, 0.05}};
  MapField exact = lift_profile(f);
  MapField fd = exact;
  fd.mode = DerivMode::FiniteDifference;
  fd.chart_jet = nullptr;

  for (double theta : {0.5, 1.3, 2.4}) {
    SpherePoint p = on_sphere(theta, 4.1);
    SphereGrad ga = sphere_gradient(exact, p);
    SphereGrad gf = sphere_gradient(fd, p);
    CHECK(ga.norm_sq() == doctest::Approx(gf.norm_sq()).epsilon(1e-6));
    Vec3 la = sphere_laplacian(exact, p);
    Vec3 lf = sphere_laplacian(fd, p);
    CHECK(norm(la - lf) < 1e-4);
  }
}

TEST_CASE("lifted maps are equatorially symmetric in the right way") {
  // For f(r) = r the lift is the identity.
  Profile f{1, {}};
  MapField u = lift_profile(f);
  for (double theta : {0.2, 1.0, 2.9}) {
    SpherePoint p = on_sphere(theta, 0.9);
    CHECK(norm(u.value(p) - p) < 1e-13);
  }
}

TEST_CASE("map values are renormalized but garbage is rejected") {
  MapField off;
  off.mode = DerivMode::FiniteDifference;
  off.value = [](const SpherePoint& p) { return p * (1.0 + 5e-8); };
  SpherePoint p = on_sphere(1.0, 1.0);
  CHECK(std::abs(norm(map_value(off, p)) - 1.0) < 1e-14);

  MapField bad;
  bad.mode = DerivMode::FiniteDifference;
  bad.value = [](const SpherePoint& p) { return p * 1.5; };
  CHECK_THROWS_AS(map_value(bad, p), DomainError);
}

TEST_CASE("fd step scales with the coordinate radius") {
  double base = fd_step(cplx(0.0, 0.0));
  CHECK(base == doctest::Approx(7.40095979741405e-4).epsilon(1e-12));
  CHECK(fd_step(cplx(0.5, 0.0)) == doctest::Approx(base).epsilon(1e-12));
  CHECK(fd_step(cplx(3.0, 4.0)) == doctest::Approx(5.0 * base).epsilon(1e-12));
}
