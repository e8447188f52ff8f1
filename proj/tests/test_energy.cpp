#include <cmath>
#include <random>

#include "doctest.h"
#include "epsharm/common.hpp"
#include "epsharm/energy.hpp"
#include "epsharm/mobius.hpp"
#include "epsharm/profile.hpp"
#include "epsharm/sphere.hpp"

using namespace epsharm;

namespace {

MobiusMatrix random_mobius(std::mt19937_64& rng, double max_lambda) {
  auto quat = [&rng] {
    double q[4], n2;
    do {
      n2 = 0.0;
      for (double& v : q) {
        v = 2.0 * uniform01(rng) - 1.0;
        n2 += v * v;
      }
    } while (n2 < 0.01 || n2 > 1.0);
    double inv = 1.0 / std::sqrt(n2);
    return MobiusMatrix{cplx(q[0], q[1]) * inv, cplx(q[2], q[3]) * inv,
                        -cplx(q[2], -q[3]) * inv, cplx(q[0], -q[1]) * inv};
  };
  double lam = 1.0 + (max_lambda - 1.0) * uniform01(rng);
  return compose(quat(), compose(dilation(lam), quat()));
}

}  // namespace

TEST_CASE("dilation energies match the closed form") {
  QuadratureGrid grid = build_grid(64, 128);
  for (double lam : {1.0, 2.0, 3.5}) {
    for (double eps : {0.0, 0.05}) {
      EnergyReport rep = eps_energy(mobius_map(dilation(lam)), eps, grid);
      double exact = dilation_energy_closed_form(lam, eps);
      CHECK(rep.total == doctest::Approx(exact).epsilon(1e-9));
      CHECK(rep.degree_int == 1);
      CHECK(rep.total ==
            doctest::Approx(rep.dirichlet + eps * rep.biharmonic).epsilon(1e-14));
    }
  }
}

TEST_CASE("isometries have the minimal energy") {
  QuadratureGrid grid = build_grid(48, 96);
  EnergyReport rep = eps_energy(identity_map(), 0.07, grid);
  CHECK(rep.total == doctest::Approx(4.0 * kPi * (1.0 + 0.14)).epsilon(1e-11));
  CHECK(rep.dirichlet == doctest::Approx(4.0 * kPi).epsilon(1e-12));
  // |Δu|² = 4 for the identity, so the half-integral is 8π and
  // total = dirichlet + ε · biharmonic = 4π(1 + 2ε).
  CHECK(rep.biharmonic == doctest::Approx(8.0 * kPi).epsilon(1e-11));
  CHECK(rep.total ==
        doctest::Approx(rep.dirichlet + 0.07 * rep.biharmonic).epsilon(1e-14));
}

TEST_CASE("dirichlet energy of any conformal map is the sphere area") {
  QuadratureGrid grid = build_grid(64, 128);
  std::mt19937_64 rng(101);
  MobiusMatrix m = random_mobius(rng, 2.8);
  CHECK(dirichlet_energy(mobius_map(m), grid) ==
        doctest::Approx(4.0 * kPi).epsilon(1e-9));
}

TEST_CASE("dirichlet energy is conformally invariant") {
  QuadratureGrid grid = build_grid(64, 128);
  std::mt19937_64 rng(103);
  MapField u = lift_profile(Profile{1, {0.2, -0.1}});
  MobiusMatrix m = random_mobius(rng, 2.0);
  double base = dirichlet_energy(u, grid);
  double comp = dirichlet_energy(compose_mobius(u, m), grid);
  CHECK(comp == doctest::Approx(base).epsilon(1e-7));
}

TEST_CASE("full laplacian splits into tangential part plus gradient quartic") {
  MapField u = lift_profile(Profile{1, {0.3, 0.1}});
  for (double theta : {0.6, 1.4, 2.5}) {
    SpherePoint p{std::sin(theta) * 0.6, std::sin(theta) * 0.8, std::cos(theta)};
    Vec3 lap = sphere_laplacian(u, p);
    SphereGrad g = sphere_gradient(u, p);
    Vec3 uval = map_value(u, p);
    Vec3 tangential = lap - uval * dot(lap, uval);
    double lhs = norm2(lap);
    double rhs = norm2(tangential) + g.norm_sq() * g.norm_sq();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("log-derivative of the dilation energy") {
  const double eps = 0.1;
  for (double lam : {1.2, 2.0}) {
    const double h = 1e-5;
    double fd = (dilation_energy_closed_form(lam * std::exp(h), eps) -
                 dilation_energy_closed_form(lam * std::exp(-h), eps)) /
                (2.0 * h);
    CHECK(dilation_energy_dloglambda(lam, eps) ==
          doctest::Approx(fd).epsilon(1e-7));
  }
  // lambda = 1 is the critical point of the family
  CHECK(std::abs(dilation_energy_dloglambda(1.0, 0.3)) < 1e-14);
}

TEST_CASE("pullback laws hold for smooth maps") {
  QuadratureGrid grid = build_grid(32, 64);
  std::mt19937_64 rng(107);
  MobiusMatrix m = random_mobius(rng, 2.5);
  for (const MapField& u :
       {identity_map(), lift_profile(Profile{1, {0.2, -0.1}})}) {
    PullbackErrors pe = verify_pullback(u, m, grid);
    CHECK(pe.gradient_law < 1e-7);
    CHECK(pe.laplacian_law < 1e-6);
  }
}

TEST_CASE("degrees of reference maps") {
  QuadratureGrid grid = build_grid(32, 64);
  auto [d_id, i_id] = degree(identity_map(), grid);
  CHECK(d_id == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(i_id == 1);

  MapField antipodal = linear_image(
      {Vec3{-1, 0, 0}, Vec3{0, -1, 0}, Vec3{0, 0, -1}}, identity_map());
  CHECK(degree(antipodal, grid).second == -1);

  CHECK(degree(constant_map({0, 0, 1}), grid).second == 0);

  // The doubly-wrapped polar profile covers the sphere twice with opposite
  // orientations, so its degree is zero.
  MapField two = lift_profile(Profile{2, {}});
  CHECK(degree(two, grid).second == 0);

  // degree is invariant under conformal reparametrization
  std::mt19937_64 rng(109);
  MobiusMatrix m = random_mobius(rng, 2.0);
  MapField u = lift_profile(Profile{1, {0.15, 0.05}});
  CHECK(degree(compose_mobius(u, m), grid).second == 1);
}

TEST_CASE("degree-one gap holds and wrong classes are rejected") {
  QuadratureGrid grid = build_grid(32, 64);
  const double eps = 0.05;
  CHECK(degree_one_gap_check(identity_map(), eps, grid));
  CHECK(degree_one_gap_check(lift_profile(Profile{1, {0.25, -0.1, 0.05}}), eps,
                             grid));
  CHECK_THROWS_AS(degree_one_gap_check(lift_profile(Profile{2, {}}), eps, grid),
                  WrongDegree);
  CHECK_THROWS_AS(degree_one_gap_check(constant_map({0, 0, 1}), eps, grid),
                  WrongDegree);
}

TEST_CASE("the weighted functional reduces to the plain one at lambda 1") {
  QuadratureGrid grid = build_grid(24, 48);
  MapField u = lift_profile(Profile{1, {0.2}});
  EnergyReport a = eps_lambda_energy(u, 0.05, 1.0, grid);
  EnergyReport b = eps_energy(u, 0.05, grid);
  CHECK(a.total == doctest::Approx(b.total).epsilon(1e-14));
  CHECK(a.biharmonic == doctest::Approx(b.biharmonic).epsilon(1e-14));
}

TEST_CASE("weighted functional matches the composed energy") {
  QuadratureGrid grid = build_grid(48, 96);
  MapField u = lift_profile(Profile{1, {0.2, -0.1}});
  const double eps = 0.05, lam = 1.6;
  double weighted = eps_lambda_energy(u, eps, lam, grid).total;
  double composed =
      eps_energy(compose_mobius(u, dilation(1.0 / lam)), eps, grid).total;
  CHECK(weighted == doctest::Approx(composed).epsilon(1e-6));
}

TEST_CASE("matrix exponential into the group") {
  std::array<double, 6> q{0.2, -0.1, 0.3, 0.05, -0.2, 0.1};
  MobiusMatrix m = sl2_exp(q);
  CHECK(std::abs(m.det() - cplx(1.0, 0.0)) < 1e-12);
  // zero parameter gives the identity
  MobiusMatrix id = sl2_exp({0, 0, 0, 0, 0, 0});
  CHECK(std::abs(id.a - cplx(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(id.b) < 1e-15);
  // small parameters: exp(X) ~ I + X
  std::array<double, 6> s{1e-6, 0, 0, 0, 0, 0};
  MobiusMatrix ms = sl2_exp(s);
  CHECK(std::abs(ms.a - cplx(1.0 + 1e-6, 0.0)) < 1e-11);
}

TEST_CASE("recentering recovers a synthetic optimal reparametrization") {
  QuadratureGrid grid = build_grid(24, 48);
  std::mt19937_64 rng(113);
  MobiusMatrix m0 = random_mobius(rng, 1.4);
  MapField u = mobius_map(m0);
  OptimalMobiusResult res = optimal_mobius(u, grid);
  CHECK(svd(res.m).lambda == doctest::Approx(svd(m0).lambda).epsilon(1e-4));
  CHECK(res.residual < 1e-5);
  CHECK(res.stationarity < 1e-6);
}

TEST_CASE("reparametrization search rejects other degrees") {
  QuadratureGrid grid = build_grid(16, 32);
  CHECK_THROWS_AS(optimal_mobius(lift_profile(Profile{2, {}}), grid),
                  NotDegreeOne);
}
