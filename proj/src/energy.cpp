#include "epsharm/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "epsharm/parallel.hpp"

namespace epsharm {

namespace {

struct NodeChart {
  Chart chart;
  cplx xi;
  double conf_half;  // c = (1+|xi|²)/2, the inverse conformal scale
};

NodeChart node_chart(const SpherePoint& p) {
  Chart ch = preferred_chart(p);
  cplx xi = stereo_project(p, ch).xi;
  return {ch, xi, 0.5 * (1.0 + std::norm(xi))};
}

}  // namespace

double dirichlet_energy(const MapField& u, const QuadratureGrid& grid,
                        bool parallel) {
  return par::sum_map(
      grid.nodes.size(),
      [&](std::size_t i) {
        const auto& nd = grid.nodes[i];
        NodeChart nc = node_chart(nd.p);
        Jet1 j = map_jet1_in_chart(u, nd.p, nc.chart);
        double c2 = nc.conf_half * nc.conf_half;
        return nd.w * 0.5 * c2 * (norm2(j.ux) + norm2(j.uy));
      },
      parallel);
}

EnergyReport eps_lambda_energy(const MapField& v, double epsilon, double lambda,
                               const QuadratureGrid& grid, bool parallel) {
  auto parts = par::sum_map_multi<3>(
      grid.nodes.size(),
      [&](std::size_t i) -> std::array<double, 3> {
        const auto& nd = grid.nodes[i];
        NodeChart nc = node_chart(nd.p);
        Jet2 j = map_jet_in_chart(v, nd.p, nc.chart);
        double c2 = nc.conf_half * nc.conf_half;
        double gradsq = c2 * (norm2(j.ux) + norm2(j.uy));
        Vec3 lap = c2 * (j.uxx + j.uyy);
        double chi_w = chi_from_abs2(lambda, north_abs2(nd.p));
        double jac = -c2 * dot(j.u, cross(j.ux, j.uy));
        return {nd.w * 0.5 * gradsq, nd.w * 0.5 * chi_w * norm2(lap),
                nd.w * jac};
      },
      parallel);

  EnergyReport rep;
  rep.dirichlet = parts[0];
  rep.biharmonic = parts[1];
  rep.epsilon = epsilon;
  rep.lambda = lambda;
  rep.total = rep.dirichlet + epsilon * rep.biharmonic;
  rep.degree = parts[2] / (4.0 * kPi);
  rep.degree_int = std::llround(rep.degree);
  return rep;
}

EnergyReport eps_energy(const MapField& u, double epsilon,
                        const QuadratureGrid& grid, bool parallel) {
  return eps_lambda_energy(u, epsilon, 1.0, grid, parallel);
}

std::pair<double, long long> degree(const MapField& u, const QuadratureGrid& grid,
                                    bool parallel) {
  double total = par::sum_map(
      grid.nodes.size(),
      [&](std::size_t i) {
        const auto& nd = grid.nodes[i];
        NodeChart nc = node_chart(nd.p);
        Jet1 j = map_jet1_in_chart(u, nd.p, nc.chart);
        double c2 = nc.conf_half * nc.conf_half;
        return -nd.w * c2 * dot(j.u, cross(j.ux, j.uy));
      },
      parallel);
  double deg = total / (4.0 * kPi);
  long long rounded = std::llround(deg);
  if (std::abs(deg - static_cast<double>(rounded)) >= 1e-3)
    throw NonIntegerDegree("degree quadrature " + std::to_string(deg) +
                           " is not within 1e-3 of an integer");
  return {deg, rounded};
}

double dilation_energy_closed_form(double lambda, double epsilon) {
  if (!(lambda > 0.0)) throw DomainError("dilation parameter must be positive");
  double l2 = lambda * lambda;
  double s = l2 + 1.0 + 1.0 / l2;
  return 4.0 * kPi * (1.0 + (2.0 * epsilon / 3.0) * s);
}

double dilation_energy_dloglambda(double lambda, double epsilon) {
  if (!(lambda > 0.0)) throw DomainError("dilation parameter must be positive");
  double l2 = lambda * lambda;
  return (16.0 * kPi * epsilon / 3.0) * (l2 - 1.0 / l2);
}

PullbackErrors verify_pullback(const MapField& u, const MobiusMatrix& m,
                               const QuadratureGrid& grid) {
  double lambda = svd(m).lambda;
  MobiusMatrix d = dilation(lambda);
  MapField ud = compose_mobius(u, d);

  std::size_t n = grid.nodes.size();
  std::vector<std::array<double, 2>> errs(n);
  par::detail::run_fill(n, true, [&](std::size_t i) {
    const auto& nd = grid.nodes[i];

    NodeChart nc = node_chart(nd.p);
    Jet2 jd = map_jet_in_chart(ud, nd.p, nc.chart);
    double c2 = nc.conf_half * nc.conf_half;
    double grad_lhs = c2 * (norm2(jd.ux) + norm2(jd.uy));
    double lap_lhs = norm2(c2 * (jd.uxx + jd.uyy));

    SpherePoint q = mobius_act(d, nd.p);
    NodeChart qc = node_chart(q);
    Jet2 ju = map_jet_in_chart(u, q, qc.chart);
    double qc2 = qc.conf_half * qc.conf_half;
    double grad_rhs = qc2 * (norm2(ju.ux) + norm2(ju.uy));
    double lap_rhs = norm2(qc2 * (ju.uxx + ju.uyy));

    // The scaling factor is written in the north coordinate of the node.
    double s = north_abs2(nd.p);
    double l2 = lambda * lambda;
    double fg = l2 * (1.0 + s) * (1.0 + s) / ((1.0 + l2 * s) * (1.0 + l2 * s));
    double fl = fg * fg;

    auto rel = [](double lhs, double rhs) {
      double scale = std::max(std::abs(lhs), std::abs(rhs));
      if (scale < 1e-14) return 0.0;
      return std::abs(lhs - rhs) / std::max(scale, 1.0);
    };
    errs[i] = {rel(grad_lhs, fg * grad_rhs), rel(lap_lhs, fl * lap_rhs)};
  });

  PullbackErrors out;
  for (const auto& e : errs) {
    out.gradient_law = std::max(out.gradient_law, e[0]);
    out.laplacian_law = std::max(out.laplacian_law, e[1]);
  }
  return out;
}

bool degree_one_gap_check(const MapField& u, double epsilon,
                          const QuadratureGrid& grid) {
  auto [deg, deg_int] = degree(u, grid);
  (void)deg;
  if (deg_int != 1)
    throw WrongDegree("gap check requires a degree-one map, got degree " +
                      std::to_string(deg_int));
  EnergyReport rep = eps_energy(u, epsilon, grid);
  double bound = 4.0 * kPi * (1.0 + 2.0 * epsilon);
  return rep.total >= bound * (1.0 - 1e-6);
}

MobiusMatrix sl2_exp(const std::array<double, 6>& q) {
  cplx z(q[0], q[3]);
  cplx w1(q[1], q[4]);
  cplx w2(q[2], q[5]);
  // X = [[z, w1], [w2, -z]], X² = (z² + w1 w2) I =: mu² I.
  cplx mu2 = z * z + w1 * w2;
  cplx ch, shc;  // cosh(mu), sinh(mu)/mu
  if (std::abs(mu2) < 1e-8) {
    ch = 1.0 + mu2 * (0.5 + mu2 / 24.0);
    shc = 1.0 + mu2 * (1.0 / 6.0 + mu2 / 120.0);
  } else {
    cplx mu = std::sqrt(mu2);
    ch = std::cosh(mu);
    shc = std::sinh(mu) / mu;
  }
  return MobiusMatrix{ch + shc * z, shc * w1, shc * w2, ch - shc * z};
}

// ||∇(u∘m_M - Id)||² by finite differences of the *difference* field, so the
// misfit vanishes identically (not just to stencil accuracy) when u∘m_M
// is the identity.
double mobius_misfit(const MapField& u, const MobiusMatrix& m,
                     const QuadratureGrid& grid) {
  return par::sum_map(grid.nodes.size(), [&](std::size_t i) {
    const auto& nd = grid.nodes[i];
    Chart ch = preferred_chart(nd.p);
    cplx xi0 = stereo_project(nd.p, ch).xi;
    double h = fd_step(xi0);

    auto diff = [&](cplx xi) -> Vec3 {
      SpherePoint base = stereo_unproject({xi, ch});
      return u.value(mobius_act(m, base)) - base;
    };

    static constexpr double kW[4] = {1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0,
                                     -1.0 / 12.0};
    static constexpr double kO[4] = {-2.0, -1.0, 1.0, 2.0};
    Vec3 dx{0, 0, 0}, dy{0, 0, 0};
    for (int k = 0; k < 4; ++k) {
      dx += kW[k] * diff(xi0 + cplx(kO[k] * h, 0.0));
      dy += kW[k] * diff(xi0 + cplx(0.0, kO[k] * h));
    }
    dx = (1.0 / h) * dx;
    dy = (1.0 / h) * dy;

    double c = 0.5 * (1.0 + std::norm(xi0));
    return nd.w * c * c * (norm2(dx) + norm2(dy));
  });
}

namespace {

struct Simplex {
  std::vector<std::array<double, 6>> x;
  std::vector<double> f;
};

}  // namespace

OptimalMobiusResult optimal_mobius(const MapField& u, const QuadratureGrid& grid,
                                   const OptimalMobiusOptions& opts) {
  {
    auto [deg, deg_int] = degree(u, grid);
    (void)deg;
    if (deg_int != 1)
      throw NotDegreeOne("nearest-transformation search requires degree one, got " +
                         std::to_string(deg_int));
  }

  int evals = 0;
  MobiusMatrix base;  // identity
  auto fq = [&](const std::array<double, 6>& q) {
    ++evals;
    return mobius_misfit(u, compose(base, sl2_exp(q)), grid);
  };

  constexpr std::array<double, 6> kZero{0, 0, 0, 0, 0, 0};
  double step = opts.init_step;
  double fbest = fq(kZero);
  double stat = std::numeric_limits<double>::infinity();

  for (int round = 0; round < opts.max_rounds; ++round) {
    // Nelder-Mead from the current base point.
    Simplex s;
    s.x.assign(7, kZero);
    s.f.assign(7, 0.0);
    s.f[0] = fbest;
    for (int i = 0; i < 6; ++i) {
      s.x[i + 1][i] = step;
      s.f[i + 1] = fq(s.x[i + 1]);
    }
    for (int it = 0; it < opts.simplex_max_iter; ++it) {
      std::array<int, 7> order;
      for (int i = 0; i < 7; ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return s.f[a] < s.f[b]; });
      int lo = order[0], hi = order[6], nh = order[5];
      if (s.f[hi] - s.f[lo] < 1e-15 * (1.0 + std::abs(s.f[lo]))) break;

      std::array<double, 6> cen{};
      for (int i = 0; i < 7; ++i)
        if (i != hi)
          for (int d = 0; d < 6; ++d) cen[d] += s.x[i][d] / 6.0;

      auto blend = [&](double t) {
        std::array<double, 6> p;
        for (int d = 0; d < 6; ++d) p[d] = cen[d] + t * (cen[d] - s.x[hi][d]);
        return p;
      };
      auto xr = blend(1.0);
      double fr = fq(xr);
      if (fr < s.f[lo]) {
        auto xe = blend(2.0);
        double fe = fq(xe);
        if (fe < fr) {
          s.x[hi] = xe;
          s.f[hi] = fe;
        } else {
          s.x[hi] = xr;
          s.f[hi] = fr;
        }
      } else if (fr < s.f[nh]) {
        s.x[hi] = xr;
        s.f[hi] = fr;
      } else {
        auto xc = blend(fr < s.f[hi] ? 0.5 : -0.5);
        double fc = fq(xc);
        if (fc < std::min(fr, s.f[hi])) {
          s.x[hi] = xc;
          s.f[hi] = fc;
        } else {
          for (int i = 0; i < 7; ++i) {
            if (i == lo) continue;
            for (int d = 0; d < 6; ++d)
              s.x[i][d] = 0.5 * (s.x[i][d] + s.x[lo][d]);
            s.f[i] = fq(s.x[i]);
          }
        }
      }
    }

    int lo = 0;
    for (int i = 1; i < 7; ++i)
      if (s.f[i] < s.f[lo]) lo = i;
    std::array<double, 6> q = s.x[lo];
    double fcur = s.f[lo];

    // Coordinate-wise parabolic refinement around the simplex minimum.
    double hp = std::max(1e-7, step * 1e-3);
    for (int sweep = 0; sweep < 3; ++sweep) {
      for (int d = 0; d < 6; ++d) {
        auto qp = q, qm = q;
        qp[d] += hp;
        qm[d] -= hp;
        double fp = fq(qp), fm = fq(qm);
        double curv = fp - 2.0 * fcur + fm;
        if (curv <= 0.0) {
          if (fp < fcur) {
            q = qp;
            fcur = fp;
          } else if (fm < fcur) {
            q = qm;
            fcur = fm;
          }
          continue;
        }
        double delta = std::clamp(-0.5 * (fp - fm) / curv * hp, -2.0 * hp,
                                  2.0 * hp);
        auto qn = q;
        qn[d] += delta;
        double fn = fq(qn);
        if (fn < fcur) {
          q = qn;
          fcur = fn;
        }
      }
      hp *= 0.1;
    }

    base = compose(base, sl2_exp(q));
    fbest = fcur;

    // Directional-derivative stationarity at the recentered base.
    double hs = 1e-5;
    stat = 0.0;
    for (int d = 0; d < 6; ++d) {
      std::array<double, 6> qp{}, qm{};
      qp[d] = hs;
      qm[d] = -hs;
      stat = std::max(stat, std::abs(fq(qp) - fq(qm)) / (2.0 * hs));
    }
    if (stat < opts.stationarity_tol) {
      OptimalMobiusResult out;
      out.m = normalize(base);
      out.residual = std::sqrt(std::max(fbest, 0.0));
      out.stationarity = stat;
      out.objective_evals = evals;
      return out;
    }
    step = std::max(0.02, step * 0.3);
  }
  throw NoConvergence("nearest-transformation search: stationarity " +
                      std::to_string(stat) + " after all rounds");
}

}  // namespace epsharm
