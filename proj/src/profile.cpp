#include "epsharm/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>

#include "epsharm/parallel.hpp"

namespace epsharm {

ProfileJet eval_profile(const Profile& f, double r) {
  ProfileJet out;
  out.f = f.n * r;
  out.fp = f.n;
  for (std::size_t j = 1; j <= f.coeffs.size(); ++j) {
    double c = f.coeffs[j - 1];
    double s = std::sin(j * r), co = std::cos(j * r);
    out.f += c * s;
    out.fp += c * j * co;
    out.fpp -= c * j * j * s;
  }
  return out;
}

Grid1D build_profile_grid(int n_nodes) {
  if (n_nodes < 2) throw InvalidResolution("profile grid needs at least 2 nodes");
  std::vector<double> t, w;
  gauss_legendre(n_nodes, t, w);
  Grid1D g;
  g.r.resize(t.size());
  g.w = w;
  for (std::size_t i = 0; i < t.size(); ++i) g.r[i] = std::acos(t[i]);
  return g;
}

namespace {

struct Density {
  double value = 0.0;  // g1 + eps·g2
  double g1 = 0.0, g2 = 0.0;
  double dF = 0.0, dA = 0.0, dB = 0.0;  // partials of g1 + eps·g2
};

// g1 = A² + sin²f/sin²r; g2 is the nine-term expansion of |Δu_f|² with
// A = f', B = f''.
Density density_terms(double r, const ProfileJet& j, double eps,
                      bool with_partials) {
  double s = std::sin(r), c = std::cos(r);
  double sf = std::sin(j.f), cf = std::cos(j.f);
  double A = j.fp, B = j.fpp;
  double s2 = s * s, s3 = s2 * s, s4 = s2 * s2;

  Density d;
  d.g1 = A * A + sf * sf / s2;
  d.g2 = B * B + c * c * A * A / s2 + cf * cf * sf * sf / s4 +
         2.0 * A * B * c / s - 2.0 * B * cf * sf / s2 -
         2.0 * c * cf * sf * A / s3 + A * A * A * A + sf * sf * sf * sf / s4 +
         2.0 * A * A * sf * sf / s2;
  d.value = d.g1 + eps * d.g2;

  if (with_partials) {
    double cos2f = cf * cf - sf * sf;
    double dg1F = 2.0 * sf * cf / s2;
    double dg1A = 2.0 * A;
    double dg2F = 2.0 * sf * cf * cos2f / s4 - 2.0 * B * cos2f / s2 -
                  2.0 * c * A * cos2f / s3 + 4.0 * sf * sf * sf * cf / s4 +
                  4.0 * A * A * sf * cf / s2;
    double dg2A = 2.0 * c * c * A / s2 + 2.0 * B * c / s -
                  2.0 * c * cf * sf / s3 + 4.0 * A * A * A +
                  4.0 * A * sf * sf / s2;
    double dg2B = 2.0 * B + 2.0 * A * c / s - 2.0 * cf * sf / s2;
    d.dF = dg1F + eps * dg2F;
    d.dA = dg1A + eps * dg2A;
    d.dB = eps * dg2B;
  }
  return d;
}

// Shared discretization engine: trig tables sin(j r_i), cos(j r_i) plus
// deterministic (pairwise-summed) energy and coefficient-gradient evaluation.
struct Engine {
  int n;
  int J;
  double eps;
  const Grid1D* grid;
  std::vector<double> S, C;  // [i*J + (j-1)]

  Engine(int n_, int J_, double eps_, const Grid1D& g)
      : n(n_), J(J_), eps(eps_), grid(&g) {
    std::size_t N = g.r.size();
    S.resize(N * J);
    C.resize(N * J);
    for (std::size_t i = 0; i < N; ++i)
      for (int j = 1; j <= J; ++j) {
        S[i * J + j - 1] = std::sin(j * g.r[i]);
        C[i * J + j - 1] = std::cos(j * g.r[i]);
      }
  }

  ProfileJet jet_at(std::size_t i, const std::vector<double>& x) const {
    ProfileJet out;
    double r = grid->r[i];
    out.f = n * r;
    out.fp = n;
    for (int j = 1; j <= J; ++j) {
      double c = x[j - 1];
      double s = S[i * J + j - 1], co = C[i * J + j - 1];
      out.f += c * s;
      out.fp += c * j * co;
      out.fpp -= c * j * j * s;
    }
    return out;
  }

  double energy(const std::vector<double>& x, bool parallel = true) const {
    return kPi * par::sum_map(
                     grid->r.size(),
                     [&](std::size_t i) {
                       Density d =
                           density_terms(grid->r[i], jet_at(i, x), eps, false);
                       return grid->w[i] * d.value;
                     },
                     parallel);
  }

  // Returns the energy; fills grad with dI/dc_j.
  double energy_grad(const std::vector<double>& x, std::vector<double>& grad,
                     bool parallel = true) const {
    std::size_t N = grid->r.size();
    std::vector<std::array<double, 4>> buf(N);
    par::detail::run_fill(N, parallel, [&](std::size_t i) {
      Density d = density_terms(grid->r[i], jet_at(i, x), eps, true);
      buf[i] = {grid->w[i] * d.value, grid->w[i] * d.dF, grid->w[i] * d.dA,
                grid->w[i] * d.dB};
    });

    std::vector<double> col(N);
    for (std::size_t i = 0; i < N; ++i) col[i] = buf[i][0];
    double e = kPi * par::pairwise_sum(col.data(), N);

    grad.assign(J, 0.0);
    for (int j = 1; j <= J; ++j) {
      for (std::size_t i = 0; i < N; ++i) {
        double s = S[i * J + j - 1], co = C[i * J + j - 1];
        col[i] = buf[i][1] * s + buf[i][2] * j * co - buf[i][3] * j * j * s;
      }
      grad[j - 1] = kPi * par::pairwise_sum(col.data(), N);
    }
    return e;
  }
};

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double profile_gradient_energy(const Profile& f, const Grid1D& grid,
                               bool parallel) {
  return kPi * par::sum_map(
                   grid.r.size(),
                   [&](std::size_t i) {
                     Density d = density_terms(
                         grid.r[i], eval_profile(f, grid.r[i]), 0.0, false);
                     return grid.w[i] * d.g1;
                   },
                   parallel);
}

double profile_gradient_energy(const ProfileFn& f, const Grid1D& grid,
                               bool parallel) {
  return kPi * par::sum_map(
                   grid.r.size(),
                   [&](std::size_t i) {
                     Density d =
                         density_terms(grid.r[i], f(grid.r[i]), 0.0, false);
                     return grid.w[i] * d.g1;
                   },
                   parallel);
}

namespace {

template <typename JetAt>
ReducedEnergyReport reduced_report(JetAt&& jet_at, double epsilon,
                                   const Grid1D& grid, bool parallel) {
  auto parts = par::sum_map_multi<2>(
      grid.r.size(),
      [&](std::size_t i) -> std::array<double, 2> {
        Density d = density_terms(grid.r[i], jet_at(i), epsilon, false);
        if (!std::isfinite(d.g1) || !std::isfinite(d.g2))
          throw NonFiniteIntegrand("reduced energy integrand not finite at r = " +
                                   std::to_string(grid.r[i]));
        return {grid.w[i] * d.g1, grid.w[i] * d.g2};
      },
      parallel);
  ReducedEnergyReport rep;
  rep.gradient_term = kPi * parts[0];
  rep.biharmonic_term = kPi * parts[1];
  rep.epsilon = epsilon;
  rep.total = rep.gradient_term + epsilon * rep.biharmonic_term;
  rep.el_residual = std::numeric_limits<double>::quiet_NaN();
  return rep;
}

}  // namespace

ReducedEnergyReport profile_full_energy(const Profile& f, double epsilon,
                                        const Grid1D& grid, bool parallel) {
  ReducedEnergyReport rep = reduced_report(
      [&](std::size_t i) { return eval_profile(f, grid.r[i]); }, epsilon, grid,
      parallel);
  rep.el_residual = el_residual(f, epsilon, grid);
  return rep;
}

ReducedEnergyReport profile_full_energy(const ProfileFn& f, double epsilon,
                                        const Grid1D& grid, bool parallel) {
  return reduced_report([&](std::size_t i) { return f(grid.r[i]); }, epsilon,
                        grid, parallel);
}

std::vector<double> coeff_gradient(int n, const std::vector<double>& coeffs,
                                   double epsilon, const Grid1D& grid,
                                   bool parallel) {
  if (coeffs.empty()) return {};
  Engine eng(n, static_cast<int>(coeffs.size()), epsilon, grid);
  std::vector<double> grad;
  eng.energy_grad(coeffs, grad, parallel);
  return grad;
}

double el_residual(const Profile& f, double epsilon, const Grid1D& grid) {
  return sup_norm(coeff_gradient(f.n, f.coeffs, epsilon, grid));
}

TrialProfile trial_profile(double lambda) {
  if (!(lambda > 1.0)) throw DomainError("trial profile requires Lambda > 1");
  return TrialProfile{lambda};
}

namespace {

// Chart jet of the lift u_f through the polar decomposition of the chart
// coordinate: xi = rho e^{i a}, with r(rho) per chart and θ = ±a. Valid away
// from the chart centers (rho = 0), which quadrature nodes never hit.
template <typename PF>
Jet2 lift_chart_jet(const PF& pf, Chart ch, cplx xi) {
  double X = xi.real(), Y = xi.imag();
  double rho2 = X * X + Y * Y;
  double rho = std::sqrt(rho2);
  if (rho < 1e-12)
    throw DomainError("profile lift jet is singular at a chart center");

  double opr2 = 1.0 + rho2;
  double r, r_rho, r_rhorho, sgn;
  if (ch == Chart::North) {
    r = 2.0 * std::atan2(1.0, rho);
    r_rho = -2.0 / opr2;
    r_rhorho = 4.0 * rho / (opr2 * opr2);
    sgn = 1.0;
  } else {
    r = 2.0 * std::atan(rho);
    r_rho = 2.0 / opr2;
    r_rhorho = -4.0 * rho / (opr2 * opr2);
    sgn = -1.0;
  }
  double th = sgn * std::atan2(Y, X);

  double rho3 = rho2 * rho, rho4 = rho2 * rho2;
  double rX = r_rho * X / rho, rY = r_rho * Y / rho;
  double rXX = r_rhorho * X * X / rho2 + r_rho * Y * Y / rho3;
  double rYY = r_rhorho * Y * Y / rho2 + r_rho * X * X / rho3;
  double rXY = r_rhorho * X * Y / rho2 - r_rho * X * Y / rho3;
  double tX = sgn * (-Y / rho2), tY = sgn * (X / rho2);
  double tXX = sgn * (2.0 * X * Y / rho4);
  double tXY = sgn * ((Y * Y - X * X) / rho4);
  double tYY = sgn * (-2.0 * X * Y / rho4);

  ProfileJet j = pf(r);
  double sf = std::sin(j.f), cf = std::cos(j.f);
  double st = std::sin(th), ct = std::cos(th);

  Vec3 ur = j.fp * Vec3{cf * ct, cf * st, -sf};
  Vec3 ut{-sf * st, sf * ct, 0.0};
  Vec3 urr = j.fpp * Vec3{cf * ct, cf * st, -sf} +
             (j.fp * j.fp) * Vec3{-sf * ct, -sf * st, -cf};
  Vec3 urt = (j.fp * cf) * Vec3{-st, ct, 0.0};
  Vec3 utt{-sf * ct, -sf * st, 0.0};

  Jet2 out;
  out.u = {sf * ct, sf * st, cf};
  out.ux = rX * ur + tX * ut;
  out.uy = rY * ur + tY * ut;
  out.uxx = (rX * rX) * urr + (2.0 * rX * tX) * urt + (tX * tX) * utt +
            rXX * ur + tXX * ut;
  out.uyy = (rY * rY) * urr + (2.0 * rY * tY) * urt + (tY * tY) * utt +
            rYY * ur + tYY * ut;
  out.uxy = (rX * rY) * urr + (rX * tY + rY * tX) * urt + (tX * tY) * utt +
            rXY * ur + tXY * ut;
  return out;
}

template <typename PF>
MapField make_lift(PF pf) {
  MapField u;
  u.mode = DerivMode::Analytic;
  u.value = [pf](const SpherePoint& p) -> Vec3 {
    double z = std::clamp(p[2], -1.0, 1.0);
    double r = std::acos(z);
    double th = std::atan2(p[1], p[0]);
    ProfileJet j = pf(r);
    double sf = std::sin(j.f);
    return {sf * std::cos(th), sf * std::sin(th), std::cos(j.f)};
  };
  u.chart_jet = [pf](Chart ch, cplx xi) { return lift_chart_jet(pf, ch, xi); };
  return u;
}

}  // namespace

MapField lift_profile(const Profile& f) {
  return make_lift([f](double r) { return eval_profile(f, r); });
}

MapField lift_profile_fn(const ProfileFn& f) { return make_lift(f); }

ProfileJet TrialProfile::operator()(double r) const {
  double s = std::sin(r), c = std::cos(r);
  double den = c * c + lambda * lambda * s * s;
  ProfileJet j;
  // atan2 form keeps the +2π continuation past r = π/2 automatic.
  j.f = 2.0 * std::atan2(lambda * s, c);
  j.fp = 2.0 * lambda / den;
  j.fpp = 4.0 * lambda * s * c * (1.0 - lambda * lambda) / (den * den);
  return j;
}

TrialEnergyBounds trial_energy_bounds(double lambda, double epsilon) {
  double l2 = lambda * lambda;
  if (!(l2 > 2.0)) throw DomainError("trial energy bounds require Lambda² > 2");
  double den = l2 - 1.0;
  TrialEnergyBounds b;
  b.components = {8.0 * kPi * l2 / den, 128.0 * kPi * epsilon / den,
                  256.0 * kPi * epsilon * l2 * l2 * l2 / (den * den)};
  b.upper = b.components[0] + b.components[1] + b.components[2];
  b.simplified = 8.0 * kPi * (1.0 + 2.0 / l2) + 128.0 * kPi * epsilon +
                 1024.0 * kPi * epsilon * l2;
  b.final_bound = 8.0 * kPi + 1168.0 * kPi * std::sqrt(epsilon);
  return b;
}

LowerBoundCheck lower_bound_check(const Profile& f, double epsilon,
                                  const Grid1D& grid) {
  // ∫|f' sin f| dr is the total variation of cos∘f: locate the sign changes
  // of f'·sin f and sum |Δ cos f| between them. Quadrature on the |·| kink
  // would lose far more than the 1e-6 slack this check allows.
  auto q = [&](double r) {
    ProfileJet j = eval_profile(f, r);
    return j.fp * std::sin(j.f);
  };
  auto cosf = [&](double r) { return std::cos(eval_profile(f, r).f); };

  const int scan = 4096;
  std::vector<double> cuts{0.0};
  double prev_r = 0.0, prev_q = q(0.0);
  for (int k = 1; k <= scan; ++k) {
    double r = kPi * k / scan;
    double qr = q(r);
    if ((prev_q < 0.0 && qr > 0.0) || (prev_q > 0.0 && qr < 0.0)) {
      double lo = prev_r, hi = r, flo = prev_q;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi), fm = q(mid);
        if ((flo < 0.0) == (fm < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      cuts.push_back(0.5 * (lo + hi));
    }
    prev_r = r;
    prev_q = qr;
  }
  cuts.push_back(kPi);

  double tv = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    tv += std::abs(cosf(cuts[k + 1]) - cosf(cuts[k]));

  LowerBoundCheck out;
  out.winding_integral = 2.0 * kPi * tv;
  out.energy = profile_full_energy(f, epsilon, grid).total;

  double wind_bound = 8.0 * kPi - 1e-6;
  double energy_bound = 8.0 * kPi + 32.0 * kPi * kPi * epsilon - 1e-6;
  bool wind_ok = out.winding_integral >= wind_bound;
  bool energy_ok = out.energy >= energy_bound;
  out.ok = wind_ok && energy_ok;

  std::ostringstream msg;
  msg << "winding integral " << out.winding_integral
      << (wind_ok ? " >= " : " < ") << wind_bound << "; energy " << out.energy
      << (energy_ok ? " >= " : " < ") << energy_bound;
  out.detail = msg.str();
  return out;
}

namespace {

// Solve A x = b by Gaussian elimination with partial pivoting; returns false
// on a vanishing pivot. A is row-major J×J and is destroyed.
bool solve_dense(std::vector<double>& A, std::vector<double>& b, int J,
                 std::vector<double>& x) {
  for (int k = 0; k < J; ++k) {
    int piv = k;
    for (int i = k + 1; i < J; ++i)
      if (std::abs(A[i * J + k]) > std::abs(A[piv * J + k])) piv = i;
    if (std::abs(A[piv * J + k]) < 1e-300) return false;
    if (piv != k) {
      for (int c = k; c < J; ++c) std::swap(A[k * J + c], A[piv * J + c]);
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < J; ++i) {
      double m = A[i * J + k] / A[k * J + k];
      if (m == 0.0) continue;
      for (int c = k; c < J; ++c) A[i * J + c] -= m * A[k * J + c];
      b[i] -= m * b[k];
    }
  }
  x.assign(J, 0.0);
  for (int i = J - 1; i >= 0; --i) {
    double s = b[i];
    for (int c = i + 1; c < J; ++c) s -= A[i * J + c] * x[c];
    x[i] = s / A[i * J + i];
  }
  return true;
}

struct DescentRun {
  std::vector<double> x;
  double energy = 0.0;
  double residual = 0.0;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

DescentRun descend(const Engine& eng, std::vector<double> x,
                   const MinimizeOptions& opts) {
  const int J = eng.J;
  DescentRun run;

  std::vector<double> g, gnew, d(J), xnew(J), s(J), y(J);
  double E = eng.energy_grad(x, g);
  run.trace.push_back(E);

  // Inverse-Hessian approximation for BFGS, row-major.
  std::vector<double> H(static_cast<std::size_t>(J) * J, 0.0);
  auto reset_H = [&] {
    std::fill(H.begin(), H.end(), 0.0);
    for (int i = 0; i < J; ++i) H[i * J + i] = 1.0;
  };
  reset_H();

  for (int it = 0; it < opts.max_iter && sup_norm(g) >= opts.tol; ++it) {
    for (int i = 0; i < J; ++i) {
      double acc = 0.0;
      for (int j = 0; j < J; ++j) acc += H[i * J + j] * g[j];
      d[i] = -acc;
    }
    double slope = 0.0;
    for (int i = 0; i < J; ++i) slope += d[i] * g[i];
    if (slope >= 0.0) {
      reset_H();
      for (int i = 0; i < J; ++i) d[i] = -g[i];
      slope = 0.0;
      for (int i = 0; i < J; ++i) slope -= g[i] * g[i];
    }

    double t = 1.0, Enew = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (int i = 0; i < J; ++i) xnew[i] = x[i] + t * d[i];
      Enew = eng.energy(xnew);
      if (Enew <= E + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (sup_norm(g) < 1e-4) break;  // hand the endgame to Newton polish
      throw LineSearchFailure("no decrease along quasi-Newton direction at energy " +
                              std::to_string(E));
    }

    double Eprev = E;
    E = eng.energy_grad(xnew, gnew);
    // The line search used energy only; keep the gradient-call value.
    (void)Eprev;
    for (int i = 0; i < J; ++i) {
      s[i] = xnew[i] - x[i];
      y[i] = gnew[i] - g[i];
    }
    double sy = 0.0, ss = 0.0, yy = 0.0;
    for (int i = 0; i < J; ++i) {
      sy += s[i] * y[i];
      ss += s[i] * s[i];
      yy += y[i] * y[i];
    }
    if (sy > 1e-12 * std::sqrt(ss * yy)) {
      // H ← (I - s yᵀ/sy) H (I - y sᵀ/sy) + s sᵀ/sy
      std::vector<double> Hy(J, 0.0);
      for (int i = 0; i < J; ++i)
        for (int j = 0; j < J; ++j) Hy[i] += H[i * J + j] * y[j];
      double yHy = 0.0;
      for (int i = 0; i < J; ++i) yHy += y[i] * Hy[i];
      double rho = 1.0 / sy;
      for (int i = 0; i < J; ++i)
        for (int j = 0; j < J; ++j)
          H[i * J + j] += rho * ((1.0 + rho * yHy) * s[i] * s[j] -
                                 Hy[i] * s[j] - s[i] * Hy[j]);
    }
    x = xnew;
    g = gnew;
    run.trace.push_back(E);
    ++run.iterations;
  }

  // Damped Newton on the analytic gradient (finite-difference Hessian).
  const double hH = 1e-5;
  for (int it = 0; it < opts.polish_iter && sup_norm(g) >= opts.tol; ++it) {
    std::vector<double> hess(static_cast<std::size_t>(J) * J, 0.0);
    std::vector<double> gp, gm, xp(x), xm(x);
    for (int j = 0; j < J; ++j) {
      xp[j] += hH;
      xm[j] -= hH;
      eng.energy_grad(xp, gp);
      eng.energy_grad(xm, gm);
      for (int i = 0; i < J; ++i)
        hess[i * J + j] = (gp[i] - gm[i]) / (2.0 * hH);
      xp[j] = x[j];
      xm[j] = x[j];
    }
    for (int i = 0; i < J; ++i)
      for (int j = i + 1; j < J; ++j) {
        double v = 0.5 * (hess[i * J + j] + hess[j * J + i]);
        hess[i * J + j] = hess[j * J + i] = v;
      }

    std::vector<double> rhs(g), step;
    for (double& v : rhs) v = -v;
    if (!solve_dense(hess, rhs, J, step)) {
      step = g;
      for (double& v : step) v = -v;
    }

    double gn = sup_norm(g), alpha = 1.0;
    bool ok = false;
    for (int damp = 0; damp < 25; ++damp) {
      for (int i = 0; i < J; ++i) xnew[i] = x[i] + alpha * step[i];
      double Enew = eng.energy_grad(xnew, gnew);
      if (sup_norm(gnew) < gn) {
        x = xnew;
        g = gnew;
        E = Enew;
        ok = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!ok) break;
    if (E <= run.trace.back()) run.trace.push_back(E);
    ++run.iterations;
  }

  run.x = std::move(x);
  run.energy = E;
  run.residual = sup_norm(g);
  run.converged = run.residual < opts.tol;
  return run;
}

// L² projection of (f_Λ - 2r) onto the sine basis, trapezoid rule on a fine
// uniform grid (the difference vanishes at both endpoints).
std::vector<double> project_trial(double lambda, int modes) {
  const int N = 8192;
  const double h = kPi / N;
  TrialProfile tp{lambda};
  std::vector<double> c(modes, 0.0);
  for (int k = 1; k < N; ++k) {
    double r = h * k;
    double dres = tp(r).f - 2.0 * r;
    for (int j = 1; j <= modes; ++j)
      c[j - 1] += dres * std::sin(j * r);
  }
  for (int j = 0; j < modes; ++j) c[j] *= 2.0 * h / kPi;
  return c;
}

}  // namespace

MinimizeResult minimize_profile(int n, double epsilon, int modes,
                                const Grid1D& grid,
                                const MinimizeOptions& opts) {
  if (!(epsilon > 0.0 && epsilon < 0.25))
    throw DomainError("profile minimization requires epsilon in (0, 0.25)");
  if (modes < 4) throw DomainError("profile minimization requires at least 4 modes");
  if (n < 0) throw DomainError("winding class must be nonnegative");

  Engine eng(n, modes, epsilon, grid);

  std::vector<std::vector<double>> starts;
  if (n == 2) {
    starts.push_back(project_trial(std::pow(epsilon, -0.25), modes));
    starts.push_back(std::vector<double>(modes, 0.0));
  } else {
    // A deterministic off-minimum start makes convergence a real statement.
    std::vector<double> x(modes, 0.0);
    x[0] = 0.3;
    if (modes > 1) x[1] = -0.2;
    if (modes > 2) x[2] = 0.1;
    starts.push_back(std::move(x));
  }

  DescentRun best;
  bool have = false;
  for (auto& s : starts) {
    DescentRun run = descend(eng, std::move(s), opts);
    if (!have || run.energy < best.energy) {
      best = std::move(run);
      have = true;
    }
  }
  if (!best.converged)
    throw NoConvergence("profile minimization stalled at gradient sup-norm " +
                        std::to_string(best.residual));

  MinimizeResult out;
  out.profile = Profile{n, best.x};
  out.report = profile_full_energy(out.profile, epsilon, grid);
  out.trace = std::move(best.trace);
  out.iterations = best.iterations;
  return out;
}

}  // namespace epsharm
