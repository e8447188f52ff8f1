#include "epsharm/mobius.hpp"

#include <cmath>

namespace epsharm {

MobiusMatrix normalize(const MobiusMatrix& m) {
  const cplx det = m.det();
  if (!(std::abs(det) > 0.0) || !std::isfinite(std::abs(det)))
    throw DomainError("normalize: singular Mobius matrix");
  const cplx s = std::sqrt(det);
  MobiusMatrix r{m.a / s, m.b / s, m.c / s, m.d / s};
  for (const cplx* e : {&r.a, &r.b, &r.c, &r.d}) {
    if (std::abs(*e) <= 1e-14) continue;
    const double re = e->real(), im = e->imag();
    if (re < 0.0 || (re == 0.0 && im < 0.0)) {
      r.a = -r.a;
      r.b = -r.b;
      r.c = -r.c;
      r.d = -r.d;
    }
    break;
  }
  return r;
}

MobiusMatrix compose(const MobiusMatrix& m, const MobiusMatrix& n) {
  return normalize({m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                    m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d});
}

cplx apply(const MobiusMatrix& m, cplx xi) {
  const cplx den = m.c * xi + m.d;
  if (std::abs(den) < 1e-300)
    throw InfinityResult("apply: image is the point at infinity");
  return (m.a * xi + m.b) / den;
}

SpherePoint mobius_act(const MobiusMatrix& m, const SpherePoint& p) {
  // Homogeneous lift [σ:τ] with σ/τ the North coordinate; both entries stay
  // O(1) when the lift is picked by hemisphere.
  cplx sig, tau;
  if (p[2] <= 0.0) {
    sig = cplx(p[0], p[1]);
    tau = cplx(1.0 - p[2]);
  } else {
    sig = cplx(1.0 + p[2]);
    tau = cplx(p[0], -p[1]);
  }
  const cplx s2 = m.a * sig + m.b * tau;
  const cplx t2 = m.c * sig + m.d * tau;
  const double n = std::norm(s2) + std::norm(t2);
  const cplx st = s2 * std::conj(t2);
  return {2.0 * st.real() / n, 2.0 * st.imag() / n,
          (std::norm(s2) - std::norm(t2)) / n};
}

SingularDecomp svd(const MobiusMatrix& m0) {
  const MobiusMatrix m = normalize(m0);
  // MM* = (p q; conj(q) r), Hermitian with determinant 1.
  const double p = std::norm(m.a) + std::norm(m.b);
  const double r = std::norm(m.c) + std::norm(m.d);
  const cplx q = m.a * std::conj(m.c) + m.b * std::conj(m.d);
  const double disc = std::sqrt((p - r) * (p - r) + 4.0 * std::norm(q));
  const double lambda = 0.5 * (p + r + disc);

  SingularDecomp out;
  out.lambda = lambda < 1.0 ? 1.0 : lambda;  // clamp rounding at the identity
  if (disc < 1e-14) {
    // MM* = I: any unitary diagonalizes; M itself is the rotation.
    out.U = {cplx(1.0), cplx(0.0), cplx(0.0), cplx(1.0)};
    out.V = normalize({std::conj(m.a), std::conj(m.c), std::conj(m.b),
                       std::conj(m.d)});
    return out;
  }
  // Unit eigenvector of MM* for the eigenvalue lambda; the two candidate
  // formulas degenerate in complementary regimes, pick the larger.
  cplx u1, u2;
  if (std::abs(lambda - r) >= std::abs(lambda - p)) {
    u1 = lambda - r;
    u2 = std::conj(q);
  } else {
    u1 = q;
    u2 = lambda - p;
  }
  const double nu = std::sqrt(std::norm(u1) + std::norm(u2));
  u1 /= nu;
  u2 /= nu;
  // U = (u1 -conj(u2); u2 conj(u1)) ∈ SU(2); then V* = D⁻¹ U* M.
  MobiusMatrix U{u1, -std::conj(u2), u2, std::conj(u1)};
  const double sl = std::sqrt(out.lambda);
  const cplx vs1 = (std::conj(U.a) * m.a + std::conj(U.c) * m.c) / sl;
  const cplx vs2 = (std::conj(U.a) * m.b + std::conj(U.c) * m.d) / sl;
  const cplx vs3 = (std::conj(U.b) * m.a + std::conj(U.d) * m.c) * sl;
  const cplx vs4 = (std::conj(U.b) * m.b + std::conj(U.d) * m.d) * sl;
  out.U = normalize(U);
  out.V = normalize({std::conj(vs1), std::conj(vs3), std::conj(vs2),
                     std::conj(vs4)});
  return out;
}

Rotation3 su2_to_so3(const MobiusMatrix& u0) {
  const MobiusMatrix u = normalize(u0);
  // Unitarity: U U* = I.
  const double e1 = std::abs(std::norm(u.a) + std::norm(u.b) - 1.0);
  const double e2 = std::abs(std::norm(u.c) + std::norm(u.d) - 1.0);
  const double e3 = std::abs(u.a * std::conj(u.c) + u.b * std::conj(u.d));
  if (e1 > 1e-8 || e2 > 1e-8 || e3 > 1e-8)
    throw NotUnitary("su2_to_so3: matrix is not in SU(2)");
  // H(x) = (z, x+iy; x-iy, -z). Column j of R is H⁻¹(U H(e_j) U*).
  Rotation3 R;
  for (int j = 0; j < 3; ++j) {
    const Vec3 e = {j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0, j == 2 ? 1.0 : 0.0};
    const cplx h11(e[2]), h12(e[0], e[1]);
    // U H: rows of U times columns of H (H Hermitian: h21 = conj(h12), h22 = -h11).
    const cplx uh11 = u.a * h11 + u.b * std::conj(h12);
    const cplx uh12 = u.a * h12 - u.b * h11;
    const cplx uh21 = u.c * h11 + u.d * std::conj(h12);
    const cplx uh22 = u.c * h12 - u.d * h11;
    // (U H) U*.
    const cplx r11 = uh11 * std::conj(u.a) + uh12 * std::conj(u.b);
    const cplx r12 = uh11 * std::conj(u.c) + uh12 * std::conj(u.d);
    const cplx r21 = uh21 * std::conj(u.a) + uh22 * std::conj(u.b);
    (void)r21;
    // Read x, y, z back from the Hermitian result.
    R[0][j] = r12.real();
    R[1][j] = r12.imag();
    R[2][j] = r11.real();
  }
  return R;
}

double chi_from_abs2(double lambda, double abs2) {
  const double t = (1.0 + lambda * lambda * abs2) / (lambda * (1.0 + abs2));
  return t * t;
}

double chi(double lambda, cplx xi) { return chi_from_abs2(lambda, std::norm(xi)); }

double chi_gradient_norm(double lambda, cplx xi) {
  const double s = std::norm(xi), l2 = lambda * lambda;
  const double den = l2 * (1.0 + s) * (1.0 + s);
  return 2.0 * std::abs(xi) * (1.0 + l2 * s) * (l2 - 1.0) / den;
}

double chi_laplacian(double lambda, cplx xi) {
  const double s = std::norm(xi), l2 = lambda * lambda;
  return 2.0 * (l2 - 1.0) * (1.0 + 2.0 * l2 * s) / (l2 * (1.0 + s)) -
         6.0 * s * (1.0 + l2 * s) * (l2 - 1.0) / (l2 * (1.0 + s) * (1.0 + s));
}

Jet2 holomorphic_chart_jet(cplx w, cplx alpha, cplx beta) {
  // F(x,y) = P(mu(x+iy)) with P the North-chart parametrization. Writing
  // mu = u + iv, the Cauchy-Riemann structure gives
  //   (u_x, v_x) = (Re α, Im α),   (u_y, v_y) = (-Im α, Re α),
  //   (u_xx, v_xx) = (Re β, Im β), (u_yy, v_yy) = -(Re β, Im β),
  //   (u_xy, v_xy) = (-Im β, Re β).
  const Jet2 P = unproject_jet(Chart::North, w);
  // The second-order jet of P in (u, v): reuse the (x, y) jet of the North
  // parametrization, whose variables are exactly (u, v).
  const double ux = alpha.real(), vx = alpha.imag();
  const double uy = -alpha.imag(), vy = alpha.real();
  const double uxx = beta.real(), vxx = beta.imag();
  const double uyy = -beta.real(), vyy = -beta.imag();
  const double uxy = -beta.imag(), vxy = beta.real();
  Jet2 j;
  j.u = P.u;
  for (int c = 0; c < 3; ++c) {
    const double Pu = P.ux[c], Pv = P.uy[c];
    const double Puu = P.uxx[c], Puv = P.uxy[c], Pvv = P.uyy[c];
    j.ux[c] = Pu * ux + Pv * vx;
    j.uy[c] = Pu * uy + Pv * vy;
    j.uxx[c] = Puu * ux * ux + 2.0 * Puv * ux * vx + Pvv * vx * vx + Pu * uxx +
               Pv * vxx;
    j.uyy[c] = Puu * uy * uy + 2.0 * Puv * uy * vy + Pvv * vy * vy + Pu * uyy +
               Pv * vyy;
    j.uxy[c] = Puu * ux * uy + Puv * (ux * vy + uy * vx) + Pvv * vx * vy +
               Pu * uxy + Pv * vxy;
  }
  return j;
}

MapField mobius_map(const MobiusMatrix& m0) {
  const MobiusMatrix m = normalize(m0);
  MapField f;
  f.value = [m](const SpherePoint& x) { return mobius_act(m, x); };
  f.chart_jet = [m](Chart chart, cplx xi) {
    // In the South chart the map reads P_N(mu(xi)) with mu(xi) =
    // (a/xi + b)/(c/xi + d) = (b xi + a)/(d xi + c), again fractional-linear.
    cplx A = m.a, B = m.b, C = m.c, D = m.d;
    if (chart == Chart::South) {
      A = m.b;
      B = m.a;
      C = m.d;
      D = m.c;
    }
    const cplx den = C * xi + D;
    if (std::abs(den) < 1e-150)
      throw InfinityResult("mobius_map jet: chart pole hit exactly");
    const cplx w = (A * xi + B) / den;
    const cplx detc = A * D - B * C;
    const cplx alpha = detc / (den * den);
    const cplx beta = -2.0 * C * detc / (den * den * den);
    Jet2 j = holomorphic_chart_jet(w, alpha, beta);
    if (chart == Chart::South) {
      // The source South chart reverses orientation of (x, y) relative to the
      // North coordinate through xi_N = 1/xi_S, which is already captured by
      // the fractional-linear mu above; nothing further to adjust.
    }
    return j;
  };
  f.mode = DerivMode::Analytic;
  return f;
}

MapField compose_mobius(const MapField& u, const MobiusMatrix& m0) {
  const MobiusMatrix m = normalize(m0);
  MapField f;
  auto base = u.value;
  f.value = [base, m](const SpherePoint& x) { return base(mobius_act(m, x)); };
  f.mode = DerivMode::FiniteDifference;
  return f;
}

}  // namespace epsharm
