#include "epsharm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "epsharm/parallel.hpp"

namespace epsharm {

Poly3 Poly3::monomial(const Key& k, double c) {
  Poly3 p;
  if (c != 0.0) p.terms[k] = c;
  return p;
}

double Poly3::eval(const Vec3& x) const {
  double acc = 0.0;
  for (const auto& [k, c] : terms) {
    double t = c;
    for (int axis = 0; axis < 3; ++axis)
      for (int e = 0; e < k[axis]; ++e) t *= x[axis];
    acc += t;
  }
  return acc;
}

Poly3 Poly3::derivative(int axis) const {
  Poly3 out;
  for (const auto& [k, c] : terms) {
    if (k[axis] == 0) continue;
    Key nk = k;
    nk[axis] -= 1;
    out.terms[nk] += c * k[axis];
  }
  return out;
}

Poly3 Poly3::ambient_laplacian() const {
  Poly3 out;
  for (int axis = 0; axis < 3; ++axis)
    out.add(derivative(axis).derivative(axis));
  return out;
}

Poly3 Poly3::mono_mul(const Key& k, double c) const {
  Poly3 out;
  for (const auto& [key, coef] : terms)
    out.terms[{key[0] + k[0], key[1] + k[1], key[2] + k[2]}] += coef * c;
  return out;
}

void Poly3::add(const Poly3& other, double scale) {
  for (const auto& [k, c] : other.terms) {
    double& slot = terms[k];
    slot += scale * c;
    if (slot == 0.0) terms.erase(k);
  }
}

Poly3 Poly3::scaled(double s) const {
  Poly3 out;
  for (const auto& [k, c] : terms)
    if (s * c != 0.0) out.terms[k] = s * c;
  return out;
}

int Poly3::degree() const {
  int d = 0;
  for (const auto& [k, c] : terms) {
    (void)c;
    d = std::max(d, k[0] + k[1] + k[2]);
  }
  return d;
}

bool Poly3::is_zero(double tol) const {
  for (const auto& [k, c] : terms) {
    (void)k;
    if (std::abs(c) > tol) return false;
  }
  return true;
}

Poly3 sphere_laplacian_poly(const Poly3& f) {
  Poly3 out = f.ambient_laplacian();
  for (int i = 0; i < 3; ++i) {
    Poly3::Key ei{0, 0, 0};
    ei[i] = 1;
    out.add(f.derivative(i).mono_mul(ei), -2.0);
    for (int j = 0; j < 3; ++j) {
      Poly3::Key eij{0, 0, 0};
      eij[i] += 1;
      eij[j] += 1;
      out.add(f.derivative(i).derivative(j).mono_mul(eij), -1.0);
    }
  }
  return out;
}

namespace {

std::vector<Poly3::Key> monomials_of_degree(int k) {
  std::vector<Poly3::Key> out;
  for (int a = k; a >= 0; --a)
    for (int b = k - a; b >= 0; --b) out.push_back({a, b, k - a - b});
  return out;
}

double poly_inner(const Poly3& p, const Poly3& q, const QuadratureGrid& grid) {
  return par::sum_map(grid.nodes.size(), [&](std::size_t i) {
    const auto& nd = grid.nodes[i];
    return nd.w * p.eval(nd.p) * q.eval(nd.p);
  });
}

std::vector<HarmonicPoly> build_harmonic_basis(int k) {
  if (k == 0) {
    Poly3 one = Poly3::monomial({0, 0, 0}, 1.0 / std::sqrt(4.0 * kPi));
    return {HarmonicPoly{0, one}};
  }

  auto monos = monomials_of_degree(k);
  int m = static_cast<int>(monos.size());

  // Harmonicity ΔP = 0 as linear constraints on the monomial coefficients.
  std::vector<Poly3::Key> target = monomials_of_degree(k - 2);
  int rows = static_cast<int>(target.size());
  std::map<Poly3::Key, int> target_index;
  for (int r = 0; r < rows; ++r) target_index[target[r]] = r;

  std::vector<double> A(static_cast<std::size_t>(rows) * m, 0.0);
  for (int c = 0; c < m; ++c) {
    Poly3 lap = Poly3::monomial(monos[c], 1.0).ambient_laplacian();
    for (const auto& [key, coef] : lap.terms)
      A[target_index.at(key) * m + c] += coef;
  }

  // Nullspace by row reduction.
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < m && r < rows; ++c) {
    int piv = r;
    for (int i = r + 1; i < rows; ++i)
      if (std::abs(A[i * m + c]) > std::abs(A[piv * m + c])) piv = i;
    if (std::abs(A[piv * m + c]) < 1e-12) continue;
    for (int j = 0; j < m; ++j) std::swap(A[r * m + j], A[piv * m + j]);
    double inv = 1.0 / A[r * m + c];
    for (int j = 0; j < m; ++j) A[r * m + j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      double f = A[i * m + c];
      if (f == 0.0) continue;
      for (int j = 0; j < m; ++j) A[i * m + j] -= f * A[r * m + j];
    }
    pivot_col.push_back(c);
    ++r;
  }

  std::vector<bool> is_pivot(m, false);
  for (int c : pivot_col) is_pivot[c] = true;

  std::vector<HarmonicPoly> basis;
  for (int free = 0; free < m; ++free) {
    if (is_pivot[free]) continue;
    Poly3 p = Poly3::monomial(monos[free], 1.0);
    for (std::size_t pr = 0; pr < pivot_col.size(); ++pr) {
      double coef = -A[pr * m + free];
      if (coef != 0.0) p.add(Poly3::monomial(monos[pivot_col[pr]], coef));
    }
    basis.push_back(HarmonicPoly{k, p});
  }

  // Quadrature Gram-Schmidt (twice, for orthogonality to round-off) on a grid
  // exact for products of degree-k polynomials.
  QuadratureGrid g = build_grid(k + 2, 2 * k + 5);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        double ip = poly_inner(basis[i].p, basis[j].p, g);
        basis[i].p.add(basis[j].p, -ip);
      }
      double nn = poly_inner(basis[i].p, basis[i].p, g);
      basis[i].p = basis[i].p.scaled(1.0 / std::sqrt(nn));
    }
  }
  return basis;
}

}  // namespace

const std::vector<HarmonicPoly>& harmonic_basis(int k) {
  if (k < 0) throw DomainError("harmonic basis needs degree >= 0");
  static std::map<int, std::vector<HarmonicPoly>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(k);
  if (it == cache.end())
    it = cache.emplace(k, build_harmonic_basis(k)).first;
  return it->second;
}

namespace {

TangentField field_from_poly(PolyVec3 pv, FieldKind kind, int source_k) {
  TangentField f;
  f.kind = kind;
  f.source_k = source_k;
  f.poly = std::move(pv);
  f.value = [ext = *f.poly](const SpherePoint& x) { return ext.eval(x); };
  return f;
}

// Ambient extension of the tangential gradient: ∂P - (x·∂P)x componentwise.
PolyVec3 tangential_gradient_poly(const Poly3& p) {
  std::array<Poly3, 3> dp{p.derivative(0), p.derivative(1), p.derivative(2)};
  Poly3 radial;  // x·∂P
  for (int i = 0; i < 3; ++i) {
    Poly3::Key ei{0, 0, 0};
    ei[i] = 1;
    radial.add(dp[i].mono_mul(ei));
  }
  PolyVec3 out;
  for (int i = 0; i < 3; ++i) {
    Poly3::Key ei{0, 0, 0};
    ei[i] = 1;
    out.comp[i] = dp[i];
    out.comp[i].add(radial.mono_mul(ei), -1.0);
  }
  return out;
}

PolyVec3 tangential_projection_poly(const PolyVec3& v) {
  Poly3 radial;  // x·v
  for (int i = 0; i < 3; ++i) {
    Poly3::Key ei{0, 0, 0};
    ei[i] = 1;
    radial.add(v.comp[i].mono_mul(ei));
  }
  PolyVec3 out;
  for (int i = 0; i < 3; ++i) {
    Poly3::Key ei{0, 0, 0};
    ei[i] = 1;
    out.comp[i] = v.comp[i];
    out.comp[i].add(radial.mono_mul(ei), -1.0);
  }
  return out;
}

}  // namespace

TangentField grad_field(const Poly3& potential) {
  return field_from_poly(tangential_gradient_poly(potential),
                         FieldKind::Gradient, potential.degree());
}

TangentField grad_field(const HarmonicPoly& p) {
  TangentField f = grad_field(p.p);
  f.source_k = p.k;
  return f;
}

TangentField star(const TangentField& xi) {
  FieldKind kind = xi.kind == FieldKind::Gradient ? FieldKind::StarGradient
                                                  : FieldKind::General;
  if (xi.poly) {
    // x × v via componentwise monomial shifts.
    const auto& v = xi.poly->comp;
    auto shift = [](const Poly3& p, int axis) {
      Poly3::Key e{0, 0, 0};
      e[axis] = 1;
      return p.mono_mul(e);
    };
    PolyVec3 pv;
    pv.comp[0] = shift(v[2], 1);
    pv.comp[0].add(shift(v[1], 2), -1.0);
    pv.comp[1] = shift(v[0], 2);
    pv.comp[1].add(shift(v[2], 0), -1.0);
    pv.comp[2] = shift(v[1], 0);
    pv.comp[2].add(shift(v[0], 1), -1.0);
    return field_from_poly(std::move(pv), kind, xi.source_k);
  }
  TangentField out;
  out.kind = kind;
  out.source_k = xi.source_k;
  out.value = [val = xi.value](const SpherePoint& x) { return cross(x, val(x)); };
  return out;
}

TangentField lincomb(double a, const TangentField& x, double b,
                     const TangentField& y) {
  TangentField out;
  if (x.poly && y.poly) {
    PolyVec3 pv;
    for (int i = 0; i < 3; ++i) {
      pv.comp[i] = x.poly->comp[i].scaled(a);
      pv.comp[i].add(y.poly->comp[i], b);
    }
    return field_from_poly(std::move(pv), FieldKind::General, -1);
  }
  auto xv = x.value, yv = y.value;
  out.value = [a, b, xv, yv](const SpherePoint& p) {
    return a * xv(p) + b * yv(p);
  };
  return out;
}

TangentField tangential_laplacian(const TangentField& xi,
                                  const QuadratureGrid& grid) {
  (void)grid;
  if (xi.poly) {
    PolyVec3 lap;
    for (int i = 0; i < 3; ++i) lap.comp[i] = sphere_laplacian_poly(xi.poly->comp[i]);
    return field_from_poly(tangential_projection_poly(lap), FieldKind::General,
                           xi.source_k);
  }
  TangentField out;
  out.value = [val = xi.value](const SpherePoint& p) -> Vec3 {
    Vec3 lap = field_sphere_laplacian(val, p);
    return lap - dot(lap, p) * p;
  };
  return out;
}

namespace {

// div_{S²}ξ at p. Polynomial path: ∂·Ξ - Σᵢⱼ xᵢxⱼ ∂ⱼΞᵢ. FD path: the frame
// identity div = c² (∂ₓξ̃·∂ₓP + ∂_yξ̃·∂_yP) in the preferred chart.
Poly3 divergence_poly(const PolyVec3& v) {
  Poly3 out;
  for (int i = 0; i < 3; ++i) out.add(v.comp[i].derivative(i));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Poly3::Key eij{0, 0, 0};
      eij[i] += 1;
      eij[j] += 1;
      out.add(v.comp[i].derivative(j).mono_mul(eij), -1.0);
    }
  return out;
}

double divergence_fd(const std::function<Vec3(const SpherePoint&)>& val,
                     const SpherePoint& p) {
  Chart ch = preferred_chart(p);
  cplx xi0 = stereo_project(p, ch).xi;
  Jet2 j = vec3_chart_jet(val, p, ch);
  Jet2 pj = unproject_jet(ch, xi0);
  double c = 0.5 * (1.0 + std::norm(xi0));
  return c * c * (dot(j.ux, pj.ux) + dot(j.uy, pj.uy));
}

}  // namespace

double normal_part_residual(const TangentField& xi, const QuadratureGrid& grid) {
  std::size_t n = grid.nodes.size();
  std::vector<double> res(n);
  if (xi.poly) {
    Poly3 dv = divergence_poly(*xi.poly);
    PolyVec3 lap;
    for (int i = 0; i < 3; ++i)
      lap.comp[i] = sphere_laplacian_poly(xi.poly->comp[i]);
    par::detail::run_fill(n, true, [&](std::size_t i) {
      const SpherePoint& p = grid.nodes[i].p;
      res[i] = std::abs(dot(lap.eval(p), p) + 2.0 * dv.eval(p));
    });
  } else {
    const auto& val = xi.value;
    par::detail::run_fill(n, true, [&](std::size_t i) {
      const SpherePoint& p = grid.nodes[i].p;
      Vec3 lap = field_sphere_laplacian(val, p);
      res[i] = std::abs(dot(lap, p) + 2.0 * divergence_fd(val, p));
    });
  }
  double m = 0.0;
  for (double v : res) m = std::max(m, v);
  return m;
}

ScalarField divergence(const TangentField& xi, const QuadratureGrid& grid) {
  double resid = normal_part_residual(xi, grid);
  if (resid > 1e-6)
    throw DomainError("normal-part identity residual " + std::to_string(resid) +
                      " exceeds 1e-6; field is not tangential/smooth enough");
  if (xi.poly) {
    Poly3 dv = divergence_poly(*xi.poly);
    return [dv](const SpherePoint& p) { return dv.eval(p); };
  }
  auto val = xi.value;
  return [val](const SpherePoint& p) { return divergence_fd(val, p); };
}

HodgeParts helmholtz_hodge(const TangentField& xi, const QuadratureGrid& grid,
                           int kmax) {
  ScalarField div_xi = divergence(xi, grid);
  // ∇∧ξ = -div(⋆ξ).
  ScalarField div_star = divergence(star(xi), grid);

  // Sample both sources once over the grid.
  std::size_t n = grid.nodes.size();
  std::vector<double> dv(n), cv(n);
  par::detail::run_fill(n, true, [&](std::size_t i) {
    dv[i] = div_xi(grid.nodes[i].p);
    cv[i] = -div_star(grid.nodes[i].p);
  });

  auto solve_poisson = [&](const std::vector<double>& src) {
    Poly3 pot;
    for (int k = 1; k <= kmax; ++k) {
      double eig = -static_cast<double>(k) * (k + 1);
      for (const auto& hp : harmonic_basis(k)) {
        double coef = par::sum_map(n, [&](std::size_t i) {
          return grid.nodes[i].w * src[i] * hp.p.eval(grid.nodes[i].p);
        });
        pot.add(hp.p, coef / eig);
      }
    }
    return pot;
  };

  HodgeParts out;
  out.f_potential = solve_poisson(dv);
  out.g_potential = solve_poisson(cv);
  out.grad_part = grad_field(out.f_potential);
  out.star_part = star(grad_field(out.g_potential));

  std::vector<double> res(n);
  par::detail::run_fill(n, true, [&](std::size_t i) {
    const SpherePoint& p = grid.nodes[i].p;
    Vec3 diff = xi.value(p) - out.grad_part.value(p) - out.star_part.value(p);
    res[i] = norm(diff);
  });
  for (double v : res)
    out.reconstruction_residual = std::max(out.reconstruction_residual, v);
  if (out.reconstruction_residual > 1e-4)
    throw TruncationError(
        "Hodge reconstruction residual " +
        std::to_string(out.reconstruction_residual) +
        " exceeds 1e-4: field has content above degree " + std::to_string(kmax));
  return out;
}

TangentField j_epsilon(const TangentField& xi, double epsilon,
                       const QuadratureGrid& grid) {
  TangentField eta = lincomb(1.0, tangential_laplacian(xi, grid), 2.0, xi);
  return lincomb(1.0, eta, -epsilon,
                 lincomb(1.0, tangential_laplacian(eta, grid), -2.0, eta));
}

std::pair<TangentField, TangentField> kernel_projection(
    const TangentField& xi, const QuadratureGrid& grid) {
  std::vector<TangentField> kernel;
  for (int i = 0; i < 3; ++i) {
    Poly3::Key ei{0, 0, 0};
    ei[i] = 1;
    kernel.push_back(grad_field(Poly3::monomial(ei, 1.0)));
  }
  for (int i = 0; i < 3; ++i) kernel.push_back(star(kernel[i]));

  // 6×6 Gram system (orthogonal up to quadrature error; solved anyway).
  constexpr int m = 6;
  std::vector<double> G(m * m), rhs(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j)
      G[i * m + j] = field_inner(kernel[i], kernel[j], grid);
    rhs[i] = field_inner(kernel[i], xi, grid);
  }
  // Gaussian elimination, partial pivoting.
  std::vector<double> c(m, 0.0);
  for (int k = 0; k < m; ++k) {
    int piv = k;
    for (int i = k + 1; i < m; ++i)
      if (std::abs(G[i * m + k]) > std::abs(G[piv * m + k])) piv = i;
    for (int j = 0; j < m; ++j) std::swap(G[k * m + j], G[piv * m + j]);
    std::swap(rhs[k], rhs[piv]);
    for (int i = k + 1; i < m; ++i) {
      double f = G[i * m + k] / G[k * m + k];
      for (int j = k; j < m; ++j) G[i * m + j] -= f * G[k * m + j];
      rhs[i] -= f * rhs[k];
    }
  }
  for (int i = m - 1; i >= 0; --i) {
    double s = rhs[i];
    for (int j = i + 1; j < m; ++j) s -= G[i * m + j] * c[j];
    c[i] = s / G[i * m + i];
  }

  PolyVec3 ker_poly;
  for (int i = 0; i < m; ++i)
    for (int comp = 0; comp < 3; ++comp)
      ker_poly.comp[comp].add(kernel[i].poly->comp[comp], c[i]);
  TangentField kernel_part =
      field_from_poly(std::move(ker_poly), FieldKind::General, 1);
  TangentField complement = lincomb(1.0, xi, -1.0, kernel_part);
  return {kernel_part, complement};
}

double field_sup_distance(const TangentField& a, const TangentField& b,
                          const QuadratureGrid& grid) {
  std::size_t n = grid.nodes.size();
  std::vector<double> d(n);
  par::detail::run_fill(n, true, [&](std::size_t i) {
    d[i] = norm(a.value(grid.nodes[i].p) - b.value(grid.nodes[i].p));
  });
  double m = 0.0;
  for (double v : d) m = std::max(m, v);
  return m;
}

double field_sup_norm(const TangentField& a, const QuadratureGrid& grid) {
  std::size_t n = grid.nodes.size();
  std::vector<double> d(n);
  par::detail::run_fill(n, true,
                        [&](std::size_t i) { d[i] = norm(a.value(grid.nodes[i].p)); });
  double m = 0.0;
  for (double v : d) m = std::max(m, v);
  return m;
}

double field_inner(const TangentField& a, const TangentField& b,
                   const QuadratureGrid& grid) {
  return par::sum_map(grid.nodes.size(), [&](std::size_t i) {
    const auto& nd = grid.nodes[i];
    return nd.w * dot(a.value(nd.p), b.value(nd.p));
  });
}

}  // namespace epsharm
