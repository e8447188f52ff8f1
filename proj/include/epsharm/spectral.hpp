#pragma once

// Spectral toolkit on S²: harmonic homogeneous polynomials (eigenfunctions of
// the sphere Laplacian, eigenvalue -k(k+1)), the eigenfields ∇p_k and ⋆∇p_k
// of the tangential Laplacian, the Helmholtz-Hodge decomposition ξ = ∇f + ⋆∇g,
// the operator J_ε = (1 - ε((Δ·)^T - 2))((Δ·)^T + 2) with its 6-dimensional
// kernel, and the projection onto that kernel.
//
// Fields built from polynomials carry their ambient polynomial extension, so
// Laplacians and divergences on them are evaluated symbolically (exact on the
// sphere); fields without one fall back to chart finite differences.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "epsharm/sphere.hpp"

namespace epsharm {

// Sparse real polynomial in the ambient coordinates (x1, x2, x3).
struct Poly3 {
  using Key = std::array<int, 3>;  // exponents
  std::map<Key, double> terms;

  static Poly3 monomial(const Key& k, double c = 1.0);

  double eval(const Vec3& x) const;
  Poly3 derivative(int axis) const;
  Poly3 ambient_laplacian() const;
  Poly3 mono_mul(const Key& k, double c = 1.0) const;
  void add(const Poly3& other, double scale = 1.0);
  Poly3 scaled(double s) const;
  int degree() const;
  bool is_zero(double tol = 0.0) const;
};

// Restriction identity used throughout: for ambient F on the unit sphere,
//   Δ_{S²}(F|_{S²}) = ΔF - Σᵢⱼ xᵢxⱼ ∂ᵢ∂ⱼF - 2 x·∂F,
// a polynomial again when F is one.
Poly3 sphere_laplacian_poly(const Poly3& f);

struct HarmonicPoly {
  int k = 0;
  Poly3 p;
};

// The 2k+1 harmonic homogeneous polynomials of degree k, L²(S²)-orthonormal.
// Built once per degree (harmonicity solved symbolically, then quadrature
// Gram-Schmidt) and cached.
const std::vector<HarmonicPoly>& harmonic_basis(int k);

enum class FieldKind { Gradient, StarGradient, General };

struct PolyVec3 {
  std::array<Poly3, 3> comp;
  Vec3 eval(const Vec3& x) const {
    return {comp[0].eval(x), comp[1].eval(x), comp[2].eval(x)};
  }
};

struct TangentField {
  std::function<Vec3(const SpherePoint&)> value;
  FieldKind kind = FieldKind::General;
  int source_k = -1;
  std::optional<PolyVec3> poly;  // ambient polynomial extension, if any
};

// ∇f(x) = ∂F(x) - (x·∂F(x))x, the tangential projection of the ambient
// gradient.
TangentField grad_field(const HarmonicPoly& p);
TangentField grad_field(const Poly3& potential);

// ⋆ξ(x) = x × ξ(x).
TangentField star(const TangentField& xi);

TangentField lincomb(double a, const TangentField& x, double b,
                     const TangentField& y);

// (Δξ)^T: componentwise sphere Laplacian followed by tangential projection.
TangentField tangential_laplacian(const TangentField& xi,
                                  const QuadratureGrid& grid);

using ScalarField = std::function<double(const SpherePoint&)>;

// Tangential divergence. Also validates the normal-part identity
// Δξ·x = -2 div ξ on the grid nodes (throws DomainError past 1e-6).
ScalarField divergence(const TangentField& xi, const QuadratureGrid& grid);

// max over grid nodes of |Δξ·x + 2 div ξ|.
double normal_part_residual(const TangentField& xi, const QuadratureGrid& grid);

struct HodgeParts {
  Poly3 f_potential;  // zero-mean
  Poly3 g_potential;  // zero-mean
  TangentField grad_part;
  TangentField star_part;
  double reconstruction_residual = 0.0;  // sup over grid nodes
};

// Solves Δf = ∇·ξ and Δg = ∇∧ξ spectrally (coefficients against
// harmonic_basis divided by -k(k+1)) up to degree kmax. Throws
// TruncationError when the reconstruction residual exceeds 1e-4.
HodgeParts helmholtz_hodge(const TangentField& xi, const QuadratureGrid& grid,
                           int kmax = 12);

// J_ε ξ = (1 - ε((Δ·)^T - 2))((Δ·)^T + 2) ξ.
TangentField j_epsilon(const TangentField& xi, double epsilon,
                       const QuadratureGrid& grid);

// L²-orthogonal split against span{∇x₁, ∇x₂, ∇x₃, ⋆∇x₁, ⋆∇x₂, ⋆∇x₃}.
std::pair<TangentField, TangentField> kernel_projection(
    const TangentField& xi, const QuadratureGrid& grid);

// sup over grid nodes of |a(x) - b(x)|; convenience for residual reporting.
double field_sup_distance(const TangentField& a, const TangentField& b,
                          const QuadratureGrid& grid);
double field_sup_norm(const TangentField& a, const QuadratureGrid& grid);

// ∫ a·b dA by quadrature.
double field_inner(const TangentField& a, const TangentField& b,
                   const QuadratureGrid& grid);

}  // namespace epsharm
