#pragma once

// SL(2,C) / PSL(2,C): fractional-linear maps of the extended plane, their
// singular value decomposition M = U diag(λ^½, λ^-½) V*, the rotation
// criterion λ = 1, the SU(2) -> SO(3) double cover, and the conformal weight
// χ_λ with its closed-form derivatives.

#include <array>
#include <complex>

#include "epsharm/common.hpp"
#include "epsharm/sphere.hpp"

namespace epsharm {

// M = (a b; c d) acting as m(xi) = (a xi + b)/(c xi + d), det = 1 after
// normalize(). M and -M act identically; canonical_sign() fixes the
// representative deterministically.
struct MobiusMatrix {
  cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

  cplx det() const { return a * d - b * c; }
  MobiusMatrix inverse() const { return {d, -b, -c, a}; }
};

// Scale to det 1, then flip sign so the first entry of (a,b,c,d) with
// modulus above 1e-14 has nonnegative real part (nonnegative imaginary part
// when the real part vanishes). Makes PSL(2,C) equality testing exact.
MobiusMatrix normalize(const MobiusMatrix& m);

MobiusMatrix compose(const MobiusMatrix& m, const MobiusMatrix& n);

inline MobiusMatrix dilation(double lambda) {
  const double s = std::sqrt(lambda);
  return {cplx(s), cplx(0.0), cplx(0.0), cplx(1.0 / s)};
}

// Fractional-linear action on the chart coordinate. Throws InfinityResult at
// the pole c·xi + d = 0 (the caller switches chart or uses mobius_act).
cplx apply(const MobiusMatrix& m, cplx xi);

// Action on sphere points through homogeneous coordinates [σ:τ], σ/τ the
// North chart coordinate. Never overflows: the lift is chosen per hemisphere.
SpherePoint mobius_act(const MobiusMatrix& m, const SpherePoint& p);

struct SingularDecomp {
  MobiusMatrix U, V;  // SU(2) factors
  double lambda = 1.0;  // larger eigenvalue of MM*, always >= 1
};

SingularDecomp svd(const MobiusMatrix& m);

inline bool is_rotation(const MobiusMatrix& m, double tol) {
  return svd(m).lambda <= 1.0 + tol;
}

using Rotation3 = std::array<Vec3, 3>;  // rows of the 3x3 matrix

// Image of U under the double cover: R x = H⁻¹(U H(x) U*) with H the
// traceless-Hermitian model of R³. U and -U give the same R.
Rotation3 su2_to_so3(const MobiusMatrix& u);

// The weight appearing after pulling the ε-energy back through a dilation:
//   χ_λ(xi) = (1 + λ²|xi|²)² / (λ²(1 + |xi|²)²),  λ⁻² <= χ_λ <= λ².
double chi(double lambda, cplx xi);
double chi_from_abs2(double lambda, double abs2);

// |∇_{S²} χ_λ| = 2|xi|(1+λ²|xi|²)(λ²-1) / (λ²(1+|xi|²)²).
double chi_gradient_norm(double lambda, cplx xi);

// Δ_{S²} χ_λ = 2(λ²-1)(1+2λ²|xi|²)/(λ²(1+|xi|²))
//            - 6|xi|²(1+λ²|xi|²)(λ²-1)/(λ²(1+|xi|²)²).
double chi_laplacian(double lambda, cplx xi);

// The Möbius map itself as a map S² -> S², with analytic chart jets.
MapField mobius_map(const MobiusMatrix& m);

// u ∘ m_M (evaluate u at the transformed point). Finite-difference jets.
MapField compose_mobius(const MapField& u, const MobiusMatrix& m);

// Chart jet of xi -> unproject(mu(xi)) for a holomorphic mu with derivative
// alpha and second derivative beta at xi. Shared by mobius_map and tests.
Jet2 holomorphic_chart_jet(cplx w, cplx alpha, cplx beta);

}  // namespace epsharm
