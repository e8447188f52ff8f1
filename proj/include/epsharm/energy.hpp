#pragma once

// Energy functionals for maps S² -> S²: the Dirichlet energy, the
// ε-regularized energy E_ε = ½∫(|∇u|² + ε|Δu|²), its dilation-weighted
// variant E_{ε,λ} = ½∫(|∇u|² + ε χ_λ |Δu|²), the topological degree, the
// closed-form dilation energy, pullback-law verification, and the selection
// of the Möbius transformation closest to a near-identity map.

#include <cstdint>

#include "epsharm/mobius.hpp"
#include "epsharm/sphere.hpp"

namespace epsharm {

struct EnergyReport {
  double dirichlet = 0.0;   // ½∫|∇u|²
  double biharmonic = 0.0;  // ½∫χ_λ|Δu|²  (no ε factor)
  double total = 0.0;       // dirichlet + epsilon·biharmonic
  double epsilon = 0.0;
  double lambda = 1.0;
  double degree = 0.0;      // quadrature value, pre-rounding
  long long degree_int = 0;
};

double dirichlet_energy(const MapField& u, const QuadratureGrid& grid,
                        bool parallel = true);

EnergyReport eps_energy(const MapField& u, double epsilon,
                        const QuadratureGrid& grid, bool parallel = true);

EnergyReport eps_lambda_energy(const MapField& v, double epsilon, double lambda,
                               const QuadratureGrid& grid, bool parallel = true);

// deg(u) = (1/4π)∫ J(u), J the signed Jacobian against the outward
// orientation. Throws NonIntegerDegree when the quadrature value is farther
// than 1e-3 from an integer.
std::pair<double, long long> degree(const MapField& u, const QuadratureGrid& grid,
                                    bool parallel = true);

// E_ε(m_λ) = 4π(1 + (2ε/3)(λ² + 1 + λ⁻²)); symmetric under λ <-> 1/λ.
double dilation_energy_closed_form(double lambda, double epsilon);

// d/d(log λ) of the closed form: (16πε/3)(λ² - λ⁻²).
double dilation_energy_dloglambda(double lambda, double epsilon);

// Pointwise check of the dilation pullback laws for the diagonal
// representative D = diag(λ^½, λ^-½) of M:
//   |∇(u∘D)|²(xi) = λ²(1+|xi|²)²/(1+λ²|xi|²)² |∇u|²(D xi)
//   |Δ(u∘D)|²(xi) = λ⁴(1+|xi|²)⁴/(1+λ²|xi|²)⁴ |Δu|²(D xi)
// Returns the max relative deviation of each law over the grid.
struct PullbackErrors {
  double gradient_law = 0.0;
  double laplacian_law = 0.0;
};
PullbackErrors verify_pullback(const MapField& u, const MobiusMatrix& m,
                               const QuadratureGrid& grid);

// Degree-one energy gap: E_ε(u) >= 4π(1+2ε), up to 1e-6 relative quadrature
// slack. Throws WrongDegree unless degree(u) = 1.
bool degree_one_gap_check(const MapField& u, double epsilon,
                          const QuadratureGrid& grid);

// Minimize ||∇(u∘m_M - Id)||_{L²} over M in PSL(2,C), parameterized by the
// exponential chart on the 6-dimensional real Lie algebra around an evolving
// base point, searched by Nelder-Mead with multi-start plus coordinate
// parabolic polish. residual is the attained L² norm.
struct OptimalMobiusOptions {
  int max_rounds = 10;
  int simplex_max_iter = 4000;
  double init_step = 0.4;
  double stationarity_tol = 1e-6;
};
struct OptimalMobiusResult {
  MobiusMatrix m;
  double residual = 0.0;
  double stationarity = 0.0;  // max |directional derivative| over the 6 axes
  int objective_evals = 0;
};
// Squared misfit ||∇(u∘m_M) - ∇id||² computed from finite differences of the
// difference field, so it vanishes exactly when u∘m_M is the identity. This
// is the objective the reparametrization search minimizes.
double mobius_misfit(const MapField& u, const MobiusMatrix& m,
                     const QuadratureGrid& grid);

OptimalMobiusResult optimal_mobius(const MapField& u, const QuadratureGrid& grid,
                                   const OptimalMobiusOptions& opts = {});

// exp of the traceless 2x2 matrix parameterized by q: diag entries
// ±(q0 + i q3), off-diagonal q1 + i q4 and q2 + i q5. Exposed for tests.
MobiusMatrix sl2_exp(const std::array<double, 6>& q);

}  // namespace epsharm
