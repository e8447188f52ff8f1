#pragma once

// Rotationally symmetric reduction. A profile f:[0,π] -> R with f(0)=0,
// f(π)=nπ lifts to the map u_f(r,θ) = (sin f cos θ, sin f sin θ, cos f);
// the ε-energy restricted to this class becomes a 1D integral
//   I(f) = π ∫₀^π (g1 + ε g2) sin r dr,
//   g1 = (f')² + sin²f/sin²r,
//   g2 = |Δu_f|² expanded in nine closed-form terms.
// Profiles are represented as f(r) = n r + Σ c_j sin(j r), which pins both
// endpoints and keeps every integrand term finite at interior Gauss nodes.

#include <functional>
#include <string>
#include <vector>

#include "epsharm/sphere.hpp"

namespace epsharm {

struct Profile {
  int n = 1;
  std::vector<double> coeffs;  // sine-series coefficients c_1..c_J
};

struct ProfileJet {
  double f = 0.0, fp = 0.0, fpp = 0.0;
};

using ProfileFn = std::function<ProfileJet(double)>;

ProfileJet eval_profile(const Profile& f, double r);

struct ReducedEnergyReport {
  double gradient_term = 0.0;    // ½∫|∇u_f|²
  double biharmonic_term = 0.0;  // ½∫|Δu_f|²
  double total = 0.0;
  double epsilon = 0.0;
  double el_residual = 0.0;  // sup-norm of the coefficient gradient of I
};

// 1D Gauss-Legendre rule in t = cos r: ∫₀^π g(r) sin r dr = Σ w_i g(r_i).
struct Grid1D {
  std::vector<double> r;
  std::vector<double> w;
};
Grid1D build_profile_grid(int n_nodes);

// u_f as a MapField with analytic chart jets assembled from (f, f', f'')
// through the polar coordinates of each stereographic chart.
MapField lift_profile(const Profile& f);
MapField lift_profile_fn(const ProfileFn& f);

double profile_gradient_energy(const Profile& f, const Grid1D& grid,
                               bool parallel = true);
double profile_gradient_energy(const ProfileFn& f, const Grid1D& grid,
                               bool parallel = true);

// Full reduced energy. The Profile overload also evaluates el_residual over
// the profile's own modes; the callable overload reports el_residual = NaN.
ReducedEnergyReport profile_full_energy(const Profile& f, double epsilon,
                                        const Grid1D& grid, bool parallel = true);
ReducedEnergyReport profile_full_energy(const ProfileFn& f, double epsilon,
                                        const Grid1D& grid, bool parallel = true);

// Sup-norm of the analytic gradient of the discretized I with respect to the
// profile's coefficients.
double el_residual(const Profile& f, double epsilon, const Grid1D& grid);

// dI/dc_j for j = 1..modes (analytic, same discretization as the energy).
std::vector<double> coeff_gradient(int n, const std::vector<double>& coeffs,
                                   double epsilon, const Grid1D& grid,
                                   bool parallel = true);

// The degree-zero trial family f_Λ(r) = 2 arctan(Λ tan r), continued by +2π
// past r = π/2; winds 0 -> 2π as r runs over [0, π].
struct TrialProfile {
  double lambda = 2.0;
  ProfileJet operator()(double r) const;
};
TrialProfile trial_profile(double lambda);

// Closed-form upper bounds for I(f_Λ):
//   three-term  8πΛ²/(Λ²-1) + 128πε/(Λ²-1) + 256πεΛ⁶/(Λ²-1)²
//   simplified  8π(1 + 2/Λ²) + 128πε + 1024πεΛ²
//   final       8π + 1168π√ε  (simplified bound at Λ = ε^(-1/4))
struct TrialEnergyBounds {
  double upper = 0.0;  // the three-term bound
  std::array<double, 3> components{};
  double simplified = 0.0;
  double final_bound = 0.0;
};
TrialEnergyBounds trial_energy_bounds(double lambda, double epsilon);

// Degree-zero lower bounds: 2π∫|f' sin f| ≥ 8π and I(f) ≥ 8π + 32π²ε, both
// up to 1e-6 slack. The winding integral is evaluated as the exact total
// variation of cos f (the integrand has kinks where quadrature loses orders).
struct LowerBoundCheck {
  bool ok = false;
  double winding_integral = 0.0;  // 2π∫|f' sin f|
  double energy = 0.0;
  std::string detail;
  explicit operator bool() const { return ok; }
};
LowerBoundCheck lower_bound_check(const Profile& f, double epsilon,
                                  const Grid1D& grid);

struct MinimizeOptions {
  double tol = 1e-8;  // convergence threshold on el_residual
  int max_iter = 600;
  int polish_iter = 40;
};
struct MinimizeResult {
  Profile profile;
  ReducedEnergyReport report;
  std::vector<double> trace;  // energies of the accepted iterates
  int iterations = 0;
};

// Quasi-Newton (BFGS with backtracking) over the sine coefficients, finished
// by damped Newton on the analytic gradient with finite-difference Hessian.
// n=2 runs a two-start strategy: the trial profile at Λ = ε^(-1/4) projected
// onto the sine basis, and the naive f = 2r; the lower minimum wins.
MinimizeResult minimize_profile(int n, double epsilon, int modes,
                                const Grid1D& grid,
                                const MinimizeOptions& opts = {});

}  // namespace epsharm
