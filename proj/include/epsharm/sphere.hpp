#pragma once

// Stereographic charts on S², the conformal metric factor, quadrature grids,
// and chart-aware derivatives of maps S² -> S².
//
// Conventions (used everywhere downstream):
//   North chart:  xi = (x + iy)/(1 - z),  xi = 0 <-> (0,0,-1).
//   South chart:  xi = (x - iy)/(1 + z),  xi = 0 <-> (0,0,+1).
//   Transition xi_S = 1/xi_N is holomorphic, so both charts induce the same
//   orientation on S². The metric is g_ij = 4/(1+|xi|²)² δ_ij in either chart.
// With these formulas both chart frames (∂_x, ∂_y) are negatively oriented
// with respect to the outward normal; the Jacobian in degree() carries the
// compensating sign.

#include <complex>
#include <functional>
#include <vector>

#include "epsharm/common.hpp"

namespace epsharm {

enum class Chart { North, South };

struct StereoCoord {
  cplx xi;
  Chart chart = Chart::North;
};

using SpherePoint = Vec3;

// Chart with |xi| <= 1 at x: project away from the nearer pole.
inline Chart preferred_chart(const SpherePoint& x) {
  return x[2] <= 0.0 ? Chart::North : Chart::South;
}

StereoCoord stereo_project(const SpherePoint& x, Chart chart);
SpherePoint stereo_unproject(const StereoCoord& sc);

// Metric factor 4/(1+|xi|²)², identical in both charts.
inline double conformal_factor(const StereoCoord& sc) {
  const double s = std::norm(sc.xi);
  return 4.0 / ((1.0 + s) * (1.0 + s));
}

// |xi_N|² at x without forming the chart coordinate; stable at both poles'
// complements. Used by the chi weight.
inline double north_abs2(const SpherePoint& x) {
  return (1.0 + x[2]) / (1.0 - x[2]);
}

struct QuadratureGrid {
  struct Node {
    SpherePoint p;
    double w;  // area weight, sums to 4π
  };
  std::vector<Node> nodes;
  int n_polar = 0;
  int n_azimuthal = 0;
};

// Gauss-Legendre in t = cos r tensored with uniform azimuthal nodes. Interior
// Gauss nodes never touch sin r = 0, so integrands with 1/sin²r poles are
// evaluated only where they are finite.
QuadratureGrid build_grid(int n_polar, int n_azimuthal);

// Gauss-Legendre nodes/weights on (-1,1), ordered ascending.
void gauss_legendre(int n, std::vector<double>& t, std::vector<double>& w);

double integrate(const std::function<double(const SpherePoint&)>& g,
                 const QuadratureGrid& grid, bool parallel = true);

// ---------------------------------------------------------------------------
// Maps S² -> S² and their chart derivatives.

enum class DerivMode { Analytic, FiniteDifference };

// Second-order jet of the chart representation xi -> u(unproject(xi)) ∈ R³.
struct Jet2 {
  Vec3 u, ux, uy, uxx, uxy, uyy;
};

struct Jet1 {
  Vec3 u, ux, uy;
};

struct MapField {
  std::function<Vec3(const SpherePoint&)> value;
  // Analytic chart jets, when the map has them (identity, Möbius maps,
  // rotated images, lifted profiles). Null for FD-only maps.
  std::function<Jet2(Chart, cplx)> chart_jet;
  DerivMode mode = DerivMode::FiniteDifference;
};

// Value with the unit-norm policy: renormalize drift beyond 1e-10, reject
// beyond 1e-6 (that is a broken map, not rounding).
Vec3 map_value(const MapField& u, const SpherePoint& x);

// Chart jet at x in the given chart (FD stencils or the analytic callback).
Jet2 map_jet_in_chart(const MapField& u, const SpherePoint& x, Chart chart);
Jet1 map_jet1_in_chart(const MapField& u, const SpherePoint& x, Chart chart);

inline Jet2 map_jet(const MapField& u, const SpherePoint& x) {
  return map_jet_in_chart(u, x, preferred_chart(x));
}
inline Jet1 map_jet1(const MapField& u, const SpherePoint& x) {
  return map_jet1_in_chart(u, x, preferred_chart(x));
}

// S²-gradient in the chart-induced orthonormal frame e_i = ((1+|xi|²)/2) ∂_i.
struct SphereGrad {
  Vec3 e1u, e2u;
  double norm_sq() const { return norm2(e1u) + norm2(e2u); }
};

SphereGrad sphere_gradient(const MapField& u, const SpherePoint& x);
Vec3 sphere_laplacian(const MapField& u, const SpherePoint& x);

// FD step for 4th-order stencils: machine-epsilon^(1/5) scaled by the
// coordinate magnitude.
inline double fd_step(const cplx& xi) {
  const double scale = std::abs(xi);
  return 7.40095979741405e-4 * (scale > 1.0 ? scale : 1.0);
}

// Generic chart-FD jets for scalar and vector fields on S² (shared with the
// spectral module, which differentiates R³-valued tangent fields the same
// way maps are differentiated).
struct ScalarJet2 {
  double u, ux, uy, uxx, uxy, uyy;
};
ScalarJet2 scalar_chart_jet(const std::function<double(const SpherePoint&)>& g,
                            const SpherePoint& x, Chart chart);
Jet2 vec3_chart_jet(const std::function<Vec3(const SpherePoint&)>& g,
                    const SpherePoint& x, Chart chart);

// Componentwise sphere Laplacian of an R³-valued field via its chart jet.
Vec3 field_sphere_laplacian(const std::function<Vec3(const SpherePoint&)>& g,
                            const SpherePoint& x);

// ---------------------------------------------------------------------------
// Stock maps.

MapField identity_map();
MapField constant_map(const SpherePoint& p);
// Postcompose with a linear isometry of R³ (rotation or -I); jets transform
// linearly, so analytic mode is preserved.
MapField linear_image(const std::array<Vec3, 3>& rows, const MapField& u);

// Jet of the unprojection map itself (the chart parametrization of S²).
Jet2 unproject_jet(Chart chart, cplx xi);

}  // namespace epsharm
