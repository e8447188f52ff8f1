#include "epsharm/sphere.hpp"

#include <cmath>

#include "epsharm/parallel.hpp"

namespace epsharm {

StereoCoord stereo_project(const SpherePoint& x, Chart chart) {
  if (chart == Chart::North) {
    if (x[2] >= 1.0 - 1e-14)
      throw PoleError("stereo_project: point at the north pole; use the South chart");
    return {cplx(x[0], x[1]) / (1.0 - x[2]), chart};
  }
  if (x[2] <= -1.0 + 1e-14)
    throw PoleError("stereo_project: point at the south pole; use the North chart");
  return {cplx(x[0], -x[1]) / (1.0 + x[2]), chart};
}

SpherePoint stereo_unproject(const StereoCoord& sc) {
  const double u = sc.xi.real(), v = sc.xi.imag();
  const double d = 1.0 + u * u + v * v;
  if (sc.chart == Chart::North)
    return {2.0 * u / d, 2.0 * v / d, (u * u + v * v - 1.0) / d};
  return {2.0 * u / d, -2.0 * v / d, (1.0 - u * u - v * v) / d};
}

// Newton iteration on Legendre polynomials; standard and exact to rounding
// for the node counts used here (< 10^3).
void gauss_legendre(int n, std::vector<double>& t, std::vector<double>& w) {
  t.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess for the i-th root (descending order).
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    t[i] = -x;
    t[n - 1 - i] = x;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
}

QuadratureGrid build_grid(int n_polar, int n_azimuthal) {
  if (n_polar < 2 || n_azimuthal < 4)
    throw InvalidResolution("build_grid: need n_polar >= 2 and n_azimuthal >= 4");
  std::vector<double> t, wt;
  gauss_legendre(n_polar, t, wt);
  QuadratureGrid grid;
  grid.n_polar = n_polar;
  grid.n_azimuthal = n_azimuthal;
  grid.nodes.reserve(static_cast<std::size_t>(n_polar) * n_azimuthal);
  const double wphi = 2.0 * kPi / n_azimuthal;
  for (int i = 0; i < n_polar; ++i) {
    const double s = std::sqrt(1.0 - t[i] * t[i]);
    for (int j = 0; j < n_azimuthal; ++j) {
      const double phi = wphi * j;
      grid.nodes.push_back(
          {{s * std::cos(phi), s * std::sin(phi), t[i]}, wt[i] * wphi});
    }
  }
  return grid;
}

double integrate(const std::function<double(const SpherePoint&)>& g,
                 const QuadratureGrid& grid, bool parallel) {
  return par::sum_map(
      grid.nodes.size(),
      [&](std::size_t i) {
        const double v = g(grid.nodes[i].p);
        if (!std::isfinite(v))
          throw NonFiniteValue("integrate: non-finite integrand at node " +
                               std::to_string(i));
        return grid.nodes[i].w * v;
      },
      parallel);
}

Vec3 map_value(const MapField& u, const SpherePoint& x) {
  Vec3 v = u.value(x);
  const double n2 = norm2(v);
  if (!std::isfinite(n2)) throw NonFiniteValue("map_value: non-finite map value");
  const double dev = std::abs(std::sqrt(n2) - 1.0);
  if (dev > 1e-6)
    throw DomainError("map_value: |u(x)| deviates from 1 by " + std::to_string(dev));
  if (dev > 1e-10) return normalized(v);
  return v;
}

namespace {

// 4th-order central stencils: f' with offsets ±1,±2 and f'' with 0,±1,±2.
constexpr double kD1[4] = {1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};
constexpr int kO1[4] = {-2, -1, 1, 2};
constexpr double kD2[5] = {-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0,
                           -1.0 / 12.0};
constexpr int kO2[5] = {-2, -1, 0, 1, 2};

template <class Val, class Eval>
void fd_jet2(const Eval& eval, double x0, double y0, double h, Val& ux, Val& uy,
             Val& uxx, Val& uxy, Val& uyy) {
  ux = Val{};
  uy = Val{};
  uxx = Val{};
  uyy = Val{};
  for (int k = 0; k < 4; ++k) {
    const Val fx = eval(x0 + kO1[k] * h, y0);
    const Val fy = eval(x0, y0 + kO1[k] * h);
    for (std::size_t c = 0; c < std::size(ux); ++c) {
      ux[c] += kD1[k] * fx[c];
      uy[c] += kD1[k] * fy[c];
    }
  }
  for (int k = 0; k < 5; ++k) {
    const Val fx = eval(x0 + kO2[k] * h, y0);
    const Val fy = eval(x0, y0 + kO2[k] * h);
    for (std::size_t c = 0; c < std::size(ux); ++c) {
      uxx[c] += kD2[k] * fx[c];
      uyy[c] += kD2[k] * fy[c];
    }
  }
  // Tensor-product first-derivative stencil for the mixed derivative.
  uxy = Val{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const Val f = eval(x0 + kO1[a] * h, y0 + kO1[b] * h);
      for (std::size_t c = 0; c < std::size(ux); ++c)
        uxy[c] += kD1[a] * kD1[b] * f[c];
    }
  const double h2 = h * h;
  for (std::size_t c = 0; c < std::size(ux); ++c) {
    ux[c] /= h;
    uy[c] /= h;
    uxx[c] /= h2;
    uyy[c] /= h2;
    uxy[c] /= h2;
  }
}

}  // namespace

Jet2 map_jet_in_chart(const MapField& u, const SpherePoint& x, Chart chart) {
  const StereoCoord sc = stereo_project(x, chart);
  if (u.mode == DerivMode::Analytic) {
    if (!u.chart_jet)
      throw DerivativeUnavailable("map_jet: Analytic mode but no jet callback");
    return u.chart_jet(chart, sc.xi);
  }
  Jet2 jet;
  jet.u = map_value(u, x);
  const double h = fd_step(sc.xi);
  auto eval = [&](double a, double b) {
    return map_value(u, stereo_unproject({cplx(a, b), chart}));
  };
  fd_jet2<Vec3>(eval, sc.xi.real(), sc.xi.imag(), h, jet.ux, jet.uy, jet.uxx,
                jet.uxy, jet.uyy);
  return jet;
}

Jet1 map_jet1_in_chart(const MapField& u, const SpherePoint& x, Chart chart) {
  if (u.mode == DerivMode::Analytic) {
    const Jet2 j = map_jet_in_chart(u, x, chart);
    return {j.u, j.ux, j.uy};
  }
  const StereoCoord sc = stereo_project(x, chart);
  Jet1 jet;
  jet.u = map_value(u, x);
  const double h = fd_step(sc.xi);
  auto eval = [&](double a, double b) {
    return map_value(u, stereo_unproject({cplx(a, b), chart}));
  };
  jet.ux = Vec3{};
  jet.uy = Vec3{};
  for (int k = 0; k < 4; ++k) {
    const Vec3 fx = eval(sc.xi.real() + kO1[k] * h, sc.xi.imag());
    const Vec3 fy = eval(sc.xi.real(), sc.xi.imag() + kO1[k] * h);
    for (int c = 0; c < 3; ++c) {
      jet.ux[c] += kD1[k] * fx[c] / h;
      jet.uy[c] += kD1[k] * fy[c] / h;
    }
  }
  return jet;
}

SphereGrad sphere_gradient(const MapField& u, const SpherePoint& x) {
  const Chart chart = preferred_chart(x);
  const StereoCoord sc = stereo_project(x, chart);
  const double c = (1.0 + std::norm(sc.xi)) / 2.0;
  const Jet1 j = map_jet1_in_chart(u, x, chart);
  return {c * j.ux, c * j.uy};
}

Vec3 sphere_laplacian(const MapField& u, const SpherePoint& x) {
  const Chart chart = preferred_chart(x);
  const StereoCoord sc = stereo_project(x, chart);
  const double c = (1.0 + std::norm(sc.xi)) / 2.0;
  const Jet2 j = map_jet_in_chart(u, x, chart);
  return (c * c) * (j.uxx + j.uyy);
}

ScalarJet2 scalar_chart_jet(const std::function<double(const SpherePoint&)>& g,
                            const SpherePoint& x, Chart chart) {
  const StereoCoord sc = stereo_project(x, chart);
  const double h = fd_step(sc.xi);
  auto eval = [&](double a, double b) {
    return std::array<double, 1>{g(stereo_unproject({cplx(a, b), chart}))};
  };
  std::array<double, 1> ux, uy, uxx, uxy, uyy;
  fd_jet2<std::array<double, 1>>(eval, sc.xi.real(), sc.xi.imag(), h, ux, uy,
                                 uxx, uxy, uyy);
  return {g(x), ux[0], uy[0], uxx[0], uxy[0], uyy[0]};
}

Jet2 vec3_chart_jet(const std::function<Vec3(const SpherePoint&)>& g,
                    const SpherePoint& x, Chart chart) {
  const StereoCoord sc = stereo_project(x, chart);
  const double h = fd_step(sc.xi);
  auto eval = [&](double a, double b) {
    return g(stereo_unproject({cplx(a, b), chart}));
  };
  Jet2 jet;
  jet.u = g(x);
  fd_jet2<Vec3>(eval, sc.xi.real(), sc.xi.imag(), h, jet.ux, jet.uy, jet.uxx,
                jet.uxy, jet.uyy);
  return jet;
}

Vec3 field_sphere_laplacian(const std::function<Vec3(const SpherePoint&)>& g,
                            const SpherePoint& x) {
  const Chart chart = preferred_chart(x);
  const StereoCoord sc = stereo_project(x, chart);
  const double c = (1.0 + std::norm(sc.xi)) / 2.0;
  const Jet2 j = vec3_chart_jet(g, x, chart);
  return (c * c) * (j.uxx + j.uyy);
}

// Jet of the parametrization P(xi). With D = 1 + u² + v²:
//   North: P = (2u/D, 2v/D, 1 - 2/D), South flips the sign of P₂ and P₃.
Jet2 unproject_jet(Chart chart, cplx xi) {
  const double u = xi.real(), v = xi.imag();
  const double D = 1.0 + u * u + v * v;
  const double D2 = D * D, D3 = D2 * D;
  Jet2 j;
  j.u = {2.0 * u / D, 2.0 * v / D, (u * u + v * v - 1.0) / D};
  // First derivatives.
  j.ux = {(2.0 * D - 4.0 * u * u) / D2, -4.0 * u * v / D2, 4.0 * u / D2};
  j.uy = {-4.0 * u * v / D2, (2.0 * D - 4.0 * v * v) / D2, 4.0 * v / D2};
  // Second derivatives, from differentiating the above.
  j.uxx = {-4.0 * u / D2 - 4.0 * u * (2.0 * D - 4.0 * u * u) / D3,
           -4.0 * v / D2 + 16.0 * u * u * v / D3,
           4.0 / D2 - 16.0 * u * u / D3};
  j.uyy = {-4.0 * u / D2 + 16.0 * u * v * v / D3,
           -4.0 * v / D2 - 4.0 * v * (2.0 * D - 4.0 * v * v) / D3,
           4.0 / D2 - 16.0 * v * v / D3};
  j.uxy = {4.0 * v / D2 - 4.0 * v * (2.0 * D - 4.0 * u * u) / D3,
           -4.0 * u / D2 + 16.0 * u * v * v / D3,
           -16.0 * u * v / D3};
  if (chart == Chart::South) {
    for (Vec3* comp : {&j.u, &j.ux, &j.uy, &j.uxx, &j.uxy, &j.uyy}) {
      (*comp)[1] = -(*comp)[1];
      (*comp)[2] = -(*comp)[2];
    }
  }
  return j;
}

MapField identity_map() {
  MapField f;
  f.value = [](const SpherePoint& x) { return x; };
  f.chart_jet = [](Chart chart, cplx xi) { return unproject_jet(chart, xi); };
  f.mode = DerivMode::Analytic;
  return f;
}

MapField constant_map(const SpherePoint& p) {
  MapField f;
  const Vec3 q = normalized(p);
  f.value = [q](const SpherePoint&) { return q; };
  f.chart_jet = [q](Chart, cplx) {
    Jet2 j{};
    j.u = q;
    return j;
  };
  f.mode = DerivMode::Analytic;
  return f;
}

MapField linear_image(const std::array<Vec3, 3>& rows, const MapField& u) {
  auto mul = [rows](const Vec3& v) -> Vec3 {
    return {dot(rows[0], v), dot(rows[1], v), dot(rows[2], v)};
  };
  MapField f;
  auto base_value = u.value;
  f.value = [mul, base_value](const SpherePoint& x) { return mul(base_value(x)); };
  if (u.chart_jet) {
    auto base_jet = u.chart_jet;
    f.chart_jet = [mul, base_jet](Chart chart, cplx xi) {
      Jet2 j = base_jet(chart, xi);
      j.u = mul(j.u);
      j.ux = mul(j.ux);
      j.uy = mul(j.uy);
      j.uxx = mul(j.uxx);
      j.uxy = mul(j.uxy);
      j.uyy = mul(j.uyy);
      return j;
    };
  }
  f.mode = u.mode;
  return f;
}

}  // namespace epsharm
