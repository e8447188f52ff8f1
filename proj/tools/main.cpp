// Command-line front end: identity-verification suites, profile
// minimization, ε-sweeps, spectral diagnostics, and Möbius matrix analysis.
// All reports are deterministic: fixed summation order, 17-significant-digit
// serialization, insertion-ordered JSON keys, LF line endings.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "epsharm/energy.hpp"
#include "epsharm/mobius.hpp"
#include "epsharm/parallel.hpp"
#include "epsharm/profile.hpp"
#include "epsharm/report_io.hpp"
#include "epsharm/spectral.hpp"
#include "epsharm/sphere.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace epsharm;

// ---------------------------------------------------------------------------
// Shared plumbing.

struct CheckRecord {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string citation;
};

class CheckList {
 public:
  // Relative comparison against a reference value (floor 1 on the scale).
  void relative(const std::string& name, double measured, double expected,
                double tol, const std::string& citation) {
    double scale = std::max({std::abs(expected), std::abs(measured), 1.0});
    bool ok = std::isfinite(measured) &&
              std::abs(measured - expected) <= tol * scale;
    records_.push_back({name, ok, measured, expected, tol, citation});
  }
  // Absolute residual that should sit near zero.
  void residual(const std::string& name, double measured, double tol,
                const std::string& citation) {
    bool ok = std::isfinite(measured) && std::abs(measured) <= tol;
    records_.push_back({name, ok, measured, 0.0, tol, citation});
  }
  // One-sided bound: measured >= expected - tol.
  void at_least(const std::string& name, double measured, double expected,
                double tol, const std::string& citation) {
    bool ok = std::isfinite(measured) && measured >= expected - tol;
    records_.push_back({name, ok, measured, expected, tol, citation});
  }
  void boolean(const std::string& name, bool ok, const std::string& citation) {
    records_.push_back({name, ok, ok ? 1.0 : 0.0, 1.0, 0.0, citation});
  }

  const std::vector<CheckRecord>& records() const { return records_; }
  int failed() const {
    int n = 0;
    for (const auto& r : records_)
      if (!r.pass) ++n;
    return n;
  }

 private:
  std::vector<CheckRecord> records_;
};

Json checks_to_json(const CheckList& checks) {
  Json arr = Json::array();
  for (const auto& r : checks.records()) {
    Json rec = Json::object();
    rec.set("name", Json::str(r.name))
        .set("status", Json::str(r.pass ? "pass" : "fail"))
        .set("measured", Json::number(r.measured))
        .set("expected", Json::number(r.expected))
        .set("tolerance", Json::number(r.tolerance))
        .set("citation", Json::str(r.citation));
    arr.push(std::move(rec));
  }
  return arr;
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  if (dir.back() == '/') return dir + name;
  return dir + "/" + name;
}

double uni(std::mt19937_64& rng) { return uniform01(rng); }

MobiusMatrix random_rotation(std::mt19937_64& rng) {
  // Uniform unit quaternion by rejection; (a, b; -conj b, conj a) in SU(2).
  double q[4];
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& v : q) {
      v = 2.0 * uni(rng) - 1.0;
      n2 += v * v;
    }
  } while (n2 < 0.01 || n2 > 1.0);
  double inv = 1.0 / std::sqrt(n2);
  cplx a(q[0] * inv, q[1] * inv), b(q[2] * inv, q[3] * inv);
  return normalize({a, b, -std::conj(b), std::conj(a)});
}

MobiusMatrix random_mobius(std::mt19937_64& rng, double max_lambda) {
  double lam = 1.0 + (max_lambda - 1.0) * uni(rng);
  return compose(random_rotation(rng),
                 compose(dilation(lam), random_rotation(rng)));
}

Profile random_degree_one_profile(std::mt19937_64& rng, int modes) {
  Profile f;
  f.n = 1;
  f.coeffs.assign(modes, 0.0);
  for (int j = 0; j < std::min(modes, 4); ++j)
    f.coeffs[j] = (2.0 * uni(rng) - 1.0) * 0.3 / (j + 1);
  return f;
}

std::array<Vec3, 3> rotation_rows_z(double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  return {Vec3{c, -s, 0.0}, Vec3{s, c, 0.0}, Vec3{0.0, 0.0, 1.0}};
}

// ---------------------------------------------------------------------------
// verify

struct CommonCfg {
  int grid_polar = 64;
  int grid_azimuthal = 128;
  int nodes1d = 256;
  long long seed = 12345;
  std::string out_dir = ".";
};

void run_verify_suite(CheckList& cl, const CommonCfg& cfg) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed));
  QuadratureGrid grid = build_grid(cfg.grid_polar, cfg.grid_azimuthal);
  QuadratureGrid coarse = build_grid(std::max(2, cfg.grid_polar / 2),
                                     std::max(4, cfg.grid_azimuthal / 2));
  Grid1D g1d = build_profile_grid(cfg.nodes1d);

  // Quadrature sanity.
  cl.relative("surface area", integrate([](const SpherePoint&) { return 1.0; }, grid),
              4.0 * kPi, 1e-13, "total area of the unit sphere");
  cl.relative("second moment x3^2",
              integrate([](const SpherePoint& p) { return p[2] * p[2]; }, grid),
              4.0 * kPi / 3.0, 1e-12, "polynomial moment integrated exactly by the grid");

  // Dilation energy closed form.
  for (double lam : {1.0, 1.5, 2.0, 5.0})
    for (double eps : {0.0, 0.01, 0.1}) {
      EnergyReport rep = eps_energy(mobius_map(dilation(lam)), eps, grid);
      cl.relative("dilation energy lambda=" + format_double(lam) +
                      " eps=" + format_double(eps),
                  rep.total, dilation_energy_closed_form(lam, eps), 1e-8,
                  "closed-form energy of conformal dilations");
    }

  // Rotation (identity) energy.
  for (double eps : {0.0, 0.05, 0.1}) {
    EnergyReport rep = eps_energy(identity_map(), eps, grid);
    cl.relative("rotation energy eps=" + format_double(eps), rep.total,
                4.0 * kPi * (1.0 + 2.0 * eps), 1e-10,
                "energy of isometric maps: 4pi(1+2eps)");
  }

  // Log-dilation derivative of the closed form.
  for (double lam : {1.2, 2.0}) {
    const double eps = 0.1, h = 1e-5;
    double fd = (dilation_energy_closed_form(lam * std::exp(h), eps) -
                 dilation_energy_closed_form(lam * std::exp(-h), eps)) /
                (2.0 * h);
    cl.relative("dilation energy log-derivative lambda=" + format_double(lam),
                fd, dilation_energy_dloglambda(lam, eps), 1e-6,
                "derivative of the dilation energy in log lambda");
  }

  // Pullback laws for identity + two smooth non-Möbius maps.
  {
    std::vector<std::pair<std::string, MapField>> maps;
    maps.emplace_back("identity", identity_map());
    maps.emplace_back("profile-lift", lift_profile(Profile{1, {0.2, -0.1}}));
    maps.emplace_back("rotated-lift",
                      linear_image(rotation_rows_z(0.7),
                                   lift_profile(Profile{2, {0.3}})));
    for (int trial = 0; trial < 2; ++trial) {
      MobiusMatrix m = random_mobius(rng, 3.0);
      for (const auto& [name, u] : maps) {
        PullbackErrors pe = verify_pullback(u, m, grid);
        cl.residual("pullback gradient law " + name + " #" + std::to_string(trial),
                    pe.gradient_law, 1e-6,
                    "gradient density transforms with the dilation weight");
        cl.residual("pullback laplacian law " + name + " #" + std::to_string(trial),
                    pe.laplacian_law, 1e-6,
                    "laplacian density transforms with the squared weight");
      }
    }
  }

  // Conformal weight chi: frozen values, FD cross-checks, integral.
  {
    cl.relative("chi gradient norm at (2,1)", chi_gradient_norm(2.0, cplx(1.0, 0.0)),
                15.0 / 8.0, 1e-12, "closed-form gradient of the conformal weight");
    cl.relative("chi laplacian at (2,0)", chi_laplacian(2.0, cplx(0.0, 0.0)), 1.5,
                1e-12, "closed-form laplacian of the conformal weight");
    cl.relative("chi laplacian at (2,1)", chi_laplacian(2.0, cplx(1.0, 0.0)),
                9.0 / 8.0, 1e-12, "closed-form laplacian of the conformal weight");

    const double lam = 1.7;
    SpherePoint p = stereo_unproject({cplx(0.4, 0.3), Chart::North});
    auto chi_field = [lam](const SpherePoint& x) {
      return chi_from_abs2(lam, north_abs2(x));
    };
    Chart ch = preferred_chart(p);
    cplx xi = stereo_project(p, ch).xi;
    ScalarJet2 j = scalar_chart_jet(chi_field, p, ch);
    double c = 0.5 * (1.0 + std::norm(xi));
    double grad_fd = c * std::sqrt(j.ux * j.ux + j.uy * j.uy);
    double lap_fd = c * c * (j.uxx + j.uyy);
    cplx xin = stereo_project(p, Chart::North).xi;
    cl.relative("chi gradient norm FD cross-check", chi_gradient_norm(lam, xin),
                grad_fd, 1e-6, "finite differences agree with the closed form");
    cl.relative("chi laplacian FD cross-check", chi_laplacian(lam, xin), lap_fd,
                1e-6, "finite differences agree with the closed form");

    double integral = integrate(
        [](const SpherePoint& x) { return chi_from_abs2(2.0, north_abs2(x)); },
        grid);
    cl.relative("chi integral lambda=2", integral,
                (4.0 * kPi / 3.0) * (4.0 + 1.0 + 0.25), 1e-10,
                "integral of the conformal weight");
  }

  // Degrees.
  {
    cl.relative("degree identity", degree(identity_map(), grid).first, 1.0, 1e-3,
                "identity covers the sphere once, positively");
    MapField antipodal = linear_image(
        {Vec3{-1.0, 0.0, 0.0}, Vec3{0.0, -1.0, 0.0}, Vec3{0.0, 0.0, -1.0}},
        identity_map());
    cl.relative("degree antipodal", degree(antipodal, grid).first, -1.0, 1e-3,
                "the antipodal map reverses orientation");
    cl.relative("degree constant",
                degree(constant_map({0.0, 0.0, 1.0}), grid).first, 0.0, 1e-3,
                "constant maps cover nothing");
    MapField trial_lift = lift_profile_fn(trial_profile(3.0));
    cl.relative("degree trial lift", degree(trial_lift, grid).first, 0.0, 1e-3,
                "the two-winding profile lift has degree zero");

    MapField u1 = lift_profile(Profile{1, {0.2, -0.1}});
    MobiusMatrix m = random_mobius(rng, 2.0);
    cl.relative("degree invariance under composition",
                degree(compose_mobius(u1, m), coarse).first, 1.0, 1e-3,
                "conformal reparametrization preserves degree");
  }

  // Degree-one energy gap on randomized symmetric profiles.
  {
    QuadratureGrid gap_grid = build_grid(32, 64);
    const double eps = 0.05;
    double bound = 4.0 * kPi * (1.0 + 2.0 * eps);
    for (int k = 0; k < 10; ++k) {
      Profile f = random_degree_one_profile(rng, 6);
      EnergyReport rep = eps_energy(lift_profile(f), eps, gap_grid);
      cl.at_least("degree-one gap profile #" + std::to_string(k), rep.total,
                  bound, 1e-6, "degree-one maps cost at least 4pi(1+2eps)");
    }
  }

  // Conformal invariance of the Dirichlet part.
  {
    MapField u = lift_profile(Profile{1, {0.2, -0.1}});
    MobiusMatrix m = random_mobius(rng, 2.0);
    double base = dirichlet_energy(u, grid);
    double comp = dirichlet_energy(compose_mobius(u, m), grid);
    cl.relative("dirichlet conformal invariance", comp, base, 1e-6,
                "dirichlet energy is invariant under conformal composition");
  }

  // Change of variables: the dilation-weighted functional.
  {
    MapField u = lift_profile(Profile{1, {0.2, -0.1}});
    const double eps = 0.05, lam = 1.6;
    double weighted = eps_lambda_energy(u, eps, lam, grid).total;
    double composed =
        eps_energy(compose_mobius(u, dilation(1.0 / lam)), eps, grid).total;
    cl.relative("dilation-weighted functional change of variables", weighted,
                composed, 1e-6,
                "pulling back through a dilation produces the chi weight");
    double at_id = eps_lambda_energy(identity_map(), eps, lam, grid).total;
    cl.relative("dilation-weighted functional at identity", at_id,
                dilation_energy_closed_form(lam, eps), 1e-8,
                "weighted functional of the identity equals the dilation energy");
  }

  // Möbius algebra.
  {
    for (int k = 0; k < 3; ++k) {
      MobiusMatrix m = random_mobius(rng, 4.0);
      SingularDecomp sd = svd(m);
      MobiusMatrix rec = compose(sd.U, compose(dilation(sd.lambda),
                                               MobiusMatrix{std::conj(sd.V.a), std::conj(sd.V.c),
                                                            std::conj(sd.V.b), std::conj(sd.V.d)}));
      MobiusMatrix mn = normalize(m);
      double err = std::max({std::abs(rec.a - mn.a), std::abs(rec.b - mn.b),
                             std::abs(rec.c - mn.c), std::abs(rec.d - mn.d)});
      cl.residual("svd reconstruction #" + std::to_string(k), err, 1e-12,
                  "U diag(sqrt(lambda), 1/sqrt(lambda)) V* recovers the matrix");
      cl.relative("svd inverse invariance #" + std::to_string(k),
                  epsharm::svd(m.inverse()).lambda, sd.lambda, 1e-12,
                  "a matrix and its inverse share the singular ratio");
    }
    MobiusMatrix r = random_rotation(rng);
    cl.residual("rotation criterion", svd(r).lambda - 1.0, 1e-12,
                "unitary matrices have singular ratio 1");
    Rotation3 R = su2_to_so3(r);
    double err = 0.0;
    for (int k = 0; k < 5; ++k) {
      double z = 2.0 * uni(rng) - 1.0, phi = 2.0 * kPi * uni(rng);
      double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      SpherePoint p{s * std::cos(phi), s * std::sin(phi), z};
      Vec3 via_cover{dot(R[0], p), dot(R[1], p), dot(R[2], p)};
      err = std::max(err, norm(via_cover - mobius_act(r, p)));
    }
    cl.residual("double cover consistency", err, 1e-12,
                "the SO(3) image acts like the fractional-linear map");
  }

  // Spectral identities (symbolic fields, quick grid).
  {
    QuadratureGrid sgrid = build_grid(16, 32);
    for (int k = 1; k <= 3; ++k) {
      double worst_g = 0.0, worst_s = 0.0;
      for (const auto& hp : harmonic_basis(k)) {
        TangentField gf = grad_field(hp);
        TangentField sf = star(gf);
        double eig = -static_cast<double>(k) * (k + 1);
        worst_g = std::max(
            worst_g, field_sup_distance(tangential_laplacian(gf, sgrid),
                                        lincomb(eig, gf, 0.0, gf), sgrid));
        worst_s = std::max(
            worst_s, field_sup_distance(tangential_laplacian(sf, sgrid),
                                        lincomb(eig, sf, 0.0, sf), sgrid));
      }
      cl.residual("eigenfield gradient k=" + std::to_string(k), worst_g, 1e-6,
                  "gradient fields of harmonics are eigenfields");
      cl.residual("eigenfield star-gradient k=" + std::to_string(k), worst_s,
                  1e-6, "rotated gradients share the eigenvalue");
    }

    double worst_kernel = 0.0;
    for (const auto& hp : harmonic_basis(1)) {
      TangentField gf = grad_field(hp);
      worst_kernel = std::max(
          worst_kernel, field_sup_norm(j_epsilon(gf, 0.1, sgrid), sgrid));
      worst_kernel = std::max(
          worst_kernel, field_sup_norm(j_epsilon(star(gf), 0.1, sgrid), sgrid));
    }
    cl.residual("jacobi operator kernel", worst_kernel, 1e-6,
                "first-degree fields span the kernel");

    TangentField p2 = grad_field(harmonic_basis(2)[0]);
    cl.residual("jacobi operator on k=2",
                field_sup_distance(j_epsilon(p2, 0.1, sgrid),
                                   lincomb(-7.2, p2, 0.0, p2), sgrid),
                1e-6, "factorized operator scales the k=2 eigenfield");

    TangentField mix = lincomb(1.0, p2, 1.0, star(grad_field(harmonic_basis(1)[0])));
    HodgeParts hp = helmholtz_hodge(mix, sgrid);
    cl.residual("hodge reconstruction", hp.reconstruction_residual, 1e-8,
                "gradient and rotated-gradient parts rebuild the field");
    cl.residual("normal part identity", normal_part_residual(mix, sgrid), 1e-6,
                "the laplacian's normal component is minus twice the divergence");
  }

  // 1D reduction closed forms.
  {
    Profile fr{1, std::vector<double>(24, 0.0)};
    cl.relative("profile gradient energy f=r", profile_gradient_energy(fr, g1d),
                4.0 * kPi, 1e-12, "identity profile gradient energy");
    Profile f2r{2, std::vector<double>(24, 0.0)};
    cl.relative("profile gradient energy f=2r", profile_gradient_energy(f2r, g1d),
                32.0 * kPi / 3.0, 1e-12, "double-winding gradient energy");
    ReducedEnergyReport rr = profile_full_energy(fr, 0.05, g1d);
    cl.relative("profile full energy f=r eps=0.05", rr.total,
                4.0 * kPi * (1.0 + 2.0 * 0.05), 1e-12,
                "reduced energy of the identity profile");
    cl.residual("stationarity of f=r", rr.el_residual, 1e-10,
                "the identity profile is a critical point");
    cl.boolean("nonstationarity of f=2r",
               el_residual(f2r, 0.01, g1d) > 1e-3,
               "the naive double winding is not critical");

    TrialProfile tp = trial_profile(3.1623);
    TrialEnergyBounds tb = trial_energy_bounds(3.1623, 0.01);
    ReducedEnergyReport tr = profile_full_energy(ProfileFn(tp), 0.01, g1d);
    cl.boolean("trial energy below closed-form bound", tr.total < tb.upper,
               "quadrature confirms the competitor estimate");
    cl.relative("trial profile value at pi/4", tp(kPi / 4.0).f,
                2.0 * std::atan(3.1623), 1e-12, "direct evaluation");
    cl.relative("trial bound arithmetic eps=0.01",
                trial_energy_bounds(3.1623, 0.01).final_bound,
                8.0 * kPi + 116.8 * kPi, 1e-10, "bound formula arithmetic");

    cl.boolean("lower bound check f=2r", bool(lower_bound_check(f2r, 0.01, g1d)),
               "the winding integral bound holds for the naive profile");
    cl.boolean("lower bound check trial curve",
               profile_full_energy(ProfileFn(trial_profile(2.5)), 0.01, g1d).total >=
                   8.0 * kPi + 32.0 * kPi * kPi * 0.01 - 1e-6,
               "trial curves obey the degree-zero energy bound");
  }
}

int cmd_verify(const CommonCfg& cfg) {
  CheckList cl;
  // A check that cannot even be evaluated (e.g. the degree quadrature does
  // not resolve to an integer on a very coarse grid) counts as a failure;
  // the report must still be written.
  try {
    run_verify_suite(cl, cfg);
  } catch (const Error& e) {
    cl.boolean(std::string("suite aborted early: ") + e.what(), false,
               "every check must be computable at the requested resolution");
  }

  Json root = Json::object();
  root.set("command", Json::str("verify"))
      .set("seed", Json::integer(cfg.seed))
      .set("grid", Json::object()
                       .set("polar", Json::integer(cfg.grid_polar))
                       .set("azimuthal", Json::integer(cfg.grid_azimuthal)))
      .set("nodes1d", Json::integer(cfg.nodes1d))
      .set("checks", checks_to_json(cl))
      .set("passed", Json::integer(static_cast<long long>(cl.records().size()) -
                                   cl.failed()))
      .set("failed", Json::integer(cl.failed()))
      .set("status", Json::str(cl.failed() == 0 ? "pass" : "fail"));
  write_text_file(join_path(cfg.out_dir, "verify.json"), root.dump());

  for (const auto& r : cl.records())
    if (!r.pass)
      std::fprintf(stderr, "FAIL %s: measured %s expected %s tol %s\n",
                   r.name.c_str(), format_double(r.measured).c_str(),
                   format_double(r.expected).c_str(),
                   format_double(r.tolerance).c_str());
  std::printf("verify: %zu checks, %d failed -> %s\n", cl.records().size(),
              cl.failed(), cl.failed() == 0 ? "pass" : "fail");
  return cl.failed() == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// minimize

int cmd_minimize(const CommonCfg& cfg, int n, double eps, int modes) {
  if (!(eps > 0.0 && eps < 0.25))
    throw ConfigError("epsilon must lie in (0, 0.25)");
  if (modes < 4) throw ConfigError("modes must be at least 4");
  if (n < 0) throw ConfigError("winding class must be nonnegative");

  Grid1D grid = build_profile_grid(cfg.nodes1d);
  MinimizeResult res = minimize_profile(n, eps, modes, grid);

  Json root = Json::object();
  root.set("n", Json::integer(n))
      .set("epsilon", Json::number(eps))
      .set("modes", Json::integer(modes))
      .set("energy", Json::number(res.report.total))
      .set("gradient_term", Json::number(res.report.gradient_term))
      .set("biharmonic_term", Json::number(res.report.biharmonic_term))
      .set("el_residual", Json::number(res.report.el_residual))
      .set("iterations", Json::integer(res.iterations));
  write_text_file(join_path(cfg.out_dir, "minimize.json"), root.dump());

  std::string csv = "r,f,fprime\n";
  const int pts = 1024;
  for (int k = 0; k < pts; ++k) {
    double r = kPi * k / (pts - 1);
    ProfileJet j = eval_profile(res.profile, r);
    csv += format_double(r) + "," + format_double(j.f) + "," +
           format_double(j.fp) + "\n";
  }
  write_text_file(join_path(cfg.out_dir, "profile.csv"), csv);

  std::printf("minimize: n=%d eps=%s energy=%s el_residual=%s (%d iterations)\n",
              n, format_double(eps).c_str(),
              format_double(res.report.total).c_str(),
              format_double(res.report.el_residual).c_str(), res.iterations);
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const CommonCfg& cfg, double eps_min, double eps_max, int steps,
              int n, int modes) {
  if (steps < 1) throw ConfigError("sweep needs at least one step");
  if (!(eps_min > 0.0 && eps_max < 0.25 && eps_min <= eps_max))
    throw ConfigError("sweep range must satisfy 0 < eps-min <= eps-max < 0.25");
  if (modes < 4) throw ConfigError("modes must be at least 4");

  std::vector<double> epsilons(steps);
  for (int i = 0; i < steps; ++i)
    epsilons[i] = steps == 1 ? eps_min
                             : eps_min + (eps_max - eps_min) * i / (steps - 1);

  struct Row {
    double eps = 0.0;
    bool ok = false;
    ReducedEnergyReport rep;
    std::string error;
  };
  std::vector<Row> rows(epsilons.size());
  Grid1D grid = build_profile_grid(cfg.nodes1d);

#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(epsilons.size()); ++i) {
    Row& row = rows[static_cast<std::size_t>(i)];
    row.eps = epsilons[static_cast<std::size_t>(i)];
    try {
      MinimizeResult res = minimize_profile(n, row.eps, modes, grid);
      row.rep = res.report;
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
    }
  }

  std::string csv =
      "epsilon,energy,gradient_term,biharmonic_term,lower_bound,upper_bound\n";
  Json jrows = Json::array(), jfail = Json::array();
  int failures = 0;
  for (const Row& row : rows) {
    double lower = 8.0 * kPi + 32.0 * kPi * kPi * row.eps;
    double upper = 8.0 * kPi + 1168.0 * kPi * std::sqrt(row.eps);
    if (row.ok) {
      csv += format_double(row.eps) + "," + format_double(row.rep.total) + "," +
             format_double(row.rep.gradient_term) + "," +
             format_double(row.rep.biharmonic_term) + "," +
             format_double(lower) + "," + format_double(upper) + "\n";
      jrows.push(Json::object()
                     .set("epsilon", Json::number(row.eps))
                     .set("energy", Json::number(row.rep.total))
                     .set("gradient_term", Json::number(row.rep.gradient_term))
                     .set("biharmonic_term", Json::number(row.rep.biharmonic_term))
                     .set("lower_bound", Json::number(lower))
                     .set("upper_bound", Json::number(upper)));
    } else {
      ++failures;
      jfail.push(Json::object()
                     .set("epsilon", Json::number(row.eps))
                     .set("error", Json::str(row.error)));
      std::fprintf(stderr, "sweep: eps=%s failed: %s\n",
                   format_double(row.eps).c_str(), row.error.c_str());
    }
  }
  write_text_file(join_path(cfg.out_dir, "sweep.csv"), csv);

  Json root = Json::object();
  root.set("command", Json::str("sweep"))
      .set("n", Json::integer(n))
      .set("modes", Json::integer(modes))
      .set("rows", std::move(jrows))
      .set("failures", std::move(jfail));
  write_text_file(join_path(cfg.out_dir, "sweep.json"), root.dump());

  std::printf("sweep: %zu rows, %d failed\n", rows.size(), failures);
  return failures == 0 ? 0 : 3;
}

// ---------------------------------------------------------------------------
// spectral

int cmd_spectral(const CommonCfg& cfg, int kmax) {
  if (kmax < 1 || kmax > 10) throw ConfigError("kmax must lie in [1, 10]");
  QuadratureGrid grid = build_grid(cfg.grid_polar, cfg.grid_azimuthal);

  bool all_ok = true;
  Json eig = Json::array();
  for (int k = 1; k <= kmax; ++k) {
    double eigval = -static_cast<double>(k) * (k + 1);
    double worst_g = 0.0, worst_s = 0.0;
    for (const auto& hp : harmonic_basis(k)) {
      TangentField gf = grad_field(hp);
      TangentField sf = star(gf);
      worst_g = std::max(worst_g,
                         field_sup_distance(tangential_laplacian(gf, grid),
                                            lincomb(eigval, gf, 0.0, gf), grid));
      worst_s = std::max(worst_s,
                         field_sup_distance(tangential_laplacian(sf, grid),
                                            lincomb(eigval, sf, 0.0, sf), grid));
    }
    all_ok = all_ok && worst_g < 1e-6 && worst_s < 1e-6;
    eig.push(Json::object()
                 .set("k", Json::integer(k))
                 .set("kind", Json::str("gradient"))
                 .set("residual", Json::number(worst_g)));
    eig.push(Json::object()
                 .set("k", Json::integer(k))
                 .set("kind", Json::str("star-gradient"))
                 .set("residual", Json::number(worst_s)));
  }

  const double eps = 0.1;
  Json jker = Json::array();
  const char* names[6] = {"grad_x1", "grad_x2", "grad_x3",
                          "star_grad_x1", "star_grad_x2", "star_grad_x3"};
  {
    const auto& b1 = harmonic_basis(1);
    for (int i = 0; i < 6; ++i) {
      TangentField f = i < 3 ? grad_field(b1[i]) : star(grad_field(b1[i - 3]));
      double resid = field_sup_norm(j_epsilon(f, eps, grid), grid);
      all_ok = all_ok && resid < 1e-6;
      jker.push(Json::object()
                    .set("field", Json::str(names[i]))
                    .set("residual", Json::number(resid)));
    }
  }

  TangentField p2 = grad_field(harmonic_basis(2)[0]);
  double expected_scale = (1.0 - eps * (-6.0 - 2.0)) * (-6.0 + 2.0);
  double scale_resid = field_sup_distance(
      j_epsilon(p2, eps, grid), lincomb(expected_scale, p2, 0.0, p2), grid);
  all_ok = all_ok && scale_resid < 1e-6;

  TangentField mix =
      lincomb(1.0, p2, 1.0, star(grad_field(harmonic_basis(1)[0])));
  HodgeParts hodge = helmholtz_hodge(mix, grid);
  double ortho = field_inner(hodge.grad_part, hodge.star_part, grid);
  double npr = normal_part_residual(mix, grid);
  all_ok = all_ok && hodge.reconstruction_residual < 1e-8 &&
           std::abs(ortho) < 1e-8 && npr < 1e-6;

  Json root = Json::object();
  root.set("command", Json::str("spectral"))
      .set("kmax", Json::integer(kmax))
      .set("grid", Json::object()
                       .set("polar", Json::integer(cfg.grid_polar))
                       .set("azimuthal", Json::integer(cfg.grid_azimuthal)))
      .set("eigenvalue_residuals", std::move(eig))
      .set("jacobi_kernel_residuals", std::move(jker))
      .set("jacobi_k2_scaling",
           Json::object()
               .set("epsilon", Json::number(eps))
               .set("expected_factor", Json::number(expected_scale))
               .set("residual", Json::number(scale_resid)))
      .set("hodge",
           Json::object()
               .set("reconstruction_residual",
                    Json::number(hodge.reconstruction_residual))
               .set("orthogonality", Json::number(ortho)))
      .set("normal_part_residual", Json::number(npr))
      .set("status", Json::str(all_ok ? "pass" : "fail"));
  write_text_file(join_path(cfg.out_dir, "spectral.json"), root.dump());

  std::printf("spectral: kmax=%d -> %s\n", kmax, all_ok ? "pass" : "fail");
  return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// mobius

Json cplx_json(cplx z) {
  return Json::array().push(Json::number(z.real())).push(Json::number(z.imag()));
}

Json matrix_json(const MobiusMatrix& m) {
  return Json::object()
      .set("a", cplx_json(m.a))
      .set("b", cplx_json(m.b))
      .set("c", cplx_json(m.c))
      .set("d", cplx_json(m.d));
}

int cmd_mobius(const CommonCfg& cfg, const std::vector<double>& entries) {
  if (entries.size() != 8)
    throw ConfigError("--matrix expects 8 comma-separated reals "
                      "(a_re,a_im,b_re,b_im,c_re,c_im,d_re,d_im)");
  MobiusMatrix m{cplx(entries[0], entries[1]), cplx(entries[2], entries[3]),
                 cplx(entries[4], entries[5]), cplx(entries[6], entries[7])};
  if (std::abs(m.det()) < 1e-14)
    throw ConfigError("matrix is singular; not a fractional-linear map");
  MobiusMatrix mn = normalize(m);
  SingularDecomp sd = svd(mn);
  bool rot = is_rotation(mn, 1e-10);

  Json root = Json::object();
  root.set("command", Json::str("mobius"))
      .set("matrix", matrix_json(m))
      .set("normalized", matrix_json(mn))
      .set("lambda", Json::number(sd.lambda))
      .set("singular_values", Json::array()
                                  .push(Json::number(std::sqrt(sd.lambda)))
                                  .push(Json::number(1.0 / std::sqrt(sd.lambda))))
      .set("is_rotation", Json::boolean(rot));
  if (rot) {
    Rotation3 R = su2_to_so3(mn);
    Json rows = Json::array();
    for (const Vec3& row : R)
      rows.push(Json::array()
                    .push(Json::number(row[0]))
                    .push(Json::number(row[1]))
                    .push(Json::number(row[2])));
    root.set("rotation", std::move(rows));
  } else {
    root.set("rotation", Json::null());
  }
  root.set("svd", Json::object()
                      .set("u", matrix_json(sd.U))
                      .set("v", matrix_json(sd.V)));
  write_text_file(join_path(cfg.out_dir, "mobius.json"), root.dump());

  std::printf("mobius: lambda=%s is_rotation=%s\n",
              format_double(sd.lambda).c_str(), rot ? "true" : "false");
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for regularized harmonic map energies on the sphere"};
  app.set_config("--config", "", "flat key=value configuration file");
  app.require_subcommand(1);

  CommonCfg cfg;
  app.add_option("--grid-polar", cfg.grid_polar, "polar Gauss nodes for surface grids")
      ->capture_default_str();
  app.add_option("--grid-az", cfg.grid_azimuthal, "azimuthal nodes for surface grids")
      ->capture_default_str();
  app.add_option("--nodes1d", cfg.nodes1d, "Gauss nodes for profile integrals")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed for randomized checks")
      ->capture_default_str();
  app.add_option("--out", cfg.out_dir, "output directory for reports")
      ->envname("EPSHARM_OUTDIR")
      ->capture_default_str();

  CLI::App* verify = app.add_subcommand("verify", "run the identity-verification suite");

  int min_n = 2, min_modes = 24;
  double min_eps = 0.01;
  CLI::App* minimize = app.add_subcommand("minimize", "minimize the reduced profile energy");
  minimize->add_option("--n", min_n, "winding class")->capture_default_str();
  minimize->add_option("--eps", min_eps, "regularization strength")->capture_default_str();
  minimize->add_option("--modes", min_modes, "sine modes")->capture_default_str();

  double sweep_min = 0.0025, sweep_max = 0.04;
  int sweep_steps = 4, sweep_n = 2, sweep_modes = 24;
  CLI::App* sweep = app.add_subcommand("sweep", "minimize across an epsilon range");
  sweep->add_option("--eps-min", sweep_min, "smallest epsilon")->capture_default_str();
  sweep->add_option("--eps-max", sweep_max, "largest epsilon")->capture_default_str();
  sweep->add_option("--steps", sweep_steps, "number of epsilon samples")->capture_default_str();
  sweep->add_option("--n", sweep_n, "winding class")->capture_default_str();
  sweep->add_option("--modes", sweep_modes, "sine modes")->capture_default_str();

  int spectral_kmax = 4;
  CLI::App* spectral = app.add_subcommand("spectral", "eigenfield and Hodge diagnostics");
  spectral->add_option("--kmax", spectral_kmax, "largest harmonic degree")->capture_default_str();

  std::vector<double> mobius_entries;
  CLI::App* mobius = app.add_subcommand("mobius", "analyze a fractional-linear map");
  mobius->add_option("--matrix", mobius_entries,
                     "a_re,a_im,b_re,b_im,c_re,c_im,d_re,d_im")
      ->delimiter(',')
      ->expected(8);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  try {
    if (cfg.grid_polar < 2 || cfg.grid_azimuthal < 4)
      throw ConfigError("surface grid must be at least 2x4");
    if (cfg.nodes1d < 8) throw ConfigError("profile grid must have >= 8 nodes");

    if (verify->parsed()) return cmd_verify(cfg);
    if (minimize->parsed()) return cmd_minimize(cfg, min_n, min_eps, min_modes);
    if (sweep->parsed())
      return cmd_sweep(cfg, sweep_min, sweep_max, sweep_steps, sweep_n, sweep_modes);
    if (spectral->parsed()) return cmd_spectral(cfg, spectral_kmax);
    if (mobius->parsed()) return cmd_mobius(cfg, mobius_entries);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NoConvergence& e) {
    std::fprintf(stderr, "convergence failure: %s\n", e.what());
    return 3;
  } catch (const LineSearchFailure& e) {
    std::fprintf(stderr, "convergence failure: %s\n", e.what());
    return 3;
  } catch (const Error& e) {
    std::fprintf(stderr, "check failure: %s\n", e.what());
    return 1;
  }
  return 2;
}
