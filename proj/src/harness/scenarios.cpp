#include "godel/harness/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "godel/constants.hpp"
#include "godel/geometry.hpp"
#include "godel/harness/ensemble.hpp"
#include "godel/harness/output.hpp"
#include "godel/harness/transitivity.hpp"
#include "godel/rng.hpp"

namespace godel::harness {

namespace {

std::string omega_tag(double w) {
  std::ostringstream os;
  os << "[omega=" << w << "]";
  return os.str();
}

Diagnostic below(std::string name, std::string anchor, double value, double tol, std::string note = {}) {
  return {std::move(name), std::move(anchor), value, 0.0, tol, value < tol, std::move(note)};
}

Diagnostic near(std::string name, std::string anchor, double value, double expected, double tol,
                std::string note = {}) {
  return {std::move(name), std::move(anchor), value, expected, tol, std::abs(value - expected) < tol,
          std::move(note)};
}

void log_report(std::ostream& log, const DiagnosticReport& r) {
  for (const Diagnostic& d : r.items)
  {
    log << (d.pass ? "  pass  " : "  FAIL  ") << d.name << " = " << d.value;
    if (d.expected != 0.0) log << " (expected " << d.expected << ", tol " << d.tolerance << ")\n";
    else log << " (tol " << d.tolerance << ")\n";
  }
}

Json report_json(const RunConfig& cfg, const DiagnosticReport& r) {
  Json j = report_envelope(cfg);
  j["diagnostics"] = to_json(r);
  j["all_pass"] = r.all_pass();
  return j;
}

double span_or(double span, double fallback) { return span > 0.0 ? span : fallback; }

// RK4 substeps per output sample so that the integration step stays below max_step.
int substeps_for(double span, int samples, double max_step) {
  return std::max(1, static_cast<int>(std::ceil(span / (samples - 1) / max_step)));
}

PlotSeries make_series(std::string label, const std::vector<double>& x, const std::vector<double>& y) {
  return {std::move(label), x, y};
}

std::vector<double> coord(const std::vector<PhaseState>& v, int i) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const PhaseState& st : v) out.push_back(st.point.as_vector()(i));
  return out;
}

}  // namespace

// ---------------------------------------------------------------- geometry

Christoffel christoffel_finite_difference(const SpacetimePoint& p, const ModelParams& mp, double h) {
  std::array<Matrix4, 4> dg;
  for (int l = 0; l < 4; ++l) {
    Vector4 hi = p.as_vector(), lo = p.as_vector();
    hi(l) += h;
    lo(l) -= h;
    dg[l] = (metric_at(SpacetimePoint::from_vector(hi), mp) - metric_at(SpacetimePoint::from_vector(lo), mp)) /
            (2.0 * h);
  }
  const Matrix4 ginv = inverse_metric_at(p, mp);
  Christoffel G;
  for (int k = 0; k < 4; ++k) {
    G[k].setZero();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int l = 0; l < 4; ++l)
          G[k](i, j) += 0.5 * ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
  }
  return G;
}

DiagnosticReport geometry_checks(const GeometryCheckOptions& opt) {
  DiagnosticReport rep;
  Philox4x32 eng(opt.seed, 0);
  std::uniform_real_distribution<double> coord_u(-10.0, 10.0), x_u(-opt.x_range, opt.x_range),
      vel_u(-1.0, 1.0), angle_u(-kPi, kPi), dil_u(-1.0, 1.0);

  for (double w : opt.omegas) {
    const ModelParams mp{w, 1.0};
    mp.validate();
    double e_inv = 0, e_chr = 0, e_ric = 0, e_R = 0, e_ein = 0, e_chart = 0, e_pull = 0, e_iso = 0, R_sum = 0;
    for (int n = 0; n < opt.points; ++n) {
      const SpacetimePoint p{coord_u(eng), x_u(eng), coord_u(eng), coord_u(eng)};
      const double E = std::exp(kSqrt2 * w * p.x);

      const Matrix4 g = metric_at(p, mp), gi = inverse_metric_at(p, mp);
      const Matrix4 prod = g * gi;
      const Matrix4 scale = g.cwiseAbs() * gi.cwiseAbs();
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          e_inv = std::max(e_inv, std::abs(prod(i, j) - (i == j)) / std::max(1.0, scale(i, j)));

      const Christoffel G = christoffel_at(p, mp);
      const Christoffel Gfd = christoffel_finite_difference(p, mp, tol::kChristoffelFdStep);
      for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            e_chr = std::max(e_chr, std::abs(G[k](i, j) - Gfd[k](i, j)) / std::max(1.0, std::abs(G[k](i, j))));

      const Matrix4 Ric = ricci_at(p, mp);
      Matrix4 Rx = Matrix4::Zero();
      Rx(0, 0) = 2.0 * w * w;
      Rx(0, 2) = Rx(2, 0) = 2.0 * w * w * E;
      Rx(2, 2) = 2.0 * w * w * E * E;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          e_ric = std::max(e_ric, std::abs(Ric(i, j) - Rx(i, j)) / std::max(1.0, std::abs(Rx(i, j))));

      const double R = scalar_curvature(p, mp);
      R_sum += R;
      e_R = std::max(e_R, std::abs(R - 2.0 * w * w));

      const Matrix4 res = einstein_residual(p, mp);
      const Vector4 u = dust_covelocity(p, mp);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          const double s = std::abs(Rx(i, j)) + 2.0 * w * w * std::abs(g(i, j)) + std::abs(u(i) * u(j));
          e_ein = std::max(e_ein, std::abs(res(i, j)) / std::max(1.0, s));
        }

      const RotationalPoint q = to_rotational(p, mp);
      const SpacetimePoint back = from_rotational(q, mp);
      const Matrix4 J = from_rotational_jacobian(q, mp);
      const Vector4 sens = J.cwiseAbs() * Vector4(q.u, q.r, q.phi, q.z).cwiseAbs();
      for (int i = 0; i < 4; ++i)
        e_chart = std::max(e_chart, std::abs(back.as_vector()(i) - p.as_vector()(i)) /
                                        std::max({1.0, std::abs(p.as_vector()(i)), sens(i)}));
      const Matrix4 pull = J.transpose() * g * J;
      const Matrix4 rot = rotational_metric_at(q, mp);
      const Matrix4 pscale = J.cwiseAbs().transpose() * g.cwiseAbs() * J.cwiseAbs();
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          e_pull = std::max(e_pull, std::abs(pull(i, j) - rot(i, j)) / std::max(1.0, pscale(i, j)));

      PhaseState st{p, Vector4(vel_u(eng), vel_u(eng), vel_u(eng) / E, vel_u(eng))};
      const IsometryElement els[3] = {IsometryElement::translation(coord_u(eng), coord_u(eng), coord_u(eng)),
                                      IsometryElement::dilatation(dil_u(eng)),
                                      IsometryElement::rotation(angle_u(eng))};
      const double n0 = pseudo_norm(st, mp);
      const double nscale = st.velocity.cwiseAbs().dot(g.cwiseAbs() * st.velocity.cwiseAbs());
      for (const IsometryElement& el : els) {
        const PhaseState moved = apply_isometry_state(el, st, mp);
        e_iso = std::max(e_iso, std::abs(pseudo_norm(moved, mp) - n0) / std::max(1.0, nscale));
      }
    }
    const std::string tag = omega_tag(w);
    rep.add(below("metric_inverse" + tag, "metric times inverse metric is the identity", e_inv, opt.tol_metric_inverse,
                  "relative to sum |g_ik||g^kj|"));
    rep.add(below("christoffel_fd" + tag, "Christoffel symbols of the rotating dust metric", e_chr, opt.tol_christoffel,
                  "central differences of the metric, error / max(1, |Gamma|)"));
    rep.add(below("ricci_closed_form" + tag, "Ricci tensor R_tt = 2w^2, R_ty = 2w^2 e^(sqrt2 w x), R_yy = 2w^2 e^(2 sqrt2 w x)",
                  e_ric, opt.tol_ricci, "error / max(1, |R_ij|)"));
    rep.add(near("scalar_curvature" + tag, "scalar curvature equals 2 w^2", R_sum / opt.points, 2.0 * w * w,
                 opt.tol_curvature, "mean over points; max deviation " + std::to_string(e_R)));
    rep.add(below("scalar_curvature_max_dev" + tag, "scalar curvature equals 2 w^2", e_R, opt.tol_curvature));
    rep.add(below("einstein_residual" + tag, "Einstein equations with Lambda = w^2 and rotating dust source", e_ein,
                  opt.tol_einstein, "relative to the size of the summed terms"));
    rep.add(below("chart_round_trip" + tag, "cylindrical chart is a diffeomorphism", e_chart, opt.tol_chart,
                  "componentwise, relative to max(1, |p_i|, sum_j |dp_i/dq_j||q_j|)"));
    rep.add(below("chart_pullback_metric" + tag, "line element in cylindrical coordinates", e_pull, opt.tol_chart,
                  "J^T g J against the cylindrical line element"));
    rep.add(below("isometry_pseudo_norm" + tag, "translations, dilatations and rotations are isometries", e_iso,
                  opt.tol_isometry));
  }
  return rep;
}

// ---------------------------------------------------------------- geodesics

namespace {

void fill_deviation(GeodesicComparison& cmp) {
  for (std::size_t i = 0; i < cmp.s.size(); ++i) {
    const double d = (cmp.closed_form[i].point.as_vector() - cmp.ode[i].point.as_vector()).cwiseAbs().maxCoeff();
    cmp.deviation.push_back(d);
    cmp.max_deviation = std::max(cmp.max_deviation, d);
  }
}

}  // namespace

GeodesicComparison compare_timelike(const GeodesicParams& gp, double span, int samples, int substeps,
                                    const ModelParams& mp) {
  gp.validate();
  if (gp.kind != GeodesicKind::kTimelike) throw InvalidParameter("compare_timelike: lightlike params");
  GeodesicComparison cmp;
  const double ds = span / (samples - 1);
  const PhaseState start = timelike_eval(gp, 0.0, mp);
  const OdePath ode = ode_integrate(start, span, ds / substeps, mp, substeps);
  cmp.max_conserved_drift = ode.max_conserved_drift();
  for (std::size_t i = 0; i < ode.s.size(); ++i) {
    cmp.s.push_back(ode.s[i]);
    cmp.closed_form.push_back(timelike_eval(gp, ode.s[i], mp));
    cmp.ode.push_back(ode.states[i]);
    const double r = std::abs(orbit_relation_residual(gp, cmp.closed_form.back().point, mp));
    cmp.orbit_residual.push_back(r);
    cmp.max_orbit_residual = std::max(cmp.max_orbit_residual, r);
  }
  fill_deviation(cmp);
  return cmp;
}

GeodesicComparison compare_lightlike(const ImpactParameter& B, double span, int samples, int substeps,
                                     const ModelParams& mp) {
  B.validate();
  GeodesicComparison cmp;
  const double ds = span / (samples - 1);
  const PhaseState start = lightlike_eval(B, 0.0, 0.0, 0.0, mp);
  const OdePath ode = ode_integrate(start, span, ds / substeps, mp, substeps);
  cmp.max_conserved_drift = ode.max_conserved_drift();
  const double target = 0.5 * (1.0 - B.ell * B.ell);
  for (std::size_t i = 0; i < ode.s.size(); ++i) {
    cmp.s.push_back(ode.s[i]);
    cmp.closed_form.push_back(lightlike_eval(B, 0.0, 0.0, ode.s[i], mp));
    cmp.ode.push_back(ode.states[i]);
    const double c = std::abs(cylinder_value(cmp.closed_form.back().point, B, mp) - target);
    cmp.cylinder.push_back(c);
    cmp.max_cylinder = std::max(cmp.max_cylinder, c);
  }
  fill_deviation(cmp);
  return cmp;
}

// ---------------------------------------------------------------- scenarios

int run_verify_geometry(const RunConfig& cfg, std::ostream& log) {
  GeometryCheckOptions opt;
  opt.points = cfg.geometry_points;
  opt.omegas = {cfg.omega};
  opt.seed = cfg.seed;
  opt.tol_metric_inverse = cfg.tol_metric_inverse;
  opt.tol_christoffel = cfg.tol_christoffel;
  opt.tol_ricci = cfg.tol_ricci;
  opt.tol_curvature = cfg.tol_ricci;
  opt.tol_einstein = cfg.tol_einstein;
  opt.tol_isometry = cfg.tol_isometry;
  const DiagnosticReport rep = geometry_checks(opt);
  ensure_directory(cfg.output_dir);
  write_json(join_path(cfg.output_dir, "geometry_report.json"), report_json(cfg, rep));
  log << "verify-geometry: " << opt.points << " points at omega = " << cfg.omega << "\n";
  log_report(log, rep);
  return rep.all_pass() ? 0 : 1;
}

int run_geodesic(const RunConfig& cfg, std::ostream& log) {
  const ModelParams mp = cfg.model();
  ensure_directory(cfg.output_dir);
  DiagnosticReport rep;
  GeodesicComparison cmp;
  Json extra;
  if (cfg.geodesic_kind == "timelike") {
    GeodesicParams gp{cfg.gp_a, cfg.gp_b, cfg.gp_c, cfg.gp_Y, GeodesicKind::kTimelike, cfg.gp_s0, cfg.gp_T0,
                      cfg.gp_Z0};
    try {
      gp.validate();
    } catch (const InvalidParameter& e) {
      throw ConfigError(e.what());
    }
    const double span = span_or(cfg.span, 20.0 / (std::abs(gp.a) * mp.omega));
    cmp = compare_timelike(gp, span, cfg.samples, substeps_for(span, cfg.samples, 1e-3 / std::abs(gp.a)), mp);
    rep.add(below("closed_form_vs_rk4", "explicit timelike geodesics", cmp.max_deviation, tol::kGeodesicOracle));
    rep.add(below("conserved_drift_rk4", "first integrals a, b, c, Y", cmp.max_conserved_drift, tol::kConservedDrift));
    rep.add(below("orbit_relation", "planar projection lies on a circle of eccentricity k", cmp.max_orbit_residual,
                  tol::kCylinder));
    extra["k"] = gp.k();
    extra["planar_period"] = planar_period(gp, mp);
    extra["return_time_gap_n1"] = return_time_gap(gp, 1, mp);
  } else {
    ImpactParameter B{cfg.ray_ell, cfg.ray_rho, cfg.ray_Y};
    try {
      B.validate();
    } catch (const InvalidParameter& e) {
      throw ConfigError(e.what());
    }
    const double span = span_or(cfg.span, 1000.0);
    cmp = compare_lightlike(B, span, cfg.samples, substeps_for(span, cfg.samples, 1e-3), mp);
    rep.add(below("cylinder_equation", "lightlike geodesics are drawn on the cylinder of their ray", cmp.max_cylinder,
                  tol::kCylinder));
    const PhaseState end = cmp.closed_form.back();
    const double slope = end.point.z / end.point.t;
    rep.add(near("tz_slope", "asymptotic z/t slope of a light ray", slope, light_ray_slope(B.ell), tol::kLightSlope,
                 "z/t at the end of the span"));
    rep.add(below("closed_form_vs_rk4", "explicit lightlike geodesics", cmp.max_deviation, tol::kGeodesicOracle));
  }

  write_phase_path_csv(join_path(cfg.output_dir, "geodesic_closed_form.csv"), cmp.s, cmp.closed_form, mp);
  write_phase_path_csv(join_path(cfg.output_dir, "geodesic_ode.csv"), cmp.s, cmp.ode, mp);
  {
    std::vector<std::vector<double>> rows;
    const auto& aux = cmp.orbit_residual.empty() ? cmp.cylinder : cmp.orbit_residual;
    for (std::size_t i = 0; i < cmp.s.size(); ++i) rows.push_back({cmp.s[i], cmp.deviation[i], aux[i]});
    write_csv(join_path(cfg.output_dir, "geodesic_deviation.csv"),
              {"s", "max_coordinate_deviation", cmp.orbit_residual.empty() ? "cylinder_residual" : "orbit_residual"},
              rows);
  }
  write_svg_plot(join_path(cfg.output_dir, "projection_xy.svg"), "(x, y) projection", "x", "y",
                 {make_series("closed form", coord(cmp.closed_form, 1), coord(cmp.closed_form, 2))});
  write_svg_plot(join_path(cfg.output_dir, "projection_tz.svg"), "(t, z) projection", "t", "z",
                 {make_series("closed form", coord(cmp.closed_form, 0), coord(cmp.closed_form, 3))});

  Json j = report_json(cfg, rep);
  j["geodesic"] = extra;
  write_json(join_path(cfg.output_dir, "geodesic_report.json"), j);
  log << "geodesic (" << cfg.geodesic_kind << "): " << cmp.s.size() << " samples\n";
  log_report(log, rep);
  return rep.all_pass() ? 0 : 1;
}

int run_diffuse(const RunConfig& cfg, std::ostream& log) {
  const ModelParams mp = cfg.model();
  const ReducedState init = cfg.initial_state();
  const PathRecord rec = simulate_path(init, cfg.simulation(0), mp);
  ensure_directory(cfg.output_dir);
  DiagnosticReport rep;
  Json j = report_envelope(cfg);
  j["step_stats"] = to_json(rec.stats);
  j["aborted"] = rec.aborted;
  if (rec.aborted) j["abort_reason"] = rec.abort_reason;

  if (rec.size() > 0) write_diffusion_csv(join_path(cfg.output_dir, "diffusion_path.csv"), rec, mp);

  if (rec.aborted) {
    rep.add(Diagnostic{"path_completed", "diffusion stays on the unit pseudo-sphere bundle", 0.0, 1.0, 0.0, false,
                       rec.abort_reason});
  } else if (mp.sigma == 0.0) {
    const GeodesicParams gp = conserved_from_state(to_phase_state(init, mp), mp);
    double dev = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
      const PhaseState ex = timelike_eval(gp, rec.s[i], mp);
      const PhaseState got = to_phase_state(rec.states[i], mp);
      dev = std::max(dev, (ex.point.as_vector() - got.point.as_vector()).cwiseAbs().maxCoeff());
    }
    rep.add(below("geodesic_reproduction", "zero noise reduces the diffusion to the geodesic flow", dev,
                  tol::kGeodesicReproduction));
  } else {
    const std::size_t min_tail = std::min<std::size_t>(100, std::max<std::size_t>(2, rec.size() / 4));
    const AsymptoticEstimate est = estimate_boundary(rec, mp, cfg.window_fraction, min_tail);
    j["estimate"] = to_json(est);
    const bool finite = std::isfinite(est.ell_hat) && std::isfinite(est.rho_hat) && std::isfinite(est.Y_hat);
    rep.add(Diagnostic{"estimate_finite", "almost sure asymptotic variable", finite ? 1.0 : 0.0, 1.0, 0.0, finite, ""});
    rep.add(below("abs_ell_hat", "limiting direction lies in the open interval (-1, 1)", std::abs(est.ell_hat), 1.0));
    const CylinderSeries cyl = cylinder_diagnostic(rec, est, mp, cfg.window_fraction);
    j["cylinder_tail_median_abs"] = cyl.tail_median_abs;
  }

  if (rec.size() > 1) {
    const auto plot = [&](const char* file, const char* title, Series which) {
      write_svg_plot(join_path(cfg.output_dir, file), title, "s", title,
                     {make_series(title, rec.s, series(rec, which, mp))});
    };
    plot("zdot_over_a.svg", "zdot / a", Series::kZdotOverA);
    plot("b_over_a.svg", "b / a", Series::kBOverA);
    plot("Y_s.svg", "Y_s", Series::kYs);
    plot("cylinder_residual.svg", "cylinder residual", Series::kRunningCylinder);
    plot("log_abs_a.svg", "log |a|", Series::kLogA);
  }

  j["diagnostics"] = to_json(rep);
  j["all_pass"] = rep.all_pass();
  write_json(join_path(cfg.output_dir, "diffusion_summary.json"), j);
  log << "diffuse: " << rec.size() << " samples, " << rec.stats.steps << " steps, " << rec.stats.retries
      << " retries\n";
  log_report(log, rep);
  return rep.all_pass() ? 0 : 1;
}

namespace {

void write_histogram(const std::string& path, const Histogram1D& h) {
  std::vector<std::vector<double>> rows;
  const double w = (h.hi - h.lo) / static_cast<double>(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    rows.push_back({h.lo + w * i, h.lo + w * (i + 1), static_cast<double>(h.counts[i])});
  write_csv(path, {"lo", "hi", "count"}, rows);
}

PlotSeries histogram_outline(const std::string& label, const Histogram1D& h) {
  PlotSeries s{label, {}, {}};
  const double w = (h.hi - h.lo) / static_cast<double>(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    s.x.push_back(h.lo + w * i);
    s.y.push_back(static_cast<double>(h.counts[i]));
    s.x.push_back(h.lo + w * (i + 1));
    s.y.push_back(static_cast<double>(h.counts[i]));
  }
  return s;
}

}  // namespace

int run_ensemble_scenario(const RunConfig& cfg, std::ostream& log) {
  if (cfg.paths < 2) throw ConfigError("ensemble: paths must be >= 2");
  const ModelParams mp = cfg.model();
  EnsembleOptions opt;
  opt.paths = cfg.paths;
  opt.sim = cfg.simulation();
  opt.threads = cfg.threads;
  opt.window_fraction = cfg.window_fraction;
  const EnsembleSummary sum = run_ensemble(cfg.initial_state(), opt, mp);

  DiagnosticReport rep;
  rep.add(below("abort_fraction", "diffusion defined for all proper times", sum.abort_fraction(),
                cfg.abort_fraction + 1e-12, std::to_string(sum.aborted.size()) + " aborted"));
  Json j = report_envelope(cfg);

  if (sum.records.size() >= 2) {
    rep.append(growth_diagnostics(sum.records, mp, cfg.window_fraction, tol::kStatSigmas));
    rep.append(gamma_growth_test(sum.records, mp, cfg.window_fraction));

    double max_ell = 0.0;
    std::vector<double> cyl;
    for (std::size_t i = 0; i < sum.records.size(); ++i) {
      max_ell = std::max(max_ell, std::abs(sum.estimates[i].ell_hat));
      cyl.push_back(cylinder_diagnostic(sum.records[i], sum.estimates[i], mp, cfg.window_fraction).tail_median_abs);
    }
    rep.add(below("max_abs_ell_hat", "limiting direction lies in the open interval (-1, 1)", max_ell, 1.0));
    rep.add(below("cylinder_tail_median", "paths approach the cylinder of their limiting ray", stats::median(cyl),
                  tol::kCylinderTailMedian, "median over paths of the tail median |residual|"));

    if (cfg.initial == "boundary") {
      const ImpactParameter target{cfg.ell0, cfg.rho0, cfg.Y0};
      const double frac = concentration_fraction(sum.estimates, target, tol::kConcentration);
      rep.add(Diagnostic{"concentration_fraction", "a boundary point is reached from nearby large-velocity starts",
                         frac, tol::kConcentrationFraction, 0.0, frac >= tol::kConcentrationFraction,
                         "fraction of paths within 0.05 of the target in (ell, rho, Y)"});
    }

    if (cfg.check_doubling) {
      EnsembleOptions longer = opt;
      longer.sim.s_max = 2.0 * cfg.s_max;
      longer.keep_records = false;
      const EnsembleSummary sum2 = run_ensemble(cfg.initial_state(), longer, mp);
      if (sum2.indices == sum.indices) {
        const DispersionRatios r = dispersion_ratios(sum.estimates, sum2.estimates);
        const auto shrink = [&](const char* name, double v) {
          rep.add(below(name, "tail dispersion shrinks when the horizon doubles", v, tol::kDispersionShrink + 1e-12,
                        "median ratio long / short"));
        };
        shrink("dispersion_ratio_ell", r.ell);
        shrink("dispersion_ratio_log_rho", r.log_rho);
        shrink("dispersion_ratio_Y", r.Y);
      } else {
        rep.add(Diagnostic{"dispersion_pairing", "tail dispersion shrinks when the horizon doubles", 0.0, 1.0, 0.0,
                           false, "aborted paths differ between horizons"});
      }
    }

    const std::vector<double> edges{0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 10.0};
    const LambdaDriftResult lam = lambda_drift_test(sum.records, mp, edges, 1000, tol::kStatSigmas);
    Json bins = Json::array();
    for (const LambdaBin& b : lam.bins)
      bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}, {"drift", b.drift}, {"drift_se", b.drift_se},
                      {"drift_expected", b.drift_expected}, {"qv", b.qv}, {"qv_se", b.qv_se},
                      {"qv_expected", b.qv_expected}});
    j["lambda_drift"] = {{"bins", bins}, {"diagnostics", to_json(lam.report)}, {"asserted", false}};

    const BoundaryLawSummary law = ensemble_boundary_law(sum.estimates);
    j["boundary_law"] = {{"n", law.n},
                         {"fraction_ell_near_one", law.fraction_ell_near_one},
                         {"max_atom_mass", law.max_atom_mass}};
    ensure_directory(cfg.output_dir);
    write_histogram(join_path(cfg.output_dir, "hist_ell.csv"), law.ell);
    write_histogram(join_path(cfg.output_dir, "hist_log_rho.csv"), law.log_rho);
    write_histogram(join_path(cfg.output_dir, "hist_Y.csv"), law.Y);
    write_svg_plot(join_path(cfg.output_dir, "hist_ell.svg"), "limiting direction", "ell", "count",
                   {histogram_outline("ell_hat", law.ell)});
    write_svg_plot(join_path(cfg.output_dir, "hist_log_rho.svg"), "limiting log rho", "log rho", "count",
                   {histogram_outline("log rho_hat", law.log_rho)});
    write_svg_plot(join_path(cfg.output_dir, "hist_Y.svg"), "limiting Y", "Y", "count",
                   {histogram_outline("Y_hat", law.Y)});
    std::vector<PlotSeries> loga;
    for (std::size_t i = 0; i < std::min<std::size_t>(5, sum.records.size()); ++i)
      loga.push_back(make_series("path " + std::to_string(sum.indices[i]), sum.records[i].s,
                                 series(sum.records[i], Series::kLogA, mp)));
    write_svg_plot(join_path(cfg.output_dir, "log_abs_a.svg"), "log |a| along sample paths", "s", "log |a|", loga);
  } else {
    rep.add(Diagnostic{"surviving_paths", "diffusion defined for all proper times",
                       static_cast<double>(sum.records.size()), 2.0, 0.0, false, "fewer than two paths survived"});
  }

  ensure_directory(cfg.output_dir);
  {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < sum.estimates.size(); ++i) {
      const AsymptoticEstimate& e = sum.estimates[i];
      rows.push_back({static_cast<double>(sum.indices[i]), e.ell_hat, e.rho_hat, e.Y_hat, e.disp_ell, e.disp_log_rho,
                      e.disp_Y});
    }
    write_csv(join_path(cfg.output_dir, "ensemble_estimates.csv"),
              {"path", "ell_hat", "rho_hat", "Y_hat", "disp_ell", "disp_log_rho", "disp_Y"}, rows);
  }
  Json aborted = Json::array();
  for (const AbortedPath& a : sum.aborted) aborted.push_back({{"path", a.index}, {"reason", a.reason}});
  j["paths_configured"] = sum.configured();
  j["paths_completed"] = sum.indices.size();
  j["aborted"] = aborted;
  j["runtime"] = {{"steps", sum.steps},
                  {"retries", sum.retries},
                  {"max_halving_depth", sum.max_depth},
                  {"wall_seconds", sum.wall_seconds},
                  {"threads", sum.threads_used}};
  j["diagnostics"] = to_json(rep);
  j["all_pass"] = rep.all_pass();
  write_json(join_path(cfg.output_dir, "ensemble_summary.json"), j);

  log << "ensemble: " << sum.indices.size() << "/" << sum.configured() << " paths, " << sum.wall_seconds
      << " s on " << sum.threads_used << " threads\n";
  for (const AbortedPath& a : sum.aborted) log << "  aborted path " << a.index << ": " << a.reason << "\n";
  log_report(log, rep);
  return rep.all_pass() ? 0 : 1;
}

int run_demo_transitivity(const RunConfig& cfg, std::ostream& log) {
  const ModelParams mp = cfg.model();
  const SpacetimePoint from{cfg.t0, cfg.x0, cfg.y0, cfg.z0};
  const SpacetimePoint to{cfg.t1, cfg.x1, cfg.y1, cfg.z1};
  ensure_directory(cfg.output_dir);
  Json j = report_envelope(cfg);
  DiagnosticReport rep;
  try {
    const TransitivityResult res = connect_points(from, to, mp);
    Json arcs = Json::array();
    for (const Arc& a : res.arcs) {
      arcs.push_back({{"kind", a.kind == Arc::Kind::kStatic ? "static" : "planar"},
                      {"a", a.gp.a},
                      {"b", a.gp.b},
                      {"c", a.gp.c},
                      {"Y", a.gp.Y},
                      {"k", a.gp.k()},
                      {"proper_time", a.s_end},
                      {"start", {a.start.t, a.start.x, a.start.y, a.start.z}},
                      {"end", {a.end.t, a.end.x, a.end.y, a.end.z}}});
    }
    j["arcs"] = arcs;
    j["subdivisions"] = res.subdivisions;
    j["reached"] = {res.reached.t, res.reached.x, res.reached.y, res.reached.z};
    rep.add(below("endpoint_error", "any two points are joined by a broken timelike geodesic", res.endpoint_error,
                  1e-6));
    log << "demo-transitivity: " << res.arcs.size() << " arcs, " << res.subdivisions << " subdivisions\n";
  } catch (const GridSearchError& e) {
    rep.add(Diagnostic{"grid_search", "any two points are joined by a broken timelike geodesic", 0.0, 1.0, 0.0, false,
                       e.what()});
  }
  j["diagnostics"] = to_json(rep);
  j["all_pass"] = rep.all_pass();
  write_json(join_path(cfg.output_dir, "transitivity_report.json"), j);
  log_report(log, rep);
  return rep.all_pass() ? 0 : 1;
}

int run_scenario(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (cfg.scenario == "verify-geometry") return run_verify_geometry(cfg, log);
  if (cfg.scenario == "geodesic") return run_geodesic(cfg, log);
  if (cfg.scenario == "diffuse") return run_diffuse(cfg, log);
  if (cfg.scenario == "ensemble") return run_ensemble_scenario(cfg, log);
  if (cfg.scenario == "demo-transitivity") return run_demo_transitivity(cfg, log);
  throw ConfigError("unknown scenario '" + cfg.scenario + "'");
}

}  // namespace godel::harness
