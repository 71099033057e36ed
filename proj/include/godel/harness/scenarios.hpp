#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "godel/asymptotics.hpp"
#include "godel/geodesics.hpp"
#include "godel/harness/config.hpp"

namespace godel::harness {

struct GeometryCheckOptions {
  int points = 1000;
  std::vector<double> omegas{1.0};
  double x_range = 3.0;
  std::uint64_t seed = 1;
  double tol_metric_inverse = 1e-12;
  double tol_christoffel = 1e-6;
  double tol_ricci = 1e-10;
  double tol_curvature = 1e-10;
  double tol_einstein = 1e-10;
  double tol_chart = 1e-10;
  double tol_isometry = 1e-8;
};

/// Random-point checks of every geometric identity, one diagnostic per (check, ω).
DiagnosticReport geometry_checks(const GeometryCheckOptions& opt);

/// Christoffel symbols from central differences of the metric in x.
Christoffel christoffel_finite_difference(const SpacetimePoint& p, const ModelParams& mp, double h);

struct GeodesicComparison {
  std::vector<double> s;
  std::vector<PhaseState> closed_form;
  std::vector<PhaseState> ode;
  std::vector<double> deviation;        ///< max coordinate deviation per sample
  std::vector<double> orbit_residual;   ///< timelike only
  std::vector<double> cylinder;         ///< lightlike only
  double max_deviation = 0.0;
  double max_conserved_drift = 0.0;
  double max_orbit_residual = 0.0;
  double max_cylinder = 0.0;
};

/// Closed form vs RK4 over [0, span] at `samples` points; RK4 takes `substeps` steps per sample.
GeodesicComparison compare_timelike(const GeodesicParams& gp, double span, int samples, int substeps,
                                    const ModelParams& mp);
GeodesicComparison compare_lightlike(const ImpactParameter& B, double span, int samples, int substeps,
                                     const ModelParams& mp);

int run_verify_geometry(const RunConfig& cfg, std::ostream& log);
int run_geodesic(const RunConfig& cfg, std::ostream& log);
int run_diffuse(const RunConfig& cfg, std::ostream& log);
int run_ensemble_scenario(const RunConfig& cfg, std::ostream& log);
int run_demo_transitivity(const RunConfig& cfg, std::ostream& log);

/// Dispatches on cfg.scenario. Returns 0 on pass, 1 on a failed diagnostic.
int run_scenario(const RunConfig& cfg, std::ostream& log);

}  // namespace godel::harness
