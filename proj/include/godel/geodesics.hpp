#pragma once

#include <vector>

#include "godel/types.hpp"

namespace godel {

enum class GeodesicKind { kTimelike, kLightlike };

/// Conserved quantities (a, b, c, Y) plus affine anchors.
/// Timelike: t_s = T0 - a(s - s0) + 2ψ/ω, z_s = Z0 + c(s - s0).
struct GeodesicParams {
  double a = 1.0;
  double b = 2.0;
  double c = 0.0;
  double Y = 0.0;
  GeodesicKind kind = GeodesicKind::kTimelike;
  double s0 = 0.0;
  double T0 = 0.0;
  double Z0 = 0.0;
  /// Eccentricity taken from a velocity, where it is a sum of squares; negative means
  /// derive it from (a, c).
  double eccentricity = -1.0;

  /// Orbit eccentricity k = sqrt(a² - 1 - c²) / (sqrt2 |a|), timelike only.
  double k() const;
  /// True when the curve runs backward in t (a < 0).
  bool reversed() const { return a < 0.0; }
  void validate() const;
};

double timelike_k(double a, double c);

GeodesicParams conserved_from_state(const PhaseState& state, const ModelParams& mp,
                                    double norm_tol = 1e-8);

PhaseState timelike_eval(const GeodesicParams& gp, double s, const ModelParams& mp);
PhaseState lightlike_eval(const ImpactParameter& B, double T0, double Z0, double tau,
                          const ModelParams& mp);

/// Continuous solution ψ(θ) of tan ψ = K tan θ + k with ψ(0) = atan(k).
double unwound_phase(double theta, double k, double K);
/// Inverse branch: θ(ψ) for the same relation.
double phase_from_unwound(double psi, double k, double K);

/// Proper-time period of the (x, y) projection, π / (|a| ω sqrt(1 - k²)).
double planar_period(const GeodesicParams& gp, const ModelParams& mp);
/// Predicted |t_{s + n T} - t_s| for the planar period T.
double return_time_gap(const GeodesicParams& gp, int n, const ModelParams& mp);

/// Geodesic equation: second derivatives (ẗ, ẍ, ÿ, z̈).
Vector4 geodesic_acceleration(const PhaseState& state, const ModelParams& mp);

struct OdePath {
  std::vector<double> s;
  std::vector<PhaseState> states;
  double drift_a = 0.0;
  double drift_b = 0.0;
  double drift_c = 0.0;
  double drift_Y = 0.0;
  double drift_norm = 0.0;

  double max_conserved_drift() const;
};

OdePath ode_integrate(const PhaseState& state, double s_max, double step, const ModelParams& mp,
                      int record_stride = 1);

ImpactParameter impact_parameter(const GeodesicParams& gp);

/// [ϱ/2 e^{-√2ωx} - 1]² + [ωϱ/2 (y - Y)]².
double cylinder_value(const SpacetimePoint& p, const ImpactParameter& B, const ModelParams& mp);
/// Orbit relation residual [b/(2a) e^{-√2ωx} - 1]² + [ωb/(2a)(y - Y)]² - k².
double orbit_relation_residual(const GeodesicParams& gp, const SpacetimePoint& p,
                               const ModelParams& mp);

struct RayResiduals {
  std::vector<double> ell;
  std::vector<double> rho;
  std::vector<double> Y;
  std::vector<double> cylinder;
};

RayResiduals ray_convergence_residuals(const std::vector<PhaseState>& path,
                                       const ImpactParameter& B, const ModelParams& mp);

/// Asymptotic z/t slope of a light ray with direction ℓ.
double light_ray_slope(double ell);

}  // namespace godel
