#pragma once

#include <span>
#include <string>
#include <vector>

#include "godel/diffusion.hpp"
#include "godel/stats.hpp"

namespace godel {

struct AsymptoticEstimate {
  double ell_hat = 0.0;
  double rho_hat = 1.0;
  double Y_hat = 0.0;
  double s_lo = 0.0;
  double s_hi = 0.0;
  double disp_ell = 0.0;
  double disp_log_rho = 0.0;
  double disp_Y = 0.0;

  ImpactParameter boundary() const { return {ell_hat, rho_hat, Y_hat}; }
};

struct Diagnostic {
  std::string name;
  std::string anchor;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct DiagnosticReport {
  std::vector<Diagnostic> items;

  bool all_pass() const;
  void add(Diagnostic d) { items.push_back(std::move(d)); }
  void append(const DiagnosticReport& other);
};

/// Builds a record from exact phase-space samples (e.g. a light ray), for the estimators.
PathRecord path_from_phase_states(const std::vector<PhaseState>& states,
                                  const std::vector<double>& s, const ModelParams& mp);

std::size_t tail_begin(const PathRecord& path, double window_fraction);

AsymptoticEstimate estimate_boundary(const PathRecord& path, const ModelParams& mp,
                                     double window_fraction = 0.5, std::size_t min_samples = 100);
/// Estimate from the last sample only.
AsymptoticEstimate terminal_estimate(const PathRecord& path, const ModelParams& mp);

struct CylinderSeries {
  std::vector<double> values;
  double tail_median_abs = 0.0;
};

CylinderSeries cylinder_diagnostic(const PathRecord& path, const AsymptoticEstimate& est,
                                   const ModelParams& mp, double window_fraction = 0.5);

struct GrowthSlopes {
  stats::LinearFit log_a;
  stats::LinearFit log_b;
  stats::LinearFit log_zdot;
  stats::LinearFit log_z;
};

GrowthSlopes growth_slopes(const PathRecord& path, const ModelParams& mp,
                           double window_fraction = 0.5);
/// Ensemble mean of the per-path tail slopes against σ², within n_se standard errors.
DiagnosticReport growth_diagnostics(std::span<const PathRecord> paths, const ModelParams& mp,
                                    double window_fraction = 0.5,
                                    double n_se = 3.0);

struct LambdaBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double drift = 0.0;
  double drift_se = 0.0;
  double drift_expected = 0.0;
  double qv = 0.0;
  double qv_se = 0.0;
  double qv_expected = 0.0;
};

struct LambdaDriftResult {
  std::vector<LambdaBin> bins;
  DiagnosticReport report;
};

LambdaDriftResult lambda_drift_test(std::span<const PathRecord> paths, const ModelParams& mp,
                                    const std::vector<double>& edges, std::size_t min_count = 1000,
                                    double n_se = 3.0);

struct GammaGrowth {
  double remainder_tail_median_increment = 0.0;
  double log_gamma_slope = 0.0;
  int tail_sign = 0;
  int b0_sign = 0;
};

GammaGrowth gamma_growth(const PathRecord& path, const ModelParams& mp,
                         double window_fraction = 0.5);
DiagnosticReport gamma_growth_test(std::span<const PathRecord> paths, const ModelParams& mp,
                                   double window_fraction = 0.5);

/// |x_s - x̄(γ_s)| + |y_s - ȳ(γ_s)| against the light ray labelled by est.
std::vector<double> ray_tracking_residual(const PathRecord& path, const AsymptoticEstimate& est,
                                          const ModelParams& mp);

struct Histogram1D {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;
};

struct BoundaryLawSummary {
  std::size_t n = 0;
  Histogram1D ell;
  Histogram1D log_rho;
  Histogram1D Y;
  std::vector<std::size_t> joint;  ///< bins^3 cells, ℓ-major
  int joint_bins = 0;
  double fraction_ell_near_one = 0.0;
  double max_atom_mass = 0.0;
};

BoundaryLawSummary ensemble_boundary_law(std::span<const AsymptoticEstimate> est, int bins = 20);

double concentration_fraction(std::span<const AsymptoticEstimate> est, const ImpactParameter& target,
                              double eps);

struct DispersionRatios {
  double ell = 0.0;
  double log_rho = 0.0;
  double Y = 0.0;
};

/// Median over paths of tail dispersion(long run) / tail dispersion(short run).
DispersionRatios dispersion_ratios(std::span<const AsymptoticEstimate> short_run,
                                   std::span<const AsymptoticEstimate> long_run);

}  // namespace godel
