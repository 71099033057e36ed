#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "godel/geometry.hpp"
#include "godel/rng.hpp"
#include "godel/types.hpp"

namespace godel {

using Vector8 = Eigen::Matrix<double, 8, 1>;
using Matrix43 = Eigen::Matrix<double, 4, 3>;

/// Diffusion state in reduced coordinates: position, the conserved-along-geodesics
/// pair (a, b), the velocities ẋ and ż, and proper time s.
struct ReducedState {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double a = 1.0;
  double b = 2.0;
  double xdot = 0.0;
  double zdot = 0.0;
  double s = 0.0;

  /// (a, b, ẋ, ż), the order used by the covariation matrix.
  Vector4 fiber() const { return {a, b, xdot, zdot}; }
  void set_fiber(const Vector4& v) {
    a = v(0);
    b = v(1);
    xdot = v(2);
    zdot = v(3);
  }
};

struct PolarState {
  double A = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
};

double shrink_factor(const ReducedState& st, const ModelParams& mp);  // e^{-√2ωx}
double tdot(const ReducedState& st, const ModelParams& mp);
double ydot(const ReducedState& st, const ModelParams& mp);
double asymptotic_Y(const ReducedState& st, const ModelParams& mp);

PhaseState to_phase_state(const ReducedState& st, const ModelParams& mp);
ReducedState reduce_state(const PhaseState& ps, const ModelParams& mp, double s = 0.0);

/// a² - 1 - ẋ² - ż² - ½(2a - e^{-√2ωx} b)², zero on the unit shell.
double shell_residual(const ReducedState& st, const ModelParams& mp);
double shell_relative_residual(const ReducedState& st, const ModelParams& mp);
/// Gradient of shell_residual in (a, b, ẋ, ż).
Vector4 shell_gradient(const ReducedState& st, const ModelParams& mp);

/// Builds an on-shell state, solving for b; upper selects the larger root.
ReducedState make_shell_state(double t, double x, double y, double z, double a, double xdot,
                              double zdot, bool upper, const ModelParams& mp);
/// On-shell state with ż/a = ell, b/a = rho, asymptotic Y = Y and ẋ = 0.
ReducedState state_from_boundary_target(const ImpactParameter& target, double a0,
                                        const ModelParams& mp);

Vector8 generator_drift(const ReducedState& st, const ModelParams& mp);
Matrix4 covariation_matrix(const ReducedState& st, const ModelParams& mp);

enum class NoiseChart { kZdotChart, kXdotChart, kSpectral };

struct NoiseFactor {
  Matrix43 sigma;  ///< rows (a, b, ẋ, ż); sigma * sigma^T = covariation_matrix
  NoiseChart chart = NoiseChart::kZdotChart;
};

NoiseFactor noise_factorization(const ReducedState& st, const ModelParams& mp);

/// Restores the shell by rescaling (ẋ, 2a - e^{-√2ωx}b) with x, a, ż and positions held fixed.
ReducedState project_to_shell(const ReducedState& st, const ModelParams& mp);

/// Principal-branch γ for the pair (cos γ, sin γ) = (ẋ/(aA), (2 - e^{-√2ωx}b/a)/(√2A)).
double principal_gamma(const ReducedState& st, const ModelParams& mp);
PolarState to_polar(const ReducedState& st, double prev_gamma, const ModelParams& mp);

/// Exact geodesic flow over proper time h; returns the increment of γ.
double geodesic_flow(ReducedState& st, double h, const ModelParams& mp);

enum class StepScheme {
  kGeodesicSplitting,  ///< exact geodesic flow + Euler-Maruyama fiber noise
  kEulerMaruyama,      ///< plain Euler-Maruyama with pre-step velocities
};

struct StepResult {
  ReducedState state;
  double dgamma_flow = 0.0;
  double dgamma_noise = 0.0;
  double phase_integral = 0.0;  ///< ω ∫ e^{-√2ωx} b ds over the step
  double pre_projection_residual = 0.0;
  bool ok = false;
  std::string failure;
};

/// One step with a given Brownian increment dW (already scaled by sqrt(ds)).
StepResult step(const ReducedState& st, double ds, const Eigen::Vector3d& dW, const ModelParams& mp,
                StepScheme scheme = StepScheme::kGeodesicSplitting);

struct StepStats {
  long steps = 0;
  long retries = 0;
  int max_depth = 0;
  double max_noise_gamma_jump = 0.0;
  double max_pre_projection_residual = 0.0;
};

struct SimulationConfig {
  double s_max = 10.0;
  double ds = 1e-3;
  int stride = 10;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  StepScheme scheme = StepScheme::kGeodesicSplitting;

  void validate() const;
};

struct PathRecord {
  std::vector<double> s;
  std::vector<ReducedState> states;
  std::vector<double> gamma;           ///< unwound angle
  std::vector<double> phase_integral;  ///< ω ∫_0^s e^{-√2ωx} b du
  StepStats stats;
  bool aborted = false;
  std::string abort_reason;

  std::size_t size() const { return s.size(); }
};

PathRecord simulate_path(const ReducedState& initial, const SimulationConfig& cfg,
                         const ModelParams& mp);

enum class Series {
  kShellResidual,
  kZdotOverA,
  kBOverA,
  kLogBOverA,
  kYs,
  kRunningCylinder,
  kLogA,
  kLogB,
  kLogZdot,
  kLogZ,
  kLambda,
  kGamma,
  kPolarA,
  kPhaseIntegral,
};

std::vector<double> series(const PathRecord& path, Series which, const ModelParams& mp);
PolarState polar_at(const PathRecord& path, std::size_t i, const ModelParams& mp);

/// Applies an isometry to every sample of a path (velocities pushed forward).
PathRecord transform_path(const PathRecord& path, const IsometryElement& g, const ModelParams& mp);

enum class SubDiffusion { kA, kZdot, kAZdot, kXXdotAB };

struct SubPath {
  std::vector<double> s;
  std::vector<ReducedState> states;
  long retries = 0;
  bool aborted = false;
};

/// Closed sub-diffusions obtained by dropping the complementary coordinates.
SubPath simulate_subdiffusion(SubDiffusion kind, const ReducedState& initial,
                              const SimulationConfig& cfg, const ModelParams& mp);

}  // namespace godel
