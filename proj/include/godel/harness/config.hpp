#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "godel/diffusion.hpp"
#include "godel/types.hpp"

namespace godel::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kOutputDirEnv = "GODEL_OUTPUT_DIR";

/// Flat key = value run configuration. Every field has a key of the same name.
struct RunConfig {
  std::string scenario = "diffuse";
  std::string output_dir = "godel_out";

  double omega = 1.0;
  double sigma = 1.0;
  double s_max = 10.0;
  double ds = 1e-3;
  int stride = 10;
  int paths = 200;
  std::uint64_t seed = 20240601;
  int threads = 0;
  std::string scheme = "splitting";
  double window_fraction = 0.5;
  double abort_fraction = 0.01;
  bool check_doubling = false;

  // initial condition: "state" uses t0..zdot0 + b_branch, "boundary" uses ell0, rho0, Y0, a0
  std::string initial = "state";
  double t0 = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double z0 = 0.0;
  double a0 = 2.0;
  double xdot0 = 0.3;
  double zdot0 = 0.5;
  std::string b_branch = "lower";
  double ell0 = 0.5;
  double rho0 = 1.0;
  double Y0 = 0.0;

  // geometry verification
  int geometry_points = 1000;
  double tol_metric_inverse = 1e-12;
  double tol_christoffel = 1e-6;
  double tol_ricci = 1e-10;
  double tol_einstein = 1e-10;
  double tol_isometry = 1e-8;

  // geodesic scenario: "timelike" from (gp_*) or "lightlike" from (ray_*)
  std::string geodesic_kind = "timelike";
  double gp_a = 1.5;
  double gp_b = 2.0;
  double gp_c = 0.3;
  double gp_Y = 0.0;
  double gp_s0 = 0.0;
  double gp_T0 = 0.0;
  double gp_Z0 = 0.0;
  double ray_ell = 0.5;
  double ray_rho = 1.0;
  double ray_Y = 0.0;
  double span = 0.0;  ///< proper-time / affine span; 0 selects 20/(|a| ω) or 1000
  int samples = 2000;

  // transitivity demo target; source is (t0, x0, y0, z0)
  double t1 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
  double z1 = 0.0;

  void validate() const;
  ModelParams model() const { return {omega, sigma}; }
  SimulationConfig simulation(std::uint64_t stream = 0) const;
  StepScheme step_scheme() const;
  ReducedState initial_state() const;
};

RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});
/// Applies one "key=value" override.
void apply_override(RunConfig& cfg, const std::string& assignment);
void set_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::string serialize(const RunConfig& cfg);
/// FNV-1a 64-bit hash of the serialized config, hex encoded.
std::string config_hash(const RunConfig& cfg);
/// Applies the output-directory environment override, if set.
void apply_environment(RunConfig& cfg);

}  // namespace godel::harness
