#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace godel {

using Matrix4 = Eigen::Matrix4d;
using Vector4 = Eigen::Vector4d;

/// Gamma[k](i, j) = Γ^k_{ij}, index order (t, x, y, z) = (0, 1, 2, 3).
using Christoffel = std::array<Matrix4, 4>;

struct ModelParams {
  double omega = 1.0;
  double sigma = 1.0;

  void validate() const;
};

struct SpacetimePoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vector4 as_vector() const { return {t, x, y, z}; }
  static SpacetimePoint from_vector(const Vector4& v) { return {v(0), v(1), v(2), v(3)}; }
  bool finite() const;
};

struct RotationalPoint {
  double u = 0.0;
  double r = 0.0;
  double phi = 0.0;
  double z = 0.0;
};

/// Point plus proper-time (or affine) velocity (ṫ, ẋ, ẏ, ż).
struct PhaseState {
  SpacetimePoint point;
  Vector4 velocity = Vector4::Zero();
};

/// Light-ray label (ℓ, ϱ, Y).
struct ImpactParameter {
  double ell = 0.0;
  double rho = 1.0;
  double Y = 0.0;

  void validate() const;
};

class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ChartDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class OffShellError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DegenerateAngleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace godel
