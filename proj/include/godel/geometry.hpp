#pragma once

#include "godel/types.hpp"

namespace godel {

Matrix4 metric_at(const SpacetimePoint& p, const ModelParams& mp);
Matrix4 inverse_metric_at(const SpacetimePoint& p, const ModelParams& mp);

Christoffel christoffel_at(const SpacetimePoint& p, const ModelParams& mp);
/// x-derivative of every Christoffel symbol; the only coordinate they depend on.
Christoffel christoffel_dx_at(const SpacetimePoint& p, const ModelParams& mp);

Matrix4 ricci_at(const SpacetimePoint& p, const ModelParams& mp);
double scalar_curvature(const SpacetimePoint& p, const ModelParams& mp);

/// Covariant velocity of the dust source, u_i.
Vector4 dust_covelocity(const SpacetimePoint& p, const ModelParams& mp);
double cosmological_constant(const ModelParams& mp);
/// R_ij - R g_ij / 2 + Λ g_ij - u_i u_j.
Matrix4 einstein_residual(const SpacetimePoint& p, const ModelParams& mp);

double pseudo_norm(const PhaseState& state, const ModelParams& mp);
double energy(const PhaseState& state, const ModelParams& mp);

RotationalPoint to_rotational(const SpacetimePoint& p, const ModelParams& mp);
SpacetimePoint from_rotational(const RotationalPoint& q, const ModelParams& mp);
/// Columns are the partial derivatives of (t, x, y, z) with respect to (u, r, φ, z).
Matrix4 from_rotational_jacobian(const RotationalPoint& q, const ModelParams& mp);
/// Line element in (u, r, φ, z): (du + 2 sh²r dφ)² - 2 dr²/ω² - sh²(2r) dφ²/2 - dz².
Matrix4 rotational_metric_at(const RotationalPoint& q, const ModelParams& mp);

struct IsometryElement {
  enum class Kind { kTranslation, kDilatation, kRotation };

  Kind kind = Kind::kTranslation;
  double t0 = 0.0;
  double y0 = 0.0;
  double z0 = 0.0;
  double x0 = 0.0;
  double phi0 = 0.0;

  static IsometryElement translation(double t0, double y0, double z0);
  static IsometryElement dilatation(double x0);
  static IsometryElement rotation(double phi0);
};

SpacetimePoint apply_isometry_point(const IsometryElement& g, const SpacetimePoint& p,
                                    const ModelParams& mp);
/// Differential of the isometry at p.
Matrix4 isometry_jacobian(const IsometryElement& g, const SpacetimePoint& p, const ModelParams& mp);
PhaseState apply_isometry_state(const IsometryElement& g, const PhaseState& state,
                                const ModelParams& mp);

/// Rotation invariant of a light ray, (ϱ/2)(1 + ω²Y²) + (1 + ℓ²)/ϱ.
double boundary_alpha(const ImpactParameter& B, const ModelParams& mp);
ImpactParameter apply_isometry_boundary(const IsometryElement& g, const ImpactParameter& B,
                                        const ModelParams& mp);

}  // namespace godel
