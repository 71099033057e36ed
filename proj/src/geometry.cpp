#include "godel/geometry.hpp"

#include <cmath>

#include "godel/constants.hpp"

namespace godel {

void ModelParams::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidParameter("omega must be finite and > 0");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidParameter("sigma must be finite and >= 0");
}

bool SpacetimePoint::finite() const {
  return std::isfinite(t) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

void ImpactParameter::validate() const {
  if (!(ell >= -1.0 && ell <= 1.0)) throw InvalidParameter("impact parameter: ell must lie in [-1, 1]");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidParameter("impact parameter: rho must be > 0");
  if (!std::isfinite(Y)) throw InvalidParameter("impact parameter: Y must be finite");
}

namespace {

double growth(const SpacetimePoint& p, const ModelParams& mp) {
  return std::exp(kSqrt2 * mp.omega * p.x);
}

}  // namespace

Matrix4 metric_at(const SpacetimePoint& p, const ModelParams& mp) {
  const double e = growth(p, mp);
  Matrix4 g = Matrix4::Zero();
  g(0, 0) = 1.0;
  g(1, 1) = -1.0;
  g(3, 3) = -1.0;
  g(2, 2) = 0.5 * e * e;
  g(0, 2) = g(2, 0) = e;
  return g;
}

Matrix4 inverse_metric_at(const SpacetimePoint& p, const ModelParams& mp) {
  const double ei = std::exp(-kSqrt2 * mp.omega * p.x);
  Matrix4 h = Matrix4::Zero();
  h(0, 0) = -1.0;
  h(1, 1) = -1.0;
  h(3, 3) = -1.0;
  h(2, 2) = -2.0 * ei * ei;
  h(0, 2) = h(2, 0) = 2.0 * ei;
  return h;
}

Christoffel christoffel_at(const SpacetimePoint& p, const ModelParams& mp) {
  const double w = mp.omega;
  const double e = growth(p, mp);
  Christoffel G;
  for (auto& m : G) m.setZero();
  G[0](1, 2) = G[0](2, 1) = w / kSqrt2 * e;
  G[0](0, 1) = G[0](1, 0) = kSqrt2 * w;
  G[1](0, 2) = G[1](2, 0) = w / kSqrt2 * e;
  G[1](2, 2) = w / kSqrt2 * e * e;
  G[2](0, 1) = G[2](1, 0) = -kSqrt2 * w / e;
  return G;
}

Christoffel christoffel_dx_at(const SpacetimePoint& p, const ModelParams& mp) {
  const double k = kSqrt2 * mp.omega;
  Christoffel G = christoffel_at(p, mp);
  G[0](0, 1) = G[0](1, 0) = 0.0;
  G[0](1, 2) *= k;
  G[0](2, 1) *= k;
  G[1](0, 2) *= k;
  G[1](2, 0) *= k;
  G[1](2, 2) *= 2.0 * k;
  G[2](0, 1) *= -k;
  G[2](1, 0) *= -k;
  return G;
}

Matrix4 ricci_at(const SpacetimePoint& p, const ModelParams& mp) {
  const Christoffel G = christoffel_at(p, mp);
  const Christoffel dG = christoffel_dx_at(p, mp);
  Matrix4 R = Matrix4::Zero();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      double v = dG[1](i, j);
      if (j == 1) {
        for (int k = 0; k < 4; ++k) v -= dG[k](i, k);
      }
      for (int k = 0; k < 4; ++k) {
        for (int l = 0; l < 4; ++l) {
          v += G[k](k, l) * G[l](i, j) - G[k](j, l) * G[l](i, k);
        }
      }
      R(i, j) = v;
    }
  }
  return R;
}

double scalar_curvature(const SpacetimePoint& p, const ModelParams& mp) {
  return (inverse_metric_at(p, mp).cwiseProduct(ricci_at(p, mp))).sum();
}

Vector4 dust_covelocity(const SpacetimePoint& p, const ModelParams& mp) {
  const double c = kSqrt2 * mp.omega;
  return {c, 0.0, c * growth(p, mp), 0.0};
}

double cosmological_constant(const ModelParams& mp) { return mp.omega * mp.omega; }

Matrix4 einstein_residual(const SpacetimePoint& p, const ModelParams& mp) {
  const Matrix4 g = metric_at(p, mp);
  const Vector4 u = dust_covelocity(p, mp);
  const double R = scalar_curvature(p, mp);
  return ricci_at(p, mp) - 0.5 * R * g + cosmological_constant(mp) * g - u * u.transpose();
}

double pseudo_norm(const PhaseState& state, const ModelParams& mp) {
  const Vector4& v = state.velocity;
  return v.dot(metric_at(state.point, mp) * v);
}

double energy(const PhaseState& state, const ModelParams& mp) {
  const double a = state.velocity(0) + growth(state.point, mp) * state.velocity(2);
  return 2.0 * mp.omega * mp.omega * a * a;
}

namespace {

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

/// Offset angle δ(r, θ) with t = u - 2δ/ω; lies in (-π/2, π/2).
double chart_offset(double r, double theta) {
  const double k = std::exp(-2.0 * r);
  const double s = std::sin(0.5 * theta);
  const double c = std::cos(0.5 * theta);
  return std::atan2((1.0 - k) * std::sin(theta) * 0.5, c * c + k * s * s);
}

/// E = ch2r + sh2r cos θ and E - 1, summed without cancellation.
struct ChartGrowth {
  double e;
  double em1;
  double de_dr;       // 2 sh2r + 2 ch2r cos θ
  double ch_cos_sh;   // ch2r cos θ + sh2r
};

ChartGrowth chart_growth(double r, double theta) {
  const double sh = std::sinh(r);
  const double sh2 = std::sinh(2.0 * r);
  const double ch2 = std::cosh(2.0 * r);
  const double c = std::cos(theta);
  ChartGrowth g;
  if (c >= 0.0) {
    g.em1 = 2.0 * sh * sh + sh2 * c;
    g.e = 1.0 + g.em1;
    g.de_dr = 2.0 * sh2 + 2.0 * ch2 * c;
    g.ch_cos_sh = ch2 * c + sh2;
  } else {
    const double ch_half = std::cos(0.5 * theta);
    const double lift = 2.0 * ch_half * ch_half;  // 1 + cos θ
    g.e = std::exp(-2.0 * r) + sh2 * lift;
    g.em1 = std::expm1(-2.0 * r) + sh2 * lift;
    g.de_dr = -2.0 * std::exp(-2.0 * r) + 2.0 * ch2 * lift;
    g.ch_cos_sh = -std::exp(-2.0 * r) + ch2 * lift;
  }
  return g;
}

}  // namespace

SpacetimePoint from_rotational(const RotationalPoint& q, const ModelParams& mp) {
  if (!(q.r >= 0.0) || !std::isfinite(q.r) || !std::isfinite(q.u) || !std::isfinite(q.phi) ||
      !std::isfinite(q.z)) {
    throw ChartDomainError("rotational chart: need finite coordinates with r >= 0");
  }
  const double w = mp.omega;
  const double theta = wrap_angle(w * q.phi);
  const double sh2 = std::sinh(2.0 * q.r);
  const ChartGrowth g = chart_growth(q.r, theta);
  SpacetimePoint p;
  p.x = std::log1p(g.em1) / (kSqrt2 * w);
  p.y = sh2 * std::sin(theta) / (w * g.e);
  p.t = q.u - 2.0 / w * chart_offset(q.r, theta);
  p.z = q.z;
  return p;
}

RotationalPoint to_rotational(const SpacetimePoint& p, const ModelParams& mp) {
  if (!p.finite()) throw ChartDomainError("rotational chart: non-finite point");
  const double w = mp.omega;
  const double e = std::exp(kSqrt2 * w * p.x);
  const double em1 = std::expm1(kSqrt2 * w * p.x);
  const double e2m1 = std::expm1(2.0 * kSqrt2 * w * p.x);
  const double wye = w * p.y * e;
  const double ch2_minus_1 = (em1 * em1 + wye * wye) / (2.0 * e);
  const double sh2 = std::sqrt(ch2_minus_1 * (ch2_minus_1 + 2.0));
  RotationalPoint q;
  q.r = 0.5 * std::asinh(sh2);
  const double theta = (sh2 == 0.0) ? 0.0 : std::atan2(wye, (e2m1 - wye * wye) / (2.0 * e));
  q.phi = theta / w;
  q.u = p.t + 2.0 / w * chart_offset(q.r, theta);
  q.z = p.z;
  return q;
}

Matrix4 from_rotational_jacobian(const RotationalPoint& q, const ModelParams& mp) {
  const double w = mp.omega;
  const double th = wrap_angle(w * q.phi);
  const double sh2 = std::sinh(2.0 * q.r);
  const double cth = std::cos(th);
  const double sth = std::sin(th);
  const ChartGrowth g = chart_growth(q.r, th);
  const double e = g.e;
  const double de_dr = g.de_dr;
  const double de_dth = -sh2 * sth;

  const double k = std::exp(-2.0 * q.r);
  const double sh = std::sin(0.5 * th);
  const double chh = std::cos(0.5 * th);
  const double N = 0.5 * (1.0 - k) * sth;
  const double D = chh * chh + k * sh * sh;
  const double dN_dr = k * sth;
  const double dN_dth = 0.5 * (1.0 - k) * cth;
  const double dD_dr = -2.0 * k * sh * sh;
  const double dD_dth = -0.5 * (1.0 - k) * sth;
  const double nd = N * N + D * D;
  const double ddelta_dr = (D * dN_dr - N * dD_dr) / nd;
  const double ddelta_dth = (D * dN_dth - N * dD_dth) / nd;

  Matrix4 J = Matrix4::Zero();
  J(0, 0) = 1.0;
  J(0, 1) = -2.0 / w * ddelta_dr;
  J(0, 2) = -2.0 * ddelta_dth;
  J(1, 1) = de_dr / (kSqrt2 * w * e);
  J(1, 2) = de_dth / (kSqrt2 * e);
  J(2, 1) = 2.0 * sth / (w * e * e);
  J(2, 2) = sh2 * g.ch_cos_sh / (e * e);
  J(3, 3) = 1.0;
  return J;
}

Matrix4 rotational_metric_at(const RotationalPoint& q, const ModelParams& mp) {
  const double w = mp.omega;
  const double shr = std::sinh(q.r);
  const double sh2 = std::sinh(2.0 * q.r);
  const double m = 2.0 * shr * shr;
  Matrix4 g = Matrix4::Zero();
  g(0, 0) = 1.0;
  g(0, 2) = g(2, 0) = m;
  g(2, 2) = m * m - 0.5 * sh2 * sh2;
  g(1, 1) = -2.0 / (w * w);
  g(3, 3) = -1.0;
  return g;
}

IsometryElement IsometryElement::translation(double t0, double y0, double z0) {
  IsometryElement g;
  g.kind = Kind::kTranslation;
  g.t0 = t0;
  g.y0 = y0;
  g.z0 = z0;
  return g;
}

IsometryElement IsometryElement::dilatation(double x0) {
  IsometryElement g;
  g.kind = Kind::kDilatation;
  g.x0 = x0;
  return g;
}

IsometryElement IsometryElement::rotation(double phi0) {
  IsometryElement g;
  g.kind = Kind::kRotation;
  g.phi0 = phi0;
  return g;
}

SpacetimePoint apply_isometry_point(const IsometryElement& g, const SpacetimePoint& p,
                                    const ModelParams& mp) {
  switch (g.kind) {
    case IsometryElement::Kind::kTranslation:
      return {p.t + g.t0, p.x, p.y + g.y0, p.z + g.z0};
    case IsometryElement::Kind::kDilatation:
      return {p.t, p.x + g.x0, p.y * std::exp(-kSqrt2 * mp.omega * g.x0), p.z};
    case IsometryElement::Kind::kRotation: {
      RotationalPoint q = to_rotational(p, mp);
      q.phi += g.phi0;
      return from_rotational(q, mp);
    }
  }
  return p;
}

Matrix4 isometry_jacobian(const IsometryElement& g, const SpacetimePoint& p, const ModelParams& mp) {
  Matrix4 J = Matrix4::Identity();
  switch (g.kind) {
    case IsometryElement::Kind::kTranslation:
      break;
    case IsometryElement::Kind::kDilatation:
      J(2, 2) = std::exp(-kSqrt2 * mp.omega * g.x0);
      break;
    case IsometryElement::Kind::kRotation: {
      const RotationalPoint q = to_rotational(p, mp);
      RotationalPoint q2 = q;
      q2.phi += g.phi0;
      const Matrix4 J1 = from_rotational_jacobian(q, mp);
      const Matrix4 J2 = from_rotational_jacobian(q2, mp);
      J = J2 * J1.fullPivLu().inverse();
      break;
    }
  }
  return J;
}

PhaseState apply_isometry_state(const IsometryElement& g, const PhaseState& state,
                                const ModelParams& mp) {
  PhaseState out;
  out.point = apply_isometry_point(g, state.point, mp);
  out.velocity = isometry_jacobian(g, state.point, mp) * state.velocity;
  return out;
}

double boundary_alpha(const ImpactParameter& B, const ModelParams& mp) {
  const double wy = mp.omega * B.Y;
  return 0.5 * B.rho * (1.0 + wy * wy) + (1.0 + B.ell * B.ell) / B.rho;
}

ImpactParameter apply_isometry_boundary(const IsometryElement& g, const ImpactParameter& B,
                                        const ModelParams& mp) {
  B.validate();
  ImpactParameter out = B;
  switch (g.kind) {
    case IsometryElement::Kind::kTranslation:
      out.Y = B.Y + g.y0;
      break;
    case IsometryElement::Kind::kDilatation: {
      const double f = std::exp(kSqrt2 * mp.omega * g.x0);
      out.rho = B.rho * f;
      out.Y = B.Y / f;
      break;
    }
    case IsometryElement::Kind::kRotation: {
      const double w = mp.omega;
      const double alpha = boundary_alpha(B, mp);
      const double c = std::cos(w * g.phi0);
      const double s = std::sin(w * g.phi0);
      const double dr = B.rho - alpha;
      const double wz = w * B.rho * B.Y;
      out.rho = alpha + dr * c - wz * s;
      out.Y = (wz * c + dr * s) / (w * out.rho);
      break;
    }
  }
  return out;
}

}  // namespace godel
