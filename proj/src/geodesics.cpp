#include "godel/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "godel/constants.hpp"
#include "godel/geometry.hpp"

namespace godel {

namespace {

double wrap_pi(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

struct Orbit {
  double a, b, c, Y, k, K;
};

/// Evaluates the forward (a > 0) timelike geodesic at phase θ = aωK(s - s0).
PhaseState eval_forward(const Orbit& o, double s_rel, double T0, double Z0, const ModelParams& mp) {
  const double w = mp.omega;
  const double theta = o.a * w * o.K * s_rel;
  const double psi = unwound_phase(theta, o.k, o.K);
  const double s2 = std::sin(2.0 * psi);
  const double c2 = std::cos(2.0 * psi);
  const double emx = 2.0 * o.a / o.b * (1.0 - o.k * s2);
  PhaseState st;
  st.point.x = -std::log(emx) / (kSqrt2 * w);
  st.point.y = o.Y - 2.0 * o.a * o.k / (o.b * w) * c2;
  st.point.t = T0 - o.a * s_rel + 2.0 / w * psi;
  st.point.z = Z0 + o.c * s_rel;
  st.velocity(0) = o.b * emx - o.a;
  st.velocity(1) = kSqrt2 * o.a * o.k * c2;
  st.velocity(2) = 2.0 * o.a * emx - o.b * emx * emx;
  st.velocity(3) = o.c;
  return st;
}

GeodesicParams through_forward(const PhaseState& st, const ModelParams& mp) {
  const double w = mp.omega;
  const double e = std::exp(kSqrt2 * w * st.point.x);
  const double emx = 1.0 / e;
  const Vector4& v = st.velocity;
  GeodesicParams gp;
  gp.kind = GeodesicKind::kTimelike;
  gp.a = v(0) + e * v(2);
  gp.b = e * (2.0 * v(0) + e * v(2));
  gp.c = v(3);
  gp.Y = kSqrt2 * v(1) / (w * gp.b) + st.point.y;
  const double q = gp.a - 0.5 * emx * gp.b;
  gp.eccentricity = std::min(std::sqrt(0.5 * v(1) * v(1) + q * q) / (std::abs(gp.a)), 1.0 / kSqrt2);
  const double k = gp.k();
  const double K = std::sqrt(1.0 - k * k);
  const double psi0 = 0.5 * std::atan2(0.5 * (2.0 * gp.a - emx * gp.b), v(1) / kSqrt2);
  const double theta0 = phase_from_unwound(psi0, k, K);
  gp.s0 = -theta0 / (gp.a * w * K);
  gp.T0 = st.point.t - gp.a * gp.s0 - 2.0 / w * unwound_phase(theta0, k, K);
  gp.Z0 = st.point.z + gp.c * gp.s0;
  return gp;
}

PhaseState reflect(PhaseState st) {
  st.velocity = -st.velocity;
  return st;
}

}  // namespace

double timelike_k(double a, double c) {
  const double d = a * a - 1.0 - c * c;
  return std::sqrt(std::max(d, 0.0)) / (kSqrt2 * std::abs(a));
}

double GeodesicParams::k() const { return eccentricity >= 0.0 ? eccentricity : timelike_k(a, c); }

void GeodesicParams::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(Y))
    throw InvalidParameter("geodesic: non-finite constants");
  if (!(a * b > 0.0)) throw InvalidParameter("geodesic: need a*b > 0");
  if (kind == GeodesicKind::kTimelike) {
    if (a * a < 1.0 + c * c - 1e-12) throw InvalidParameter("timelike geodesic: need a^2 >= 1 + c^2");
  } else if (a * a < c * c - 1e-12) {
    throw InvalidParameter("lightlike geodesic: need a^2 >= c^2");
  }
}

double unwound_phase(double theta, double k, double K) {
  const double p = std::atan2(K * std::sin(theta) + k * std::cos(theta), std::cos(theta));
  return theta + wrap_pi(p - theta);
}

double phase_from_unwound(double psi, double k, double K) {
  const double p = std::atan2(std::sin(psi) - k * std::cos(psi), K * std::cos(psi));
  return psi + wrap_pi(p - psi);
}

GeodesicParams conserved_from_state(const PhaseState& state, const ModelParams& mp, double norm_tol) {
  mp.validate();
  const double n = pseudo_norm(state, mp);
  const double e = std::exp(kSqrt2 * mp.omega * state.point.x);
  const Vector4& v = state.velocity;
  const double b = e * (2.0 * v(0) + e * v(2));
  if (b == 0.0) throw InvalidParameter("geodesic: b = 0 is degenerate");
  if (std::abs(n - 1.0) <= norm_tol) {
    if (v(0) + e * v(2) < 0.0) {
      GeodesicParams f = through_forward(reflect(state), mp);
      GeodesicParams gp = f;
      gp.a = -f.a;
      gp.b = -f.b;
      gp.c = -f.c;
      gp.s0 = -f.s0;
      return gp;
    }
    return through_forward(state, mp);
  }
  const double scale = v.squaredNorm();
  if (std::abs(n) <= norm_tol * std::max(1.0, scale)) {
    GeodesicParams gp;
    gp.kind = GeodesicKind::kLightlike;
    gp.a = v(0) + e * v(2);
    gp.b = b;
    gp.c = v(3);
    gp.Y = kSqrt2 * v(1) / (mp.omega * b) + state.point.y;
    return gp;
  }
  throw OffShellError("geodesic: pseudo-norm " + std::to_string(n) + " is neither 1 nor 0");
}

PhaseState timelike_eval(const GeodesicParams& gp, double s, const ModelParams& mp) {
  if (gp.kind != GeodesicKind::kTimelike) throw InvalidParameter("timelike_eval: lightlike params");
  gp.validate();
  const double k = gp.k();
  if (gp.a > 0.0) {
    const Orbit o{gp.a, gp.b, gp.c, gp.Y, k, std::sqrt(1.0 - k * k)};
    return eval_forward(o, s - gp.s0, gp.T0, gp.Z0, mp);
  }
  const Orbit o{-gp.a, -gp.b, -gp.c, gp.Y, k, std::sqrt(1.0 - k * k)};
  return reflect(eval_forward(o, -(s - gp.s0), gp.T0, gp.Z0, mp));
}

PhaseState lightlike_eval(const ImpactParameter& B, double T0, double Z0, double tau,
                          const ModelParams& mp) {
  B.validate();
  mp.validate();
  const double w = mp.omega;
  const double K = std::sqrt(0.5 * (1.0 + B.ell * B.ell));
  const double kap = std::sqrt(0.5 * (1.0 - B.ell * B.ell));
  const double psi = unwound_phase(tau, kap, K);
  const double s2 = std::sin(2.0 * psi);
  const double c2 = std::cos(2.0 * psi);
  const double q = 1.0 - kap * s2;
  const double dpsi = q / K;
  PhaseState st;
  st.point.x = -std::log(2.0 / B.rho * q) / (kSqrt2 * w);
  st.point.y = B.Y - 2.0 * kap / (w * B.rho) * c2;
  st.point.z = Z0 + B.ell * tau / (w * K);
  st.point.t = T0 - tau / (w * K) + 2.0 / w * psi;
  st.velocity(0) = -1.0 / (w * K) + 2.0 / w * dpsi;
  st.velocity(1) = kSqrt2 * kap * c2 / (w * K);
  st.velocity(2) = 4.0 * kap / (w * B.rho) * s2 * dpsi;
  st.velocity(3) = B.ell / (w * K);
  return st;
}

double planar_period(const GeodesicParams& gp, const ModelParams& mp) {
  const double k = gp.k();
  return kPi / (std::abs(gp.a) * mp.omega * std::sqrt(1.0 - k * k));
}

double return_time_gap(const GeodesicParams& gp, int n, const ModelParams& mp) {
  const double k = gp.k();
  return n * kPi / mp.omega * (2.0 - 1.0 / std::sqrt(1.0 - k * k));
}

Vector4 geodesic_acceleration(const PhaseState& st, const ModelParams& mp) {
  const double w = mp.omega;
  const double e = std::exp(kSqrt2 * w * st.point.x);
  const double td = st.velocity(0), xd = st.velocity(1), yd = st.velocity(2);
  Vector4 acc;
  acc(0) = -kSqrt2 * w * e * xd * yd - 2.0 * kSqrt2 * w * td * xd;
  acc(1) = -w / kSqrt2 * e * e * yd * yd - kSqrt2 * w * e * td * yd;
  acc(2) = 2.0 * kSqrt2 * w / e * td * xd;
  acc(3) = 0.0;
  return acc;
}

double OdePath::max_conserved_drift() const {
  return std::max({drift_a, drift_b, drift_c, drift_Y});
}

OdePath ode_integrate(const PhaseState& state, double s_max, double step, const ModelParams& mp,
                      int record_stride) {
  if (!(step > 0.0)) throw InvalidParameter("ode_integrate: step must be > 0");
  if (!(s_max > 0.0)) throw InvalidParameter("ode_integrate: s_max must be > 0");
  if (record_stride < 1) throw InvalidParameter("ode_integrate: stride must be >= 1");
  mp.validate();

  using Vec8 = Eigen::Matrix<double, 8, 1>;
  auto pack = [](const PhaseState& st) {
    Vec8 y;
    y << st.point.as_vector(), st.velocity;
    return y;
  };
  auto unpack = [](const Vec8& y) {
    PhaseState st;
    st.point = SpacetimePoint::from_vector(y.head<4>());
    st.velocity = y.tail<4>();
    return st;
  };
  auto rhs = [&](const Vec8& y) {
    Vec8 f;
    f << y.tail<4>(), geodesic_acceleration(unpack(y), mp);
    return f;
  };

  const GeodesicParams ref = conserved_from_state(state, mp, 1e-6);
  const double n0 = pseudo_norm(state, mp);
  OdePath path;
  auto track = [&](const PhaseState& st) {
    const double e = std::exp(kSqrt2 * mp.omega * st.point.x);
    const Vector4& v = st.velocity;
    const double a = v(0) + e * v(2);
    const double b = e * (2.0 * v(0) + e * v(2));
    const double Y = kSqrt2 * v(1) / (mp.omega * b) + st.point.y;
    path.drift_a = std::max(path.drift_a, std::abs(a - ref.a));
    path.drift_b = std::max(path.drift_b, std::abs(b - ref.b));
    path.drift_c = std::max(path.drift_c, std::abs(v(3) - ref.c));
    path.drift_Y = std::max(path.drift_Y, std::abs(Y - ref.Y));
    path.drift_norm = std::max(path.drift_norm, std::abs(pseudo_norm(st, mp) - n0));
  };

  const long n = static_cast<long>(std::ceil(s_max / step - 1e-9));
  const double h = s_max / static_cast<double>(n);
  Vec8 y = pack(state);
  path.s.push_back(0.0);
  path.states.push_back(state);
  for (long i = 1; i <= n; ++i) {
    const Vec8 k1 = rhs(y);
    const Vec8 k2 = rhs(y + 0.5 * h * k1);
    const Vec8 k3 = rhs(y + 0.5 * h * k2);
    const Vec8 k4 = rhs(y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const PhaseState st = unpack(y);
    track(st);
    if (i % record_stride == 0 || i == n) {
      path.s.push_back(h * static_cast<double>(i));
      path.states.push_back(st);
    }
  }
  return path;
}

ImpactParameter impact_parameter(const GeodesicParams& gp) {
  if (gp.kind != GeodesicKind::kLightlike)
    throw InvalidParameter("impact_parameter: a timelike geodesic does not converge to a light ray");
  if (gp.a == 0.0) throw InvalidParameter("impact_parameter: a = 0");
  ImpactParameter B{gp.c / gp.a, gp.b / gp.a, gp.Y};
  B.validate();
  return B;
}

double cylinder_value(const SpacetimePoint& p, const ImpactParameter& B, const ModelParams& mp) {
  const double w = mp.omega;
  const double u = 0.5 * B.rho * std::exp(-kSqrt2 * w * p.x) - 1.0;
  const double v = 0.5 * w * B.rho * (p.y - B.Y);
  return u * u + v * v;
}

double orbit_relation_residual(const GeodesicParams& gp, const SpacetimePoint& p,
                               const ModelParams& mp) {
  const double w = mp.omega;
  const double q = gp.b / (2.0 * gp.a);
  const double u = q * std::exp(-kSqrt2 * w * p.x) - 1.0;
  const double v = w * q * (p.y - gp.Y);
  const double k = gp.k();
  return u * u + v * v - k * k;
}

RayResiduals ray_convergence_residuals(const std::vector<PhaseState>& path,
                                       const ImpactParameter& B, const ModelParams& mp) {
  RayResiduals r;
  const double w = mp.omega;
  const double target = 0.5 * (1.0 - B.ell * B.ell);
  for (const PhaseState& st : path) {
    const double e = std::exp(kSqrt2 * w * st.point.x);
    const Vector4& v = st.velocity;
    const double a = v(0) + e * v(2);
    const double b = e * (2.0 * v(0) + e * v(2));
    const double Ys = kSqrt2 * v(1) / (w * b) + st.point.y;
    r.ell.push_back(v(3) / a - B.ell);
    r.rho.push_back(b / a - B.rho);
    r.Y.push_back(Ys - B.Y);
    r.cylinder.push_back(cylinder_value(st.point, B, mp) - target);
  }
  return r;
}

double light_ray_slope(double ell) { return ell / (std::sqrt(2.0 * (1.0 + ell * ell)) - 1.0); }

}  // namespace godel
