#include "godel/harness/transitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "godel/constants.hpp"

namespace godel::harness {

namespace {

Arc make_arc(Arc::Kind kind, const PhaseState& start, double s_end, const ModelParams& mp) {
  Arc arc;
  arc.kind = kind;
  arc.gp = conserved_from_state(start, mp);
  arc.s_end = s_end;
  arc.start = start.point;
  arc.end = timelike_eval(arc.gp, s_end, mp).point;
  return arc;
}

Arc static_arc(const SpacetimePoint& p, double a, double c, double s, const ModelParams& mp) {
  PhaseState st{p, Vector4(a, 0.0, 0.0, c)};
  return make_arc(Arc::Kind::kStatic, st, s, mp);
}

double max_deviation(const SpacetimePoint& p, const SpacetimePoint& q) {
  return (p.as_vector() - q.as_vector()).cwiseAbs().maxCoeff();
}

// Orbit projections are circles in the (X, W) = (e^{-√2ωx}, ωy) half plane with
// centre (2a/b, ωY) and radius 2ak/b.
struct Circle {
  double Xc = 0.0;
  double Wc = 0.0;
  double R = 0.0;
  double k() const { return R / Xc; }
};

bool best_circle(double X0, double W0, double X1, double W1, const TransitivityOptions& opt,
                 Circle& out) {
  const double mx = 0.5 * (X0 + X1), mw = 0.5 * (W0 + W1);
  const double dx = X1 - X0, dw = W1 - W0;
  const double d = std::hypot(dx, dw);
  const double nx = -dw / d, nw = dx / d;
  const double L = d + mx;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i < opt.grid - 1; ++i) {
    const double tau = -1.0 + 2.0 * i / (opt.grid - 1);
    const double u = L * std::tan(0.5 * kPi * tau * 0.98);
    Circle c{mx + u * nx, mw + u * nw, 0.0};
    if (!(c.Xc > 0.0)) continue;
    c.R = std::hypot(X0 - c.Xc, W0 - c.Wc);
    if (c.k() < best) {
      best = c.k();
      out = c;
    }
  }
  return best <= opt.k_max;
}

Arc planar_arc(const SpacetimePoint& p, const Circle& circ, double X1, double W1, const ModelParams& mp) {
  const double w = mp.omega;
  const double k = circ.k();
  const double a = 1.0 / std::sqrt(1.0 - 2.0 * k * k);
  const double b = 2.0 * a / circ.Xc;
  const double emx = std::exp(-kSqrt2 * w * p.x);
  const double two_psi0 = std::atan2(-(emx - circ.Xc), -(w * p.y - circ.Wc));
  const double two_psi1 = std::atan2(-(X1 - circ.Xc), -(W1 - circ.Wc));
  double dphase = std::fmod(two_psi1 - two_psi0, 2.0 * kPi);
  if (dphase < 0.0) dphase += 2.0 * kPi;

  PhaseState st;
  st.point = p;
  st.velocity = Vector4(b * emx - a, kSqrt2 * a * k * std::cos(two_psi0), 2.0 * a * emx - b * emx * emx, 0.0);
  const GeodesicParams gp = conserved_from_state(st, mp);
  const double kk = gp.k();
  const double K = std::sqrt(1.0 - kk * kk);
  const double rate = gp.a * w * K;
  const double psi0 = unwound_phase(-rate * gp.s0, kk, K);
  const double s_end = gp.s0 + phase_from_unwound(psi0 + 0.5 * dphase, kk, K) / rate;
  return make_arc(Arc::Kind::kPlanar, st, s_end, mp);
}

void planar_moves(SpacetimePoint& cur, double x1, double y1, const ModelParams& mp,
                  const TransitivityOptions& opt, int depth, TransitivityResult& res) {
  const double w = mp.omega;
  const double X0 = std::exp(-kSqrt2 * w * cur.x), W0 = w * cur.y;
  const double X1 = std::exp(-kSqrt2 * w * x1), W1 = w * y1;
  if (std::hypot(X1 - X0, W1 - W0) == 0.0) return;
  Circle circ;
  if (best_circle(X0, W0, X1, W1, opt, circ)) {
    res.arcs.push_back(planar_arc(cur, circ, X1, W1, mp));
    cur = res.arcs.back().end;
    return;
  }
  if (depth >= opt.max_depth)
    throw GridSearchError("transitivity: no admissible orbit found after " + std::to_string(depth) +
                          " subdivisions");
  ++res.subdivisions;
  const double Xm = 0.5 * (X0 + X1), Wm = 0.5 * (W0 + W1);
  planar_moves(cur, -std::log(Xm) / (kSqrt2 * w), Wm / w, mp, opt, depth + 1, res);
  planar_moves(cur, x1, y1, mp, opt, depth + 1, res);
}

}  // namespace

std::vector<Arc> static_arcs(const SpacetimePoint& p, double dt, double dz, const ModelParams& mp) {
  std::vector<Arc> arcs;
  if (dt == 0.0 && dz == 0.0) return arcs;
  if (std::abs(dz) < std::abs(dt)) {
    const double s = std::sqrt(dt * dt - dz * dz);
    arcs.push_back(static_arc(p, dt / s, dz / s, s, mp));
    return arcs;
  }
  // |Δz| ≥ |Δt|: unit-speed z move at a = √2, then a pure t move with a = ±1.
  const double s1 = std::abs(dz);
  arcs.push_back(static_arc(p, kSqrt2, std::copysign(1.0, dz), s1, mp));
  const double rest = dt - kSqrt2 * s1;
  if (rest != 0.0) arcs.push_back(static_arc(arcs.back().end, std::copysign(1.0, rest), 0.0, std::abs(rest), mp));
  return arcs;
}

TransitivityResult connect_points(const SpacetimePoint& from, const SpacetimePoint& to, const ModelParams& mp,
                                  const TransitivityOptions& opt) {
  mp.validate();
  if (!from.finite() || !to.finite()) throw InvalidParameter("transitivity: non-finite endpoint");
  if (!(opt.k_max > 0.0 && opt.k_max < 1.0 / kSqrt2))
    throw InvalidParameter("transitivity: k_max must lie in (0, 1/sqrt2)");
  TransitivityResult res;
  SpacetimePoint cur = from;
  planar_moves(cur, to.x, to.y, mp, opt, 0, res);
  for (Arc& arc : static_arcs(cur, to.t - cur.t, to.z - cur.z, mp)) {
    cur = arc.end;
    res.arcs.push_back(arc);
  }
  res.reached = cur;
  res.endpoint_error = max_deviation(cur, to);
  return res;
}

}  // namespace godel::harness
