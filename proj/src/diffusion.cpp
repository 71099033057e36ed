#include "godel/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "godel/constants.hpp"
#include "godel/geodesics.hpp"

namespace godel {

namespace {

double wrap_pi(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

/// a² - 1 - ż² evaluated without squaring large numbers twice.
double transverse_budget(double a, double zdot) { return (a - zdot) * (a + zdot) - 1.0; }

double polar_A(const ReducedState& st, const ModelParams& mp) {
  const double q = 2.0 * st.a - shrink_factor(st, mp) * st.b;
  return std::sqrt(st.xdot * st.xdot + 0.5 * q * q) / std::abs(st.a);
}

}  // namespace

double shrink_factor(const ReducedState& st, const ModelParams& mp) {
  return std::exp(-kSqrt2 * mp.omega * st.x);
}

double tdot(const ReducedState& st, const ModelParams& mp) {
  return st.b * shrink_factor(st, mp) - st.a;
}

double ydot(const ReducedState& st, const ModelParams& mp) {
  const double e = shrink_factor(st, mp);
  return 2.0 * st.a * e - st.b * e * e;
}

double asymptotic_Y(const ReducedState& st, const ModelParams& mp) {
  return st.y + kSqrt2 * st.xdot / (mp.omega * st.b);
}

PhaseState to_phase_state(const ReducedState& st, const ModelParams& mp) {
  PhaseState ps;
  ps.point = {st.t, st.x, st.y, st.z};
  ps.velocity = {tdot(st, mp), st.xdot, ydot(st, mp), st.zdot};
  return ps;
}

ReducedState reduce_state(const PhaseState& ps, const ModelParams& mp, double s) {
  const double E = std::exp(kSqrt2 * mp.omega * ps.point.x);
  ReducedState st;
  st.t = ps.point.t;
  st.x = ps.point.x;
  st.y = ps.point.y;
  st.z = ps.point.z;
  st.a = ps.velocity(0) + E * ps.velocity(2);
  st.b = E * (2.0 * ps.velocity(0) + E * ps.velocity(2));
  st.xdot = ps.velocity(1);
  st.zdot = ps.velocity(3);
  st.s = s;
  return st;
}

double shell_residual(const ReducedState& st, const ModelParams& mp) {
  const double q = 2.0 * st.a - shrink_factor(st, mp) * st.b;
  return transverse_budget(st.a, st.zdot) - st.xdot * st.xdot - 0.5 * q * q;
}

double shell_relative_residual(const ReducedState& st, const ModelParams& mp) {
  return shell_residual(st, mp) / std::max(1.0, st.a * st.a);
}

Vector4 shell_gradient(const ReducedState& st, const ModelParams& mp) {
  const double e = shrink_factor(st, mp);
  const double q = 2.0 * st.a - e * st.b;
  return {2.0 * st.a - 2.0 * q, e * q, -2.0 * st.xdot, -2.0 * st.zdot};
}

ReducedState make_shell_state(double t, double x, double y, double z, double a, double xdot,
                              double zdot, bool upper, const ModelParams& mp) {
  const double budget = transverse_budget(a, zdot) - xdot * xdot;
  if (budget < 0.0) throw InvalidParameter("shell state: need a^2 >= 1 + xdot^2 + zdot^2");
  ReducedState st;
  st.t = t;
  st.x = x;
  st.y = y;
  st.z = z;
  st.a = a;
  st.xdot = xdot;
  st.zdot = zdot;
  const double q = std::sqrt(2.0 * budget) * (a > 0.0 ? 1.0 : -1.0);
  st.b = (2.0 * a + (upper ? q : -q)) / shrink_factor(st, mp);
  return st;
}

ReducedState state_from_boundary_target(const ImpactParameter& target, double a0,
                                        const ModelParams& mp) {
  target.validate();
  if (!(a0 > 1.0)) throw InvalidParameter("boundary target: need a0 > 1");
  const double zdot = target.ell * a0;
  const double budget = transverse_budget(a0, zdot);
  if (!(budget > 0.0)) throw InvalidParameter("boundary target: |ell| too close to 1 for this a0");
  const double A = std::sqrt(budget) / a0;
  const double e = (2.0 - kSqrt2 * A) / target.rho;
  ReducedState st;
  st.a = a0;
  st.b = target.rho * a0;
  st.zdot = zdot;
  st.xdot = 0.0;
  st.x = -std::log(e) / (kSqrt2 * mp.omega);
  st.y = target.Y;
  return st;
}

Vector8 generator_drift(const ReducedState& st, const ModelParams& mp) {
  const double e = shrink_factor(st, mp);
  const double w = mp.omega;
  const double g = 1.5 * mp.sigma * mp.sigma;
  Vector8 d;
  d << tdot(st, mp), st.xdot, ydot(st, mp), st.zdot, g * st.a, g * st.b,
      w / kSqrt2 * e * e * st.b * st.b - kSqrt2 * w * e * st.a * st.b + g * st.xdot, g * st.zdot;
  return d;
}

Matrix4 covariation_matrix(const ReducedState& st, const ModelParams& mp) {
  const double E = 1.0 / shrink_factor(st, mp);
  const double a = st.a, b = st.b, xd = st.xdot, zd = st.zdot;
  Matrix4 K;
  K << a * a - 1.0, a * b - 2.0 * E, a * xd, a * zd,
       a * b - 2.0 * E, b * b - 2.0 * E * E, b * xd, b * zd,
       a * xd, b * xd, xd * xd + 1.0, xd * zd,
       a * zd, b * zd, xd * zd, zd * zd + 1.0;
  return K;
}

NoiseFactor noise_factorization(const ReducedState& st, const ModelParams& mp) {
  const double e = shrink_factor(st, mp);
  const double E = 1.0 / e;
  const double a = st.a, b = st.b, xd = st.xdot, zd = st.zdot;
  const double q = 2.0 * a - e * b;
  NoiseFactor f;
  f.sigma.setZero();

  const double D = transverse_budget(a, zd);
  if (D >= tol::kDegenerateChart) {
    const double Z = zd * zd + 1.0;
    const double sZ = std::sqrt(Z), sD = std::sqrt(D), sZD = std::sqrt(Z * D);
    f.chart = NoiseChart::kZdotChart;
    f.sigma.row(3) << sZ, 0.0, 0.0;
    f.sigma.row(0) << a * zd / sZ, sD / sZ, 0.0;
    f.sigma.row(1) << b * zd / sZ, (a * b - 2.0 * E * Z) / sZD, kSqrt2 * E * xd / sD;
    f.sigma.row(2) << xd * zd / sZ, a * xd / sZD, q / (kSqrt2 * sD);
    return f;
  }
  const double Db = transverse_budget(a, xd);
  if (Db >= tol::kDegenerateChart) {
    const double X = xd * xd + 1.0;
    const double sX = std::sqrt(X), sD = std::sqrt(Db), sXD = std::sqrt(X * Db);
    f.chart = NoiseChart::kXdotChart;
    f.sigma.row(2) << sX, 0.0, 0.0;
    f.sigma.row(0) << a * xd / sX, sD / sX, 0.0;
    f.sigma.row(1) << b * xd / sX, (a * b - 2.0 * E * X) / sXD, kSqrt2 * E * zd / sD;
    f.sigma.row(3) << xd * zd / sX, a * zd / sXD, q / (kSqrt2 * sD);
    return f;
  }
  f.chart = NoiseChart::kSpectral;
  Eigen::SelfAdjointEigenSolver<Matrix4> es(covariation_matrix(st, mp));
  for (int j = 0; j < 3; ++j) {
    const double lam = std::max(es.eigenvalues()(3 - j), 0.0);
    f.sigma.col(j) = std::sqrt(lam) * es.eigenvectors().col(3 - j);
  }
  return f;
}

ReducedState project_to_shell(const ReducedState& st, const ModelParams& mp) {
  const double e = shrink_factor(st, mp);
  const double budget = transverse_budget(st.a, st.zdot);
  if (!(budget >= 0.0)) throw OffShellError("projection: a^2 - 1 - zdot^2 < 0, no admissible scaling");
  const double q = 2.0 * st.a - e * st.b;
  const double norm2 = st.xdot * st.xdot + 0.5 * q * q;
  ReducedState out = st;
  if (norm2 == 0.0) {
    if (budget > 0.0) throw OffShellError("projection: transverse velocity has no direction");
    return out;
  }
  const double mu = std::sqrt(budget / norm2);
  out.xdot = mu * st.xdot;
  out.b = (2.0 * st.a - mu * q) / e;
  return out;
}

double principal_gamma(const ReducedState& st, const ModelParams& mp) {
  const double r = 2.0 - shrink_factor(st, mp) * st.b / st.a;
  return std::atan2(r / kSqrt2, st.xdot / st.a);
}

PolarState to_polar(const ReducedState& st, double prev_gamma, const ModelParams& mp) {
  PolarState p;
  p.A = polar_A(st, mp);
  if (p.A == 0.0) throw DegenerateAngleError("to_polar: A = 0, angle undefined");
  p.gamma = prev_gamma + wrap_pi(principal_gamma(st, mp) - prev_gamma);
  p.lambda = std::asinh(std::sqrt(std::max(transverse_budget(st.a, st.zdot), 0.0)));
  return p;
}

double geodesic_flow(ReducedState& st, double h, const ModelParams& mp) {
  if (st.a < 0.0) {
    st.a = -st.a;
    st.b = -st.b;
    st.xdot = -st.xdot;
    st.zdot = -st.zdot;
    const double dg = geodesic_flow(st, -h, mp);
    st.a = -st.a;
    st.b = -st.b;
    st.xdot = -st.xdot;
    st.zdot = -st.zdot;
    return dg;
  }
  const double w = mp.omega;
  const double e = shrink_factor(st, mp);
  const double q = 2.0 * st.a - e * st.b;
  const double k = std::min(std::hypot(st.xdot / kSqrt2, 0.5 * q) / st.a, 1.0 / kSqrt2);
  const double K = std::sqrt(1.0 - k * k);
  const double psi0 = 0.5 * std::atan2(0.5 * q, st.xdot / kSqrt2);
  const double theta0 = phase_from_unwound(psi0, k, K);
  const double p0 = unwound_phase(theta0, k, K);
  const double p1 = unwound_phase(theta0 + st.a * w * K * h, k, K);
  const double Y = asymptotic_Y(st, mp);
  const double s2 = std::sin(2.0 * p1);
  const double c2 = std::cos(2.0 * p1);
  const double e1 = 2.0 * st.a / st.b * (1.0 - k * s2);
  st.x = -std::log(e1) / (kSqrt2 * w);
  st.y = Y - 2.0 * st.a * k / (st.b * w) * c2;
  st.t += -st.a * h + 2.0 / w * (p1 - p0);
  st.z += st.zdot * h;
  st.xdot = kSqrt2 * st.a * k * c2;
  return 2.0 * (p1 - p0);
}

namespace {

bool admissible(const ReducedState& cand, const ModelParams& mp, StepResult& r) {
  if (!std::isfinite(cand.a) || !std::isfinite(cand.b) || !std::isfinite(cand.xdot) ||
      !std::isfinite(cand.zdot) || !std::isfinite(cand.x)) {
    r.failure = "non-finite state";
    return false;
  }
  if (std::abs(cand.a) < 1.0) {
    r.failure = "|a| < 1";
    return false;
  }
  if (!(cand.a * cand.b > 0.0)) {
    r.failure = "b sign flip";
    return false;
  }
  if (!(transverse_budget(cand.a, cand.zdot) > 0.0)) {
    r.failure = "a^2 - 1 - zdot^2 <= 0";
    return false;
  }
  r.pre_projection_residual = std::abs(shell_relative_residual(cand, mp));
  if (r.pre_projection_residual > tol::kShellBand) {
    r.failure = "shell band exceeded";
    return false;
  }
  return true;
}

}  // namespace

StepResult step(const ReducedState& st, double ds, const Eigen::Vector3d& dW, const ModelParams& mp,
                StepScheme scheme) {
  if (!(ds > 0.0)) throw InvalidParameter("step: ds must be > 0");
  StepResult r;
  const double g = 1.5 * mp.sigma * mp.sigma;
  const NoiseFactor nf = noise_factorization(st, mp);
  const Vector4 noise = mp.sigma * (nf.sigma * dW);
  const double gamma_before = principal_gamma(st, mp);
  const bool angle_before = polar_A(st, mp) > 0.0;

  ReducedState cand = st;
  if (scheme == StepScheme::kEulerMaruyama) {
    const Vector8 d = generator_drift(st, mp);
    cand.t += d(0) * ds;
    cand.x += d(1) * ds;
    cand.y += d(2) * ds;
    cand.z += d(3) * ds;
    cand.set_fiber(st.fiber() + d.tail<4>() * ds + noise);
    r.phase_integral = mp.omega * shrink_factor(st, mp) * st.b * ds;
  } else {
    cand.set_fiber(st.fiber() * (1.0 + g * ds) + noise);
  }
  if (!admissible(cand, mp, r)) return r;
  ReducedState proj = project_to_shell(cand, mp);

  if (scheme == StepScheme::kEulerMaruyama) {
    if (angle_before && polar_A(proj, mp) > 0.0)
      r.dgamma_flow = wrap_pi(principal_gamma(proj, mp) - gamma_before);
  } else {
    if (angle_before && polar_A(proj, mp) > 0.0)
      r.dgamma_noise = wrap_pi(principal_gamma(proj, mp) - gamma_before);
    r.dgamma_flow = geodesic_flow(proj, ds, mp);
    r.phase_integral = r.dgamma_flow;
  }
  proj.s = st.s + ds;
  r.state = proj;
  r.ok = true;
  return r;
}

void SimulationConfig::validate() const {
  if (!(ds > 0.0)) throw InvalidParameter("simulation: ds must be > 0");
  if (!(s_max > 0.0)) throw InvalidParameter("simulation: s_max must be > 0");
  if (stride < 1) throw InvalidParameter("simulation: stride must be >= 1");
}

PathRecord simulate_path(const ReducedState& initial, const SimulationConfig& cfg,
                         const ModelParams& mp) {
  cfg.validate();
  mp.validate();
  if (std::abs(shell_relative_residual(initial, mp)) > 1e-8)
    throw OffShellError("simulate_path: initial state is off the unit shell");
  if (!(initial.a * initial.b > 0.0)) throw InvalidParameter("simulate_path: need a*b > 0");

  GaussianStream gauss(cfg.seed, cfg.stream);
  PathRecord rec;
  ReducedState cur = project_to_shell(initial, mp);
  double gamma = polar_A(cur, mp) > 0.0 ? principal_gamma(cur, mp) : 0.0;
  double phase = 0.0;
  auto record = [&]() {
    rec.s.push_back(cur.s);
    rec.states.push_back(cur);
    rec.gamma.push_back(gamma);
    rec.phase_integral.push_back(phase);
  };
  record();

  std::function<bool(double, const Eigen::Vector3d&, int)> advance =
      [&](double h, const Eigen::Vector3d& dW, int depth) -> bool {
    StepResult r = step(cur, h, dW, mp, cfg.scheme);
    if (r.ok) {
      cur = r.state;
      gamma += r.dgamma_flow + r.dgamma_noise;
      phase += r.phase_integral;
      rec.stats.steps += 1;
      rec.stats.max_depth = std::max(rec.stats.max_depth, depth);
      rec.stats.max_noise_gamma_jump = std::max(rec.stats.max_noise_gamma_jump, std::abs(r.dgamma_noise));
      rec.stats.max_pre_projection_residual =
          std::max(rec.stats.max_pre_projection_residual, r.pre_projection_residual);
      return true;
    }
    if (depth >= tol::kMaxHalvings) {
      rec.abort_reason = r.failure + " after " + std::to_string(depth) + " halvings at s = " +
                         std::to_string(cur.s);
      return false;
    }
    rec.stats.retries += 1;
    const Eigen::Vector3d z(gauss(), gauss(), gauss());
    const Eigen::Vector3d dW1 = 0.5 * dW + std::sqrt(0.25 * h) * z;
    const Eigen::Vector3d dW2 = dW - dW1;
    return advance(0.5 * h, dW1, depth + 1) && advance(0.5 * h, dW2, depth + 1);
  };

  const long n = static_cast<long>(std::ceil(cfg.s_max / cfg.ds - 1e-9));
  const double h = cfg.s_max / static_cast<double>(n);
  const double sq = std::sqrt(h);
  for (long i = 1; i <= n; ++i) {
    const Eigen::Vector3d dW(sq * gauss(), sq * gauss(), sq * gauss());
    const double target = h * static_cast<double>(i);
    if (!advance(h, dW, 0)) {
      rec.aborted = true;
      record();
      break;
    }
    cur.s = target;
    if (i % cfg.stride == 0 || i == n) record();
  }
  return rec;
}

std::vector<double> series(const PathRecord& path, Series which, const ModelParams& mp) {
  std::vector<double> out;
  out.reserve(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    const ReducedState& st = path.states[i];
    double v = 0.0;
    switch (which) {
      case Series::kShellResidual:
        v = shell_relative_residual(st, mp);
        break;
      case Series::kZdotOverA:
        v = st.zdot / st.a;
        break;
      case Series::kBOverA:
        v = st.b / st.a;
        break;
      case Series::kLogBOverA:
        v = std::log(st.b / st.a);
        break;
      case Series::kYs:
        v = asymptotic_Y(st, mp);
        break;
      case Series::kRunningCylinder: {
        const double rho = st.b / st.a;
        const double ell = st.zdot / st.a;
        const double u = 0.5 * rho * shrink_factor(st, mp) - 1.0;
        const double w = 0.5 * mp.omega * rho * (st.y - asymptotic_Y(st, mp));
        v = u * u + w * w - 0.5 * (1.0 - ell * ell);
        break;
      }
      case Series::kLogA:
        v = std::log(std::abs(st.a));
        break;
      case Series::kLogB:
        v = std::log(std::abs(st.b));
        break;
      case Series::kLogZdot:
        v = std::log(std::abs(st.zdot));
        break;
      case Series::kLogZ:
        v = std::log(std::abs(st.z));
        break;
      case Series::kLambda:
        v = std::asinh(std::sqrt(std::max(transverse_budget(st.a, st.zdot), 0.0)));
        break;
      case Series::kGamma:
        v = path.gamma[i];
        break;
      case Series::kPolarA:
        v = polar_A(st, mp);
        break;
      case Series::kPhaseIntegral:
        v = path.phase_integral[i];
        break;
    }
    out.push_back(v);
  }
  return out;
}

PolarState polar_at(const PathRecord& path, std::size_t i, const ModelParams& mp) {
  const ReducedState& st = path.states.at(i);
  PolarState p;
  p.A = polar_A(st, mp);
  p.gamma = path.gamma[i];
  p.lambda = std::asinh(std::sqrt(std::max(transverse_budget(st.a, st.zdot), 0.0)));
  return p;
}

PathRecord transform_path(const PathRecord& path, const IsometryElement& g, const ModelParams& mp) {
  PathRecord out = path;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const ReducedState& st = path.states[i];
    out.states[i] = reduce_state(apply_isometry_state(g, to_phase_state(st, mp), mp), mp, st.s);
    if (polar_A(st, mp) > 0.0 && polar_A(out.states[i], mp) > 0.0) {
      out.gamma[i] = path.gamma[i] +
                     wrap_pi(principal_gamma(out.states[i], mp) - principal_gamma(st, mp));
    }
  }
  return out;
}

SubPath simulate_subdiffusion(SubDiffusion kind, const ReducedState& initial,
                              const SimulationConfig& cfg, const ModelParams& mp) {
  cfg.validate();
  mp.validate();
  const double sg = mp.sigma;
  const double g = 1.5 * sg * sg;
  GaussianStream gauss(cfg.seed, cfg.stream);
  SubPath out;
  ReducedState cur = initial;
  out.s.push_back(cur.s);
  out.states.push_back(cur);

  auto try_step = [&](const ReducedState& st, double h, const Eigen::Vector3d& dW,
                      ReducedState& nxt) -> bool {
    nxt = st;
    switch (kind) {
      case SubDiffusion::kA:
        nxt.a = st.a * (1.0 + g * h) + sg * std::sqrt(std::max(st.a * st.a - 1.0, 0.0)) * dW(0);
        return nxt.a >= 1.0;
      case SubDiffusion::kZdot:
        nxt.zdot = st.zdot * (1.0 + g * h) + sg * std::sqrt(st.zdot * st.zdot + 1.0) * dW(0);
        return true;
      case SubDiffusion::kAZdot: {
        const double Z = st.zdot * st.zdot + 1.0;
        const double D = std::max(transverse_budget(st.a, st.zdot), 0.0);
        nxt.zdot = st.zdot * (1.0 + g * h) + sg * std::sqrt(Z) * dW(0);
        nxt.a = st.a * (1.0 + g * h) + sg * (st.a * st.zdot / std::sqrt(Z) * dW(0) +
                                             std::sqrt(D / Z) * dW(1));
        return transverse_budget(nxt.a, nxt.zdot) > 0.0;
      }
      case SubDiffusion::kXXdotAB: {
        const double e = shrink_factor(st, mp);
        const double E = 1.0 / e;
        const double q = 2.0 * st.a - e * st.b;
        const double zz = std::sqrt(std::max(transverse_budget(st.a, 0.0) - st.xdot * st.xdot - 0.5 * q * q, 0.0));
        const double X = st.xdot * st.xdot + 1.0;
        const double Db = transverse_budget(st.a, st.xdot);
        if (!(Db > 0.0)) return false;
        const double sX = std::sqrt(X), sD = std::sqrt(Db), sXD = std::sqrt(X * Db);
        const double w = mp.omega;
        nxt.x = st.x + st.xdot * h;
        nxt.xdot = st.xdot + (w / kSqrt2 * e * e * st.b * st.b - kSqrt2 * w * e * st.a * st.b + g * st.xdot) * h +
                   sg * sX * dW(0);
        nxt.a = st.a * (1.0 + g * h) + sg * (st.a * st.xdot / sX * dW(0) + sD / sX * dW(1));
        nxt.b = st.b * (1.0 + g * h) + sg * (st.b * st.xdot / sX * dW(0) +
                                             (st.a * st.b - 2.0 * E * X) / sXD * dW(1) +
                                             kSqrt2 * E * zz / sD * dW(2));
        const double e1 = shrink_factor(nxt, mp);
        const double q1 = 2.0 * nxt.a - e1 * nxt.b;
        const double zz1 = transverse_budget(nxt.a, 0.0) - nxt.xdot * nxt.xdot - 0.5 * q1 * q1;
        if (!(zz1 >= 0.0)) return false;
        nxt.zdot = std::sqrt(zz1);
        return transverse_budget(nxt.a, nxt.xdot) > 0.0 && nxt.a * nxt.b > 0.0;
      }
    }
    return false;
  };

  bool failed = false;
  std::function<void(double, const Eigen::Vector3d&, int)> advance =
      [&](double h, const Eigen::Vector3d& dW, int depth) {
    ReducedState nxt;
    if (try_step(cur, h, dW, nxt)) {
      cur = nxt;
      cur.s += h;
      return;
    }
    if (depth >= tol::kMaxHalvings) {
      failed = true;
      return;
    }
    out.retries += 1;
    const Eigen::Vector3d z(gauss(), gauss(), gauss());
    const Eigen::Vector3d dW1 = 0.5 * dW + std::sqrt(0.25 * h) * z;
    advance(0.5 * h, dW1, depth + 1);
    if (!failed) advance(0.5 * h, dW - dW1, depth + 1);
  };

  const long n = static_cast<long>(std::ceil(cfg.s_max / cfg.ds - 1e-9));
  const double h = cfg.s_max / static_cast<double>(n);
  const double sq = std::sqrt(h);
  for (long i = 1; i <= n && !failed; ++i) {
    const Eigen::Vector3d dW(sq * gauss(), sq * gauss(), sq * gauss());
    advance(h, dW, 0);
    cur.s = h * static_cast<double>(i);
    if (i % cfg.stride == 0 || i == n || failed) {
      out.s.push_back(cur.s);
      out.states.push_back(cur);
    }
  }
  out.aborted = failed;
  return out;
}

}  // namespace godel
