#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "godel/constants.hpp"
#include "godel/diffusion.hpp"
#include "godel/geodesics.hpp"
#include "godel/geometry.hpp"
#include "godel/stats.hpp"
#include "test_util.hpp"

using namespace godel;
using godel::testing::Sampler;

namespace {

ReducedState random_shell_state(Sampler& rng, const ModelParams& mp, double a_lo = 1.2, double a_hi = 4.0) {
  const double a = rng.uniform(a_lo, a_hi) * (rng.uniform(0, 1) < 0.2 ? -1.0 : 1.0);
  const double r = std::sqrt(a * a - 1.0);
  const double zd = rng.uniform(-0.9, 0.9) * r;
  const double xd = rng.uniform(-0.9, 0.9) * std::sqrt(r * r - zd * zd);
  const SpacetimePoint p = rng.point(2.0, 5.0);
  return make_shell_state(p.t, p.x, p.y, p.z, a, xd, zd, rng.uniform(0, 1) < 0.5, mp);
}

// (a, b, ẋ, ż) as linear functions of the contravariant velocity: a = (gξ̇)_t, b = 2(gξ̇)_y
Matrix4 momentum_map(const SpacetimePoint& p, const ModelParams& mp) {
  const Matrix4 g = metric_at(p, mp);
  Matrix4 J = Matrix4::Zero();
  J.row(0) = g.row(0);
  J.row(1) = 2.0 * g.row(2);
  J(2, 1) = 1.0;
  J(3, 3) = 1.0;
  return J;
}

double scale(const Matrix4& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

}  // namespace

TEST(Shell, ResidualIsPseudoNormMinusOne) {
  const ModelParams mp{1.3, 1.0};
  Sampler rng(201);
  for (int n = 0; n < 200; ++n) {
    ReducedState st = random_shell_state(rng, mp);
    st.a *= rng.uniform(0.9, 1.1);
    st.xdot += rng.normal();
    const double pn = pseudo_norm(to_phase_state(st, mp), mp);
    EXPECT_NEAR(shell_residual(st, mp), pn - 1.0, 1e-11 * std::max(1.0, st.a * st.a));
  }
}

TEST(Shell, StatesOnBothBranches) {
  const ModelParams mp{1.0, 1.0};
  Sampler rng(202);
  for (int n = 0; n < 100; ++n) {
    const ReducedState lo = make_shell_state(0, rng.uniform(-2, 2), 0, 0, 3.0, 0.5, 1.0, false, mp);
    const ReducedState hi = make_shell_state(0, lo.x, 0, 0, 3.0, 0.5, 1.0, true, mp);
    EXPECT_LT(lo.b, hi.b);
    for (const auto& st : {lo, hi}) {
      EXPECT_NEAR(shell_relative_residual(st, mp), 0.0, 1e-14);
      EXPECT_NEAR(pseudo_norm(to_phase_state(st, mp), mp), 1.0, 1e-12);
    }
  }
  EXPECT_THROW(make_shell_state(0, 0, 0, 0, 1.2, 0.6, 0.5, true, mp), InvalidParameter);
}

TEST(Shell, GradientMatchesFiniteDifference) {
  const ModelParams mp{0.8, 1.0};
  Sampler rng(203);
  for (int n = 0; n < 100; ++n) {
    const ReducedState st = random_shell_state(rng, mp);
    const Vector4 g = shell_gradient(st, mp);
    for (int i = 0; i < 4; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(st.fiber()(i)));
      ReducedState p = st, m = st;
      p.set_fiber(st.fiber() + h * Vector4::Unit(i));
      m.set_fiber(st.fiber() - h * Vector4::Unit(i));
      const double fd = (shell_residual(p, mp) - shell_residual(m, mp)) / (2 * h);
      EXPECT_NEAR(g(i), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(Reduced, PhaseStateRoundTripAndMomenta) {
  const ModelParams mp{1.0, 1.0};
  Sampler rng(204);
  for (int n = 0; n < 100; ++n) {
    const ReducedState st = random_shell_state(rng, mp);
    const PhaseState ps = to_phase_state(st, mp);
    const Vector4 F = momentum_map(ps.point, mp) * ps.velocity;
    EXPECT_LT((F - st.fiber()).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, st.fiber().cwiseAbs().maxCoeff()));
    const ReducedState back = reduce_state(ps, mp, st.s);
    EXPECT_LT((back.fiber() - st.fiber()).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, std::abs(st.b)));
    // a and b are the conserved constants of the tangent geodesic
    const GeodesicParams gp = conserved_from_state(ps, mp);
    EXPECT_NEAR(gp.a, st.a, 1e-12 * std::abs(st.a));
    EXPECT_NEAR(gp.b, st.b, 1e-12 * std::abs(st.b));
    EXPECT_NEAR(gp.Y, asymptotic_Y(st, mp), 1e-10);
  }
}

TEST(Reduced, BoundaryTargetState) {
  const ModelParams mp{1.0, 1.0};
  for (const ImpactParameter& B : {ImpactParameter{0.5, 1.0, 0.0}, ImpactParameter{-0.3, 2.5, 1.0},
                                   ImpactParameter{0.8, 0.5, -2.0}}) {
    const ReducedState st = state_from_boundary_target(B, 1e3, mp);
    EXPECT_NEAR(shell_relative_residual(st, mp), 0.0, 1e-14);
    EXPECT_NEAR(st.zdot / st.a, B.ell, 1e-15);
    EXPECT_NEAR(st.b / st.a, B.rho, 1e-15);
    EXPECT_NEAR(asymptotic_Y(st, mp), B.Y, 1e-15);
  }
  EXPECT_THROW(state_from_boundary_target({0.5, 1.0, 0.0}, 0.5, mp), InvalidParameter);
}

TEST(Generator, CovariationMatchesVelocityCovariation) {
  // noise in ξ̇ has covariation ξ̇ξ̇ᵀ - g⁻¹; push it through the linear momentum map
  Sampler rng(205);
  for (double w : {0.5, 1.0, 2.0}) {
    const ModelParams mp{w, 1.0};
    for (int n = 0; n < 100; ++n) {
      const ReducedState st = random_shell_state(rng, mp);
      const PhaseState ps = to_phase_state(st, mp);
      const Matrix4 J = momentum_map(ps.point, mp);
      const Matrix4 V = ps.velocity * ps.velocity.transpose() - inverse_metric_at(ps.point, mp);
      const Matrix4 oracle = J * V * J.transpose();
      const Matrix4 K = covariation_matrix(st, mp);
      EXPECT_LT((K - oracle).cwiseAbs().maxCoeff(), 1e-10 * scale(oracle));
    }
  }
}

TEST(Generator, CovariationSymmetricPsdRankThree) {
  const ModelParams mp{1.0, 1.0};
  Sampler rng(206);
  for (int n = 0; n < 200; ++n) {
    const ReducedState st = random_shell_state(rng, mp);
    const Matrix4 K = covariation_matrix(st, mp);
    EXPECT_EQ(K, K.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix4> es(K);
    const double top = es.eigenvalues()(3);
    EXPECT_GT(es.eigenvalues()(0), -tol::kRankThree * top);
    EXPECT_LT(std::abs(es.eigenvalues()(0)), tol::kRankThree * top);
    EXPECT_GT(es.eigenvalues()(1), tol::kRankThree * top);
    // the null direction is the shell normal
    EXPECT_LT((K * shell_gradient(st, mp)).norm(), 1e-9 * top * shell_gradient(st, mp).norm());
  }
}

TEST(Generator, DriftMatchesGeodesicPlusVerticalLaplacian) {
  // oracle: positions move with ξ̇; F = Jξ̇ changes by ∂ₓJ ẋ ξ̇ - JΓ(ξ̇, ξ̇) along geodesics,
  // and the vertical Laplacian on the unit shell adds (3/2)σ² F for F linear in ξ̇
  Sampler rng(207);
  for (double w : {0.5, 1.0, 2.0}) {
    for (double sg : {0.0, 0.7, 1.0}) {
      const ModelParams mp{w, sg};
      for (int n = 0; n < 50; ++n) {
        const ReducedState st = random_shell_state(rng, mp);
        const PhaseState ps = to_phase_state(st, mp);
        const Vector4& v = ps.velocity;
        const double h = 1e-6;
        SpacetimePoint pp = ps.point, pm = ps.point;
        pp.x += h;
        pm.x -= h;
        const Matrix4 dJ = (momentum_map(pp, mp) - momentum_map(pm, mp)) / (2 * h);
        const Christoffel G = christoffel_at(ps.point, mp);
        Vector4 geo;
        for (int k = 0; k < 4; ++k) geo(k) = -v.dot(G[k] * v);
        const Vector4 dF = dJ * v * v(1) + momentum_map(ps.point, mp) * geo + 1.5 * sg * sg * st.fiber();
        const Vector8 d = generator_drift(st, mp);
        const double sc = std::max(1.0, dF.cwiseAbs().maxCoeff());
        EXPECT_LT((d.tail<4>() - dF).cwiseAbs().maxCoeff(), 1e-6 * sc);
        EXPECT_LT((d.head<4>() - v).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST(Noise, FactorReproducesCovariationInEveryChart) {
  const ModelParams mp{1.0, 1.0};
  Sampler rng(208);
  int z_chart = 0;
  for (int n = 0; n < 200; ++n) {
    const ReducedState st = random_shell_state(rng, mp);
    const NoiseFactor f = noise_factorization(st, mp);
    z_chart += f.chart == NoiseChart::kZdotChart;
    const Matrix4 K = covariation_matrix(st, mp);
    EXPECT_LT((f.sigma * f.sigma.transpose() - K).cwiseAbs().maxCoeff(), tol::kFactorization * scale(K));
  }
  EXPECT_EQ(z_chart, 200);

  // ż on the light cone of the shell: a² - 1 - ż² below the chart threshold
  const double a = 2.0, zd = std::sqrt(a * a - 1.0) * (1 - 1e-13);
  const ReducedState near = make_shell_state(0, 0.3, 0, 0, a, 0.0, zd, true, mp);
  const NoiseFactor fx = noise_factorization(near, mp);
  EXPECT_EQ(fx.chart, NoiseChart::kXdotChart);
  const Matrix4 Kx = covariation_matrix(near, mp);
  EXPECT_LT((fx.sigma * fx.sigma.transpose() - Kx).cwiseAbs().maxCoeff(), tol::kFactorization * scale(Kx));

  // a = 1 at rest: both charts degenerate
  ReducedState rest;
  rest.x = 0.4;
  rest.a = 1.0;
  rest.b = 2.0 / shrink_factor(rest, mp);
  const NoiseFactor fs = noise_factorization(rest, mp);
  EXPECT_EQ(fs.chart, NoiseChart::kSpectral);
  const Matrix4 Ks = covariation_matrix(rest, mp);
  EXPECT_LT((fs.sigma * fs.sigma.transpose() - Ks).cwiseAbs().maxCoeff(), tol::kFactorization * scale(Ks));
}

TEST(Projection, MatchesBisectionOracle) {
  const ModelParams mp{1.0, 1.0};
  Sampler rng(209);
  for (int n = 0; n < 100; ++n) {
    const ReducedState on = random_shell_state(rng, mp);
    ReducedState off = on;
    off.set_fiber(on.fiber() + 0.02 * std::abs(on.a) * Vector4(rng.normal(), rng.normal(), rng.normal(), rng.normal()));
    if (!((off.a - off.zdot) * (off.a + off.zdot) > 1.0)) continue;
    const double e = shrink_factor(off, mp);
    const double q = 2 * off.a - e * off.b;
    auto scaled = [&](double mu) {
      ReducedState s = off;
      s.xdot = mu * off.xdot;
      s.b = (2 * off.a - mu * q) / e;
      return s;
    };
    // residual falls monotonically in μ ≥ 0
    double lo = 0, hi = 1;
    while (shell_residual(scaled(hi), mp) > 0) hi *= 2;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (shell_residual(scaled(mid), mp) > 0 ? lo : hi) = mid;
    }
    const ReducedState p = project_to_shell(off, mp);
    const ReducedState o = scaled(0.5 * (lo + hi));
    EXPECT_NEAR(shell_relative_residual(p, mp), 0.0, tol::kShellAbsolute);
    EXPECT_NEAR(p.xdot, o.xdot, 1e-10 * std::max(1.0, std::abs(o.xdot)));
    EXPECT_NEAR(p.b, o.b, 1e-10 * std::max(1.0, std::abs(o.b)));
    EXPECT_EQ(p.a, off.a);
    EXPECT_EQ(p.zdot, off.zdot);
    EXPECT_EQ(p.x, off.x);
  }
  ReducedState bad;
  bad.a = 1.0;
  bad.zdot = 1.0;
  EXPECT_THROW(project_to_shell(bad, mp), OffShellError);
}

TEST(Flow, MatchesClosedFormGeodesic) {
  Sampler rng(210);
  for (double w : {0.5, 1.0, 2.0}) {
    const ModelParams mp{w, 1.0};
    for (int n = 0; n < 100; ++n) {
      const ReducedState st = random_shell_state(rng, mp);
      const double h = rng.uniform(0.0, 2.0);
      ReducedState fl = st;
      const double dg = geodesic_flow(fl, h, mp);
      const PhaseState want = timelike_eval(conserved_from_state(to_phase_state(st, mp), mp), h, mp);
      const PhaseState got = to_phase_state(fl, mp);
      const double sc = std::max(1.0, std::abs(st.a));
      EXPECT_LT((got.point.as_vector() - want.point.as_vector()).cwiseAbs().maxCoeff(), 1e-9 * sc);
      EXPECT_LT((got.velocity - want.velocity).cwiseAbs().maxCoeff(), 1e-9 * sc * sc);
      EXPECT_EQ(fl.a, st.a);
      EXPECT_EQ(fl.b, st.b);
      // γ advances by the unwrapped change of the principal angle
      const double jump = std::remainder(principal_gamma(fl, mp) - principal_gamma(st, mp) - dg, 2 * kPi);
      EXPECT_NEAR(jump, 0.0, 1e-8);
    }
  }
}

TEST(Step, ZeroNoiseIsGeodesicFlow) {
  const ModelParams mp{1.0, 0.0};
  Sampler rng(211);
  for (int n = 0; n < 50; ++n) {
    const ReducedState st = random_shell_state(rng, mp);
    const StepResult r = step(st, 0.01, Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()), mp);
    ASSERT_TRUE(r.ok);
    ReducedState fl = st;
    geodesic_flow(fl, 0.01, mp);
    EXPECT_LT((r.state.fiber() - fl.fiber()).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, std::abs(st.b)));
    EXPECT_NEAR(r.state.x, fl.x, 1e-14);
    EXPECT_NEAR(r.state.s, st.s + 0.01, 1e-15);
  }
}

TEST(Step, RejectsInadmissibleIncrement) {
  const ModelParams mp{1.0, 1.0};
  const ReducedState st = make_shell_state(0, 0, 0, 0, 1.05, 0.0, 0.1, true, mp);
  const StepResult r = step(st, 1e-3, Eigen::Vector3d(0, -5.0, 0), mp);
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.failure.empty());
  EXPECT_THROW(step(st, 0.0, Eigen::Vector3d::Zero(), mp), InvalidParameter);
}

TEST(Path, DeterministicPerSeedAndStream) {
  const ModelParams mp{1.0, 1.0};
  const ReducedState init = make_shell_state(0, 0, 0, 0, 2.0, 0.3, 0.5, true, mp);
  SimulationConfig cfg;
  cfg.s_max = 1.0;
  cfg.seed = 77;
  cfg.stream = 3;
  const PathRecord a = simulate_path(init, cfg, mp), b = simulate_path(init, cfg, mp);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(a.size(), 101u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.states[i].fiber(), b.states[i].fiber());
    EXPECT_EQ(a.gamma[i], b.gamma[i]);
  }
  cfg.stream = 4;
  const PathRecord c = simulate_path(init, cfg, mp);
  EXPECT_NE(a.states.back().a, c.states.back().a);
}

TEST(Path, StaysOnShellWithGrowingMomenta) {
  const ModelParams mp{1.0, 1.0};
  const ReducedState init = make_shell_state(0, 0, 0, 0, 2.0, 0.3, 0.5, true, mp);
  SimulationConfig cfg;
  cfg.s_max = 5.0;
  for (std::uint64_t k = 0; k < 5; ++k) {
    cfg.stream = k;
    const PathRecord p = simulate_path(init, cfg, mp);
    EXPECT_FALSE(p.aborted) << p.abort_reason;
    for (const auto& st : p.states) {
      EXPECT_NEAR(shell_relative_residual(st, mp), 0.0, tol::kShellAbsolute);
      EXPECT_GE(std::abs(st.a), 1.0);
      EXPECT_GT(st.a * st.b, 0.0);
    }
    EXPECT_NEAR(p.s.back(), 5.0, 1e-12);
    // the flow part of γ is exactly the phase integral
    EXPECT_LE(p.stats.max_pre_projection_residual, tol::kShellBand);
  }
}

TEST(Path, RejectsOffShellStart) {
  const ModelParams mp{1.0, 1.0};
  ReducedState init = make_shell_state(0, 0, 0, 0, 2.0, 0.3, 0.5, true, mp);
  init.a += 0.1;
  EXPECT_THROW(simulate_path(init, {}, mp), OffShellError);
  SimulationConfig bad;
  bad.stride = 0;
  EXPECT_THROW(bad.validate(), InvalidParameter);
}

TEST(Path, EulerSchemeAgreesAtSmallStep) {
  // strong agreement of the two schemes on a short horizon with shared increments
  const ModelParams mp{1.0, 0.5};
  const ReducedState init = make_shell_state(0, 0, 0, 0, 1.5, 0.2, 0.3, true, mp);
  SimulationConfig cfg;
  cfg.s_max = 0.2;
  cfg.ds = 1e-5;
  cfg.stride = 1000;
  const PathRecord split = simulate_path(init, cfg, mp);
  cfg.scheme = StepScheme::kEulerMaruyama;
  const PathRecord em = simulate_path(init, cfg, mp);
  ASSERT_FALSE(split.aborted);
  ASSERT_FALSE(em.aborted);
  const auto& s = split.states.back();
  const auto& e = em.states.back();
  EXPECT_NEAR(s.a, e.a, 1e-3);
  EXPECT_NEAR(s.zdot, e.zdot, 1e-3);
  EXPECT_NEAR(s.xdot, e.xdot, 5e-3);
  EXPECT_NEAR(s.x, e.x, 1e-3);
}

TEST(Polar, AmplitudeAndLambda) {
  const ModelParams mp{1.0, 1.0};
  Sampler rng(212);
  for (int n = 0; n < 100; ++n) {
    const ReducedState st = random_shell_state(rng, mp);
    const PolarState p = to_polar(st, 0.0, mp);
    EXPECT_NEAR(std::sinh(p.lambda), std::sqrt(st.a * st.a - 1 - st.zdot * st.zdot), 1e-9 * std::abs(st.a));
    EXPECT_NEAR(p.A, std::sinh(p.lambda) / std::abs(st.a), 1e-9);
    const double q = 2.0 - shrink_factor(st, mp) * st.b / st.a;
    EXPECT_NEAR(std::cos(p.gamma) * p.A, st.xdot / st.a, 1e-12);
    EXPECT_NEAR(std::sin(p.gamma) * p.A * kSqrt2, q, 1e-12);
    EXPECT_NEAR(to_polar(st, 20.0, mp).gamma - p.gamma, 2 * kPi * std::round((20.0 - p.gamma) / (2 * kPi)), 1e-12);
  }
  ReducedState rest;
  rest.a = 1.0;
  rest.b = 2.0;
  EXPECT_THROW(to_polar(rest, 0.0, mp), DegenerateAngleError);
}

TEST(Polar, PathGammaEqualsFlowPlusNoiseJumps) {
  const ModelParams mp{1.0, 1.0};
  const ReducedState init = make_shell_state(0, 0, 0, 0, 2.0, 0.3, 0.5, true, mp);
  SimulationConfig cfg;
  cfg.s_max = 3.0;
  cfg.stride = 1;
  const PathRecord p = simulate_path(init, cfg, mp);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::remainder(p.gamma[i] - principal_gamma(p.states[i], mp), 2 * kPi);
    EXPECT_NEAR(d, 0.0, 1e-8);
  }
  const auto g = series(p, Series::kGamma, mp);
  const auto ph = series(p, Series::kPhaseIntegral, mp);
  EXPECT_EQ(g.size(), p.size());
  // the noise jumps are small per step, so the phase integral carries the growth
  EXPECT_LT(std::abs((g.back() - g.front()) - ph.back()), 0.5 * std::abs(ph.back()) + 5.0);
}

TEST(Transform, IsometriesPreserveShellAndLambda) {
  const ModelParams mp{1.0, 1.0};
  const ReducedState init = make_shell_state(0, 0.2, 0, 0, 2.0, 0.3, 0.5, true, mp);
  SimulationConfig cfg;
  cfg.s_max = 1.0;
  const PathRecord p = simulate_path(init, cfg, mp);
  for (const auto& g : {IsometryElement::translation(1.0, -2.0, 0.5), IsometryElement::dilatation(0.7),
                        IsometryElement::rotation(1.1)}) {
    const PathRecord q = transform_path(p, g, mp);
    ASSERT_EQ(q.size(), p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_NEAR(shell_relative_residual(q.states[i], mp), 0.0, 1e-9);
      EXPECT_EQ(q.s[i], p.s[i]);
      if (g.kind != IsometryElement::Kind::kRotation) {
        EXPECT_NEAR(q.states[i].a, p.states[i].a, 1e-12 * std::abs(p.states[i].a));
        EXPECT_NEAR(q.states[i].zdot, p.states[i].zdot, 1e-12);
      }
    }
  }
}

TEST(SubDiffusion, AZdotIsPathwiseTheFullDiffusion) {
  // the ż chart's (a, ż) noise rows and the projection leave (a, ż) autonomous
  const ModelParams mp{1.0, 1.0};
  const ReducedState init = make_shell_state(0, 0, 0, 0, 2.0, 0.3, 0.5, true, mp);
  SimulationConfig cfg;
  cfg.s_max = 2.0;
  for (std::uint64_t k = 0; k < 5; ++k) {
    cfg.stream = k;
    const PathRecord full = simulate_path(init, cfg, mp);
    const SubPath az = simulate_subdiffusion(SubDiffusion::kAZdot, init, cfg, mp);
    const SubPath zo = simulate_subdiffusion(SubDiffusion::kZdot, init, cfg, mp);
    if (full.stats.retries != 0 || az.retries != 0) continue;
    ASSERT_EQ(full.size(), az.states.size());
    for (std::size_t i = 0; i < full.size(); ++i) {
      EXPECT_NEAR(az.states[i].a, full.states[i].a, 1e-10 * std::abs(full.states[i].a));
      EXPECT_NEAR(az.states[i].zdot, full.states[i].zdot, 1e-10 * std::max(1.0, std::abs(full.states[i].zdot)));
      EXPECT_NEAR(zo.states[i].zdot, full.states[i].zdot, 1e-10 * std::max(1.0, std::abs(full.states[i].zdot)));
    }
  }
}

TEST(SubDiffusion, ScalarALawMatchesFullDiffusion) {
  const ModelParams mp{1.0, 1.0};
  const ReducedState init = make_shell_state(0, 0, 0, 0, 2.0, 0.3, 0.5, true, mp);
  SimulationConfig cfg;
  cfg.s_max = 0.5;
  cfg.ds = 2e-3;
  cfg.stride = 1000;
  std::vector<double> full, sub;
  for (std::uint64_t k = 0; k < 1500; ++k) {
    cfg.seed = 11;
    cfg.stream = k;
    full.push_back(simulate_path(init, cfg, mp).states.back().a);
    cfg.seed = 12;
    sub.push_back(simulate_subdiffusion(SubDiffusion::kA, init, cfg, mp).states.back().a);
  }
  EXPECT_GT(stats::ks_two_sample(full, sub).p_value, 1e-3);
}

TEST(SubDiffusion, FourDimensionalProjectionStaysAdmissible) {
  const ModelParams mp{1.0, 1.0};
  const ReducedState init = make_shell_state(0, 0, 0, 0, 2.0, 0.3, 0.5, true, mp);
  SimulationConfig cfg;
  cfg.s_max = 1.0;
  const SubPath p = simulate_subdiffusion(SubDiffusion::kXXdotAB, init, cfg, mp);
  EXPECT_FALSE(p.aborted);
  for (const auto& st : p.states) {
    EXPECT_GT(st.a * st.b, 0.0);
    EXPECT_GE(st.zdot, 0.0);
    EXPECT_NEAR(shell_residual(st, mp), 0.0, 1e-9 * st.a * st.a);
  }
}
