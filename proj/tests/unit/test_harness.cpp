#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "godel/constants.hpp"
#include "godel/geometry.hpp"
#include "godel/harness/ensemble.hpp"
#include "godel/harness/output.hpp"
#include "godel/harness/scenarios.hpp"
#include "godel/harness/transitivity.hpp"
#include "test_util.hpp"

using namespace godel;
using namespace godel::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("godel_harness_" + name);
  fs::remove_all(p);
  return p;
}

Json read_json(const fs::path& p) {
  std::ifstream f(p);
  return Json::parse(f);
}

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  return line;
}

void check_arcs(const TransitivityResult& r, const SpacetimePoint& from, const ModelParams& mp) {
  SpacetimePoint cur = from;
  for (const Arc& arc : r.arcs) {
    const Vector4 gap = arc.start.as_vector() - cur.as_vector();
    EXPECT_LT(gap.cwiseAbs().maxCoeff(), 1e-12);
    const PhaseState a = timelike_eval(arc.gp, 0.0, mp);
    const PhaseState b = timelike_eval(arc.gp, arc.s_end, mp);
    EXPECT_LT((a.point.as_vector() - arc.start.as_vector()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((b.point.as_vector() - arc.end.as_vector()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(pseudo_norm(a, mp), 1.0, 1e-9);
    EXPECT_GE(arc.s_end, 0.0);
    EXPECT_LT(arc.gp.k(), 1.0 / kSqrt2);
    cur = arc.end;
  }
  EXPECT_LT((cur.as_vector() - r.reached.as_vector()).cwiseAbs().maxCoeff(), 1e-12);
}

}  // namespace

TEST(Ensemble, IndependentOfThreadCount) {
  const ModelParams mp{1.0, 1.0};
  EnsembleOptions opt;
  opt.paths = 6;
  opt.sim.s_max = 1.0;
  opt.sim.seed = 99;
  opt.window_fraction = 1.0;
  const ReducedState init = make_shell_state(0, 0, 0, 0, 2.0, 0.3, 0.5, false, mp);
  opt.threads = 1;
  const EnsembleSummary one = run_ensemble(init, opt, mp);
  opt.threads = 3;
  const EnsembleSummary three = run_ensemble(init, opt, mp);
  ASSERT_EQ(one.indices, three.indices);
  EXPECT_EQ(one.configured(), 6u);
  EXPECT_EQ(three.threads_used, 3);
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    EXPECT_EQ(one.records[i].states.back().fiber(), three.records[i].states.back().fiber());
    EXPECT_EQ(one.estimates[i].ell_hat, three.estimates[i].ell_hat);
  }
  // path i equals a standalone run on stream i
  SimulationConfig sim = opt.sim;
  sim.stream = one.indices[4];
  EXPECT_EQ(simulate_path(init, sim, mp).states.back().fiber(), one.records[4].states.back().fiber());
  EXPECT_EQ(one.steps, three.steps);
  EXPECT_DOUBLE_EQ(one.abort_fraction(), 0.0);
}

TEST(Ensemble, SamplerAndRecordDropping) {
  const ModelParams mp{1.0, 1.0};
  EnsembleOptions opt;
  opt.paths = 4;
  opt.sim.s_max = 0.5;
  opt.keep_records = false;
  opt.window_fraction = 1.0;
  const EnsembleSummary s = run_ensemble(
      [&](std::size_t i) { return make_shell_state(0, 0, 0, 0, 2.0 + i, 0.0, 0.5, true, mp); }, opt, mp);
  EXPECT_TRUE(s.records.empty());
  EXPECT_EQ(s.estimates.size(), 4u);
}

TEST(Transitivity, SamePointNeedsNoArcs) {
  const ModelParams mp{1.0, 1.0};
  const SpacetimePoint p{1, 0.2, -0.3, 4};
  const TransitivityResult r = connect_points(p, p, mp);
  EXPECT_TRUE(r.arcs.empty());
  EXPECT_EQ(r.endpoint_error, 0.0);
}

TEST(Transitivity, PureTimeAndHeightMoves) {
  const ModelParams mp{1.0, 1.0};
  const SpacetimePoint p{0, 0.5, 1.0, 0};
  for (const auto& [dt, dz] : {std::pair{3.0, 1.0}, std::pair{-2.0, 0.5}, std::pair{1.0, 4.0}, std::pair{0.0, -2.0}}) {
    const SpacetimePoint q{p.t + dt, p.x, p.y, p.z + dz};
    const TransitivityResult r = connect_points(p, q, mp);
    EXPECT_GE(r.arcs.size(), 1u);
    EXPECT_LE(r.arcs.size(), 2u);
    for (const Arc& a : r.arcs) EXPECT_EQ(a.kind, Arc::Kind::kStatic);
    EXPECT_LT(r.endpoint_error, 1e-9);
    check_arcs(r, p, mp);
  }
}

TEST(Transitivity, GenericPairsAreConnected) {
  godel::testing::Sampler rng(501);
  for (double w : {0.5, 1.0, 2.0}) {
    const ModelParams mp{w, 1.0};
    for (int n = 0; n < 20; ++n) {
      const SpacetimePoint p = rng.point(1.0, 3.0), q = rng.point(1.0, 3.0);
      const TransitivityResult r = connect_points(p, q, mp);
      EXPECT_LT(r.endpoint_error, 1e-6) << "omega " << w << " case " << n;
      const Vector4 d = r.reached.as_vector() - q.as_vector();
      EXPECT_LT(d.cwiseAbs().maxCoeff(), 1e-6);
      check_arcs(r, p, mp);
    }
  }
}

TEST(Transitivity, StaticArcsAreTimelikeWithZeroPlanarMotion) {
  const ModelParams mp{1.0, 1.0};
  const SpacetimePoint p{0, -0.4, 2.0, 1.0};
  const auto arcs = static_arcs(p, 1.0, 3.0, mp);
  ASSERT_EQ(arcs.size(), 2u);
  for (const Arc& a : arcs) {
    for (double s = 0; s <= a.s_end; s += a.s_end / 8) {
      const PhaseState st = timelike_eval(a.gp, s, mp);
      EXPECT_NEAR(st.point.x, p.x, 1e-12);
      EXPECT_NEAR(st.point.y, p.y, 1e-12);
    }
  }
  EXPECT_NEAR(arcs.back().end.t, p.t + 1.0, 1e-12);
  EXPECT_NEAR(arcs.back().end.z, p.z + 3.0, 1e-12);
}

TEST(Output, CsvHeaderAndRows) {
  const fs::path dir = scratch("csv");
  ensure_directory(dir.string());
  const std::string f = join_path(dir.string(), "t.csv");
  write_csv(f, {"s", "v"}, {{0.0, 1.5}, {0.1, -2.0}});
  std::ifstream in(f);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str().substr(0, 4), "s,v\n");
  EXPECT_NE(ss.str().find("-2"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Output, DiagnosticJsonUsesDescriptiveAnchor) {
  Diagnostic d{"metric_inverse", "g times its inverse is the identity", 1e-15, 0.0, 1e-12, true, ""};
  const Json j = to_json(d);
  EXPECT_EQ(j["paper_anchor"], "g times its inverse is the identity");
  EXPECT_EQ(j["pass"], true);
  RunConfig cfg;
  cfg.seed = 1234;
  const Json e = report_envelope(cfg);
  EXPECT_EQ(e["seed"], 1234u);
  EXPECT_EQ(e["config_hash"], config_hash(cfg));
}

TEST(Scenario, VerifyGeometryReportsCurvatureEight) {
  RunConfig cfg;
  cfg.scenario = "verify-geometry";
  cfg.omega = 2.0;
  cfg.geometry_points = 50;
  cfg.output_dir = scratch("geom").string();
  std::ostringstream log;
  EXPECT_EQ(run_scenario(cfg, log), 0) << log.str();
  const Json j = read_json(fs::path(cfg.output_dir) / "geometry_report.json");
  EXPECT_EQ(j["config_hash"], config_hash(cfg));
  EXPECT_EQ(j["all_pass"], true);
  bool found = false;
  for (const auto& d : j["diagnostics"]) {
    EXPECT_TRUE(d.contains("paper_anchor"));
    if (d["name"].get<std::string>().rfind("scalar_curvature", 0) == 0 && d["expected"].get<double>() != 0.0) {
      EXPECT_NEAR(d["value"].get<double>(), 8.0, 1e-9);
      found = true;
    }
  }
  EXPECT_TRUE(found);
  fs::remove_all(cfg.output_dir);
}

TEST(Scenario, ZeroToleranceFailsWithExitOne) {
  RunConfig cfg;
  cfg.scenario = "verify-geometry";
  cfg.geometry_points = 20;
  cfg.tol_ricci = 0.0;
  cfg.tol_einstein = 0.0;
  cfg.tol_metric_inverse = 0.0;
  cfg.output_dir = scratch("geom0").string();
  std::ostringstream log;
  EXPECT_EQ(run_scenario(cfg, log), 1);
  fs::remove_all(cfg.output_dir);
}

TEST(Scenario, GeodesicWritesComparisonFiles) {
  RunConfig cfg;
  cfg.scenario = "geodesic";
  cfg.samples = 200;
  cfg.output_dir = scratch("geo").string();
  std::ostringstream log;
  EXPECT_EQ(run_scenario(cfg, log), 0) << log.str();
  const fs::path d(cfg.output_dir);
  EXPECT_EQ(first_line(d / "geodesic_closed_form.csv"), "s,t,x,y,z,tdot,xdot,ydot,zdot,a,b,c,Y,pseudo_norm");
  EXPECT_TRUE(fs::exists(d / "geodesic_ode.csv"));
  EXPECT_TRUE(fs::exists(d / "projection_xy.svg"));
  const Json j = read_json(d / "geodesic_report.json");
  EXPECT_GT(j["geodesic"]["planar_period"].get<double>(), 0.0);
  fs::remove_all(cfg.output_dir);
}

TEST(Scenario, DiffuseIsDeterministic) {
  RunConfig cfg;
  cfg.scenario = "diffuse";
  cfg.s_max = 2.0;
  cfg.output_dir = scratch("diff").string();
  std::ostringstream log;
  run_scenario(cfg, log);
  std::ifstream f1(fs::path(cfg.output_dir) / "diffusion_path.csv");
  std::stringstream a;
  a << f1.rdbuf();
  run_scenario(cfg, log);
  std::ifstream f2(fs::path(cfg.output_dir) / "diffusion_path.csv");
  std::stringstream b;
  b << f2.rdbuf();
  EXPECT_FALSE(a.str().empty());
  EXPECT_EQ(a.str(), b.str());
  EXPECT_TRUE(fs::exists(fs::path(cfg.output_dir) / "diffusion_summary.json"));
  fs::remove_all(cfg.output_dir);
}

TEST(Scenario, SmallEnsembleRunsQuickly) {
  RunConfig cfg;
  cfg.scenario = "ensemble";
  cfg.paths = 2;
  cfg.output_dir = scratch("ens").string();
  std::ostringstream log;
  const auto t0 = std::chrono::steady_clock::now();
  run_scenario(cfg, log);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 10.0);
  const Json j = read_json(fs::path(cfg.output_dir) / "ensemble_summary.json");
  EXPECT_EQ(j["paths_configured"], 2u);
  EXPECT_TRUE(j.contains("runtime"));
  fs::remove_all(cfg.output_dir);
}

TEST(Scenario, TransitivityDemo) {
  RunConfig cfg;
  cfg.scenario = "demo-transitivity";
  cfg.t1 = 2.0;
  cfg.x1 = 0.5;
  cfg.y1 = -1.0;
  cfg.z1 = 1.0;
  cfg.output_dir = scratch("trans").string();
  std::ostringstream log;
  EXPECT_EQ(run_scenario(cfg, log), 0) << log.str();
  const Json j = read_json(fs::path(cfg.output_dir) / "transitivity_report.json");
  EXPECT_FALSE(j["arcs"].empty());
  fs::remove_all(cfg.output_dir);
}

TEST(Scenario, UnknownScenarioIsConfigError) {
  RunConfig cfg;
  cfg.scenario = "nope";
  std::ostringstream log;
  EXPECT_THROW(run_scenario(cfg, log), ConfigError);
}
