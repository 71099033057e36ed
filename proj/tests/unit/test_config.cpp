#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "godel/harness/config.hpp"
#include "test_util.hpp"

using namespace godel;
using namespace godel::harness;

TEST(Config, SerializeParseIsIdentity) {
  godel::testing::Sampler rng(401);
  for (int n = 0; n < 50; ++n) {
    RunConfig c;
    c.omega = rng.uniform(0.1, 3.0);
    c.sigma = rng.uniform(0.0, 2.0) / 3.0;
    c.ds = std::exp(rng.uniform(-12, -3));
    c.seed = static_cast<std::uint64_t>(rng.uniform(0, 1e18));
    c.paths = static_cast<int>(rng.uniform(1, 1e4));
    c.check_doubling = n % 2 == 0;
    c.scheme = n % 3 == 0 ? "euler" : "splitting";
    c.output_dir = "out dir/" + std::to_string(n);
    c.Y0 = -rng.uniform(0, 1) * 1e-300;
    const std::string text = serialize(c);
    const RunConfig back = parse_config(text);
    EXPECT_EQ(serialize(back), text);
    EXPECT_EQ(back.omega, c.omega);
    EXPECT_EQ(back.ds, c.ds);
    EXPECT_EQ(back.seed, c.seed);
    EXPECT_EQ(back.Y0, c.Y0);
    EXPECT_EQ(back.output_dir, c.output_dir);
    EXPECT_EQ(config_hash(back), config_hash(c));
  }
}

TEST(Config, CommentsBlankLinesAndQuotes) {
  const RunConfig c = parse_config("# header\n\n  omega = 2.5   # trailing\nscheme = euler\noutput_dir = \"runs/a\"\n");
  EXPECT_EQ(c.omega, 2.5);
  EXPECT_EQ(c.scheme, "euler");
  EXPECT_EQ(c.output_dir, "runs/a");
  EXPECT_EQ(c.sigma, RunConfig{}.sigma);
}

TEST(Config, BaseIsLayeredAndOverridesWin) {
  RunConfig base;
  base.paths = 7;
  RunConfig c = parse_config("omega = 0.5\n", base);
  EXPECT_EQ(c.paths, 7);
  EXPECT_EQ(c.omega, 0.5);
  apply_override(c, "omega=1.25");
  apply_override(c, " paths = 9");
  EXPECT_EQ(c.omega, 1.25);
  EXPECT_EQ(c.paths, 9);
  EXPECT_THROW(apply_override(c, "omega"), ConfigError);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config("omgea = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("omega = one\n"), ConfigError);
  EXPECT_THROW(parse_config("omega = 1.0x\n"), ConfigError);
  EXPECT_THROW(parse_config("paths = 2.5\n"), ConfigError);
  EXPECT_THROW(parse_config("check_doubling = maybe\n"), ConfigError);
  EXPECT_THROW(parse_config("just words\n"), ConfigError);
  try {
    parse_config("a\nomega 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
}

TEST(Config, ValidationCatchesEachRange) {
  const char* bad[] = {"omega = 0",         "sigma = -1",         "ds = 0",          "s_max = -1",
                       "stride = 0",        "paths = 0",          "threads = -1",    "window_fraction = 0",
                       "abort_fraction = 2", "scheme = rk4",      "initial = other", "b_branch = middle",
                       "geodesic_kind = x", "geometry_points = 0", "samples = 1",    "a0 = 0.5"};
  for (const char* line : bad) EXPECT_THROW(parse_config(line).validate(), ConfigError) << line;
  EXPECT_NO_THROW(RunConfig{}.validate());
}

TEST(Config, EnvironmentOverridesOutputDir) {
  RunConfig c;
  c.output_dir = "from_file";
  ::setenv(kOutputDirEnv, "from_env", 1);
  apply_environment(c);
  EXPECT_EQ(c.output_dir, "from_env");
  ::setenv(kOutputDirEnv, "", 1);
  c.output_dir = "kept";
  apply_environment(c);
  EXPECT_EQ(c.output_dir, "kept");
  ::unsetenv(kOutputDirEnv);
}

TEST(Config, HashTracksContent) {
  RunConfig a, b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.seed += 1;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, LoadsFileAndDerivesRunObjects) {
  const auto path = std::filesystem::temp_directory_path() / "godel_test_config.cfg";
  {
    std::ofstream f(path);
    f << "omega = 2\nsigma = 0.5\ns_max = 3\nds = 0.01\nstride = 5\nscheme = euler\n"
         "a0 = 3\nxdot0 = 0\nzdot0 = 1\nb_branch = upper\n";
  }
  const RunConfig c = load_config_file(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(c.model().omega, 2.0);
  EXPECT_EQ(c.model().sigma, 0.5);
  const SimulationConfig sim = c.simulation(4);
  EXPECT_EQ(sim.stream, 4u);
  EXPECT_EQ(sim.seed, c.seed);
  EXPECT_EQ(sim.stride, 5);
  EXPECT_EQ(c.step_scheme(), StepScheme::kEulerMaruyama);
  const ReducedState st = c.initial_state();
  EXPECT_EQ(st.a, 3.0);
  EXPECT_NEAR(shell_relative_residual(st, c.model()), 0.0, 1e-14);
  EXPECT_THROW(load_config_file("/nonexistent/godel.cfg"), ConfigError);
}

TEST(Config, BoundaryInitialState) {
  const RunConfig c = parse_config("initial = boundary\na0 = 1000\nell0 = -0.3\nrho0 = 2.5\nY0 = 1\n");
  const ReducedState st = c.initial_state();
  EXPECT_NEAR(st.zdot / st.a, -0.3, 1e-15);
  EXPECT_NEAR(st.b / st.a, 2.5, 1e-15);
}
