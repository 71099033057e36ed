#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "godel/harness/config.hpp"
#include "godel/harness/scenarios.hpp"
#include "godel/types.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<int> threads;
  std::optional<double> omega;
  std::optional<double> sigma;
  std::optional<double> s_max;
  std::optional<double> ds;
  bool print_config = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("-c,--config", f.config_path, "key = value config file");
  sub->add_option("--set", f.sets, "override, key=value (repeatable)");
  sub->add_option("-o,--output-dir", f.output_dir, "output directory");
  sub->add_option("--seed", f.seed, "base seed");
  sub->add_option("--omega", f.omega, "rotation rate");
  sub->add_option("--sigma", f.sigma, "noise strength");
  sub->add_option("--s-max", f.s_max, "proper-time horizon");
  sub->add_option("--ds", f.ds, "proper-time step");
  sub->add_option("--paths", f.paths, "ensemble size");
  sub->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  sub->add_flag("--print-config", f.print_config, "print the resolved config and exit");
}

godel::harness::RunConfig resolve(const std::string& scenario, const Flags& f) {
  using namespace godel::harness;
  RunConfig cfg;
  if (!f.config_path.empty()) cfg = load_config_file(f.config_path, cfg);
  cfg.scenario = scenario;
  apply_environment(cfg);
  if (f.output_dir) cfg.output_dir = *f.output_dir;
  if (f.seed) cfg.seed = *f.seed;
  if (f.omega) cfg.omega = *f.omega;
  if (f.sigma) cfg.sigma = *f.sigma;
  if (f.s_max) cfg.s_max = *f.s_max;
  if (f.ds) cfg.ds = *f.ds;
  if (f.paths) cfg.paths = *f.paths;
  if (f.threads) cfg.threads = *f.threads;
  for (const std::string& s : f.sets) apply_override(cfg, s);
  cfg.scenario = scenario;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relativistic diffusion in the rotating dust universe"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::string> names{"verify-geometry", "geodesic", "diffuse", "ensemble", "demo-transitivity"};
  const std::vector<std::string> help{
      "check metric, curvature, Einstein and isometry identities at random points",
      "closed-form vs RK4 geodesic, with projections",
      "simulate one diffusion path",
      "simulate an ensemble and run the asymptotic diagnostics",
      "join two points by a broken timelike geodesic",
  };
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < names.size(); ++i) {
    subs.push_back(app.add_subcommand(names[i], help[i]));
    add_common(subs.back(), flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string scenario;
  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) scenario = names[i];

  godel::harness::RunConfig cfg;
  try {
    cfg = resolve(scenario, flags);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (flags.print_config) {
    std::cout << godel::harness::serialize(cfg);
    return 0;
  }

  try {
    const int rc = godel::harness::run_scenario(cfg, std::cout);
    std::cout << (rc == 0 ? "PASS" : "FAIL") << " " << scenario << " (outputs in " << cfg.output_dir << ")\n";
    return rc;
  } catch (const godel::harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const godel::InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
