#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "godel/asymptotics.hpp"
#include "godel/diffusion.hpp"
#include "godel/harness/config.hpp"

namespace godel::harness {

using Json = nlohmann::json;

void ensure_directory(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& name);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_json(const std::string& path, const Json& j);

/// Header block shared by every report: scenario, config hash, seed, full config.
Json report_envelope(const RunConfig& cfg);
Json to_json(const Diagnostic& d);
Json to_json(const DiagnosticReport& r);
Json to_json(const AsymptoticEstimate& e);
Json to_json(const StepStats& s);

/// s, t, x, y, z, tdot, xdot, ydot, zdot, a, b, c, Y, pseudo_norm
void write_phase_path_csv(const std::string& path, const std::vector<double>& s,
                          const std::vector<PhaseState>& states, const ModelParams& mp);
void write_diffusion_csv(const std::string& path, const PathRecord& rec, const ModelParams& mp);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

void write_svg_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, const std::vector<PlotSeries>& series);

}  // namespace godel::harness
