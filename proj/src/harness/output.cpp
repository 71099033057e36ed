#include "godel/harness/output.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "godel/constants.hpp"
#include "godel/geodesics.hpp"
#include "godel/geometry.hpp"

namespace godel::harness {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << std::setprecision(17);
  return f;
}

}  // namespace

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + dir + "': " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
  f << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
    f << '\n';
  }
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << j.dump(2) << '\n';
}

Json report_envelope(const RunConfig& cfg) {
  Json j;
  j["scenario"] = cfg.scenario;
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.seed;
  j["config"] = serialize(cfg);
  return j;
}

Json to_json(const Diagnostic& d) {
  Json j;
  j["name"] = d.name;
  j["paper_anchor"] = d.anchor;
  j["value"] = std::isfinite(d.value) ? Json(d.value) : Json(nullptr);
  j["expected"] = d.expected;
  j["tolerance"] = d.tolerance;
  j["pass"] = d.pass;
  if (!d.note.empty()) j["note"] = d.note;
  return j;
}

Json to_json(const DiagnosticReport& r) {
  Json arr = Json::array();
  for (const Diagnostic& d : r.items) arr.push_back(to_json(d));
  return arr;
}

Json to_json(const AsymptoticEstimate& e) {
  return Json{{"ell_hat", e.ell_hat}, {"rho_hat", e.rho_hat}, {"Y_hat", e.Y_hat},
              {"s_lo", e.s_lo},       {"s_hi", e.s_hi},       {"disp_ell", e.disp_ell},
              {"disp_log_rho", e.disp_log_rho}, {"disp_Y", e.disp_Y}};
}

Json to_json(const StepStats& s) {
  return Json{{"steps", s.steps},
              {"retries", s.retries},
              {"max_depth", s.max_depth},
              {"max_noise_gamma_jump", s.max_noise_gamma_jump},
              {"max_pre_projection_residual", s.max_pre_projection_residual}};
}

void write_phase_path_csv(const std::string& path, const std::vector<double>& s,
                          const std::vector<PhaseState>& states, const ModelParams& mp) {
  std::vector<std::vector<double>> rows;
  rows.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const PhaseState& st = states[i];
    const double e = std::exp(kSqrt2 * mp.omega * st.point.x);
    const Vector4& v = st.velocity;
    const double a = v(0) + e * v(2);
    const double b = e * (2.0 * v(0) + e * v(2));
    const double Y = kSqrt2 * v(1) / (mp.omega * b) + st.point.y;
    rows.push_back({s[i], st.point.t, st.point.x, st.point.y, st.point.z, v(0), v(1), v(2), v(3), a, b,
                    v(3), Y, pseudo_norm(st, mp)});
  }
  write_csv(path, {"s", "t", "x", "y", "z", "tdot", "xdot", "ydot", "zdot", "a", "b", "c", "Y", "pseudo_norm"},
            rows);
}

void write_diffusion_csv(const std::string& path, const PathRecord& rec, const ModelParams& mp) {
  const auto shell = series(rec, Series::kShellResidual, mp);
  const auto ys = series(rec, Series::kYs, mp);
  const auto cyl = series(rec, Series::kRunningCylinder, mp);
  const auto lam = series(rec, Series::kLambda, mp);
  const auto A = series(rec, Series::kPolarA, mp);
  std::vector<std::vector<double>> rows;
  rows.reserve(rec.size());
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const ReducedState& st = rec.states[i];
    rows.push_back({rec.s[i], st.t, st.x, st.y, st.z, tdot(st, mp), st.xdot, ydot(st, mp), st.zdot, st.a, st.b,
                    shell[i], st.zdot / st.a, st.b / st.a, ys[i], cyl[i], std::log(std::abs(st.a)),
                    std::log(std::abs(st.b)), std::log(std::abs(st.zdot)), lam[i], rec.gamma[i], A[i],
                    rec.phase_integral[i]});
  }
  write_csv(path,
            {"s", "t", "x", "y", "z", "tdot", "xdot", "ydot", "zdot", "a", "b", "shell_residual", "zdot_over_a",
             "b_over_a", "Y_s", "cylinder_residual", "log_abs_a", "log_abs_b", "log_abs_zdot", "lambda", "gamma",
             "A", "phase_integral"},
            rows);
}

void write_svg_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, const std::vector<PlotSeries>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  f << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  f << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  f << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel
    << "</text>\n";
  f << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
    << H / 2 << ")\">" << ylabel << "</text>\n";
  f << std::setprecision(4);
  f << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"10\">" << xmin << "</text>\n";
  f << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" font-size=\"10\" text-anchor=\"end\">" << xmax
    << "</text>\n";
  f << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" font-size=\"10\" text-anchor=\"end\">" << ymin << "</text>\n";
  f << "<text x=\"" << L - 4 << "\" y=\"" << T + 10 << "\" font-size=\"10\" text-anchor=\"end\">" << ymax
    << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    f << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << colors[k % 6] << "\" points=\"";
    f << std::setprecision(6);
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      f << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    f << "\"/>\n";
    f << "<text x=\"" << L + 8 << "\" y=\"" << T + 16 + 14 * static_cast<double>(k) << "\" font-size=\"11\" fill=\""
      << colors[k % 6] << "\">" << s.label << "</text>\n";
  }
  f << "</svg>\n";
}

}  // namespace godel::harness
