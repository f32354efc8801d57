#pragma once

// JSON and SVG output for the demo commands.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "templar/demo/plan.hpp"

namespace templar::demo {

// Non-finite numbers have no JSON spelling; they are written as null.
inline nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json to_json(const HostValue& v) {
  if (!v.is_list()) {
    if (v.is_bool()) return v.as_double() != 0.0;
    if (v.is_int()) return static_cast<std::int64_t>(v.as_double());
    return number(v.as_double());
  }
  nlohmann::json a = nlohmann::json::array();
  for (const auto& e : v.list()) a.push_back(to_json(e));
  return a;
}

inline nlohmann::json to_json(const PlanReport& r) {
  nlohmann::json its = nlohmann::json::array();
  for (const auto& it : r.iterations) its.push_back({{"cost", number(it.cost)}, {"min_sdf", number(it.min_sdf)}});
  return {{"iterations", its},
          {"poses", to_json(r.poses)},
          {"body_positions", to_json(r.body_positions)},
          {"converged", r.converged},
          {"iterations_used", r.iterations_used}};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

// Two stacked line charts (cost, min SDF) over iterations, with the clearance
// drawn on the lower one.
inline std::string plot_svg(const PlanReport& r, double clearance) {
  const double w = 640, h = 200, pad = 40;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << 2 * h << "\">\n";
  auto chart = [&](const char* title, auto value, double y0, const double* ref) {
    std::vector<double> ys;
    for (const auto& it : r.iterations) {
      if (std::isfinite(value(it))) ys.push_back(value(it));
    }
    if (ref) ys.push_back(*ref);
    if (ys.empty()) return;
    const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
    const double lo = *mn, span = std::max(*mx - *mn, 1e-12);
    const double n = static_cast<double>(std::max<std::size_t>(r.iterations.size() - 1, 1));
    auto px = [&](std::size_t i) { return pad + (w - 2 * pad) * static_cast<double>(i) / n; };
    auto py = [&](double v) { return y0 + h - pad - (h - 2 * pad) * (v - lo) / span; };
    os << "<text x=\"" << pad << "\" y=\"" << y0 + pad / 2 << "\" font-size=\"12\">" << title << "</text>\n";
    os << "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
    for (std::size_t i = 0; i < r.iterations.size(); ++i) {
      const double v = value(r.iterations[i]);
      if (std::isfinite(v)) os << px(i) << ',' << py(v) << ' ';
    }
    os << "\"/>\n";
    if (ref) {
      os << "<line x1=\"" << pad << "\" x2=\"" << w - pad << "\" y1=\"" << py(*ref) << "\" y2=\"" << py(*ref)
         << "\" stroke=\"firebrick\" stroke-dasharray=\"4 3\"/>\n";
    }
  };
  chart("total cost", [](const PlanIteration& it) { return it.cost; }, 0, nullptr);
  chart("min sdf (dashed: clearance)", [](const PlanIteration& it) { return it.min_sdf; }, h, &clearance);
  os << "</svg>\n";
  return os.str();
}

}  // namespace templar::demo
