#pragma once

// Minimal static SVG renderings of the CSV grids.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "quadratomo/fock.hpp"
#include "quadratomo/gaussian.hpp"

namespace quadratomo::svg {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string line_plot(const gaussian::VarianceCurve& c, const std::string& title) {
  constexpr double W = 640, H = 400, pad = 50;
  double lo = 0, hi = 1;
  std::vector<double> finite;
  for (double v : c.variances)
    if (std::isfinite(v)) finite.push_back(v);
  if (!finite.empty()) {
    lo = std::min(0.0, *std::min_element(finite.begin(), finite.end()));
    hi = *std::max_element(finite.begin(), finite.end());
    if (hi <= lo) hi = lo + 1;
  }
  const double t_max = 2 * std::numbers::pi;
  auto px = [&](double t) { return pad + (W - 2 * pad) * t / t_max; };
  auto py = [&](double v) { return H - pad - (H - 2 * pad) * (v - lo) / (hi - lo); };
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" + fmt(H) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";
  s += "<line x1=\"" + fmt(pad) + "\" y1=\"" + fmt(H - pad) + "\" x2=\"" + fmt(W - pad) + "\" y2=\"" + fmt(H - pad) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt(pad) + "\" y1=\"" + fmt(pad) + "\" x2=\"" + fmt(pad) + "\" y2=\"" + fmt(H - pad) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt(pad) + "\" y1=\"" + fmt(py(0.5)) + "\" x2=\"" + fmt(W - pad) + "\" y2=\"" + fmt(py(0.5)) +
       "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  s += "<text x=\"" + fmt(W / 2) + "\" y=\"" + fmt(H - 12) + "\" text-anchor=\"middle\" font-size=\"12\">theta (rad)</text>\n";
  s += "<text x=\"14\" y=\"" + fmt(H / 2) + "\" font-size=\"12\" transform=\"rotate(-90 14 " + fmt(H / 2) +
       ")\" text-anchor=\"middle\">variance (quanta)</text>\n";
  s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < c.thetas.size(); ++i)
    if (std::isfinite(c.variances[i])) s += fmt(px(c.thetas[i])) + "," + fmt(py(c.variances[i])) + " ";
  s += "\"/>\n</svg>\n";
  return s;
}

// Diverging blue-white-red map, symmetric about zero.
inline std::string heatmap(const fock::WignerGrid& g, const std::string& title) {
  constexpr double cell = 3, pad = 40;
  const double W = 2 * pad + cell * g.x_axis.size(), H = 2 * pad + cell * g.p_axis.size();
  const double scale = std::max(1e-300, g.values.cwiseAbs().maxCoeff());
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" + fmt(H) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";
  for (std::size_t i = 0; i < g.x_axis.size(); ++i)
    for (std::size_t j = 0; j < g.p_axis.size(); ++j) {
      const double v = std::clamp(g.values(i, j) / scale, -1.0, 1.0);
      const int r = v < 0 ? int(255 * (1 + v)) : 255;
      const int b = v > 0 ? int(255 * (1 - v)) : 255;
      const int gr = int(255 * (1 - std::abs(v)));
      char color[8];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", r, gr, b);
      s += "<rect x=\"" + fmt(pad + cell * i) + "\" y=\"" + fmt(H - pad - cell * (j + 1)) + "\" width=\"" + fmt(cell) +
           "\" height=\"" + fmt(cell) + "\" fill=\"" + color + "\"/>\n";
    }
  s += "</svg>\n";
  return s;
}

}  // namespace quadratomo::svg
