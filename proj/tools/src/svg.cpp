/*
 * Copyright 2026 The reclab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "reclab/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reclab/csv.hpp"

namespace reclab::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kPlotLeft = 70.0;
constexpr double kPlotRight = 610.0;
constexpr const char* kFont = "font-family:sans-serif;font-size:12px";

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string color(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string num(double v) {
  // Fixed precision keeps output stable across platforms.
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

struct Range {
  double lo = HUGE_VAL;
  double hi = -HUGE_VAL;
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (lo > hi) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-9) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

void axes(std::ostringstream& os, const Range& xr, const Range& yr, double top, double bottom) {
  os << "<rect x=\"" << num(kPlotLeft) << "\" y=\"" << num(top) << "\" width=\""
     << num(kPlotRight - kPlotLeft) << "\" height=\"" << num(bottom - top)
     << "\" style=\"fill:none;stroke:#333;stroke-width:1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    const double px = xr.map(fx, kPlotLeft, kPlotRight);
    const double py = yr.map(fy, bottom, top);
    os << "<text x=\"" << num(px) << "\" y=\"" << num(bottom + 14) << "\" style=\"" << kFont
       << ";text-anchor:middle\">" << format_double(std::round(fx * 1000) / 1000) << "</text>\n";
    os << "<text x=\"" << num(kPlotLeft - 4) << "\" y=\"" << num(py + 4) << "\" style=\"" << kFont
       << ";text-anchor:end\">" << format_double(std::round(fy * 1000) / 1000) << "</text>\n";
  }
}

}  // namespace

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string scatter_svg(const std::vector<ScatterPoint>& points, const std::string& x_label,
                        const std::string& y_label, const std::string& title) {
  constexpr double kHeight = 480.0, top = 40.0, bottom = 430.0;
  Range xr, yr;
  for (const auto& p : points) {
    xr.add(p.x);
    yr.add(p.y);
  }
  xr.finish();
  yr.finish();
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
     << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" style=\"fill:#fff\"/>\n";
  os << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" style=\"" << kFont
     << ";text-anchor:middle;font-size:14px\">" << xml_escape(title) << "</text>\n";
  axes(os, xr, yr, top, bottom);
  os << "<text x=\"" << num((kPlotLeft + kPlotRight) / 2) << "\" y=\"" << num(bottom + 34)
     << "\" style=\"" << kFont << ";text-anchor:middle\">" << xml_escape(x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << num((top + bottom) / 2) << "\" transform=\"rotate(-90 16 "
     << num((top + bottom) / 2) << ")\" style=\"" << kFont << ";text-anchor:middle\">"
     << xml_escape(y_label) << "</text>\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
    const double px = xr.map(p.x, kPlotLeft, kPlotRight);
    const double py = yr.map(p.y, bottom, top);
    os << "<g class=\"point\"><circle cx=\"" << num(px) << "\" cy=\"" << num(py)
       << "\" r=\"5\" style=\"fill:" << color(i) << "\"/><text x=\"" << num(px + 8) << "\" y=\""
       << num(py - 6) << "\" style=\"" << kFont << "\">" << xml_escape(p.label) << "</text></g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string line_panels_svg(const std::vector<Panel>& panels, const std::string& x_label) {
  constexpr double kPanelHeight = 220.0, kGap = 50.0;
  const double height = 20.0 + panels.size() * (kPanelHeight + kGap);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
     << num(height) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(height) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" style=\"fill:#fff\"/>\n";
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& panel = panels[pi];
    const double top = 40.0 + pi * (kPanelHeight + kGap);
    const double bottom = top + kPanelHeight - 40.0;
    Range xr, yr;
    for (const auto& s : panel.series) {
      for (double v : s.x) xr.add(v);
      for (double v : s.y) yr.add(v);
    }
    xr.finish();
    yr.finish();
    os << "<g class=\"panel\">\n";
    os << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(top - 10) << "\" style=\"" << kFont
       << ";text-anchor:middle;font-size:14px\">" << xml_escape(panel.title) << "</text>\n";
    axes(os, xr, yr, top, bottom);
    os << "<text x=\"" << num((kPlotLeft + kPlotRight) / 2) << "\" y=\"" << num(bottom + 30)
       << "\" style=\"" << kFont << ";text-anchor:middle\">" << xml_escape(x_label) << "</text>\n";
    for (std::size_t si = 0; si < panel.series.size(); ++si) {
      const Series& s = panel.series[si];
      os << "<g class=\"series\" data-name=\"" << xml_escape(s.name) << "\">";
      std::string pts;
      auto flush = [&] {
        if (!pts.empty()) {
          os << "<polyline points=\"" << pts << "\" style=\"fill:none;stroke:" << color(si)
             << ";stroke-width:1.5\"/>";
        }
        pts.clear();
      };
      for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) {
          flush();
          continue;
        }
        if (!pts.empty()) pts += ' ';
        pts += num(xr.map(s.x[k], kPlotLeft, kPlotRight)) + ',' + num(yr.map(s.y[k], bottom, top));
      }
      flush();
      os << "</g>\n";
      os << "<text x=\"" << num(kPlotRight + 4) << "\" y=\"" << num(top + 12 + 14 * si)
         << "\" style=\"" << kFont << ";fill:" << color(si) << "\">" << xml_escape(s.name)
         << "</text>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace reclab::cli
