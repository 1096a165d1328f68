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

#pragma once

#include <string>
#include <vector>

namespace reclab::cli {

struct ScatterPoint {
  std::string label;
  double x = 0.0;
  double y = 0.0;
};

// Self-contained SVG (inline styles, generic font family only).
std::string scatter_svg(const std::vector<ScatterPoint>& points, const std::string& x_label,
                        const std::string& y_label, const std::string& title);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;  // NaN entries break the line
};

struct Panel {
  std::string title;
  std::vector<Series> series;
};

// Panels stacked vertically, one <g class="panel"> each, one
// <polyline class="series"> per series segment.
std::string line_panels_svg(const std::vector<Panel>& panels, const std::string& x_label);

std::string xml_escape(const std::string& s);

}  // namespace reclab::cli
