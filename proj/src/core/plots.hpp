/*
 * Copyright 2026 The radfall Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/detector.hpp"
#include "core/evaluation.hpp"

namespace radfall::plot {

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

/// Standalone SVG line chart. When `right_axis` is non-empty it is drawn
/// against its own vertical scale on the right.
std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& left_axis, const std::string& y2_label = "",
                           const std::vector<Series>& right_axis = {},
                           const std::vector<double>& markers = {});

/// Detection rate against false alarms.
std::string roc_svg(const std::vector<eval::RocPoint>& points, const std::string& title);

/// Centroid height (left axis) and anomaly level (right axis) over frame
/// index, with dashed markers at labeled falls.
std::string trace_svg(const std::vector<std::pair<std::int64_t, double>>& heights,
                      const std::vector<detect::WindowScore>& scores, const std::vector<std::int64_t>& falls,
                      const std::string& title);

}  // namespace radfall::plot
