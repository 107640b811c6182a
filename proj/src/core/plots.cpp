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

#include "core/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace radfall::plot {

namespace {

constexpr double kWidth = 900;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 70;
constexpr double kTop = 40;
constexpr double kBottom = 50;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  }
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& left_axis, const std::string& y2_label,
                           const std::vector<Series>& right_axis, const std::vector<double>& markers) {
  Range x, y, y2;
  for (const auto& s : left_axis)
    for (auto [a, b] : s.points) x.add(a), y.add(b);
  for (const auto& s : right_axis)
    for (auto [a, b] : s.points) x.add(a), y2.add(b);
  x.finish();
  y.finish();
  y2.finish();
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" +
                    fmt(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
         "</text>\n";
  svg += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y1) + "\" width=\"" + fmt(x1 - x0) + "\" height=\"" +
         fmt(y0 - y1) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = x.lo + (x.hi - x.lo) * i / 5.0;
    const double px = x.map(fx, x0, x1);
    svg += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(y0 + 18) + "\" text-anchor=\"middle\">" + tick(fx) + "</text>\n";
    const double fy = y.lo + (y.hi - y.lo) * i / 5.0;
    const double py = y.map(fy, y0, y1);
    svg += "<text x=\"" + fmt(x0 - 6) + "\" y=\"" + fmt(py + 4) + "\" text-anchor=\"end\">" + tick(fy) + "</text>\n";
    if (!right_axis.empty()) {
      const double fy2 = y2.lo + (y2.hi - y2.lo) * i / 5.0;
      svg += "<text x=\"" + fmt(x1 + 6) + "\" y=\"" + fmt(y2.map(fy2, y0, y1) + 4) + "\">" + tick(fy2) + "</text>\n";
    }
  }
  svg += "<text x=\"" + fmt((x0 + x1) / 2) + "\" y=\"" + fmt(kHeight - 12) + "\" text-anchor=\"middle\">" +
         escape(x_label) + "</text>\n";
  svg += "<text transform=\"translate(18," + fmt((y0 + y1) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(y_label) + "</text>\n";
  if (!right_axis.empty())
    svg += "<text transform=\"translate(" + fmt(kWidth - 14) + "," + fmt((y0 + y1) / 2) +
           ") rotate(90)\" text-anchor=\"middle\">" + escape(y2_label) + "</text>\n";
  for (double m : markers) {
    const double px = x.map(m, x0, x1);
    svg += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(px) + "\" y2=\"" + fmt(y0) +
           "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  auto draw = [&](const Series& s, const Range& yr) {
    std::string pts;
    for (auto [a, b] : s.points) pts += fmt(x.map(a, x0, x1)) + "," + fmt(yr.map(b, y0, y1)) + " ";
    if (!pts.empty()) pts.pop_back();
    svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" + pts + "\">" +
           "<title>" + escape(s.label) + "</title></polyline>\n";
  };
  for (const auto& s : left_axis) draw(s, y);
  for (const auto& s : right_axis) draw(s, y2);
  double ly = y1 + 16;
  for (const auto* group : {&left_axis, &right_axis})
    for (const auto& s : *group) {
      svg += "<text x=\"" + fmt(x0 + 10) + "\" y=\"" + fmt(ly) + "\" fill=\"" + s.color + "\">" + escape(s.label) +
             "</text>\n";
      ly += 15;
    }
  svg += "</svg>\n";
  return svg;
}

std::string roc_svg(const std::vector<eval::RocPoint>& points, const std::string& title) {
  Series s{"detection rate", "#1f77b4", {}};
  std::vector<eval::RocPoint> sorted = points;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.anomaly_threshold > b.anomaly_threshold; });
  for (const auto& p : sorted) s.points.emplace_back(static_cast<double>(p.false_alarms), p.detection_rate);
  return line_chart_svg(title, "false alarms", "detection rate", {s});
}

std::string trace_svg(const std::vector<std::pair<std::int64_t, double>>& heights,
                      const std::vector<detect::WindowScore>& scores, const std::vector<std::int64_t>& falls,
                      const std::string& title) {
  Series h{"centroid height (m)", "#1f77b4", {}};
  for (auto [f, z] : heights) h.points.emplace_back(static_cast<double>(f), z);
  Series a{"anomaly level", "#ff7f0e", {}};
  for (const auto& s : scores) a.points.emplace_back(static_cast<double>(s.frame_index), s.anomaly);
  std::vector<double> markers;
  for (auto f : falls) markers.push_back(static_cast<double>(f));
  return line_chart_svg(title, "frame", "centroid height (m)", {h}, "anomaly level", {a}, markers);
}

}  // namespace radfall::plot
