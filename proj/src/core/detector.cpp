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

#include "core/detector.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/dataio.hpp"

namespace radfall::detect {

using nlohmann::json;

void validate(const DetectionThresholds& t) {
  require(std::isfinite(t.anomaly), ErrorKind::InvalidArgument, "anomaly threshold must be finite");
  require(std::isfinite(t.drop) && t.drop > 0.0, ErrorKind::InvalidArgument, "drop threshold must be > 0");
}

double centroid_drop(const std::vector<double>& heights) {
  require(heights.size() >= 2, ErrorKind::Domain, "centroid drop needs at least two frames");
  return heights.front() - heights.back();
}

DetectionEvent detect(const WindowScore& w, const DetectionThresholds& t) {
  return {w.frame_index, w.anomaly, w.drop, w.anomaly > t.anomaly && w.drop > t.drop};
}

DetectionEvent detect(std::int64_t frame_index, double score, const std::vector<double>& heights,
                      const DetectionThresholds& thresholds) {
  return detect(WindowScore{frame_index, score, centroid_drop(heights)}, thresholds);
}

std::string event_to_json_line(const DetectionEvent& e) {
  return json{{"frame", e.frame_index}, {"anomaly", e.anomaly}, {"drop", e.drop}, {"fall", e.is_fall}}.dump();
}

void write_events(const std::vector<DetectionEvent>& events, const std::filesystem::path& path) {
  std::string out;
  for (const auto& e : events) out += event_to_json_line(e) + "\n";
  io::write_text_file(path, out);
}

std::vector<DetectionEvent> read_events(const std::filesystem::path& path) {
  std::istringstream in(io::read_text_file(path));
  std::vector<DetectionEvent> events;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      events.push_back({j.at("frame").get<std::int64_t>(), j.at("anomaly").get<double>(), j.at("drop").get<double>(),
                        j.at("fall").get<bool>()});
    } catch (const json::exception& e) {
      fail(ErrorKind::Parse, path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return events;
}

void write_scores(const std::vector<WindowScore>& scores, const std::filesystem::path& path) {
  std::string out = "frame,anomaly,drop\n";
  for (const auto& s : scores)
    out += std::to_string(s.frame_index) + "," + io::format_double(s.anomaly) + "," + io::format_double(s.drop) + "\n";
  io::write_text_file(path, out);
}

std::vector<WindowScore> read_scores(const std::filesystem::path& path) {
  std::istringstream in(io::read_text_file(path));
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::Parse, path.string() + ": missing CSV header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "frame,anomaly,drop", ErrorKind::Format, path.string() + ": expected header 'frame,anomaly,drop'");
  std::vector<WindowScore> scores;
  for (int number = 2; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::string a, b, c;
    WindowScore s;
    try {
      if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c)) throw std::invalid_argument("");
      std::size_t used = 0;
      s.frame_index = std::stoll(a, &used);
      s.anomaly = std::stod(b);
      s.drop = std::stod(c);
    } catch (const std::exception&) {
      fail(ErrorKind::Parse, path.string() + ":" + std::to_string(number) + ": malformed score row");
    }
    require(scores.empty() || s.frame_index > scores.back().frame_index, ErrorKind::Format,
            path.string() + ":" + std::to_string(number) + ": frame indices must increase");
    scores.push_back(s);
  }
  return scores;
}

}  // namespace radfall::detect
