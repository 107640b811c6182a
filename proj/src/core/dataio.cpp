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

#include "core/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace radfall::io {

using nlohmann::json;

void validate(const RadarPoint& p) {
  require(std::isfinite(p.range) && std::isfinite(p.azimuth) && std::isfinite(p.elevation) &&
              std::isfinite(p.doppler),
          ErrorKind::Format, "radar point has non-finite component");
  require(p.range >= 0.0, ErrorKind::Format, "radar point has negative range");
  require(p.azimuth > -std::numbers::pi && p.azimuth <= std::numbers::pi, ErrorKind::Format,
          "radar point azimuth outside (-pi, pi]");
  require(std::abs(p.elevation) <= std::numbers::pi / 2, ErrorKind::Format,
          "radar point elevation outside [-pi/2, pi/2]");
}

void validate(const RadarFrame& frame) {
  require(frame.frame_index >= 0, ErrorKind::Format, "negative frame index");
  require(frame.centroid.allFinite(), ErrorKind::Format, "frame centroid is not finite");
  for (const auto& p : frame.points) validate(p);
}

void validate(const GroundTruthLabel& label) {
  const auto& v = label.fall_frame_indices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(v[i] >= 0, ErrorKind::Format, "negative label frame index");
    require(i == 0 || v[i] > v[i - 1], ErrorKind::Format, "label indices not strictly increasing");
  }
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string frame_to_json_line(const RadarFrame& frame) {
  json points = json::array();
  for (const auto& p : frame.points) points.push_back({p.range, p.azimuth, p.elevation, p.doppler});
  json j = {{"frame", frame.frame_index},
            {"target", frame.target_id},
            {"centroid", {frame.centroid.x(), frame.centroid.y(), frame.centroid.z()}},
            {"points", std::move(points)}};
  return j.dump();
}

namespace {

double number_at(const json& arr, std::size_t i) {
  const auto& v = arr.at(i);
  if (!v.is_number()) throw std::invalid_argument("expected a number");
  return v.get<double>();
}

}  // namespace

RadarFrame frame_from_json_line(const std::string& line) {
  json j = json::parse(line);
  if (!j.is_object()) throw std::invalid_argument("record is not an object");
  RadarFrame frame;
  const auto& fi = j.at("frame");
  const auto& ti = j.at("target");
  if (!fi.is_number_integer() || !ti.is_number_integer())
    throw std::invalid_argument("frame and target must be integers");
  frame.frame_index = fi.get<std::int64_t>();
  frame.target_id = ti.get<std::int64_t>();
  const auto& c = j.at("centroid");
  if (!c.is_array() || c.size() != 3) throw std::invalid_argument("centroid must have 3 numbers");
  frame.centroid = Vec3(number_at(c, 0), number_at(c, 1), number_at(c, 2));
  const auto& pts = j.at("points");
  if (!pts.is_array()) throw std::invalid_argument("points must be an array");
  frame.points.reserve(pts.size());
  for (const auto& p : pts) {
    if (!p.is_array() || p.size() != 4) throw std::invalid_argument("point must have 4 numbers");
    frame.points.push_back({number_at(p, 0), number_at(p, 1), number_at(p, 2), number_at(p, 3)});
  }
  return frame;
}

std::vector<RadarFrame> read_stream(const std::filesystem::path& path,
                                    std::optional<std::int64_t> target_id) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open stream file: " + path.string());
  std::vector<RadarFrame> frames;
  std::map<std::int64_t, std::int64_t> last_index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); }))
      continue;
    RadarFrame frame;
    try {
      frame = frame_from_json_line(line);
    } catch (const std::exception& e) {
      fail(ErrorKind::Parse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      validate(frame);
    } catch (const Error& e) {
      fail(ErrorKind::Format, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    auto it = last_index.find(frame.target_id);
    if (it != last_index.end() && frame.frame_index <= it->second)
      fail(ErrorKind::Format, path.string() + ":" + std::to_string(line_no) +
                                  ": frame index not increasing for target " +
                                  std::to_string(frame.target_id));
    last_index[frame.target_id] = frame.frame_index;
    if (!target_id || frame.target_id == *target_id) frames.push_back(std::move(frame));
  }
  std::stable_sort(frames.begin(), frames.end(), [](const RadarFrame& a, const RadarFrame& b) {
    return a.frame_index < b.frame_index;
  });
  return frames;
}

void write_stream(const std::vector<RadarFrame>& frames, const std::filesystem::path& path) {
  std::map<std::int64_t, std::int64_t> last_index;
  for (const auto& f : frames) {
    validate(f);
    auto it = last_index.find(f.target_id);
    require(it == last_index.end() || f.frame_index > it->second, ErrorKind::Format,
            "frame index not increasing for target " + std::to_string(f.target_id));
    last_index[f.target_id] = f.frame_index;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write stream file: " + path.string());
  for (const auto& f : frames) out << frame_to_json_line(f) << '\n';
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

GroundTruthLabel read_labels(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  GroundTruthLabel label;
  try {
    json j = json::parse(text);
    if (!j.is_array()) throw std::invalid_argument("label file must be a JSON array");
    for (const auto& v : j) {
      if (!v.is_number_integer()) throw std::invalid_argument("label entries must be integers");
      label.fall_frame_indices.push_back(v.get<std::int64_t>());
    }
  } catch (const std::exception& e) {
    fail(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  validate(label);
  return label;
}

void write_labels(const GroundTruthLabel& label, const std::filesystem::path& path) {
  validate(label);
  write_text_file(path, json(label.fall_frame_indices).dump() + "\n");
}

std::vector<std::int64_t> target_ids(const std::vector<RadarFrame>& frames) {
  std::set<std::int64_t> ids;
  for (const auto& f : frames) ids.insert(f.target_id);
  return {ids.begin(), ids.end()};
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write file: " + path.string());
  out << contents;
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace radfall::io
