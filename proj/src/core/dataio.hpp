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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace radfall::io {

/// One radar detection in the sensor's spherical frame. Angles in radians.
struct RadarPoint {
  double range = 0.0;
  double azimuth = 0.0;
  double elevation = 0.0;
  double doppler = 0.0;

  bool operator==(const RadarPoint&) const = default;
};

/// Points of one tracked target in one radar frame, plus the tracker's
/// centroid estimate in ground coordinates.
struct RadarFrame {
  std::int64_t frame_index = 0;
  std::int64_t target_id = 0;
  std::vector<RadarPoint> points;
  Vec3 centroid = Vec3::Zero();

  bool operator==(const RadarFrame& other) const {
    return frame_index == other.frame_index && target_id == other.target_id &&
           points == other.points && centroid == other.centroid;
  }
};

/// Frame indices at which a fall was labeled.
struct GroundTruthLabel {
  std::vector<std::int64_t> fall_frame_indices;
};

void validate(const RadarPoint& point);
void validate(const RadarFrame& frame);
void validate(const GroundTruthLabel& label);

/// Reads a JSON Lines frame stream. Frames come back in file order, which
/// must be strictly increasing in frame_index per target.
std::vector<RadarFrame> read_stream(const std::filesystem::path& path,
                                    std::optional<std::int64_t> target_id = std::nullopt);
void write_stream(const std::vector<RadarFrame>& frames, const std::filesystem::path& path);

std::string frame_to_json_line(const RadarFrame& frame);
RadarFrame frame_from_json_line(const std::string& line);

GroundTruthLabel read_labels(const std::filesystem::path& path);
void write_labels(const GroundTruthLabel& label, const std::filesystem::path& path);

/// Target ids present in a stream, ascending.
std::vector<std::int64_t> target_ids(const std::vector<RadarFrame>& frames);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace radfall::io
