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
#include <string>
#include <vector>

#include "core/error.hpp"

namespace radfall::detect {

struct DetectionThresholds {
  double anomaly = 0.0;  // loss units
  double drop = 0.6;     // meters
};

void validate(const DetectionThresholds& thresholds);

/// Height lost between the first and the last frame of a window. Positive
/// means the body went down.
double centroid_drop(const std::vector<double>& heights);

/// Score of one window, stamped with the window's last frame.
struct WindowScore {
  std::int64_t frame_index = 0;
  double anomaly = 0.0;
  double drop = 0.0;
};

struct DetectionEvent {
  std::int64_t frame_index = 0;
  double anomaly = 0.0;
  double drop = 0.0;
  bool is_fall = false;
};

/// A fall is claimed only when the window is anomalous and the centroid
/// dropped, both strictly above their thresholds.
DetectionEvent detect(const WindowScore& window, const DetectionThresholds& thresholds);
DetectionEvent detect(std::int64_t frame_index, double score, const std::vector<double>& heights,
                      const DetectionThresholds& thresholds);

/// JSON Lines: {"frame": int, "anomaly": float, "drop": float, "fall": bool}.
std::string event_to_json_line(const DetectionEvent& event);
void write_events(const std::vector<DetectionEvent>& events, const std::filesystem::path& path);
std::vector<DetectionEvent> read_events(const std::filesystem::path& path);

/// CSV with header "frame,anomaly,drop".
void write_scores(const std::vector<WindowScore>& scores, const std::filesystem::path& path);
std::vector<WindowScore> read_scores(const std::filesystem::path& path);

}  // namespace radfall::detect
