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
#include <vector>

#include "core/dataio.hpp"
#include "core/random.hpp"

namespace radfall::prep {

/// Number of components per ground point: x, y, z, doppler.
inline constexpr int kPointDims = 4;

struct GroundPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double doppler = 0.0;
};

/// Mounting of the sensor: tilt about the cross-radar axis and height above
/// the floor.
struct RadarPose {
  double tilt = 0.0;
  double height = 0.0;
};

void validate(const RadarPose& pose);

GroundPoint spherical_to_ground(const io::RadarPoint& point, const RadarPose& pose);
/// Exact inverse of spherical_to_ground for points in front of the sensor.
io::RadarPoint ground_to_spherical(const GroundPoint& point, const RadarPose& pose);

/// A radar frame already converted to ground coordinates, M x 4 rows.
struct GroundFrame {
  std::int64_t frame_index = 0;
  Matrix points{0, kPointDims};
  Vec3 centroid = Vec3::Zero();
};

GroundFrame to_ground(const io::RadarFrame& frame, const RadarPose& pose);

/// L consecutive ground frames.
struct RawWindow {
  std::vector<GroundFrame> frames;
};

/// Slides a window of `length` frames over the stream with the given
/// stride. Windows that span a dropped frame are discarded.
std::vector<RawWindow> window_stream(const std::vector<GroundFrame>& frames, int length,
                                     int stride);

/// Moves every point of the window so the first frame's centroid sits at
/// x = y = 0. Centroids are shifted the same way; heights are untouched.
RawWindow shift_to_reference(const RawWindow& window);

/// Resizes an M x K point set to exactly `target` rows.
///
/// For M <= target the rows are stretched about their mean by sqrt(target/M)
/// and the remainder is padded with the mean, which keeps the ML mean and the
/// ML (1/n) covariance of every component unchanged. For M > target a
/// uniform subsample without replacement is returned.
Matrix oversample_frame(const Matrix& points, int target, prob::RandomSource& rng);

/// The L x N x K model input together with the centroid height track.
struct MotionPattern {
  std::vector<Matrix> frames;  // L matrices of N x K
  std::vector<double> centroid_heights;
  std::int64_t start_frame_index = 0;
  std::vector<bool> empty_frames;  // frames filled with the placeholder blob

  int length() const { return static_cast<int>(frames.size()); }
  int points() const { return frames.empty() ? 0 : static_cast<int>(frames.front().rows()); }
  std::int64_t end_frame_index() const { return start_frame_index + length() - 1; }
};

struct PreprocessConfig {
  RadarPose pose{0.17453292519943295, 2.0};
  int length = 10;
  int points = 64;
  int stride = 1;
  std::uint64_t seed = 0;
};

/// Full preprocessing chain for a single-target stream. Each window's
/// oversampling draws from a child stream keyed by its start frame index,
/// so a window's pattern does not depend on which other windows are built.
std::vector<MotionPattern> build_motion_patterns(const std::vector<io::RadarFrame>& stream,
                                                 const PreprocessConfig& config);

/// Pattern files are JSON Lines, one pattern per line:
/// {"start": int, "heights": [L], "empty": [L bools], "frames": [L][N][K]}.
void write_patterns(const std::vector<MotionPattern>& patterns, const std::filesystem::path& path);
std::vector<MotionPattern> read_patterns(const std::filesystem::path& path);

}  // namespace radfall::prep
