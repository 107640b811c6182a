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
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/dataio.hpp"
#include "core/preprocess.hpp"
#include "core/random.hpp"

namespace radfall::sim {

/// Body point-cloud shape: centroid height and per-axis standard deviation
/// (x, y, z) of the scattering points.
struct PoseSpec {
  double centroid_height = 0.9;
  Vec3 spread{0.15, 0.15, 0.45};
};

enum class MotionKind { Walk, ForwardFall, BackwardFall, LeftFall, RightFall, Sit, Crouch, Bend, Jump };

const char* to_string(MotionKind kind);
MotionKind motion_from_string(const std::string& name);
bool is_fall(MotionKind kind);

/// Simulator conventions. Lengths in meters, times in seconds.
struct SimulatorConfig {
  double fps = 10.0;
  PoseSpec standing{0.9, {0.15, 0.15, 0.45}};
  double lying_height = 0.15;
  double lying_long_spread = 0.45;
  double lying_short_spread = 0.15;
  double fall_duration = 1.0;
  double fall_shift = 0.6;
  double lying_duration = 1.5;
  double getup_duration = 2.0;
  PoseSpec sitting{0.25, {0.25, 0.25, 0.2}};
  double sit_duration = 1.0;
  double sit_hold = 2.0;
  double sit_rise = 1.5;
  PoseSpec crouching{0.5, {0.22, 0.22, 0.25}};
  double crouch_duration = 0.8;
  double crouch_hold = 1.5;
  double crouch_rise = 1.0;
  PoseSpec bending{0.72, {0.15, 0.35, 0.3}};
  double bend_duration = 1.0;
  double bend_hold = 1.5;
  double bend_rise = 1.0;
  double jump_height = 0.3;
  double jump_duration = 0.5;
  /// Countermovement dip before take-off and knee flexion absorbing the
  /// landing (depths), how long the dip and the recovery take, and the
  /// vertical stretch of the point cloud at the top of the flight (arms
  /// raised). Push-off and absorption last as long as a constant-force
  /// phase needs to reach or stop the take-off speed.
  double jump_crouch = 0.3;
  double jump_absorb = 0.15;
  double jump_dip = 0.4;
  double jump_reach = 1.3;
  /// Standing still before and after every non-walking motion.
  double settle = 0.5;
  double mean_points = 20.0;
  double doppler_noise = 0.05;
  /// Limb swing: every point gets an extra isotropic velocity whose
  /// per-axis standard deviation is this fraction of the body speed.
  double limb_swing = 0.5;
  double walk_speed_min = 0.8;
  double walk_speed_max = 1.2;
  double walk_segment_min = 2.0;
  double walk_segment_max = 4.0;
  double gait_bob = 0.03;
  /// Relative jitter of every duration and absolute jitter of end heights.
  double duration_jitter = 0.15;
  double height_jitter = 0.05;
  /// Area the walker stays inside (ground x and y).
  double room_x_min = -1.0;
  double room_x_max = 1.0;
  double room_y_min = 2.0;
  double room_y_max = 6.0;
};

void validate(const SimulatorConfig& config);

struct BodyState {
  Vec3 centroid = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 spread = Vec3::Ones();
  Vec3 spread_rate = Vec3::Zero();
};

/// One motion instance with its own jittered timing.
struct MotionScript {
  MotionKind kind = MotionKind::Walk;
  double duration = 0.0;
  double mean_points = 20.0;
  /// Centroid position and spread over [0, duration].
  std::function<std::pair<Vec3, Vec3>(double)> body;
  /// Fraction of the total scripted descent completed at time t (falls).
  std::function<double(double)> descent_progress;

  std::string name() const { return to_string(kind); }
  /// Body state at time t; velocity by central difference of the path.
  BodyState state(double t) const;
};

/// Builds a script starting at ground position (x, y) standing upright.
/// `walk_duration` is used by walk scripts only.
MotionScript make_script(MotionKind kind, const Eigen::Vector2d& start, const SimulatorConfig& config,
                         prob::RandomSource& rng, double walk_duration = 3.0);

/// One radar frame of the body at script time t. Points behind the sensor
/// plane are redrawn, at most 100 times per point. `ground`, when given,
/// receives the drawn points in ground coordinates.
io::RadarFrame render_frame(const MotionScript& script, double t, const prep::RadarPose& pose,
                            prob::RandomSource& rng, std::int64_t frame_index = 0, std::int64_t target_id = 0,
                            const SimulatorConfig& config = {}, std::vector<prep::GroundPoint>* ground = nullptr);

struct Segment {
  std::string name;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;  // inclusive
  std::optional<std::int64_t> fall_frame;
};

struct SimulatedDataset {
  std::vector<io::RadarFrame> frames;
  io::GroundTruthLabel labels;
  std::vector<Segment> segments;
};

using Recipe = std::vector<std::pair<MotionKind, int>>;

/// Motions from the recipe in seeded random order, separated by walking
/// segments, with a walking segment before the first one. Fall labels sit
/// at the first frame where at least half of the descent is done.
SimulatedDataset generate_dataset(const Recipe& recipe, const prep::RadarPose& pose, std::uint64_t seed,
                                  const SimulatorConfig& config = {});

/// Named recipes: "adl" (normal activities only), "single" (one of each
/// motion), "benchmark" (50 falls among 200 other motions). `scale`
/// multiplies the adl counts.
Recipe preset_recipe(const std::string& name, int scale = 1);

/// Segment log as JSON: [{"name", "start", "end", "fall"?}, ...].
void write_segments(const std::vector<Segment>& segments, const std::filesystem::path& path);
std::vector<Segment> read_segments(const std::filesystem::path& path);

}  // namespace radfall::sim
