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

#include "core/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

namespace radfall::sim {

namespace {

constexpr double kPathStep = 0.01;

// How a keyframe is approached: smooth start and stop, speeding up into an
// impact, or slowing down towards a turning point.
enum class Profile { Smooth, Accelerate, Decelerate };

struct Key {
  double t;
  double height;
  Vec3 spread;
  Eigen::Vector2d offset;
  Profile profile = Profile::Smooth;
};

double ease(double u) { return 0.5 - 0.5 * std::cos(std::numbers::pi * std::clamp(u, 0.0, 1.0)); }

double ease(double u, Profile profile) {
  u = std::clamp(u, 0.0, 1.0);
  switch (profile) {
    case Profile::Accelerate: return u * u;
    case Profile::Decelerate: return 1.0 - (1.0 - u) * (1.0 - u);
    case Profile::Smooth: break;
  }
  return ease(u);
}

std::function<std::pair<Vec3, Vec3>(double)> keyframed(const Eigen::Vector2d& start, std::vector<Key> keys) {
  return [start, keys = std::move(keys)](double t) {
    std::size_t i = 0;
    while (i + 2 < keys.size() && t > keys[i + 1].t) ++i;
    const Key& a = keys[i];
    const Key& b = keys[i + 1];
    const double s = b.t > a.t ? ease((t - a.t) / (b.t - a.t), b.profile) : 1.0;
    const Eigen::Vector2d xy = start + a.offset + s * (b.offset - a.offset);
    Vec3 centroid(xy.x(), xy.y(), a.height + s * (b.height - a.height));
    Vec3 spread = a.spread + s * (b.spread - a.spread);
    return std::make_pair(centroid, spread);
  };
}

// Times and heights for a stand -> pose -> hold -> stand script.
struct Phases {
  double settle_in, descend, hold, rise, settle_out;
};

double jittered(double value, double relative, prob::RandomSource& rng) {
  return value * rng.uniform(1.0 - relative, 1.0 + relative);
}

std::vector<Key> posture_keys(const Phases& p, const PoseSpec& stand, double low_height, const Vec3& low_spread,
                              const Eigen::Vector2d& shift) {
  const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
  double t = 0.0;
  std::vector<Key> keys;
  keys.push_back({t, stand.centroid_height, stand.spread, zero});
  t += p.settle_in;
  keys.push_back({t, stand.centroid_height, stand.spread, zero});
  t += p.descend;
  keys.push_back({t, low_height, low_spread, shift});
  t += p.hold;
  keys.push_back({t, low_height, low_spread, shift});
  t += p.rise;
  keys.push_back({t, stand.centroid_height, stand.spread, shift});
  t += p.settle_out;
  keys.push_back({t, stand.centroid_height, stand.spread, shift});
  return keys;
}

Eigen::Vector2d fall_direction(MotionKind kind) {
  switch (kind) {
    case MotionKind::ForwardFall: return {0.0, 1.0};
    case MotionKind::BackwardFall: return {0.0, -1.0};
    case MotionKind::LeftFall: return {-1.0, 0.0};
    case MotionKind::RightFall: return {1.0, 0.0};
    default: return {0.0, 0.0};
  }
}

MotionScript walk_script(const Eigen::Vector2d& start, double duration, const SimulatorConfig& c,
                         prob::RandomSource& rng) {
  const double speed = rng.uniform(c.walk_speed_min, c.walk_speed_max);
  double heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
  double turn_rate = 0.0;
  const double ramp = std::min(0.5, duration / 4.0);
  const std::size_t steps = static_cast<std::size_t>(std::ceil(duration / kPathStep)) + 1;
  const Eigen::Vector2d centre(0.5 * (c.room_x_min + c.room_x_max), 0.5 * (c.room_y_min + c.room_y_max));

  std::vector<Eigen::Vector2d> path(steps);
  std::vector<double> factor(steps);
  Eigen::Vector2d pos = start;
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * kPathStep;
    const double f = std::clamp(std::min(t, duration - t) / ramp, 0.0, 1.0);
    path[i] = pos;
    factor[i] = f;
    // Random turning plus a pull back towards the middle of the room.
    turn_rate += -turn_rate * kPathStep / 0.5 + 1.5 * std::sqrt(kPathStep) * rng.normal();
    const Eigen::Vector2d to_centre = centre - pos;
    const bool near_wall = pos.x() < c.room_x_min + 0.3 || pos.x() > c.room_x_max - 0.3 ||
                           pos.y() < c.room_y_min + 0.3 || pos.y() > c.room_y_max - 0.3;
    if (near_wall) {
      const double want = std::atan2(to_centre.y(), to_centre.x());
      const double diff = std::remainder(want - heading, 2.0 * std::numbers::pi);
      turn_rate += 4.0 * diff * kPathStep;
    }
    heading += turn_rate * kPathStep;
    pos += speed * ease(f) * kPathStep * Eigen::Vector2d(std::cos(heading), std::sin(heading));
    pos.x() = std::clamp(pos.x(), c.room_x_min, c.room_x_max);
    pos.y() = std::clamp(pos.y(), c.room_y_min, c.room_y_max);
  }

  MotionScript s;
  s.kind = MotionKind::Walk;
  s.duration = duration;
  s.mean_points = c.mean_points;
  const PoseSpec stand = c.standing;
  const double bob = c.gait_bob;
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  s.body = [path = std::move(path), factor = std::move(factor), stand, bob, phase](double t) {
    const double x = std::clamp(t / kPathStep, 0.0, static_cast<double>(path.size() - 1));
    const std::size_t i = std::min(static_cast<std::size_t>(x), path.size() - 2);
    const double w = x - static_cast<double>(i);
    const Eigen::Vector2d xy = (1.0 - w) * path[i] + w * path[i + 1];
    const double f = (1.0 - w) * factor[i] + w * factor[i + 1];
    const double z = stand.centroid_height + bob * f * std::sin(2.0 * std::numbers::pi * 1.8 * t + phase);
    return std::make_pair(Vec3(xy.x(), xy.y(), z), stand.spread);
  };
  return s;
}

}  // namespace

const char* to_string(MotionKind kind) {
  switch (kind) {
    case MotionKind::Walk: return "walk";
    case MotionKind::ForwardFall: return "forward_fall";
    case MotionKind::BackwardFall: return "backward_fall";
    case MotionKind::LeftFall: return "left_fall";
    case MotionKind::RightFall: return "right_fall";
    case MotionKind::Sit: return "sit";
    case MotionKind::Crouch: return "crouch";
    case MotionKind::Bend: return "bend";
    case MotionKind::Jump: return "jump";
  }
  return "walk";
}

MotionKind motion_from_string(const std::string& name) {
  for (MotionKind k : {MotionKind::Walk, MotionKind::ForwardFall, MotionKind::BackwardFall, MotionKind::LeftFall,
                       MotionKind::RightFall, MotionKind::Sit, MotionKind::Crouch, MotionKind::Bend, MotionKind::Jump})
    if (name == to_string(k)) return k;
  fail(ErrorKind::InvalidArgument, "unknown motion '" + name + "'");
}

bool is_fall(MotionKind kind) {
  return kind == MotionKind::ForwardFall || kind == MotionKind::BackwardFall || kind == MotionKind::LeftFall ||
         kind == MotionKind::RightFall;
}

void validate(const SimulatorConfig& c) {
  require(c.fps > 0 && c.mean_points >= 1 && c.doppler_noise >= 0 && c.limb_swing >= 0, ErrorKind::InvalidArgument,
          "simulator: fps > 0, mean_points >= 1, doppler_noise >= 0 and limb_swing >= 0 required");
  for (const PoseSpec* p : {&c.standing, &c.sitting, &c.crouching, &c.bending})
    require((p->spread.array() > 0).all(), ErrorKind::InvalidArgument, "simulator: pose spreads must be > 0");
  require(c.lying_long_spread > 0 && c.lying_short_spread > 0, ErrorKind::InvalidArgument,
          "simulator: lying spreads must be > 0");
  require(c.walk_speed_min > 0 && c.walk_speed_min <= c.walk_speed_max, ErrorKind::InvalidArgument,
          "simulator: walk speed range invalid");
  require(c.walk_segment_min > 0 && c.walk_segment_min <= c.walk_segment_max, ErrorKind::InvalidArgument,
          "simulator: walk segment range invalid");
  require(c.duration_jitter >= 0 && c.duration_jitter < 1 && c.height_jitter >= 0, ErrorKind::InvalidArgument,
          "simulator: jitter out of range");
  require(c.room_x_min < c.room_x_max && c.room_y_min < c.room_y_max, ErrorKind::InvalidArgument,
          "simulator: empty room");
  require(c.jump_crouch >= 0 && c.jump_absorb >= 0 && c.jump_reach > 0, ErrorKind::InvalidArgument, "simulator: jump shape invalid");
  for (double d : {c.fall_duration, c.lying_duration, c.getup_duration, c.sit_duration, c.sit_hold, c.sit_rise,
                   c.crouch_duration, c.crouch_hold, c.crouch_rise, c.bend_duration, c.bend_hold, c.bend_rise,
                   c.jump_duration, c.jump_dip, c.settle})
    require(d > 0, ErrorKind::InvalidArgument, "simulator: durations must be > 0");
}

BodyState MotionScript::state(double t) const {
  require(t >= -1e-9 && t <= duration + 1e-9, ErrorKind::Domain, "script time outside [0, duration]");
  const double h = 1e-4;
  const double lo = std::max(0.0, t - h);
  const double hi = std::min(duration, t + h);
  BodyState s;
  auto [centroid, spread] = body(t);
  s.centroid = centroid;
  s.spread = spread;
  if (hi > lo) {
    const auto [c_hi, s_hi] = body(hi);
    const auto [c_lo, s_lo] = body(lo);
    s.velocity = (c_hi - c_lo) / (hi - lo);
    s.spread_rate = (s_hi - s_lo) / (hi - lo);
  }
  return s;
}

MotionScript make_script(MotionKind kind, const Eigen::Vector2d& start, const SimulatorConfig& c,
                         prob::RandomSource& rng, double walk_duration) {
  if (kind == MotionKind::Walk) return walk_script(start, walk_duration, c, rng);

  const double j = c.duration_jitter;
  auto end_height = [&](double h) { return std::max(0.05, h + rng.uniform(-c.height_jitter, c.height_jitter)); };
  MotionScript s;
  s.kind = kind;
  s.mean_points = c.mean_points;
  std::vector<Key> keys;
  const Eigen::Vector2d zero = Eigen::Vector2d::Zero();

  if (is_fall(kind)) {
    const Eigen::Vector2d dir = fall_direction(kind);
    Vec3 lying = Vec3::Constant(c.lying_short_spread);
    if (dir.x() != 0.0) lying.x() = c.lying_long_spread;
    else lying.y() = c.lying_long_spread;
    const Phases p{jittered(c.settle, j, rng), jittered(c.fall_duration, j, rng), jittered(c.lying_duration, j, rng),
                   jittered(c.getup_duration, j, rng), jittered(c.settle, j, rng)};
    keys = posture_keys(p, c.standing, end_height(c.lying_height), lying, c.fall_shift * dir);
  } else if (kind == MotionKind::Jump) {
    const double stand = c.standing.centroid_height;
    const Vec3 tucked(c.standing.spread.x(), c.standing.spread.y(), c.standing.spread.z() * 0.85);
    const Vec3 stretched(c.standing.spread.x(), c.standing.spread.y(), c.standing.spread.z() * c.jump_reach);
    const double peak = stand + end_height(c.jump_height);
    double t = jittered(c.settle, j, rng);
    keys = {{0.0, stand, c.standing.spread, zero}, {t, stand, c.standing.spread, zero}};
    const double half = 0.5 * jittered(c.jump_duration, j, rng);
    const double dip = jittered(c.jump_dip, j, rng);
    const double rise = peak - stand;
    keys.push_back({t += dip, stand - c.jump_crouch, tucked, zero});
    keys.push_back({t += c.jump_crouch * half / rise, stand, c.standing.spread, zero, Profile::Accelerate});
    keys.push_back({t += half, peak, stretched, zero, Profile::Decelerate});
    keys.push_back({t += half, stand, c.standing.spread, zero, Profile::Accelerate});
    keys.push_back({t += c.jump_absorb * half / rise, stand - c.jump_absorb, tucked, zero, Profile::Decelerate});
    keys.push_back({t += dip, stand, c.standing.spread, zero});
    keys.push_back({t + jittered(c.settle, j, rng), stand, c.standing.spread, zero});
  } else {
    const PoseSpec* pose = &c.sitting;
    Phases p{};
    if (kind == MotionKind::Sit) {
      p = {c.settle, c.sit_duration, c.sit_hold, c.sit_rise, c.settle};
    } else if (kind == MotionKind::Crouch) {
      pose = &c.crouching;
      p = {c.settle, c.crouch_duration, c.crouch_hold, c.crouch_rise, c.settle};
    } else {
      pose = &c.bending;
      p = {c.settle, c.bend_duration, c.bend_hold, c.bend_rise, c.settle};
    }
    for (double* d : {&p.settle_in, &p.descend, &p.hold, &p.rise, &p.settle_out}) *d = jittered(*d, j, rng);
    keys = posture_keys(p, c.standing, end_height(pose->centroid_height), pose->spread, zero);
  }

  s.duration = keys.back().t;
  const double top = keys.front().height;
  const double bottom = keys[2].height;
  s.body = keyframed(start, std::move(keys));
  if (is_fall(kind) && top > bottom) {
    auto body = s.body;
    s.descent_progress = [body, top, bottom](double t) { return (top - body(t).first.z()) / (top - bottom); };
  }
  return s;
}

io::RadarFrame render_frame(const MotionScript& script, double t, const prep::RadarPose& pose,
                            prob::RandomSource& rng, std::int64_t frame_index, std::int64_t target_id,
                            const SimulatorConfig& config, std::vector<prep::GroundPoint>* ground) {
  prep::validate(pose);
  const BodyState body = script.state(t);
  io::RadarFrame frame;
  frame.frame_index = frame_index;
  frame.target_id = target_id;
  frame.centroid = body.centroid;

  const double c = std::cos(pose.tilt);
  const double s = std::sin(pose.tilt);
  const Vec3 sensor(0.0, 0.0, pose.height);
  const std::uint64_t count = 1 + rng.poisson(std::max(0.0, script.mean_points - 1.0));
  for (std::uint64_t i = 0; i < count; ++i) {
    Vec3 p;
    Vec3 unit;
    bool in_front = false;
    for (int attempt = 0; attempt <= 100 && !in_front; ++attempt) {
      unit = Vec3(rng.normal(), rng.normal(), rng.normal());
      p = body.centroid + body.spread.cwiseProduct(unit);
      in_front = c * p.y() - s * (p.z() - pose.height) > 0.0;
    }
    if (!in_front) continue;
    // A point at centroid + spread * u moves with the centroid plus the rate of change of the spread.
    Vec3 velocity = body.velocity + body.spread_rate.cwiseProduct(unit);
    if (config.limb_swing > 0.0) {
      const Vec3 swing(rng.normal(), rng.normal(), rng.normal());
      velocity += config.limb_swing * body.velocity.norm() * swing;
    }
    const Vec3 line_of_sight = (p - sensor).normalized();
    const double doppler = velocity.dot(line_of_sight) + config.doppler_noise * rng.normal();
    const prep::GroundPoint g{p.x(), p.y(), p.z(), doppler};
    if (ground) ground->push_back(g);
    frame.points.push_back(prep::ground_to_spherical(g, pose));
  }
  return frame;
}

SimulatedDataset generate_dataset(const Recipe& recipe, const prep::RadarPose& pose, std::uint64_t seed,
                                  const SimulatorConfig& config) {
  validate(config);
  prep::validate(pose);
  std::vector<MotionKind> motions;
  for (const auto& [kind, count] : recipe) {
    require(count >= 0, ErrorKind::InvalidArgument, "recipe counts must be >= 0");
    require(kind != MotionKind::Walk, ErrorKind::InvalidArgument, "walking is added between motions automatically");
    motions.insert(motions.end(), static_cast<std::size_t>(count), kind);
  }
  SimulatedDataset out;
  if (motions.empty()) return out;

  prob::RandomSource root(seed);
  prob::RandomSource order_rng = root.child(1);
  prob::RandomSource script_rng = root.child(2);
  prob::RandomSource render_rng = root.child(3);
  order_rng.shuffle(std::span<MotionKind>(motions));

  std::vector<MotionKind> sequence;
  for (MotionKind m : motions) {
    sequence.push_back(MotionKind::Walk);
    sequence.push_back(m);
  }
  sequence.push_back(MotionKind::Walk);

  const double dt = 1.0 / config.fps;
  Eigen::Vector2d position(0.5 * (config.room_x_min + config.room_x_max), 0.5 * (config.room_y_min + config.room_y_max));
  std::int64_t frame = 0;
  for (MotionKind kind : sequence) {
    const double walk_time = script_rng.uniform(config.walk_segment_min, config.walk_segment_max);
    MotionScript script = make_script(kind, position, config, script_rng, walk_time);
    // Frames whose time falls inside this script, sampled on the global clock.
    const auto frames = static_cast<std::int64_t>(std::floor(script.duration / dt + 1e-9));
    Segment seg{script.name(), frame, frame + frames - 1, std::nullopt};
    for (std::int64_t k = 0; k < frames; ++k) {
      const double t = static_cast<double>(k) * dt;
      out.frames.push_back(render_frame(script, t, pose, render_rng, frame + k, 0, config));
      if (is_fall(kind) && !seg.fall_frame && script.descent_progress(t) >= 0.5) seg.fall_frame = frame + k;
    }
    if (seg.fall_frame) out.labels.fall_frame_indices.push_back(*seg.fall_frame);
    out.segments.push_back(seg);
    const Vec3 end = script.state(static_cast<double>(frames) * dt <= script.duration
                                      ? static_cast<double>(frames) * dt
                                      : script.duration).centroid;
    position = {std::clamp(end.x(), config.room_x_min, config.room_x_max),
                std::clamp(end.y(), config.room_y_min, config.room_y_max)};
    frame += frames;
  }
  return out;
}

Recipe preset_recipe(const std::string& name, int scale) {
  require(scale >= 1, ErrorKind::InvalidArgument, "recipe scale must be >= 1");
  if (name == "adl")
    return {{MotionKind::Sit, 10 * scale}, {MotionKind::Crouch, 10 * scale}, {MotionKind::Bend, 10 * scale}};
  if (name == "single")
    return {{MotionKind::ForwardFall, 1}, {MotionKind::BackwardFall, 1}, {MotionKind::LeftFall, 1},
            {MotionKind::RightFall, 1},   {MotionKind::Sit, 1},          {MotionKind::Crouch, 1},
            {MotionKind::Bend, 1},        {MotionKind::Jump, 1}};
  if (name == "benchmark")
    return {{MotionKind::ForwardFall, 15}, {MotionKind::BackwardFall, 15}, {MotionKind::LeftFall, 10},
            {MotionKind::RightFall, 10},   {MotionKind::Sit, 50},          {MotionKind::Crouch, 50},
            {MotionKind::Bend, 50},        {MotionKind::Jump, 50}};
  fail(ErrorKind::InvalidArgument, "unknown recipe preset '" + name + "' (expected adl, single or benchmark)");
}

void write_segments(const std::vector<Segment>& segments, const std::filesystem::path& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : segments) {
    nlohmann::json j{{"name", s.name}, {"start", s.start_frame}, {"end", s.end_frame}};
    if (s.fall_frame) j["fall"] = *s.fall_frame;
    arr.push_back(j);
  }
  io::write_text_file(path, arr.dump(1) + "\n");
}

std::vector<Segment> read_segments(const std::filesystem::path& path) {
  std::vector<Segment> out;
  try {
    for (const auto& j : nlohmann::json::parse(io::read_text_file(path))) {
      Segment s{j.at("name").get<std::string>(), j.at("start").get<std::int64_t>(), j.at("end").get<std::int64_t>(),
                std::nullopt};
      if (j.contains("fall")) s.fall_frame = j["fall"].get<std::int64_t>();
      out.push_back(s);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace radfall::sim
