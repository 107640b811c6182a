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

#include "core/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "core/log.hpp"

namespace radfall::prep {

void validate(const RadarPose& pose) {
  require(std::isfinite(pose.tilt) && std::isfinite(pose.height), ErrorKind::Domain,
          "radar pose is not finite");
  require(pose.height >= 0.0, ErrorKind::Domain, "radar height must be >= 0");
  require(std::abs(pose.tilt) <= std::numbers::pi / 2, ErrorKind::Domain,
          "radar tilt must lie in [-pi/2, pi/2]");
}

GroundPoint spherical_to_ground(const io::RadarPoint& p, const RadarPose& pose) {
  require(std::isfinite(p.range) && std::isfinite(p.azimuth) && std::isfinite(p.elevation) &&
              std::isfinite(p.doppler),
          ErrorKind::Domain, "spherical_to_ground: non-finite point");
  validate(pose);
  const double cos_el = std::cos(p.elevation);
  const double sx = p.range * cos_el * std::sin(p.azimuth);
  const double sy = p.range * cos_el * std::cos(p.azimuth);
  const double sz = p.range * std::sin(p.elevation);
  const double c = std::cos(pose.tilt);
  const double s = std::sin(pose.tilt);
  return {sx, c * sy + s * sz, -s * sy + c * sz + pose.height, p.doppler};
}

io::RadarPoint ground_to_spherical(const GroundPoint& g, const RadarPose& pose) {
  validate(pose);
  const double c = std::cos(pose.tilt);
  const double s = std::sin(pose.tilt);
  const double dz = g.z - pose.height;
  const double sx = g.x;
  const double sy = c * g.y - s * dz;
  const double sz = s * g.y + c * dz;
  io::RadarPoint p;
  p.range = std::sqrt(sx * sx + sy * sy + sz * sz);
  p.azimuth = (sx == 0.0 && sy == 0.0) ? 0.0 : std::atan2(sx, sy);
  p.elevation = p.range == 0.0 ? 0.0 : std::atan2(sz, std::hypot(sx, sy));
  p.doppler = g.doppler;
  return p;
}

GroundFrame to_ground(const io::RadarFrame& frame, const RadarPose& pose) {
  GroundFrame out;
  out.frame_index = frame.frame_index;
  out.centroid = frame.centroid;
  out.points.resize(static_cast<Eigen::Index>(frame.points.size()), kPointDims);
  for (std::size_t i = 0; i < frame.points.size(); ++i) {
    const GroundPoint g = spherical_to_ground(frame.points[i], pose);
    const auto r = static_cast<Eigen::Index>(i);
    out.points(r, 0) = g.x;
    out.points(r, 1) = g.y;
    out.points(r, 2) = g.z;
    out.points(r, 3) = g.doppler;
  }
  return out;
}

std::vector<RawWindow> window_stream(const std::vector<GroundFrame>& frames, int length,
                                     int stride) {
  require(length >= 1, ErrorKind::Domain, "window length must be >= 1");
  require(stride >= 1, ErrorKind::Domain, "window stride must be >= 1");
  std::vector<RawWindow> windows;
  const auto n = static_cast<std::ptrdiff_t>(frames.size());
  for (std::ptrdiff_t start = 0; start + length <= n; start += stride) {
    bool contiguous = true;
    for (std::ptrdiff_t i = start + 1; i < start + length; ++i) {
      if (frames[i].frame_index - frames[i - 1].frame_index != 1) {
        contiguous = false;
        break;
      }
    }
    if (!contiguous) continue;
    windows.push_back({{frames.begin() + start, frames.begin() + start + length}});
  }
  return windows;
}

RawWindow shift_to_reference(const RawWindow& window) {
  require(!window.frames.empty(), ErrorKind::Domain, "shift_to_reference: empty window");
  const double ref_x = window.frames.front().centroid.x();
  const double ref_y = window.frames.front().centroid.y();
  RawWindow out = window;
  for (auto& f : out.frames) {
    f.points.col(0).array() -= ref_x;
    f.points.col(1).array() -= ref_y;
    f.centroid.x() -= ref_x;
    f.centroid.y() -= ref_y;
  }
  return out;
}

Matrix oversample_frame(const Matrix& points, int target, prob::RandomSource& rng) {
  require(target >= 1, ErrorKind::Domain, "oversample_frame: target count must be >= 1");
  const auto m = points.rows();
  require(m >= 1, ErrorKind::Domain, "oversample_frame: frame has no points");
  const auto n = static_cast<Eigen::Index>(target);
  if (m == n) return points;
  if (m > n) {
    warn("frame has " + std::to_string(m) + " points, subsampling to " + std::to_string(n));
    auto picked = rng.sample_without_replacement(static_cast<std::size_t>(m),
                                                 static_cast<std::size_t>(n));
    std::sort(picked.begin(), picked.end());
    Matrix out(n, points.cols());
    for (Eigen::Index i = 0; i < n; ++i) out.row(i) = points.row(static_cast<Eigen::Index>(picked[i]));
    return out;
  }
  const Eigen::RowVectorXd mean = points.colwise().mean();
  const double scale = std::sqrt(static_cast<double>(n) / static_cast<double>(m));
  Matrix out(n, points.cols());
  for (Eigen::Index i = 0; i < m; ++i) out.row(i) = mean + scale * (points.row(i) - mean);
  for (Eigen::Index i = m; i < n; ++i) out.row(i) = mean;
  return out;
}

std::vector<MotionPattern> build_motion_patterns(const std::vector<io::RadarFrame>& stream,
                                                 const PreprocessConfig& config) {
  require(config.points >= 1, ErrorKind::Domain, "points per frame must be >= 1");
  require(io::target_ids(stream).size() <= 1, ErrorKind::InvalidArgument,
          "build_motion_patterns expects a single-target stream");
  validate(config.pose);

  std::vector<GroundFrame> ground;
  ground.reserve(stream.size());
  for (const auto& f : stream) ground.push_back(to_ground(f, config.pose));

  const prob::RandomSource root(config.seed);
  std::vector<MotionPattern> patterns;
  for (const auto& raw : window_stream(ground, config.length, config.stride)) {
    const RawWindow window = shift_to_reference(raw);
    MotionPattern pattern;
    pattern.start_frame_index = window.frames.front().frame_index;
    auto rng = root.child(static_cast<std::uint64_t>(pattern.start_frame_index));
    for (const auto& f : window.frames) {
      pattern.centroid_heights.push_back(f.centroid.z());
      if (f.points.rows() == 0) {
        Matrix blob = Matrix::Zero(config.points, kPointDims);
        blob.col(2).setConstant(f.centroid.z());
        pattern.frames.push_back(std::move(blob));
        pattern.empty_frames.push_back(true);
      } else {
        pattern.frames.push_back(oversample_frame(f.points, config.points, rng));
        pattern.empty_frames.push_back(false);
      }
    }
    patterns.push_back(std::move(pattern));
  }
  return patterns;
}

void write_patterns(const std::vector<MotionPattern>& patterns, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write pattern file: " + path.string());
  for (const auto& p : patterns) {
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : p.frames) {
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index r = 0; r < f.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < f.cols(); ++c) row.push_back(f(r, c));
        rows.push_back(std::move(row));
      }
      frames.push_back(std::move(rows));
    }
    nlohmann::json j = {{"start", p.start_frame_index},
                        {"heights", p.centroid_heights},
                        {"empty", p.empty_frames},
                        {"frames", std::move(frames)}};
    out << j.dump() << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

std::vector<MotionPattern> read_patterns(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open pattern file: " + path.string());
  std::vector<MotionPattern> patterns;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      MotionPattern p;
      p.start_frame_index = j.at("start").get<std::int64_t>();
      p.centroid_heights = j.at("heights").get<std::vector<double>>();
      p.empty_frames = j.at("empty").get<std::vector<bool>>();
      for (const auto& rows : j.at("frames")) {
        Matrix f(static_cast<Eigen::Index>(rows.size()), kPointDims);
        for (std::size_t r = 0; r < rows.size(); ++r) {
          const auto& row = rows.at(r);
          if (row.size() != static_cast<std::size_t>(kPointDims))
            throw std::invalid_argument("point must have 4 components");
          for (int c = 0; c < kPointDims; ++c) f(static_cast<Eigen::Index>(r), c) = row.at(c).get<double>();
        }
        p.frames.push_back(std::move(f));
      }
      if (p.frames.size() != p.centroid_heights.size() || p.frames.size() != p.empty_frames.size())
        throw std::invalid_argument("frames, heights and empty flags differ in length");
      for (const auto& f : p.frames)
        if (f.rows() != p.frames.front().rows()) throw std::invalid_argument("ragged frames");
      patterns.push_back(std::move(p));
    } catch (const std::exception& e) {
      fail(ErrorKind::Parse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return patterns;
}

}  // namespace radfall::prep
