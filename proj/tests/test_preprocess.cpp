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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "core/preprocess.hpp"
#include "support.hpp"

using namespace radfall;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Independent 3x3 oracle: spherical to sensor Cartesian, then rotate about
// the cross-radar axis by the tilt and lift by the mounting height.
std::array<double, 3> oracle_ground(double r, double az, double el, double tilt, double h) {
  const double v[3] = {r * std::cos(el) * std::sin(az), r * std::cos(el) * std::cos(az), r * std::sin(el)};
  const double rot[3][3] = {{1, 0, 0}, {0, std::cos(tilt), std::sin(tilt)}, {0, -std::sin(tilt), std::cos(tilt)}};
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[static_cast<std::size_t>(i)] += rot[i][j] * v[j];
  out[2] += h;
  return out;
}

std::vector<prep::GroundFrame> frames_with_indices(std::vector<std::int64_t> indices) {
  std::vector<prep::GroundFrame> frames;
  for (auto i : indices) {
    prep::GroundFrame f;
    f.frame_index = i;
    frames.push_back(f);
  }
  return frames;
}

std::vector<prep::GroundFrame> consecutive(int n) {
  std::vector<std::int64_t> idx;
  for (int i = 0; i < n; ++i) idx.push_back(i);
  return frames_with_indices(idx);
}

double ml_mean(const Matrix& m, int k) { return m.col(k).mean(); }

double ml_cov(const Matrix& m, int a, int b) {
  const double ma = ml_mean(m, a);
  const double mb = ml_mean(m, b);
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) s += (m(i, a) - ma) * (m(i, b) - mb);
  return s / static_cast<double>(m.rows());
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12}); }

}  // namespace

TEST(CoordinateTransform, ZeroRangeSitsAtMountHeight) {
  auto g = prep::spherical_to_ground({0.0, 0.4, -0.3, 0.25}, {0.1745, 2.0});
  EXPECT_DOUBLE_EQ(g.x, 0.0);
  EXPECT_NEAR(g.y, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(g.z, 2.0);
  EXPECT_DOUBLE_EQ(g.doppler, 0.25);
}

TEST(CoordinateTransform, BoresightWithoutTilt) {
  auto g = prep::spherical_to_ground({1.0, 0.0, 0.0, -1.0}, {0.0, 0.0});
  EXPECT_DOUBLE_EQ(g.x, 0.0);
  EXPECT_DOUBLE_EQ(g.y, 1.0);
  EXPECT_DOUBLE_EQ(g.z, 0.0);
  EXPECT_DOUBLE_EQ(g.doppler, -1.0);
}

TEST(CoordinateTransform, MatchesMatrixOracle) {
  const auto want = oracle_ground(5.0, 30 * kDeg, -10 * kDeg, 10 * kDeg, 2.0);
  auto g = prep::spherical_to_ground({5.0, 30 * kDeg, -10 * kDeg, 0.0}, {10 * kDeg, 2.0});
  EXPECT_NEAR(g.x, want[0], 1e-12);
  EXPECT_NEAR(g.y, want[1], 1e-12);
  EXPECT_NEAR(g.z, want[2], 1e-12);
  prob::RandomSource rng(21);
  for (int i = 0; i < 500; ++i) {
    const double r = rng.uniform(0, 10), az = rng.uniform(-3, 3), el = rng.uniform(-1.5, 1.5);
    const double tilt = rng.uniform(-1.5, 1.5), h = rng.uniform(0, 3);
    const auto o = oracle_ground(r, az, el, tilt, h);
    auto p = prep::spherical_to_ground({r, az, el, 0.0}, {tilt, h});
    EXPECT_NEAR(p.x, o[0], 1e-12);
    EXPECT_NEAR(p.y, o[1], 1e-12);
    EXPECT_NEAR(p.z, o[2], 1e-12);
  }
}

TEST(CoordinateTransform, RotationPreservesNormAndInverts) {
  prob::RandomSource rng(22);
  for (int i = 0; i < 1000; ++i) {
    const prep::RadarPose pose{rng.uniform(-1.5, 1.5), rng.uniform(0, 3)};
    const io::RadarPoint p{rng.uniform(0.1, 10), rng.uniform(-3, 3), rng.uniform(-1.5, 1.5), rng.normal()};
    auto g = prep::spherical_to_ground(p, pose);
    const double norm = std::sqrt(g.x * g.x + g.y * g.y + (g.z - pose.height) * (g.z - pose.height));
    EXPECT_LE(rel(norm, p.range), 1e-12);
    auto back = prep::ground_to_spherical(g, pose);
    EXPECT_NEAR(back.range, p.range, 1e-9);
    EXPECT_NEAR(back.azimuth, p.azimuth, 1e-9);
    EXPECT_NEAR(back.elevation, p.elevation, 1e-9);
  }
}

TEST(CoordinateTransform, RejectsBadPose) {
  EXPECT_THROW(prep::spherical_to_ground({1, 0, 0, 0}, {0.0, -1.0}), Error);
  EXPECT_THROW(prep::spherical_to_ground({1, 0, 0, 0}, {2.0, 1.0}), Error);
}

TEST(Windowing, Counts) {
  EXPECT_EQ(prep::window_stream(consecutive(10), 10, 1).size(), 1u);
  auto w = prep::window_stream(consecutive(12), 10, 1);
  ASSERT_EQ(w.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(w[i].frames.front().frame_index, static_cast<std::int64_t>(i));
  auto s = prep::window_stream(consecutive(25), 10, 5);
  std::vector<std::int64_t> starts;
  for (const auto& x : s) starts.push_back(x.frames.front().frame_index);
  EXPECT_EQ(starts, (std::vector<std::int64_t>{0, 5, 10, 15}));
  EXPECT_TRUE(prep::window_stream(consecutive(9), 10, 1).empty());
}

TEST(Windowing, SkipsWindowsAcrossGaps) {
  auto w = prep::window_stream(frames_with_indices({0, 1, 2, 4, 5, 6}), 3, 1);
  std::vector<std::int64_t> starts;
  for (const auto& x : w) starts.push_back(x.frames.front().frame_index);
  EXPECT_EQ(starts, (std::vector<std::int64_t>{0, 4}));
}

TEST(ReferenceShift, ZeroCentroidLeavesWindowUnchanged) {
  prob::RandomSource rng(4);
  prep::RawWindow w;
  for (int l = 0; l < 3; ++l) {
    prep::GroundFrame f;
    f.points = testkit::random_matrix(5, 4, rng);
    f.centroid = Vec3(l == 0 ? 0.0 : 0.3, l == 0 ? 0.0 : 0.1, 0.9);
    w.frames.push_back(f);
  }
  auto out = prep::shift_to_reference(w);
  for (int l = 0; l < 3; ++l) EXPECT_EQ(out.frames[l].points, w.frames[l].points);
}

TEST(ReferenceShift, ForcedArithmetic) {
  prep::RawWindow w;
  prep::GroundFrame f;
  f.centroid = Vec3(1, 2, 0.9);
  f.points.resize(1, 4);
  f.points << 1, 2, 1.5, 0.3;
  w.frames.push_back(f);
  auto out = prep::shift_to_reference(w);
  EXPECT_EQ(out.frames[0].points(0, 0), 0.0);
  EXPECT_EQ(out.frames[0].points(0, 1), 0.0);
  EXPECT_EQ(out.frames[0].points(0, 2), 1.5);
  EXPECT_EQ(out.frames[0].points(0, 3), 0.3);
}

TEST(ReferenceShift, MatchesLoopOracle) {
  prob::RandomSource rng(5);
  prep::RawWindow w;
  for (int l = 0; l < 10; ++l) {
    prep::GroundFrame f;
    f.points = testkit::random_matrix(1 + static_cast<int>(rng.uniform_index(20)), 4, rng);
    f.centroid = Vec3(rng.normal(), rng.normal(), rng.normal());
    w.frames.push_back(f);
  }
  auto out = prep::shift_to_reference(w);
  const double x0 = w.frames[0].centroid.x(), y0 = w.frames[0].centroid.y();
  for (std::size_t l = 0; l < w.frames.size(); ++l)
    for (Eigen::Index i = 0; i < w.frames[l].points.rows(); ++i) {
      EXPECT_EQ(out.frames[l].points(i, 0), w.frames[l].points(i, 0) - x0);
      EXPECT_EQ(out.frames[l].points(i, 1), w.frames[l].points(i, 1) - y0);
      EXPECT_EQ(out.frames[l].points(i, 2), w.frames[l].points(i, 2));
      EXPECT_EQ(out.frames[l].points(i, 3), w.frames[l].points(i, 3));
    }
}

TEST(Oversampler, IdentityWhenCountsMatch) {
  prob::RandomSource rng(6);
  Matrix m = testkit::random_matrix(64, 4, rng);
  EXPECT_EQ(prep::oversample_frame(m, 64, rng), m);
}

TEST(Oversampler, OneDimensionalExample) {
  prob::RandomSource rng(7);
  Matrix m(2, 1);
  m << 0, 2;
  Matrix out = prep::oversample_frame(m, 4, rng);
  ASSERT_EQ(out.rows(), 4);
  EXPECT_NEAR(out(0, 0), 1 - std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(out(1, 0), 1 + std::sqrt(2.0), 1e-15);
  EXPECT_EQ(out(2, 0), 1.0);
  EXPECT_EQ(out(3, 0), 1.0);
  EXPECT_NEAR(ml_mean(out, 0), 1.0, 1e-15);
  EXPECT_NEAR(ml_cov(out, 0, 0), 1.0, 1e-15);
}

TEST(Oversampler, PreservesMomentsOnRandomInputs) {
  prob::RandomSource rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform_index(64));
    Matrix in = testkit::random_matrix(m, 4, rng, rng.uniform(0.1, 3.0));
    Matrix out = prep::oversample_frame(in, 64, rng);
    ASSERT_EQ(out.rows(), 64);
    for (int a = 0; a < 4; ++a) {
      EXPECT_NEAR(ml_mean(out, a), ml_mean(in, a), 1e-9 * std::max(1.0, std::abs(ml_mean(in, a))));
      for (int b = 0; b < 4; ++b)
        EXPECT_NEAR(ml_cov(out, a, b), ml_cov(in, a, b), 1e-9 * std::max(1.0, std::abs(ml_cov(in, a, b))));
    }
  }
}

TEST(Oversampler, SubsamplesLargeFrames) {
  prob::RandomSource rng(9);
  Matrix in = testkit::random_matrix(100, 4, rng);
  Matrix out = prep::oversample_frame(in, 64, rng);
  ASSERT_EQ(out.rows(), 64);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    bool found = false;
    for (Eigen::Index j = 0; j < in.rows() && !found; ++j) found = out.row(i) == in.row(j);
    EXPECT_TRUE(found);
  }
}

TEST(Oversampler, RejectsEmptyFrame) {
  prob::RandomSource rng(10);
  EXPECT_THROW(prep::oversample_frame(Matrix(0, 4), 64, rng), Error);
}

TEST(MotionPatterns, ShortStreamGivesNothing) {
  std::vector<io::RadarFrame> stream(5);
  for (int i = 0; i < 5; ++i) {
    stream[i].frame_index = i;
    stream[i].points.push_back({3, 0, 0, 0});
  }
  EXPECT_TRUE(prep::build_motion_patterns(stream, {}).empty());
}

TEST(MotionPatterns, ConstantStreamShape) {
  std::vector<io::RadarFrame> stream(10);
  for (int i = 0; i < 10; ++i) {
    stream[i].frame_index = i;
    stream[i].centroid = Vec3(0, 3, 0.9);
    for (int k = 0; k < 7; ++k) stream[i].points.push_back({3.0 + 0.1 * k, 0.05 * k, -0.1, 0.0});
  }
  auto patterns = prep::build_motion_patterns(stream, {});
  ASSERT_EQ(patterns.size(), 1u);
  ASSERT_EQ(patterns[0].length(), 10);
  for (const auto& f : patterns[0].frames) {
    EXPECT_EQ(f.rows(), 64);
    EXPECT_EQ(f.cols(), 4);
  }
}

TEST(MotionPatterns, EmptyFrameBecomesCentroidBlob) {
  std::vector<io::RadarFrame> stream(10);
  for (int i = 0; i < 10; ++i) {
    stream[i].frame_index = i;
    stream[i].centroid = Vec3(0, 3, 0.8);
    if (i != 4) stream[i].points.push_back({3, 0, 0, 0});
  }
  auto p = prep::build_motion_patterns(stream, {}).at(0);
  EXPECT_TRUE(p.empty_frames[4]);
  EXPECT_FALSE(p.empty_frames[3]);
  EXPECT_EQ(p.frames[4].col(2).minCoeff(), 0.8);
  EXPECT_EQ(p.frames[4].col(2).maxCoeff(), 0.8);
}

TEST(MotionPatterns, PatternsRoundTripThroughFile) {
  testkit::TempDir dir;
  prob::RandomSource rng(12);
  std::vector<prep::MotionPattern> ps;
  for (int i = 0; i < 5; ++i) ps.push_back(testkit::random_pattern(4, 6, rng, i * 3));
  prep::write_patterns(ps, dir / "p.jsonl");
  auto back = prep::read_patterns(dir / "p.jsonl");
  ASSERT_EQ(back.size(), ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    EXPECT_EQ(back[i].start_frame_index, ps[i].start_frame_index);
    EXPECT_EQ(back[i].centroid_heights, ps[i].centroid_heights);
    for (int l = 0; l < 4; ++l) EXPECT_EQ(back[i].frames[l], ps[i].frames[l]);
  }
}
