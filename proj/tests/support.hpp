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

#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "core/hvrae.hpp"
#include "core/random.hpp"

namespace radfall::testkit {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("radfall_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, prob::RandomSource& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

inline prep::MotionPattern random_pattern(int length, int points, prob::RandomSource& rng, std::int64_t start = 0) {
  prep::MotionPattern p;
  p.start_frame_index = start;
  for (int l = 0; l < length; ++l) {
    p.frames.push_back(random_matrix(points, prep::kPointDims, rng));
    p.centroid_heights.push_back(rng.uniform(0.1, 1.0));
    p.empty_frames.push_back(false);
  }
  return p;
}

inline model::HvraeConfig small_config(model::LossVariant variant, int length = 3, int points = 5) {
  model::HvraeConfig c;
  c.length = length;
  c.points = points;
  c.latent = 3;
  c.encoder_hidden = {6, 4};
  c.decoder_hidden = {4, 6};
  c.rnn_hidden = 5;
  c.variant = variant;
  return c;
}

// Scalar re-implementation of the model loss. Written with plain loops over
// frames, points, components and latent dimensions; shares no code with the
// tape-based forward pass.
namespace oracle {

using Vec = std::vector<double>;

inline Vec dense(const nn::DenseLayer& layer, const Vec& x) {
  const Matrix& w = layer.weight.value;
  Vec out(static_cast<std::size_t>(w.rows()));
  for (Eigen::Index o = 0; o < w.rows(); ++o) {
    double s = layer.bias.value(0, o);
    for (Eigen::Index i = 0; i < w.cols(); ++i) s += w(o, i) * x[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(o)] = layer.activation == nn::Activation::Tanh ? std::tanh(s) : s;
  }
  return out;
}

inline Vec rnn(const nn::RnnCell& cell, const Vec& h, const Vec& x) {
  const auto H = cell.recurrent.value.rows();
  Vec out(static_cast<std::size_t>(H));
  for (Eigen::Index j = 0; j < H; ++j) {
    double s = cell.bias.value(0, j);
    for (Eigen::Index i = 0; i < H; ++i) s += cell.recurrent.value(j, i) * h[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i < cell.input.value.cols(); ++i)
      s += cell.input.value(j, i) * x[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(j)] = std::tanh(s);
  }
  return out;
}

inline double clip(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

inline std::vector<std::array<double, 4>> sorted_rows(const Matrix& frame) {
  std::vector<std::array<double, 4>> rows(static_cast<std::size_t>(frame.rows()));
  for (Eigen::Index n = 0; n < frame.rows(); ++n)
    for (int k = 0; k < 4; ++k) rows[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] = frame(n, k);
  std::sort(rows.begin(), rows.end());
  return rows;
}

/// Total loss of one pattern; `noise` is L x D or empty for the posterior mean.
inline double pattern_loss(const prep::MotionPattern& pattern, model::HvraeModel& m, const Matrix& noise) {
  const auto& c = m.config();
  const auto L = static_cast<std::size_t>(c.length);
  const auto N = static_cast<std::size_t>(c.points);
  const auto K = static_cast<std::size_t>(c.dims);
  const auto D = static_cast<std::size_t>(c.latent);
  const bool rae = c.variant == model::LossVariant::Rae;
  std::vector<std::vector<std::array<double, 4>>> x(L);
  std::vector<Vec> z(L, Vec(D));
  double total = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    x[l] = sorted_rows(pattern.frames[l]);
    Vec pooled;
    for (std::size_t n = 0; n < N; ++n) {
      Vec h(x[l][n].begin(), x[l][n].end());
      for (const auto& layer : m.encoder) h = dense(layer, h);
      if (pooled.empty()) pooled.assign(h.size(), 0.0);
      for (std::size_t i = 0; i < h.size(); ++i) pooled[i] += h[i] / static_cast<double>(N);
    }
    if (rae) {
      z[l] = dense(m.encoder_embed, pooled);
      continue;
    }
    const Vec mu = dense(m.encoder_mean, pooled);
    Vec lv = dense(m.encoder_logvar, pooled);
    for (std::size_t d = 0; d < D; ++d) {
      lv[d] = clip(lv[d], c.logvar_min, c.logvar_max);
      const double eps = noise.size() ? noise(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(d)) : 0.0;
      z[l][d] = mu[d] + std::exp(0.5 * lv[d]) * eps;
      total += -0.5 * (1.0 + lv[d] - mu[d] * mu[d] - std::exp(lv[d]));
    }
  }
  Vec h(static_cast<std::size_t>(c.rnn_hidden), 0.0);
  for (std::size_t l = 0; l < L; ++l) h = rnn(m.rnn_encoder, h, z[l]);
  std::vector<Vec> rebuilt(L);
  Vec previous(D, 0.0);
  for (std::size_t s = 0; s < L; ++s) {
    h = rnn(m.rnn_decoder, h, previous);
    previous = dense(m.rnn_output, h);
    rebuilt[L - 1 - s] = previous;
  }
  for (std::size_t l = 0; l < L; ++l) {
    Vec g = rebuilt[l];
    for (const auto& layer : m.decoder) g = dense(layer, g);
    if (rae) {
      const Vec out = dense(m.decoder_points, g);
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t k = 0; k < K; ++k) {
          const double r = x[l][n][k] - out[n * K + k];
          total += r * r / static_cast<double>(L * N * K);
        }
      continue;
    }
    const Vec mu = dense(m.decoder_mean, g);
    Vec lv(K, 0.0);
    if (c.variant == model::LossVariant::Full) {
      lv = dense(m.decoder_logvar, g);
      for (auto& v : lv) v = clip(v, c.logvar_min, c.logvar_max);
    }
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t k = 0; k < K; ++k) {
        const double r = x[l][n][k] - mu[k];
        if (c.variant == model::LossVariant::Full)
          total += 0.5 * (r * r * std::exp(-lv[k]) + lv[k]);
        else
          total += 0.5 * r * r;
      }
  }
  return total;
}

}  // namespace oracle
}  // namespace radfall::testkit
