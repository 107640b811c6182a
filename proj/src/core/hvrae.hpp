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
#include <string>
#include <vector>

#include "core/autodiff.hpp"
#include "core/layers.hpp"
#include "core/preprocess.hpp"
#include "core/probkit.hpp"

namespace radfall::model {

/// Which objective (and matching decoder) a model is built for.
///  full:       Gaussian likelihood with a learned per-frame variance, plus KLD
///  simplified: unit-variance likelihood (half squared error), plus KLD
///  rae:        deterministic frame embedding, mean squared error, no sampling
enum class LossVariant { Full, Simplified, Rae };

const char* to_string(LossVariant variant);
LossVariant loss_variant_from_string(const std::string& name);

struct HvraeConfig {
  int length = 10;
  int points = 64;
  int dims = prep::kPointDims;
  int latent = 16;
  std::vector<int> encoder_hidden{64, 32};
  std::vector<int> decoder_hidden{32, 64};
  int rnn_hidden = 32;
  LossVariant variant = LossVariant::Full;
  int epochs = 200;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 5.0;
  double logvar_min = -10.0;
  double logvar_max = 10.0;
  /// Score with z = posterior mean instead of a sampled z.
  bool posterior_mean = false;
  /// Standardize each input component with statistics frozen from the
  /// training set.
  bool standardize = false;
};

void validate(const HvraeConfig& config);

struct LossBreakdown {
  double total = 0.0;
  double kld_term = 0.0;
  double reconstruction_term = 0.0;
  std::vector<double> per_frame;
};

/// Every trainable tensor of one architecture plus the metadata needed to
/// reproduce it.
class HvraeModel {
 public:
  HvraeModel() = default;
  explicit HvraeModel(const HvraeConfig& config);

  const HvraeConfig& config() const { return config_; }
  HvraeConfig& mutable_config() { return config_; }

  /// Uniform +-1/sqrt(fan_in) weights, zero biases.
  void initialize(std::uint64_t seed);

  std::vector<ad::Parameter*> parameters();
  std::vector<const ad::Parameter*> parameters() const;
  ad::Parameter* find(const std::string& name);

  /// Per-component input offset and scale (1 x K). Identity unless the
  /// model standardizes its input.
  Matrix input_offset;
  Matrix input_scale;

  std::uint64_t seed = 0;
  double final_loss = 0.0;

  std::vector<nn::DenseLayer> encoder;  // per-point stack
  nn::DenseLayer encoder_mean;          // variational variants
  nn::DenseLayer encoder_logvar;
  nn::DenseLayer encoder_embed;         // rae variant
  nn::RnnCell rnn_encoder;
  nn::RnnCell rnn_decoder;
  nn::DenseLayer rnn_output;
  std::vector<nn::DenseLayer> decoder;
  nn::DenseLayer decoder_mean;    // variational variants
  nn::DenseLayer decoder_logvar;  // full variant only
  nn::DenseLayer decoder_points;  // rae variant

 private:
  HvraeConfig config_;
};

/// Rows of one frame in a fixed lexicographic order. Applied at the model
/// boundary so pooled features and loss sums do not depend on point order.
Matrix canonical_rows(const Matrix& frame);

/// Posterior over the latent state of one N x K frame.
prob::DiagonalGaussian vae_encode(const Matrix& frame, HvraeModel& model);
/// Sequence autoencoder over L x D latents; row l of the result aligns with
/// row l of the input.
Matrix rae_compress_reconstruct(const Matrix& latents, HvraeModel& model);
/// Likelihood parameters for one latent vector. The simplified variant
/// reports a zero log-variance.
prob::DiagonalGaussian vae_decode(const Eigen::VectorXd& latent, HvraeModel& model);

/// Loss of one pattern with the given standard-normal draws (L x D, one row
/// per frame). Ignored by the rae variant.
LossBreakdown hvrae_loss(const prep::MotionPattern& pattern, HvraeModel& model, const Matrix& noise);
/// Loss with noise drawn from `rng` frame by frame.
LossBreakdown hvrae_loss(const prep::MotionPattern& pattern, HvraeModel& model, prob::RandomSource& rng);

/// Tape outputs of one mini-batch.
struct BatchGraph {
  ad::Var loss;       // mean over the batch of per-pattern totals
  ad::Var kld;        // (L*B) x 1, frame-major
  ad::Var reconstruction;  // (L*B) x 1
};

/// Records the batched loss of `batch` on `tape`. `noise` holds one L x D
/// matrix per pattern; an empty vector selects the posterior mean.
BatchGraph build_batch_graph(ad::Tape& tape, HvraeModel& model,
                             const std::vector<const prep::MotionPattern*>& batch,
                             const std::vector<Matrix>& noise);

/// L x D standard-normal draws, one frame (row) at a time.
Matrix draw_noise(const HvraeConfig& config, prob::RandomSource& rng);

/// Anomaly level of one pattern: its loss total. Noise comes from a stream
/// derived from `seed` and the pattern's start frame, unless the model
/// scores with the posterior mean.
double anomaly_score(const prep::MotionPattern& pattern, HvraeModel& model, std::uint64_t seed);
LossBreakdown score_breakdown(const prep::MotionPattern& pattern, HvraeModel& model, std::uint64_t seed);

}  // namespace radfall::model
