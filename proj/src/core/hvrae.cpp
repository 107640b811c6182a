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

#include "core/hvrae.hpp"

#include <algorithm>
#include <numeric>

namespace radfall::model {

using ad::Tape;
using ad::Var;

const char* to_string(LossVariant variant) {
  switch (variant) {
    case LossVariant::Full: return "full";
    case LossVariant::Simplified: return "simplified";
    case LossVariant::Rae: return "rae";
  }
  return "full";
}

LossVariant loss_variant_from_string(const std::string& name) {
  if (name == "full" || name == "hvrae") return LossVariant::Full;
  if (name == "simplified" || name == "hvrae_sl") return LossVariant::Simplified;
  if (name == "rae") return LossVariant::Rae;
  fail(ErrorKind::InvalidArgument, "unknown loss variant '" + name + "' (expected full, simplified or rae)");
}

void validate(const HvraeConfig& c) {
  auto positive = [](int v, const char* what) {
    require(v >= 1, ErrorKind::InvalidArgument, std::string(what) + " must be >= 1");
  };
  positive(c.length, "length");
  positive(c.points, "points");
  positive(c.dims, "dims");
  positive(c.latent, "latent");
  positive(c.rnn_hidden, "rnn_hidden");
  positive(c.epochs, "epochs");
  positive(c.batch_size, "batch_size");
  require(!c.encoder_hidden.empty() && !c.decoder_hidden.empty(), ErrorKind::InvalidArgument,
          "encoder_hidden and decoder_hidden need at least one layer");
  for (int w : c.encoder_hidden) positive(w, "encoder_hidden width");
  for (int w : c.decoder_hidden) positive(w, "decoder_hidden width");
  require(c.logvar_min < c.logvar_max, ErrorKind::InvalidArgument, "logvar clamp bounds out of order");
  require(c.learning_rate > 0, ErrorKind::InvalidArgument, "learning_rate must be > 0");
  require(c.beta1 >= 0 && c.beta1 < 1 && c.beta2 >= 0 && c.beta2 < 1 && c.epsilon > 0,
          ErrorKind::InvalidArgument, "adam hyperparameters out of range");
  require(c.clip_norm >= 0, ErrorKind::InvalidArgument, "clip_norm must be >= 0 (0 disables clipping)");
}

HvraeModel::HvraeModel(const HvraeConfig& config) : config_(config) {
  validate(config_);
  using nn::Activation;
  int width = config_.dims;
  for (std::size_t i = 0; i < config_.encoder_hidden.size(); ++i) {
    encoder.emplace_back("enc." + std::to_string(i), width, config_.encoder_hidden[i], Activation::Tanh);
    width = config_.encoder_hidden[i];
  }
  if (config_.variant == LossVariant::Rae) {
    encoder_embed = nn::DenseLayer("enc.embed", width, config_.latent, Activation::Identity);
  } else {
    encoder_mean = nn::DenseLayer("enc.mu", width, config_.latent, Activation::Identity);
    encoder_logvar = nn::DenseLayer("enc.logvar", width, config_.latent, Activation::Identity);
  }
  rnn_encoder = nn::RnnCell("rnn_enc", config_.latent, config_.rnn_hidden);
  rnn_decoder = nn::RnnCell("rnn_dec", config_.latent, config_.rnn_hidden);
  rnn_output = nn::DenseLayer("rae_out", config_.rnn_hidden, config_.latent, Activation::Identity);
  width = config_.latent;
  for (std::size_t i = 0; i < config_.decoder_hidden.size(); ++i) {
    decoder.emplace_back("dec." + std::to_string(i), width, config_.decoder_hidden[i], Activation::Tanh);
    width = config_.decoder_hidden[i];
  }
  if (config_.variant == LossVariant::Rae) {
    decoder_points = nn::DenseLayer("dec.out", width, config_.points * config_.dims, Activation::Identity);
  } else {
    decoder_mean = nn::DenseLayer("dec.mu", width, config_.dims, Activation::Identity);
    if (config_.variant == LossVariant::Full)
      decoder_logvar = nn::DenseLayer("dec.logvar", width, config_.dims, Activation::Identity);
  }
  input_offset = Matrix::Zero(1, config_.dims);
  input_scale = Matrix::Ones(1, config_.dims);
}

std::vector<ad::Parameter*> HvraeModel::parameters() {
  std::vector<ad::Parameter*> out;
  auto add = [&out](std::vector<ad::Parameter*> ps) { out.insert(out.end(), ps.begin(), ps.end()); };
  for (auto& l : encoder) add(l.parameters());
  if (config_.variant == LossVariant::Rae) {
    add(encoder_embed.parameters());
  } else {
    add(encoder_mean.parameters());
    add(encoder_logvar.parameters());
  }
  add(rnn_encoder.parameters());
  add(rnn_decoder.parameters());
  add(rnn_output.parameters());
  for (auto& l : decoder) add(l.parameters());
  if (config_.variant == LossVariant::Rae) {
    add(decoder_points.parameters());
  } else {
    add(decoder_mean.parameters());
    if (config_.variant == LossVariant::Full) add(decoder_logvar.parameters());
  }
  return out;
}

std::vector<const ad::Parameter*> HvraeModel::parameters() const {
  auto mutable_params = const_cast<HvraeModel*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

ad::Parameter* HvraeModel::find(const std::string& name) {
  for (auto* p : parameters())
    if (p->name == name) return p;
  return nullptr;
}

void HvraeModel::initialize(std::uint64_t init_seed) {
  prob::RandomSource rng(init_seed);
  for (auto& l : encoder) l.initialize(rng);
  if (config_.variant == LossVariant::Rae) {
    encoder_embed.initialize(rng);
  } else {
    encoder_mean.initialize(rng);
    encoder_logvar.initialize(rng);
  }
  rnn_encoder.initialize(rng);
  rnn_decoder.initialize(rng);
  rnn_output.initialize(rng);
  for (auto& l : decoder) l.initialize(rng);
  if (config_.variant == LossVariant::Rae) {
    decoder_points.initialize(rng);
  } else {
    decoder_mean.initialize(rng);
    if (config_.variant == LossVariant::Full) decoder_logvar.initialize(rng);
  }
  seed = init_seed;
}

Matrix canonical_rows(const Matrix& frame) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(frame.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&frame](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index k = 0; k < frame.cols(); ++k) {
      if (frame(a, k) < frame(b, k)) return true;
      if (frame(b, k) < frame(a, k)) return false;
    }
    return false;
  });
  Matrix out(frame.rows(), frame.cols());
  for (std::size_t i = 0; i < order.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = frame.row(order[i]);
  return out;
}

namespace {

Matrix prepare_frame(const Matrix& frame, const HvraeModel& model) {
  const auto& c = model.config();
  require(frame.rows() == c.points && frame.cols() == c.dims, ErrorKind::Domain,
          "frame shape " + std::to_string(frame.rows()) + "x" + std::to_string(frame.cols()) +
              " does not match the model's " + std::to_string(c.points) + "x" + std::to_string(c.dims));
  Matrix out = canonical_rows(frame);
  if (c.standardize) {
    out.rowwise() -= model.input_offset.row(0);
    out.array().rowwise() /= model.input_scale.row(0).array();
  }
  return out;
}

// Frame-major stacking: frame l of pattern b occupies rows (l*B + b)*N ...
Matrix batch_input(const std::vector<const prep::MotionPattern*>& batch, const HvraeModel& model) {
  const auto& c = model.config();
  const Eigen::Index B = static_cast<Eigen::Index>(batch.size());
  Matrix x(c.length * B * c.points, c.dims);
  for (Eigen::Index b = 0; b < B; ++b) {
    require(batch[static_cast<std::size_t>(b)]->length() == c.length, ErrorKind::Domain,
            "pattern length does not match the model");
    for (int l = 0; l < c.length; ++l)
      x.middleRows((l * B + b) * c.points, c.points) =
          prepare_frame(batch[static_cast<std::size_t>(b)]->frames[static_cast<std::size_t>(l)], model);
  }
  return x;
}

struct Encoded {
  Var mean;     // or the embedding for the rae variant
  Var logvar;
};

Encoded encode(Tape& tape, HvraeModel& model, const Var& x) {
  Var h = x;
  for (auto& layer : model.encoder) h = layer.forward(tape, h);
  Var pooled = ad::group_mean_rows(h, model.config().points);
  if (model.config().variant == LossVariant::Rae) return {model.encoder_embed.forward(tape, pooled), Var()};
  const auto& c = model.config();
  return {model.encoder_mean.forward(tape, pooled),
          ad::clamp(model.encoder_logvar.forward(tape, pooled), c.logvar_min, c.logvar_max)};
}

Var sequence_autoencode(Tape& tape, HvraeModel& model, const Var& z, Eigen::Index batch) {
  const auto& c = model.config();
  Var h = tape.constant(Matrix::Zero(batch, c.rnn_hidden));
  for (int l = 0; l < c.length; ++l) h = model.rnn_encoder.step(tape, h, ad::slice_rows(z, l * batch, batch));
  Var previous = tape.constant(Matrix::Zero(batch, c.latent));
  std::vector<Var> outputs(static_cast<std::size_t>(c.length));
  for (int s = 0; s < c.length; ++s) {
    h = model.rnn_decoder.step(tape, h, previous);
    previous = model.rnn_output.forward(tape, h);
    outputs[static_cast<std::size_t>(c.length - 1 - s)] = previous;
  }
  return ad::concat_rows(outputs);
}

struct Decoded {
  Var mean;  // per-frame mean, or all N*K points for the rae variant
  Var logvar;
};

Decoded decode(Tape& tape, HvraeModel& model, const Var& latent) {
  Var h = latent;
  for (auto& layer : model.decoder) h = layer.forward(tape, h);
  const auto& c = model.config();
  switch (c.variant) {
    case LossVariant::Rae: return {model.decoder_points.forward(tape, h), Var()};
    case LossVariant::Simplified: return {model.decoder_mean.forward(tape, h), Var()};
    case LossVariant::Full: break;
  }
  return {model.decoder_mean.forward(tape, h),
          ad::clamp(model.decoder_logvar.forward(tape, h), c.logvar_min, c.logvar_max)};
}

}  // namespace

BatchGraph build_batch_graph(Tape& tape, HvraeModel& model, const std::vector<const prep::MotionPattern*>& batch,
                             const std::vector<Matrix>& noise) {
  require(!batch.empty(), ErrorKind::InvalidArgument, "empty batch");
  const auto& c = model.config();
  const Eigen::Index B = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index frames = c.length * B;
  Var x = tape.constant(batch_input(batch, model));
  Encoded q = encode(tape, model, x);

  Var z = q.mean;
  if (c.variant != LossVariant::Rae && !noise.empty()) {
    require(noise.size() == batch.size(), ErrorKind::Domain, "one noise matrix per pattern is required");
    Matrix eps(frames, c.latent);
    for (Eigen::Index b = 0; b < B; ++b) {
      const Matrix& e = noise[static_cast<std::size_t>(b)];
      require(e.rows() == c.length && e.cols() == c.latent, ErrorKind::Domain, "noise must be L x D");
      for (int l = 0; l < c.length; ++l) eps.row(l * B + b) = e.row(l);
    }
    z = q.mean + ad::exp(q.logvar * 0.5) * tape.constant(std::move(eps));
  }

  Var reconstructed = sequence_autoencode(tape, model, z, B);
  Decoded p = decode(tape, model, reconstructed);

  BatchGraph g;
  Var elementwise;
  if (c.variant == LossVariant::Rae) {
    Var points = ad::reshape(p.mean, frames * c.points, c.dims);
    const double inv = 1.0 / static_cast<double>(c.length * c.points * c.dims);
    elementwise = ad::square(x - points) * inv;
    g.kld = tape.constant(Matrix::Zero(frames, 1));
  } else {
    Var residual = x - ad::repeat_rows(p.mean, c.points);
    if (c.variant == LossVariant::Full) {
      Var logvar = ad::repeat_rows(p.logvar, c.points);
      elementwise = (ad::square(residual) * ad::exp(-logvar) + logvar) * 0.5;
    } else {
      elementwise = ad::square(residual) * 0.5;
    }
    Var kld_terms = (1.0 + q.logvar - ad::square(q.mean) - ad::exp(q.logvar)) * -0.5;
    g.kld = ad::row_sums(kld_terms);
  }
  g.reconstruction = ad::group_sum_rows(ad::row_sums(elementwise), c.points);
  g.loss = ad::sum(g.kld + g.reconstruction) * (1.0 / static_cast<double>(B));
  return g;
}

Matrix draw_noise(const HvraeConfig& config, prob::RandomSource& rng) {
  Matrix eps(config.length, config.latent);
  for (int l = 0; l < config.length; ++l)
    for (int d = 0; d < config.latent; ++d) eps(l, d) = rng.normal();
  return eps;
}

LossBreakdown hvrae_loss(const prep::MotionPattern& pattern, HvraeModel& model, const Matrix& noise) {
  Tape tape;
  std::vector<Matrix> per_pattern;
  if (noise.size() > 0) per_pattern.push_back(noise);
  BatchGraph g = build_batch_graph(tape, model, {&pattern}, per_pattern);
  LossBreakdown out;
  const Matrix& kld = g.kld.value();
  const Matrix& rec = g.reconstruction.value();
  for (Eigen::Index l = 0; l < kld.rows(); ++l) {
    out.per_frame.push_back(kld(l, 0) + rec(l, 0));
    out.kld_term += kld(l, 0);
    out.reconstruction_term += rec(l, 0);
  }
  out.total = g.loss.scalar();
  return out;
}

LossBreakdown hvrae_loss(const prep::MotionPattern& pattern, HvraeModel& model, prob::RandomSource& rng) {
  if (model.config().variant == LossVariant::Rae) return hvrae_loss(pattern, model, Matrix());
  return hvrae_loss(pattern, model, draw_noise(model.config(), rng));
}

LossBreakdown score_breakdown(const prep::MotionPattern& pattern, HvraeModel& model, std::uint64_t seed) {
  const auto& c = model.config();
  if (c.posterior_mean || c.variant == LossVariant::Rae) return hvrae_loss(pattern, model, Matrix());
  prob::RandomSource rng(prob::mix_seed(seed, static_cast<std::uint64_t>(pattern.start_frame_index)));
  return hvrae_loss(pattern, model, rng);
}

double anomaly_score(const prep::MotionPattern& pattern, HvraeModel& model, std::uint64_t seed) {
  return score_breakdown(pattern, model, seed).total;
}

prob::DiagonalGaussian vae_encode(const Matrix& frame, HvraeModel& model) {
  require(model.config().variant != LossVariant::Rae, ErrorKind::InvalidArgument,
          "vae_encode needs a variational model");
  Tape tape;
  Encoded q = encode(tape, model, tape.constant(prepare_frame(frame, model)));
  return {q.mean.value().row(0).transpose(), q.logvar.value().row(0).transpose()};
}

Matrix rae_compress_reconstruct(const Matrix& latents, HvraeModel& model) {
  const auto& c = model.config();
  require(latents.rows() == c.length && latents.cols() == c.latent, ErrorKind::Domain,
          "latent sequence must be L x D");
  Tape tape;
  return sequence_autoencode(tape, model, tape.constant(latents), 1).value();
}

prob::DiagonalGaussian vae_decode(const Eigen::VectorXd& latent, HvraeModel& model) {
  const auto& c = model.config();
  require(c.variant != LossVariant::Rae, ErrorKind::InvalidArgument, "vae_decode needs a variational model");
  require(latent.size() == c.latent, ErrorKind::Domain, "latent vector must have D entries");
  Tape tape;
  Decoded p = decode(tape, model, tape.constant(latent.transpose()));
  prob::DiagonalGaussian out;
  out.mean = p.mean.value().row(0).transpose();
  out.log_variance = p.logvar.valid() ? Eigen::VectorXd(p.logvar.value().row(0).transpose())
                                      : Eigen::VectorXd::Zero(c.dims);
  return out;
}

}  // namespace radfall::model
