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

#include "core/training.hpp"

#include <cmath>
#include <numeric>

#include "core/adam.hpp"

namespace radfall::model {

namespace {

void fit_standardization(const std::vector<prep::MotionPattern>& dataset, HvraeModel& model) {
  const int k = model.config().dims;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(k);
  double count = 0;
  for (const auto& p : dataset)
    for (const auto& f : p.frames) {
      sum += f.colwise().sum().transpose();
      sq += f.cwiseAbs2().colwise().sum().transpose();
      count += static_cast<double>(f.rows());
    }
  for (int i = 0; i < k; ++i) {
    const double mean = sum(i) / count;
    const double var = std::max(sq(i) / count - mean * mean, 0.0);
    model.input_offset(0, i) = mean;
    model.input_scale(0, i) = var > 1e-12 ? std::sqrt(var) : 1.0;
  }
}

}  // namespace

TrainingResult train(const std::vector<prep::MotionPattern>& dataset, const HvraeConfig& config,
                     const EpochCallback& on_epoch) {
  validate(config);
  require(!dataset.empty(), ErrorKind::InvalidArgument, "training set is empty");
  for (const auto& p : dataset) {
    require(p.length() == config.length && p.points() == config.points, ErrorKind::Domain,
            "pattern shape does not match the model config");
    for (const auto& f : p.frames)
      require(f.cols() == config.dims, ErrorKind::Domain, "pattern point width does not match the model config");
  }

  TrainingResult result{HvraeModel(config), {}};
  HvraeModel& model = result.model;
  prob::RandomSource root(config.seed);
  model.initialize(prob::mix_seed(config.seed, 1));
  model.seed = config.seed;
  if (config.standardize) fit_standardization(dataset, model);

  prob::RandomSource order_rng = root.child(2);
  prob::RandomSource noise_rng = root.child(3);
  const bool sampled = config.variant != LossVariant::Rae;

  auto params = model.parameters();
  nn::AdamState adam;
  adam.config = {config.learning_rate, config.beta1, config.beta2, config.epsilon};

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch_size = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    order_rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      std::vector<const prep::MotionPattern*> batch;
      std::vector<Matrix> noise;
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&dataset[order[i]]);
        if (sampled) noise.push_back(draw_noise(config, noise_rng));
      }
      for (auto* p : params) p->zero_grad();
      ad::Tape tape;
      BatchGraph g;
      try {
        g = build_batch_graph(tape, model, batch, noise);
        tape.backward(g.loss);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Numerical) throw;
        fail(ErrorKind::Numerical, "training halted at epoch " + std::to_string(epoch + 1) + ", batch starting at " +
                                       std::to_string(start) + ": " + e.what());
      }
      total += g.loss.scalar() * static_cast<double>(batch.size());
      nn::clip_global_norm(params, config.clip_norm);
      nn::adam_step(params, adam);
    }
    const double mean = total / static_cast<double>(dataset.size());
    if (!std::isfinite(mean)) fail(ErrorKind::Numerical, "training loss is not finite at epoch " + std::to_string(epoch + 1));
    result.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch + 1, mean);
  }
  model.final_loss = result.epoch_loss.back();
  return result;
}

}  // namespace radfall::model
