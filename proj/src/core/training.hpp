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

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "core/hvrae.hpp"

namespace radfall::model {

struct TrainingResult {
  HvraeModel model;
  /// Mean per-pattern loss of every epoch, accumulated while the epoch runs.
  std::vector<double> epoch_loss;
};

using EpochCallback = std::function<void(int epoch, double mean_loss)>;

/// Mini-batch Adam on the configured objective. Deterministic for a given
/// config.seed: initialization, batch order and noise each use their own
/// child stream.
TrainingResult train(const std::vector<prep::MotionPattern>& dataset, const HvraeConfig& config,
                     const EpochCallback& on_epoch = {});

/// Weight file: {"version": 1, "config": {...}, "layers": {name: {"shape",
/// "values"}}, "seed", "final_loss"}.
inline constexpr int kWeightsVersion = 1;

std::string weights_to_json(const HvraeModel& model);
HvraeModel weights_from_json(const std::string& text);
void save_weights(const HvraeModel& model, const std::filesystem::path& path);
HvraeModel load_weights(const std::filesystem::path& path);

/// Config as a JSON object text, and the reverse. Keys missing from `text`
/// keep their value from `base`; unknown keys are rejected.
std::string config_to_json(const HvraeConfig& config);
HvraeConfig config_from_json(const std::string& text, const HvraeConfig& base = {});

}  // namespace radfall::model
