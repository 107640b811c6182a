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

#include <string>
#include <vector>

#include "core/autodiff.hpp"
#include "core/random.hpp"

namespace radfall::nn {

enum class Activation { Identity, Tanh };

const char* to_string(Activation activation);

/// y = act(x * W^T + b), applied to every row of x.
struct DenseLayer {
  std::string name;
  ad::Parameter weight;  // out x in
  ad::Parameter bias;    // 1 x out
  Activation activation = Activation::Identity;

  DenseLayer() = default;
  DenseLayer(std::string layer_name, int in, int out, Activation act);

  int inputs() const { return static_cast<int>(weight.value.cols()); }
  int outputs() const { return static_cast<int>(weight.value.rows()); }

  /// Weights uniform in +-1/sqrt(in), zero bias.
  void initialize(prob::RandomSource& rng);
  ad::Var forward(ad::Tape& tape, const ad::Var& x);
  std::vector<ad::Parameter*> parameters() { return {&weight, &bias}; }
};

/// Elman cell: h = tanh(h_prev * W^T + x * U^T + b). Rows are batch items.
struct RnnCell {
  std::string name;
  ad::Parameter recurrent;  // hidden x hidden
  ad::Parameter input;      // hidden x inputs
  ad::Parameter bias;       // 1 x hidden

  RnnCell() = default;
  RnnCell(std::string cell_name, int inputs, int hidden);

  int hidden() const { return static_cast<int>(recurrent.value.rows()); }
  int inputs() const { return static_cast<int>(input.value.cols()); }

  void initialize(prob::RandomSource& rng);
  ad::Var step(ad::Tape& tape, const ad::Var& h_prev, const ad::Var& x);
  std::vector<ad::Parameter*> parameters() { return {&recurrent, &input, &bias}; }
};

}  // namespace radfall::nn
