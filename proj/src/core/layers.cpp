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

#include "core/layers.hpp"

#include <cmath>

namespace radfall::nn {

namespace {

void fill_uniform(Matrix& m, double limit, prob::RandomSource& rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-limit, limit);
}

}  // namespace

const char* to_string(Activation activation) {
  return activation == Activation::Tanh ? "tanh" : "identity";
}

DenseLayer::DenseLayer(std::string layer_name, int in, int out, Activation act)
    : name(std::move(layer_name)),
      weight(name + ".weight", Matrix::Zero(out, in)),
      bias(name + ".bias", Matrix::Zero(1, out)),
      activation(act) {
  require(in >= 1 && out >= 1, ErrorKind::InvalidArgument, "dense layer " + name + ": widths must be >= 1");
}

void DenseLayer::initialize(prob::RandomSource& rng) {
  fill_uniform(weight.value, 1.0 / std::sqrt(static_cast<double>(inputs())), rng);
  bias.value.setZero();
}

ad::Var DenseLayer::forward(ad::Tape& tape, const ad::Var& x) {
  ad::Var y = ad::affine(x, tape.parameter(weight), tape.parameter(bias));
  return activation == Activation::Tanh ? ad::tanh(y) : y;
}

RnnCell::RnnCell(std::string cell_name, int inputs, int hidden)
    : name(std::move(cell_name)),
      recurrent(name + ".recurrent", Matrix::Zero(hidden, hidden)),
      input(name + ".input", Matrix::Zero(hidden, inputs)),
      bias(name + ".bias", Matrix::Zero(1, hidden)) {
  require(inputs >= 1 && hidden >= 1, ErrorKind::InvalidArgument, "rnn cell " + name + ": widths must be >= 1");
}

void RnnCell::initialize(prob::RandomSource& rng) {
  fill_uniform(recurrent.value, 1.0 / std::sqrt(static_cast<double>(hidden())), rng);
  fill_uniform(input.value, 1.0 / std::sqrt(static_cast<double>(inputs())), rng);
  bias.value.setZero();
}

ad::Var RnnCell::step(ad::Tape& tape, const ad::Var& h_prev, const ad::Var& x) {
  ad::Var pre = ad::affine(h_prev, tape.parameter(recurrent)) + ad::affine(x, tape.parameter(input), tape.parameter(bias));
  return ad::tanh(pre);
}

}  // namespace radfall::nn
