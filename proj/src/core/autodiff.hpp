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

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/error.hpp"

// Minimal reverse-mode differentiation over 2-D row-major matrices.
//
// A Tape records every operation in creation order, so walking it backwards
// is a valid topological order. Op coverage is limited to what the
// fall-detection models need; there is no general broadcasting.

namespace radfall::ad {

class Tape;

/// Trainable tensor owned by a model. Gradients accumulate into `grad`
/// whenever a tape that used it runs backward.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
  Eigen::Index size() const { return value.size(); }
};

/// Handle to a node recorded on a tape.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  /// Gradient of the last backward() loss with respect to this node.
  /// Zero-shaped like value() when the node was not on the loss path.
  Matrix grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const;
  Tape& tape() const;
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  /// Receives the gradient flowing into the node and pushes contributions
  /// to the parents through Tape::accumulate.
  using BackwardFn = std::function<void(Tape&, const Matrix& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  /// Leaf that receives a gradient but is not tied to a Parameter.
  Var variable(Matrix value);
  /// Leaf bound to a parameter. Repeated calls reuse the same node.
  Var parameter(Parameter& p);

  /// Records a derived node. Throws ErrorKind::Numerical when `value` holds
  /// NaN or Inf.
  Var record(const char* op, Matrix value, std::vector<int> parents, BackwardFn backward);

  /// Reverse sweep from a 1 x 1 loss. Parameter gradients are added to
  /// Parameter::grad.
  void backward(const Var& loss);

  void accumulate(int id, const Matrix& g);
  bool needs_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].needs_grad; }
  const Matrix& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  Matrix grad(int id) const;
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    const char* op = "";
    Matrix value;
    Matrix grad;
    bool needs_grad = false;
    std::vector<int> parents;
    BackwardFn backward;
    Parameter* param = nullptr;
  };
  Var push(Node node);

  std::vector<Node> nodes_;
  std::unordered_map<Parameter*, int> param_nodes_;
};

// Elementwise.
Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);
Var operator+(const Var& a, double c);
Var operator+(double c, const Var& a);
Var operator-(const Var& a, double c);
Var operator-(double c, const Var& a);
Var operator*(const Var& a, double c);
Var operator*(double c, const Var& a);
Var tanh(const Var& a);
Var exp(const Var& a);
Var log(const Var& a);
Var square(const Var& a);
/// Hard clamp; the gradient is zero where the input lies outside [lo, hi].
Var clamp(const Var& a, double lo, double hi);

/// x * W^T + b. x is n x in, W is out x in, b is 1 x out.
Var affine(const Var& x, const Var& weight, const Var& bias);
Var affine(const Var& x, const Var& weight);

// Reductions.
Var sum(const Var& a);
Var mean(const Var& a);
/// n x c -> n x 1.
Var row_sums(const Var& a);
/// Mean of each block of `group` consecutive rows: n x c -> (n / group) x c.
Var group_mean_rows(const Var& a, Eigen::Index group);
Var group_sum_rows(const Var& a, Eigen::Index group);

// Shape.
/// Every row repeated `times` times in place: n x c -> (n * times) x c.
Var repeat_rows(const Var& a, Eigen::Index times);
Var concat_rows(const std::vector<Var>& parts);
Var concat_cols(const std::vector<Var>& parts);
Var slice_rows(const Var& a, Eigen::Index start, Eigen::Index count);
Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count);
/// Row-major reinterpretation.
Var reshape(const Var& a, Eigen::Index rows, Eigen::Index cols);

}  // namespace radfall::ad
