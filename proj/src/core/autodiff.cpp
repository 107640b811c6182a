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

#include "core/autodiff.hpp"

#include <cmath>

namespace radfall::ad {

namespace {

void check_same_shape(const Var& a, const Var& b, const char* op) {
  require(&a.tape() == &b.tape(), ErrorKind::Domain, std::string(op) + ": operands on different tapes");
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::Domain,
          std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
              std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
              std::to_string(b.cols()));
}

}  // namespace

const Matrix& Var::value() const {
  require(tape_ != nullptr, ErrorKind::Domain, "use of an unbound Var");
  return tape_->value(id_);
}

Matrix Var::grad() const {
  require(tape_ != nullptr, ErrorKind::Domain, "use of an unbound Var");
  return tape_->grad(id_);
}

double Var::scalar() const {
  const Matrix& v = value();
  require(v.size() == 1, ErrorKind::Domain, "Var::scalar on a non-scalar");
  return v(0, 0);
}

Tape& Var::tape() const {
  require(tape_ != nullptr, ErrorKind::Domain, "use of an unbound Var");
  return *tape_;
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::constant(Matrix value) {
  Node n;
  n.op = "constant";
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::variable(Matrix value) {
  Node n;
  n.op = "variable";
  n.value = std::move(value);
  n.needs_grad = true;
  return push(std::move(n));
}

Var Tape::parameter(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var(this, it->second);
  Node n;
  n.op = "parameter";
  n.value = p.value;
  n.needs_grad = true;
  n.param = &p;
  Var v = push(std::move(n));
  param_nodes_.emplace(&p, v.id());
  return v;
}

Var Tape::record(const char* op, Matrix value, std::vector<int> parents, BackwardFn backward) {
  if (!value.allFinite()) fail(ErrorKind::Numerical, std::string("non-finite value produced by ") + op);
  Node n;
  n.op = op;
  n.value = std::move(value);
  for (int p : parents) n.needs_grad = n.needs_grad || nodes_[static_cast<std::size_t>(p)].needs_grad;
  n.parents = std::move(parents);
  if (n.needs_grad) n.backward = std::move(backward);
  return push(std::move(n));
}

void Tape::accumulate(int id, const Matrix& g) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.needs_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

Matrix Tape::grad(int id) const {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.size() == 0) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::backward(const Var& loss) {
  require(&loss.tape() == this, ErrorKind::Domain, "backward: loss recorded on another tape");
  require(loss.value().size() == 1, ErrorKind::Domain, "backward: loss must be a scalar");
  for (auto& n : nodes_) n.grad.resize(0, 0);
  nodes_[static_cast<std::size_t>(loss.id())].grad = Matrix::Ones(1, 1);
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, n.grad);
    if (n.param != nullptr) n.param->grad += n.grad;
  }
}

// ---------------------------------------------------------------------------
// Elementwise

Var operator+(const Var& a, const Var& b) {
  check_same_shape(a, b, "add");
  const int ia = a.id(), ib = b.id();
  return a.tape().record("add", a.value() + b.value(), {ia, ib}, [ia, ib](Tape& t, const Matrix& g) {
    t.accumulate(ia, g);
    t.accumulate(ib, g);
  });
}

Var operator-(const Var& a, const Var& b) {
  check_same_shape(a, b, "sub");
  const int ia = a.id(), ib = b.id();
  return a.tape().record("sub", a.value() - b.value(), {ia, ib}, [ia, ib](Tape& t, const Matrix& g) {
    t.accumulate(ia, g);
    t.accumulate(ib, -g);
  });
}

Var operator*(const Var& a, const Var& b) {
  check_same_shape(a, b, "mul");
  const int ia = a.id(), ib = b.id();
  Matrix v = a.value().cwiseProduct(b.value());
  return a.tape().record("mul", std::move(v), {ia, ib}, [ia, ib](Tape& t, const Matrix& g) {
    if (t.needs_grad(ia)) t.accumulate(ia, g.cwiseProduct(t.value(ib)));
    if (t.needs_grad(ib)) t.accumulate(ib, g.cwiseProduct(t.value(ia)));
  });
}

Var operator/(const Var& a, const Var& b) {
  check_same_shape(a, b, "div");
  const int ia = a.id(), ib = b.id();
  Matrix v = a.value().cwiseQuotient(b.value());
  return a.tape().record("div", std::move(v), {ia, ib}, [ia, ib](Tape& t, const Matrix& g) {
    const Matrix& bv = t.value(ib);
    if (t.needs_grad(ia)) t.accumulate(ia, g.cwiseQuotient(bv));
    if (t.needs_grad(ib)) {
      const Matrix& av = t.value(ia);
      t.accumulate(ib, -(g.array() * av.array() / (bv.array() * bv.array())).matrix());
    }
  });
}

Var operator-(const Var& a) { return a * -1.0; }

Var operator+(const Var& a, double c) {
  const int ia = a.id();
  Matrix v = a.value().array() + c;
  return a.tape().record("add_scalar", std::move(v), {ia},
                         [ia](Tape& t, const Matrix& g) { t.accumulate(ia, g); });
}

Var operator+(double c, const Var& a) { return a + c; }
Var operator-(const Var& a, double c) { return a + (-c); }
Var operator-(double c, const Var& a) { return (a * -1.0) + c; }

Var operator*(const Var& a, double c) {
  const int ia = a.id();
  return a.tape().record("scale", a.value() * c, {ia},
                         [ia, c](Tape& t, const Matrix& g) { t.accumulate(ia, g * c); });
}

Var operator*(double c, const Var& a) { return a * c; }

Var tanh(const Var& a) {
  const int ia = a.id();
  // Through the vectorized exp: tanh|x| = (1 - e^{-2|x|}) / (1 + e^{-2|x|}).
  const auto& x = a.value().array();
  Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> t = (-2.0 * x.abs()).exp();
  Matrix v = (x.sign() * (1.0 - t) / (1.0 + t)).matrix();
  auto& tape = a.tape();
  const int out = static_cast<int>(tape.size());
  return tape.record("tanh", std::move(v), {ia}, [ia, out](Tape& t, const Matrix& g) {
    const Matrix& y = t.value(out);
    t.accumulate(ia, (g.array() * (1.0 - y.array().square())).matrix());
  });
}

Var exp(const Var& a) {
  const int ia = a.id();
  Matrix v = a.value().array().exp();
  auto& tape = a.tape();
  const int out = static_cast<int>(tape.size());
  return tape.record("exp", std::move(v), {ia}, [ia, out](Tape& t, const Matrix& g) {
    t.accumulate(ia, g.cwiseProduct(t.value(out)));
  });
}

Var log(const Var& a) {
  const int ia = a.id();
  require((a.value().array() > 0.0).all(), ErrorKind::Domain, "log of a non-positive value");
  Matrix v = a.value().array().log();
  return a.tape().record("log", std::move(v), {ia}, [ia](Tape& t, const Matrix& g) {
    t.accumulate(ia, g.cwiseQuotient(t.value(ia)));
  });
}

Var square(const Var& a) {
  const int ia = a.id();
  Matrix v = a.value().array().square();
  return a.tape().record("square", std::move(v), {ia}, [ia](Tape& t, const Matrix& g) {
    t.accumulate(ia, (2.0 * g.array() * t.value(ia).array()).matrix());
  });
}

Var clamp(const Var& a, double lo, double hi) {
  require(lo <= hi, ErrorKind::Domain, "clamp: lower bound above upper bound");
  const int ia = a.id();
  Matrix v = a.value().cwiseMax(lo).cwiseMin(hi);
  return a.tape().record("clamp", std::move(v), {ia}, [ia, lo, hi](Tape& t, const Matrix& g) {
    const Matrix& x = t.value(ia);
    Matrix gi = (x.array() >= lo && x.array() <= hi).select(g, 0.0);
    t.accumulate(ia, gi);
  });
}

// ---------------------------------------------------------------------------
// Affine

Var affine(const Var& x, const Var& weight, const Var& bias) {
  require(weight.cols() == x.cols(), ErrorKind::Domain,
          "affine: input width " + std::to_string(x.cols()) + " does not match weight " +
              std::to_string(weight.rows()) + "x" + std::to_string(weight.cols()));
  require(bias.rows() == 1 && bias.cols() == weight.rows(), ErrorKind::Domain,
          "affine: bias shape mismatch");
  const int ix = x.id(), iw = weight.id(), ib = bias.id();
  Matrix v = x.value() * weight.value().transpose();
  v.rowwise() += bias.value().row(0);
  return x.tape().record("affine", std::move(v), {ix, iw, ib}, [ix, iw, ib](Tape& t, const Matrix& g) {
    if (t.needs_grad(ix)) t.accumulate(ix, g * t.value(iw));
    if (t.needs_grad(iw)) t.accumulate(iw, g.transpose() * t.value(ix));
    if (t.needs_grad(ib)) t.accumulate(ib, g.colwise().sum());
  });
}

Var affine(const Var& x, const Var& weight) {
  require(weight.cols() == x.cols(), ErrorKind::Domain, "affine: input width does not match weight");
  const int ix = x.id(), iw = weight.id();
  Matrix v = x.value() * weight.value().transpose();
  return x.tape().record("linear", std::move(v), {ix, iw}, [ix, iw](Tape& t, const Matrix& g) {
    if (t.needs_grad(ix)) t.accumulate(ix, g * t.value(iw));
    if (t.needs_grad(iw)) t.accumulate(iw, g.transpose() * t.value(ix));
  });
}

// ---------------------------------------------------------------------------
// Reductions

Var sum(const Var& a) {
  const int ia = a.id();
  const Eigen::Index r = a.rows(), c = a.cols();
  Matrix v(1, 1);
  v(0, 0) = a.value().sum();
  return a.tape().record("sum", std::move(v), {ia}, [ia, r, c](Tape& t, const Matrix& g) {
    t.accumulate(ia, Matrix::Constant(r, c, g(0, 0)));
  });
}

Var mean(const Var& a) {
  require(a.value().size() > 0, ErrorKind::Domain, "mean of an empty tensor");
  const int ia = a.id();
  const Eigen::Index r = a.rows(), c = a.cols();
  const double n = static_cast<double>(a.value().size());
  Matrix v(1, 1);
  v(0, 0) = a.value().sum() / n;
  return a.tape().record("mean", std::move(v), {ia}, [ia, r, c, n](Tape& t, const Matrix& g) {
    t.accumulate(ia, Matrix::Constant(r, c, g(0, 0) / n));
  });
}

Var row_sums(const Var& a) {
  const int ia = a.id();
  const Eigen::Index c = a.cols();
  Matrix v = a.value().rowwise().sum();
  return a.tape().record("row_sums", std::move(v), {ia}, [ia, c](Tape& t, const Matrix& g) {
    t.accumulate(ia, g.replicate(1, c));
  });
}

namespace {

Matrix group_rows_sum(const Matrix& x, Eigen::Index group) {
  const Eigen::Index blocks = x.rows() / group;
  Matrix out = Matrix::Zero(blocks, x.cols());
  for (Eigen::Index b = 0; b < blocks; ++b)
    out.row(b) = x.middleRows(b * group, group).colwise().sum();
  return out;
}

Matrix repeat_each_row(const Matrix& x, Eigen::Index times) {
  Matrix out(x.rows() * times, x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    out.middleRows(r * times, times) = x.row(r).replicate(times, 1);
  return out;
}

}  // namespace

Var group_sum_rows(const Var& a, Eigen::Index group) {
  require(group >= 1 && a.rows() % group == 0, ErrorKind::Domain,
          "group_sum_rows: rows not divisible by group size");
  const int ia = a.id();
  return a.tape().record("group_sum_rows", group_rows_sum(a.value(), group), {ia},
                         [ia, group](Tape& t, const Matrix& g) { t.accumulate(ia, repeat_each_row(g, group)); });
}

Var group_mean_rows(const Var& a, Eigen::Index group) {
  require(group >= 1 && a.rows() % group == 0, ErrorKind::Domain,
          "group_mean_rows: rows not divisible by group size");
  const int ia = a.id();
  const double inv = 1.0 / static_cast<double>(group);
  Matrix v = group_rows_sum(a.value(), group) * inv;
  return a.tape().record("group_mean_rows", std::move(v), {ia}, [ia, group, inv](Tape& t, const Matrix& g) {
    t.accumulate(ia, repeat_each_row(g, group) * inv);
  });
}

// ---------------------------------------------------------------------------
// Shape

Var repeat_rows(const Var& a, Eigen::Index times) {
  require(times >= 1, ErrorKind::Domain, "repeat_rows: times must be >= 1");
  const int ia = a.id();
  return a.tape().record("repeat_rows", repeat_each_row(a.value(), times), {ia},
                         [ia, times](Tape& t, const Matrix& g) { t.accumulate(ia, group_rows_sum(g, times)); });
}

Var concat_rows(const std::vector<Var>& parts) {
  require(!parts.empty(), ErrorKind::Domain, "concat_rows: no inputs");
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  std::vector<int> ids;
  std::vector<Eigen::Index> offsets;
  for (const auto& p : parts) {
    require(p.cols() == cols, ErrorKind::Domain, "concat_rows: column mismatch");
    require(&p.tape() == &parts.front().tape(), ErrorKind::Domain, "concat_rows: mixed tapes");
    ids.push_back(p.id());
    offsets.push_back(rows);
    rows += p.rows();
  }
  Matrix v(rows, cols);
  for (std::size_t i = 0; i < parts.size(); ++i) v.middleRows(offsets[i], parts[i].rows()) = parts[i].value();
  return parts.front().tape().record("concat_rows", std::move(v), ids, [ids, offsets](Tape& t, const Matrix& g) {
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (t.needs_grad(ids[i])) t.accumulate(ids[i], g.middleRows(offsets[i], t.value(ids[i]).rows()));
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  require(!parts.empty(), ErrorKind::Domain, "concat_cols: no inputs");
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  std::vector<int> ids;
  std::vector<Eigen::Index> offsets;
  for (const auto& p : parts) {
    require(p.rows() == rows, ErrorKind::Domain, "concat_cols: row mismatch");
    require(&p.tape() == &parts.front().tape(), ErrorKind::Domain, "concat_cols: mixed tapes");
    ids.push_back(p.id());
    offsets.push_back(cols);
    cols += p.cols();
  }
  Matrix v(rows, cols);
  for (std::size_t i = 0; i < parts.size(); ++i) v.middleCols(offsets[i], parts[i].cols()) = parts[i].value();
  return parts.front().tape().record("concat_cols", std::move(v), ids, [ids, offsets](Tape& t, const Matrix& g) {
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (t.needs_grad(ids[i])) t.accumulate(ids[i], g.middleCols(offsets[i], t.value(ids[i]).cols()));
  });
}

Var slice_rows(const Var& a, Eigen::Index start, Eigen::Index count) {
  require(start >= 0 && count >= 0 && start + count <= a.rows(), ErrorKind::Domain,
          "slice_rows: range out of bounds");
  const int ia = a.id();
  const Eigen::Index r = a.rows(), c = a.cols();
  Matrix v = a.value().middleRows(start, count);
  return a.tape().record("slice_rows", std::move(v), {ia}, [ia, r, c, start, count](Tape& t, const Matrix& g) {
    Matrix full = Matrix::Zero(r, c);
    full.middleRows(start, count) = g;
    t.accumulate(ia, full);
  });
}

Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count) {
  require(start >= 0 && count >= 0 && start + count <= a.cols(), ErrorKind::Domain,
          "slice_cols: range out of bounds");
  const int ia = a.id();
  const Eigen::Index r = a.rows(), c = a.cols();
  Matrix v = a.value().middleCols(start, count);
  return a.tape().record("slice_cols", std::move(v), {ia}, [ia, r, c, start, count](Tape& t, const Matrix& g) {
    Matrix full = Matrix::Zero(r, c);
    full.middleCols(start, count) = g;
    t.accumulate(ia, full);
  });
}

Var reshape(const Var& a, Eigen::Index rows, Eigen::Index cols) {
  require(rows * cols == a.value().size(), ErrorKind::Domain, "reshape: element count changes");
  const int ia = a.id();
  const Eigen::Index r = a.rows(), c = a.cols();
  Matrix v = Eigen::Map<const Matrix>(a.value().data(), rows, cols);
  return a.tape().record("reshape", std::move(v), {ia}, [ia, r, c](Tape& t, const Matrix& g) {
    t.accumulate(ia, Eigen::Map<const Matrix>(g.data(), r, c));
  });
}

}  // namespace radfall::ad
