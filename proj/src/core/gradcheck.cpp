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

#include "core/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/random.hpp"

namespace radfall::ad {

namespace {

std::vector<Eigen::Index> pick_coordinates(Eigen::Index size, int limit, prob::RandomSource& rng) {
  if (limit <= 0 || size <= limit) {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(size));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    return all;
  }
  std::vector<Eigen::Index> out;
  for (std::size_t i : rng.sample_without_replacement(static_cast<std::size_t>(size), static_cast<std::size_t>(limit)))
    out.push_back(static_cast<Eigen::Index>(i));
  std::sort(out.begin(), out.end());
  return out;
}

// Derivative of f along one coordinate of `slot`, fourth-order central stencil.
double numeric_derivative(double& slot, double h, const std::function<double()>& f) {
  const double x0 = slot;
  auto at = [&](double offset) {
    slot = x0 + offset;
    return f();
  };
  const double d = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
  slot = x0;
  return d;
}

void record(GradCheckResult& r, double analytic, double numeric, const std::string& where, double floor) {
  const double abs_err = std::abs(analytic - numeric);
  const double rel_err = abs_err / std::max({std::abs(analytic), std::abs(numeric), floor});
  r.max_absolute_error = std::max(r.max_absolute_error, abs_err);
  if (rel_err >= r.max_relative_error) {
    r.max_relative_error = rel_err;
    r.worst = where;
  }
  ++r.coordinates;
}

}  // namespace

GradCheckResult check_parameter_gradients(const ScalarFn& fn, const std::vector<Parameter*>& params,
                                          const GradCheckOptions& options) {
  for (auto* p : params) p->zero_grad();
  {
    Tape tape;
    Var loss = fn(tape);
    tape.backward(loss);
  }
  std::vector<Matrix> analytic;
  for (auto* p : params) analytic.push_back(p->grad);

  auto evaluate = [&] {
    Tape tape;
    return fn(tape).scalar();
  };

  prob::RandomSource rng(options.seed);
  GradCheckResult result;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    for (Eigen::Index c : pick_coordinates(p.value.size(), options.max_coordinates, rng)) {
      const double numeric = numeric_derivative(p.value.data()[c], options.step, evaluate);
      record(result, analytic[i].data()[c], numeric, p.name + "[" + std::to_string(c) + "]", options.floor);
    }
  }
  return result;
}

GradCheckResult check_input_gradient(const std::function<Var(Tape&, const Var&)>& fn, const Matrix& input,
                                     const GradCheckOptions& options) {
  Matrix analytic;
  {
    Tape tape;
    Var x = tape.variable(input);
    Var loss = fn(tape, x);
    tape.backward(loss);
    analytic = x.grad();
  }
  Matrix probe = input;
  auto evaluate = [&] {
    Tape tape;
    return fn(tape, tape.constant(probe)).scalar();
  };
  prob::RandomSource rng(options.seed);
  GradCheckResult result;
  for (Eigen::Index c : pick_coordinates(probe.size(), options.max_coordinates, rng)) {
    const double numeric = numeric_derivative(probe.data()[c], options.step, evaluate);
    record(result, analytic.data()[c], numeric, "input[" + std::to_string(c) + "]", options.floor);
  }
  return result;
}

}  // namespace radfall::ad
