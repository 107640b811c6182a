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
#include <functional>
#include <string>
#include <vector>

#include "core/autodiff.hpp"

namespace radfall::ad {

struct GradCheckOptions {
  double step = 1e-5;
  /// Denominator floor of the relative error, so coordinates whose true
  /// derivative is ~0 are judged by absolute error.
  double floor = 1e-6;
  /// Coordinates checked per tensor; 0 checks all of them.
  int max_coordinates = 0;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::string worst;  // "<tensor>[index]"
  int coordinates = 0;
};

/// Builds a scalar from tape leaves. Called once for the analytic pass and
/// then once per perturbation, each time on a fresh tape.
using ScalarFn = std::function<Var(Tape&)>;

/// Central five-point finite differences against reverse-mode gradients
/// of every listed parameter.
GradCheckResult check_parameter_gradients(const ScalarFn& fn, const std::vector<Parameter*>& params,
                                          const GradCheckOptions& options = {});

/// Same check with respect to a free input matrix.
GradCheckResult check_input_gradient(const std::function<Var(Tape&, const Var&)>& fn, const Matrix& input,
                                     const GradCheckOptions& options = {});

}  // namespace radfall::ad
