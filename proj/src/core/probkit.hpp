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

#include <Eigen/Dense>

#include "core/error.hpp"
#include "core/random.hpp"

namespace radfall::prob {

/// Factorized Gaussian, parameterized by mean and natural-log variance.
struct DiagonalGaussian {
  Eigen::VectorXd mean;
  Eigen::VectorXd log_variance;

  Eigen::Index dims() const { return mean.size(); }
};

void validate(const DiagonalGaussian& q);

/// KL(q || N(0, I)) in closed form.
double kld_to_standard_normal(const DiagonalGaussian& q);

/// Log-likelihood of the rows of `x` (N x K) under a shared diagonal Gaussian,
/// with the N*K*log(sqrt(2*pi)) constant dropped. Higher is more likely.
double gaussian_log_likelihood(const Matrix& x, const DiagonalGaussian& p);

/// z = mean + exp(log_variance / 2) * eps, with eps drawn from `rng`.
Eigen::VectorXd reparameterize(const DiagonalGaussian& q, RandomSource& rng);
Eigen::VectorXd reparameterize(const DiagonalGaussian& q, const Eigen::VectorXd& eps);

Eigen::VectorXd standard_normal_vector(Eigen::Index n, RandomSource& rng);

}  // namespace radfall::prob
