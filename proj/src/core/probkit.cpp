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

#include "core/probkit.hpp"

#include <cmath>

namespace radfall::prob {

void validate(const DiagonalGaussian& q) {
  require(q.mean.size() == q.log_variance.size(), ErrorKind::Domain,
          "gaussian mean and log-variance differ in length");
  require(q.mean.allFinite() && q.log_variance.allFinite(), ErrorKind::Domain,
          "gaussian parameters are not finite");
}

double kld_to_standard_normal(const DiagonalGaussian& q) {
  validate(q);
  double acc = 0.0;
  for (Eigen::Index d = 0; d < q.dims(); ++d) {
    const double mu = q.mean[d];
    const double lv = q.log_variance[d];
    acc += 1.0 + lv - mu * mu - std::exp(lv);
  }
  return -0.5 * acc;
}

double gaussian_log_likelihood(const Matrix& x, const DiagonalGaussian& p) {
  validate(p);
  require(x.cols() == p.dims(), ErrorKind::Domain, "likelihood: dimension mismatch");
  require(x.allFinite(), ErrorKind::Domain, "likelihood: data not finite");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const double inv_var = std::exp(-p.log_variance[k]);
    double sq = 0.0;
    for (Eigen::Index n = 0; n < x.rows(); ++n) {
      const double r = x(n, k) - p.mean[k];
      sq += r * r;
    }
    acc += sq * inv_var + static_cast<double>(x.rows()) * p.log_variance[k];
  }
  return -0.5 * acc;
}

Eigen::VectorXd standard_normal_vector(Eigen::Index n, RandomSource& rng) {
  Eigen::VectorXd eps(n);
  for (Eigen::Index i = 0; i < n; ++i) eps[i] = rng.normal();
  return eps;
}

Eigen::VectorXd reparameterize(const DiagonalGaussian& q, const Eigen::VectorXd& eps) {
  validate(q);
  require(eps.size() == q.dims(), ErrorKind::Domain, "reparameterize: noise dimension mismatch");
  return q.mean.array() + (0.5 * q.log_variance.array()).exp() * eps.array();
}

Eigen::VectorXd reparameterize(const DiagonalGaussian& q, RandomSource& rng) {
  return reparameterize(q, standard_normal_vector(q.dims(), rng));
}

}  // namespace radfall::prob
