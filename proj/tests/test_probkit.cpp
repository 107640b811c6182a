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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "core/probkit.hpp"
#include "support.hpp"

using namespace radfall;

namespace {

// Adaptive Simpson integration of f over [a, b].
template <typename F>
double simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol) return left + right + (left + right - whole) / 15;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, 50);
}

// KL(q || p) for one dimension straight from the integral definition.
double kld_by_quadrature(double mu, double log_var) {
  const double sd = std::exp(0.5 * log_var);
  auto log_q = [&](double x) { return -0.5 * std::log(2 * std::numbers::pi) - 0.5 * log_var - 0.5 * (x - mu) * (x - mu) / (sd * sd); };
  auto log_p = [](double x) { return -0.5 * std::log(2 * std::numbers::pi) - 0.5 * x * x; };
  auto integrand = [&](double x) { return std::exp(log_q(x)) * (log_q(x) - log_p(x)); };
  const double half = 12.0 * sd;
  return integrate(integrand, mu - half, mu + half, 1e-10);
}

}  // namespace

TEST(Kld, PriorMatchIsZero) {
  prob::DiagonalGaussian q{Eigen::VectorXd::Zero(8), Eigen::VectorXd::Zero(8)};
  EXPECT_EQ(prob::kld_to_standard_normal(q), 0.0);
}

TEST(Kld, HandEvaluatedUnitShift) {
  prob::DiagonalGaussian q{Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1)};
  EXPECT_DOUBLE_EQ(prob::kld_to_standard_normal(q), 0.5);
}

TEST(Kld, MatchesQuadrature) {
  prob::RandomSource rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform_index(16));
    prob::DiagonalGaussian q{Eigen::VectorXd(d), Eigen::VectorXd(d)};
    double want = 0.0;
    for (int i = 0; i < d; ++i) {
      q.mean(i) = rng.uniform(-3, 3);
      q.log_variance(i) = rng.uniform(-4, 3);
      want += kld_by_quadrature(q.mean(i), q.log_variance(i));
    }
    EXPECT_NEAR(prob::kld_to_standard_normal(q), want, 1e-6);
    EXPECT_GE(prob::kld_to_standard_normal(q), 0.0);
  }
}

TEST(GaussianLikelihood, ZeroResidualZeroLogVar) {
  Matrix x = Matrix::Constant(5, 4, 0.7);
  prob::DiagonalGaussian p{Eigen::VectorXd::Constant(4, 0.7), Eigen::VectorXd::Zero(4)};
  EXPECT_EQ(prob::gaussian_log_likelihood(x, p), 0.0);
}

TEST(GaussianLikelihood, HandEvaluated) {
  Matrix x(1, 1);
  x << 2.0;
  prob::DiagonalGaussian p{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
  EXPECT_DOUBLE_EQ(prob::gaussian_log_likelihood(x, p), -2.0);
}

TEST(GaussianLikelihood, MatchesTextbookDensity) {
  prob::RandomSource rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_index(30)), k = 4;
    Matrix x = testkit::random_matrix(n, k, rng, 2.0);
    prob::DiagonalGaussian p{Eigen::VectorXd(k), Eigen::VectorXd(k)};
    for (int i = 0; i < k; ++i) {
      p.mean(i) = rng.normal();
      p.log_variance(i) = rng.uniform(-2, 2);
    }
    double log_density = 0.0;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < k; ++c) {
        const double var = std::exp(p.log_variance(c));
        log_density += std::log(std::exp(-(x(r, c) - p.mean(c)) * (x(r, c) - p.mean(c)) / (2 * var)) /
                                std::sqrt(2 * std::numbers::pi * var));
      }
    const double constant = n * k * std::log(std::sqrt(2 * std::numbers::pi));
    EXPECT_NEAR(prob::gaussian_log_likelihood(x, p), log_density + constant, 1e-9);
  }
}

TEST(Reparameterize, ZeroNoiseGivesMean) {
  prob::DiagonalGaussian q{Eigen::Vector3d(1, -2, 3), Eigen::Vector3d(0.3, 1, -1)};
  EXPECT_EQ(prob::reparameterize(q, Eigen::VectorXd::Zero(3)), q.mean);
}

TEST(Reparameterize, UnitScale) {
  prob::DiagonalGaussian q{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)};
  EXPECT_EQ(prob::reparameterize(q, Eigen::Vector2d(1, -1)), Eigen::VectorXd(Eigen::Vector2d(1, -1)));
}

TEST(Reparameterize, MonteCarloMoments) {
  prob::RandomSource rng(33);
  prob::DiagonalGaussian q{Eigen::VectorXd::Constant(1, 3.0), Eigen::VectorXd::Constant(1, std::log(4.0))};
  const int n = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = prob::reparameterize(q, rng)(0);
    s += z;
    s2 += z * z;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 3.0, 0.02);
  EXPECT_NEAR(std::sqrt(s2 / n - mean * mean), 2.0, 0.02);
}

TEST(Probkit, RejectsMismatchedShapes) {
  prob::DiagonalGaussian q{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)};
  EXPECT_THROW(prob::kld_to_standard_normal(q), Error);
  prob::DiagonalGaussian p{Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)};
  EXPECT_THROW(prob::gaussian_log_likelihood(Matrix::Zero(2, 4), p), Error);
}

TEST(RandomSource, SeedsReproduceAndChildrenDiffer) {
  prob::RandomSource a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  prob::RandomSource root(5);
  auto c1 = root.child(1), c2 = root.child(2);
  EXPECT_NE(c1.next_u64(), c2.next_u64());
  EXPECT_EQ(root.child(1).next_u64(), prob::RandomSource(5).child(1).next_u64());
}

TEST(RandomSource, DistributionMoments) {
  prob::RandomSource rng(34);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, sp = 0;
  for (int i = 0; i < n; ++i) {
    su += rng.uniform();
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    sp += static_cast<double>(rng.poisson(19.0));
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.01);
  EXPECT_NEAR(sp / n, 19.0, 0.05);
  auto pick = rng.sample_without_replacement(10, 10);
  std::sort(pick.begin(), pick.end());
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(pick[i], i);
}
