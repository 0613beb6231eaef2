// Copyright 2026 The OptiVote Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "optivote/errors.hpp"
#include "optivote/random.hpp"
#include "optivote/theory.hpp"

namespace optivote::theory {
namespace {

TEST(Theta, Examples) {
  EXPECT_EQ(theta(1.0, 1.0), 1.0);
  EXPECT_EQ(theta(2.0, 0.25), 0.5);
  EXPECT_DOUBLE_EQ(theta(3.0, 0.2), 3 * theta(1.0, 0.2));
  EXPECT_DOUBLE_EQ(theta(1.0, 0.2, 2.0, 4.0), 2.0 * 2.0 * 0.2);
}

TEST(EnergyMeans, Examples) {
  EXPECT_EQ(energy_means(0, 4, 2.0, 0.5).plus, 0.5);
  const EnergyMeans e = energy_means(3, 7, 2.0, 0.5);
  EXPECT_EQ(e.plus, 6.5);
  EXPECT_EQ(e.plus - e.minus, (3 - 7) * 2.0);
  EXPECT_EQ(e.plus + e.minus, 10 * 2.0 + 2 * 0.5);
}

TEST(XiSnr, Ratio) { EXPECT_DOUBLE_EQ(xi_snr(0.3, 0.1), 3.0); }

TEST(ErrorBound, Examples) {
  EXPECT_DOUBLE_EQ(error_bound(10, 1, 0.2), 0.25);
  EXPECT_NEAR(error_bound(7, 1e12, 0.13), 0.13, 1e-12);
  for (double M : {1.0, 4.0, 50.0})
    for (double xi : {0.01, 1.0, 300.0}) EXPECT_DOUBLE_EQ(error_bound(M, xi, 0.5), 0.5);
}

TEST(ErrorBound, StrictlyBetweenQAndHalfAndMonotone) {
  RandomStream rng(12);
  for (int t = 0; t < 20000; ++t) {
    const double M = 1 + static_cast<double>(rng.index(100));
    const double xi = std::exp(-5 + 10 * rng.uniform());
    const double q = 0.001 + 0.498 * rng.uniform();
    const double b = error_bound(M, xi, q);
    ASSERT_GT(b, q);
    ASSERT_LT(b, 0.5);
    ASSERT_LT(error_bound(M, xi * 1.5, q), b);
    ASSERT_LT(error_bound(M + 1, xi, q), b);
  }
}

TEST(QBound, BranchBoundaryIsContinuous) {
  const double z = 2 / std::sqrt(3.0);
  const double alpha = 1.3, d_b = 4;
  const double g = z * alpha / std::sqrt(d_b);
  const double below = 0.5 - z / (2 * std::sqrt(3.0));
  const double above = (2.0 / 9.0) / (z * z);
  EXPECT_NEAR(below, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(above, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(q_bound(g, alpha, d_b), 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(q_bound(g * (1 + 1e-12), alpha, d_b), 1.0 / 6.0, 1e-11);
  EXPECT_NEAR(q_bound(g * (1 - 1e-12), alpha, d_b), 1.0 / 6.0, 1e-11);
}

TEST(QBound, LimitsAndRange) {
  EXPECT_EQ(q_bound(0.0, 1.0, 8), 0.5);
  EXPECT_LT(q_bound(1e6, 1.0, 1), 1e-12);
  EXPECT_DOUBLE_EQ(q_bound(3.0, 1.0, 1), 2.0 / 81.0);
  for (int k = 0; k <= 1000; ++k) {
    const double b = q_bound(0.01 * k, 1.0, 3);
    ASSERT_LE(b, 0.5);
    ASSERT_GE(b, 0.0);
  }
}

TEST(ErrorBoundFull, Examples) {
  EXPECT_NEAR(error_bound_full(10, 1, 1, 1, 4), (10 * std::sqrt(2.0) / 6 + 1) / 12, 1e-15);
  EXPECT_NEAR(error_bound_full(10, 1, 1, 1, 4), 0.27975, 1e-5);
  EXPECT_NEAR(error_bound_full(10, 1e13, 2, 1, 9), std::sqrt(2.0) / (3 * 2 * 3), 1e-10);
  EXPECT_EQ(error_bound_full(10, 1, 1e-9, 1, 1), 1.0);
  double prev = 1.0;
  for (double d_b = 1; d_b <= 512; d_b *= 2) {
    const double b = error_bound_full(20, 2, 0.3, 1.5, d_b);
    ASSERT_LE(b, prev);
    prev = b;
  }
}

TEST(StrictMajority, Examples) {
  EXPECT_TRUE(corollary1_check(6, 10, 0.3));
  EXPECT_FALSE(corollary1_check(5, 10, 0.3));
  EXPECT_FALSE(corollary1_check(6, 10, 0.5));
}

ConvergenceInputs worked_example() {
  ConvergenceInputs in;
  in.M = 20;
  in.xi = 1;
  in.l1_smoothness = 10;
  in.initial_gap = 5;
  in.alpha = {2.0};
  in.gamma = 4;
  in.N = 400;
  return in;
}

TEST(Convergence, WorkedExample) {
  const double delta = (1 + 2.0 / (1 * 20)) / std::sqrt(4.0);
  EXPECT_DOUBLE_EQ(convergence_delta(1, 20, 4), 0.55);
  EXPECT_DOUBLE_EQ(delta, 0.55);
  const double oracle =
      (1 / std::sqrt(400.0)) * (delta * std::sqrt(10.0) * (5 + 4 / 2.0) +
                                (2 * std::sqrt(2.0) / 3) * std::sqrt(4.0) * 2.0);
  EXPECT_NEAR(oracle, 0.797300, 5e-7);
  EXPECT_NEAR(convergence_bound(worked_example()), oracle, 1e-9);
  EXPECT_NEAR(convergence_bound_appendix(worked_example()), oracle, 1e-12);
}

TEST(Convergence, ScalingAndMonotonicity) {
  ConvergenceInputs a = worked_example();
  ConvergenceInputs b = a;
  b.N = 800;
  EXPECT_NEAR(convergence_bound(b) / convergence_bound(a), 1 / std::sqrt(2.0), 1e-12);
  double prev = convergence_bound(a);
  for (double xi : {1.5, 2.0, 5.0, 50.0}) {
    ConvergenceInputs c = a;
    c.xi = xi;
    ASSERT_LT(convergence_bound(c), prev);
    prev = convergence_bound(c);
  }
  ConvergenceInputs noisy = a;
  noisy.alpha = {1.0, 2.0};
  EXPECT_GT(convergence_bound(noisy), convergence_bound(a));
  EXPECT_NEAR(convergence_delta(1e15, 1e15, 9), 1.0 / 3.0, 1e-12);
}

TEST(Convergence, RejectsIndivisibleRounds) {
  ConvergenceInputs a = worked_example();
  a.N = 401;
  EXPECT_THROW(convergence_bound(a), UsageError);
  a.N = 400;
  a.d_b = 99;
  EXPECT_THROW(convergence_bound(a), UsageError);
  a.d_b = 100;
  EXPECT_NO_THROW(convergence_bound(a));
}

TEST(Convergence, LearningRate) {
  EXPECT_DOUBLE_EQ(theorem1_learning_rate(10, 40), 1 / std::sqrt(400.0));
}

}  // namespace
}  // namespace optivote::theory
