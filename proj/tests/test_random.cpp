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
#include <vector>

#include "optivote/random.hpp"

namespace optivote {
namespace {

TEST(RandomStream, SameSeedSameSequence) {
  RandomStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, DerivedStreamsDependOnEveryIndex) {
  auto first = [](RandomStream s) { return s.next_u64(); };
  const auto base = first(RandomStream::derive(7, StreamTag::kChannel, {1, 2}));
  EXPECT_EQ(base, first(RandomStream::derive(7, StreamTag::kChannel, {1, 2})));
  EXPECT_NE(base, first(RandomStream::derive(7, StreamTag::kChannel, {2, 1})));
  EXPECT_NE(base, first(RandomStream::derive(7, StreamTag::kNoise, {1, 2})));
  EXPECT_NE(base, first(RandomStream::derive(8, StreamTag::kChannel, {1, 2})));
  EXPECT_NE(base, first(RandomStream::derive(7, StreamTag::kChannel, {1})));
}

TEST(RandomStream, UniformRanges) {
  RandomStream rng(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform_pos();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
  }
}

TEST(RandomStream, NormalMoments) {
  RandomStream rng(11);
  const int n = 400000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal(2.0, 3.0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 2.0, 4 * 3.0 / std::sqrt(n));
  EXPECT_NEAR(var, 9.0, 4 * 9.0 * std::sqrt(2.0 / n));
}

TEST(RandomStream, IndexIsUniform) {
  RandomStream rng(5);
  const std::size_t k = 7;
  const int n = 700000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) {
    const std::size_t j = rng.index(k);
    ASSERT_LT(j, k);
    ++counts[j];
  }
  const double p = 1.0 / k;
  const double se = std::sqrt(n * p * (1 - p));
  for (int c : counts) EXPECT_NEAR(c, n * p, 4 * se);
}

}  // namespace
}  // namespace optivote
