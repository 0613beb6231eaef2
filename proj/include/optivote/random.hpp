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

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace optivote {

// Purpose tags mixed into derived seeds so that unrelated consumers never
// share a stream.
enum class StreamTag : std::uint64_t {
  kChannel = 1,
  kNoise = 2,
  kGradient = 3,
  kSelect = 4,
  kData = 5,
  kPartition = 6,
  kModelInit = 7,
  kMonteCarlo = 8,
};

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic random source. The engine is std::mt19937_64 (bit-exact by
// the standard); conversions to uniform/normal variates are done here because
// the std distributions are implementation-defined.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for (master seed, tag, indices...). Evaluation order of
  // derived streams does not affect their content.
  static RandomStream derive(std::uint64_t master, StreamTag tag,
                             std::initializer_list<std::uint64_t> indices = {});

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_pos() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  // Standard normal (Box-Muller, second variate cached).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Uniform integer in [0, n) without modulo bias.
  std::size_t index(std::size_t n);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace optivote
