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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "optivote/channel.hpp"
#include "optivote/learner.hpp"
#include "optivote/phy.hpp"
#include "optivote/power.hpp"

namespace optivote {

enum class Scheme { kOptivote, kOptivoteFixedPower, kIdealMv, kFedavgAir };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

// How the path-loss constant is obtained.
enum class CFsplMode { kNormalized, kPhysical, kValue };

struct ChannelConfig {
  double d_min_km = 500.0;
  double d_max_km = 2000.0;
  double lambda_opt_nm = 1550.0;
  double a0 = 0.9;
  double xi_p = 1.5;
  double sigma_n2 = 0.1;
  CFsplMode c_fspl_mode = CFsplMode::kNormalized;
  double c_fspl = 0.0;  // used when c_fspl_mode == kValue
  NoiseModel noise_model = NoiseModel::kEnergy;

  // SI-unit parameters with the path-loss constant resolved.
  ChannelParams params() const;
  bool operator==(const ChannelConfig&) const = default;
};

struct PowerConfig {
  PowerParams params;
  AbarScope abar_scope = AbarScope::kAll;
  bool operator==(const PowerConfig&) const = default;
};

enum class DatasetKind { kSynthetic, kMnist };

struct DatasetConfig {
  DatasetKind kind = DatasetKind::kSynthetic;
  int num_classes = 10;
  std::size_t n_train = 2000;
  std::size_t n_test = 1000;
  std::size_t dim = 20;
  double separation = 4.0;
  std::string train_images, train_labels, test_images, test_labels;
  bool operator==(const DatasetConfig&) const = default;
};

struct ModelConfig {
  Arch arch = Arch::kLogistic;
  int hidden = 32;
  bool operator==(const ModelConfig&) const = default;
};

struct LearnerConfig {
  DatasetConfig dataset;
  ModelConfig model;
  PartitionSpec partition;
  int local_steps = 1;
  bool operator==(const LearnerConfig&) const = default;
};

enum class LrMode { kConstant, kTheorem1 };

struct RunConfig {
  std::size_t M = 20;
  std::size_t m = 4;
  std::size_t rounds = 200;
  std::size_t d_b = 64;
  double eta = 0.05;
  LrMode lr_mode = LrMode::kConstant;
  double l1_estimate = 0.0;  // ||L||_1, required for lr = "theorem1"
  Scheme scheme = Scheme::kOptivote;
  std::uint64_t seed = 1;
  std::size_t frame_capacity = 0;  // 0 -> 2q, one frame per round

  // Step size actually applied.
  double learning_rate() const;
  bool operator==(const RunConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  bool dump_power = false;
  bool dump_slots = false;
  bool operator==(const OutputConfig&) const = default;
};

struct Config {
  ChannelConfig channel;
  PowerConfig power;
  LearnerConfig learner;
  RunConfig run;
  OutputConfig output;
  bool operator==(const Config&) const = default;

  // Cross-field invariants; throws ConfigError naming the offending key.
  void validate() const;
};

// Builds a Config from JSON. Missing keys take defaults, unknown keys and
// type errors raise ConfigError with the dotted path of the key.
Config config_from_json(const nlohmann::json& j);

// Fully resolved JSON, every default spelled out.
nlohmann::json to_json(const Config& cfg);

Config parse_config(const std::string& path);

// Sets a dotted key ("run.seed") in raw config JSON. The value text is parsed
// as JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& raw, const std::string& dotted_key, const std::string& value);

// OPTIVOTE_SEED, when set, replaces run.seed.
void apply_env_overrides(Config& cfg);

// FNV-1a of the resolved JSON, hex.
std::string config_hash(const Config& cfg);

}  // namespace optivote
