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

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "optivote/channel.hpp"
#include "optivote/config.hpp"
#include "optivote/learner.hpp"
#include "optivote/phy.hpp"
#include "optivote/random.hpp"

namespace optivote {

struct RoundMetrics {
  std::size_t round = 0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  double mv_error_rate = 0.0;     // detected vs ideal MV of the same transmitted signs
  double mean_power = 0.0;        // over this round's active nodes
  double mean_consistency = 0.0;  // over this round's active nodes

  // Power-control diagnostics (not part of the metrics CSV).
  double min_power = 0.0;       // over all M nodes after the update
  double max_power = 0.0;
  double power_step_sum = 0.0;  // sum of pre-projection steps
};

struct RunSummary {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<RoundMetrics> rounds;
  double final_accuracy = 0.0;
  double wall_time_s = 0.0;
  Model final_model;
  // Broadcast decision of every round (ideal_mv/optivote) or the sign of the
  // applied analog aggregate (fedavg_air).
  std::vector<MvDecision> decisions;
};

struct RunOptions {
  std::size_t threads = 1;
  std::ostream* power_csv = nullptr;  // round,node_id,p,a
  std::ostream* slot_csv = nullptr;   // round,coord,e_plus,e_minus,delta
};

// Uniform sample of m distinct node ids out of M, in ascending order.
std::vector<std::size_t> select_active(std::size_t M, std::size_t m, RandomStream& rng);

// Uncompensated analog over-the-air average:
//   (1/m) sum_k P_k I_k g_k + N(0, sigma_n2) per coordinate.
Eigen::VectorXd aggregate_fedavg_air(std::span<const Eigen::VectorXd> gradients,
                                     std::span<const double> powers,
                                     std::span<const ChannelDraw> draws, double sigma_n2,
                                     RandomStream& rng);

struct DataBundle {
  Dataset train;
  Dataset test;
};

// Loads or synthesizes the datasets named by the learner config.
DataBundle load_data(const Config& cfg);

Model initial_model(const Config& cfg, const Dataset& train);

// End-to-end federated training. Deterministic in (cfg, data) for any
// thread count.
RunSummary run(const Config& cfg, const DataBundle& data, const RunOptions& opts = {});
RunSummary run(const Config& cfg, const RunOptions& opts = {});

void write_metrics_csv(std::ostream& out, const RunSummary& summary);
nlohmann::json summary_to_json(const RunSummary& summary);

}  // namespace optivote
