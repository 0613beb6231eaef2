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
#include <span>
#include <vector>

#include "optivote/phy.hpp"

namespace optivote {

struct PowerParams {
  double p_avg = 1.0;
  double p_min = 0.1;
  double p_max = 2.0;
  double rho = 0.05;

  void validate() const;
  bool operator==(const PowerParams&) const = default;
};

// Which nodes enter the mean score and get their power moved.
enum class AbarScope { kAll, kActive };

struct PowerState {
  std::vector<double> p;  // per node, W
  std::vector<double> a;  // last consistency score per node

  static constexpr double kInitialScore = 0.5;

  // Every node at p_avg with the neutral initial score.
  static PowerState initial(std::size_t nodes, const PowerParams& params);
  std::size_t size() const { return p.size(); }
};

// Fraction of coordinates on which the local signs agree with the previous
// broadcast decision.
double consistency_score(std::span<const Sign> local_signs, std::span<const Sign> mv_prev);

struct PowerUpdate {
  PowerState next;
  // rho * (a_m - abar) before projection, zero for nodes outside the scope.
  std::vector<double> steps;
};

// Projected recursion p_m <- clamp(p_m + rho (a_m - abar), p_min, p_max).
// `active` is only consulted for AbarScope::kActive.
PowerUpdate update_powers(const PowerState& state, const PowerParams& params,
                          AbarScope scope = AbarScope::kAll,
                          std::span<const std::size_t> active = {});

// Rows for the --dump-power CSV: round,node_id,p,a.
void write_power_csv_header(std::ostream& out);
void write_power_csv_rows(std::ostream& out, std::size_t round, const PowerState& state);

}  // namespace optivote
