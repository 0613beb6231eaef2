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

#include "optivote/power.hpp"

#include <fmt/format.h>
#include <algorithm>
#include <ostream>

#include "optivote/errors.hpp"

namespace optivote {

void PowerParams::validate() const {
  if (!(p_min > 0.0)) throw UsageError("power: p_min must be > 0");
  if (!(p_min <= p_avg)) throw UsageError("power: p_min must be <= p_avg");
  if (!(p_avg <= p_max)) throw UsageError("power: p_avg must be <= p_max");
  if (!(rho >= 0.0)) throw UsageError("power: rho must be >= 0");
}

PowerState PowerState::initial(std::size_t nodes, const PowerParams& params) {
  return PowerState{std::vector<double>(nodes, params.p_avg),
                    std::vector<double>(nodes, kInitialScore)};
}

double consistency_score(std::span<const Sign> local_signs, std::span<const Sign> mv_prev) {
  if (local_signs.size() != mv_prev.size())
    throw UsageError(fmt::format("consistency_score: length mismatch ({} vs {})",
                                 local_signs.size(), mv_prev.size()));
  if (local_signs.empty()) throw UsageError("consistency_score: empty sign vector");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < local_signs.size(); ++i) agree += local_signs[i] == mv_prev[i];
  return static_cast<double>(agree) / static_cast<double>(local_signs.size());
}

PowerUpdate update_powers(const PowerState& state, const PowerParams& params, AbarScope scope,
                          std::span<const std::size_t> active) {
  params.validate();
  const std::size_t n = state.size();
  if (n == 0 || state.a.size() != n) throw UsageError("update_powers: malformed state");

  std::vector<std::size_t> nodes;
  if (scope == AbarScope::kAll) {
    nodes.resize(n);
    for (std::size_t m = 0; m < n; ++m) nodes[m] = m;
  } else {
    nodes.assign(active.begin(), active.end());
    for (auto m : nodes)
      if (m >= n) throw UsageError("update_powers: active node id out of range");
  }

  PowerUpdate out{state, std::vector<double>(n, 0.0)};
  if (nodes.empty()) return out;

  double abar = 0.0;
  for (auto m : nodes) abar += state.a[m];
  abar /= static_cast<double>(nodes.size());

  for (auto m : nodes) {
    out.steps[m] = params.rho * (state.a[m] - abar);
    out.next.p[m] = std::clamp(state.p[m] + out.steps[m], params.p_min, params.p_max);
  }
  return out;
}

void write_power_csv_header(std::ostream& out) { out << "round,node_id,p,a\n"; }

void write_power_csv_rows(std::ostream& out, std::size_t round, const PowerState& state) {
  for (std::size_t m = 0; m < state.size(); ++m)
    out << fmt::format("{},{},{:.17g},{:.17g}\n", round, m, state.p[m], state.a[m]);
}

}  // namespace optivote
