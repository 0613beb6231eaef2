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

#include "optivote/phy.hpp"

#include <fmt/format.h>
#include <cmath>
#include <ostream>

#include "optivote/errors.hpp"

namespace optivote {

void check_signs(std::span<const Sign> signs) {
  for (std::size_t i = 0; i < signs.size(); ++i)
    if (signs[i] != 1 && signs[i] != -1)
      throw UsageError(fmt::format("sign[{}] = {} is not +1 or -1", i, int(signs[i])));
}

SlotActivation ppm_encode(Sign sign) {
  if (sign == 1) return {1.0, 0.0};
  if (sign == -1) return {0.0, 1.0};
  throw UsageError("ppm_encode: sign must be +1 or -1");
}

Sign ppm_decode(SlotActivation slots) { return slots.plus >= slots.minus ? 1 : -1; }

double draw_slot_noise(NoiseModel model, double sigma_n2, RandomStream& rng) {
  if (sigma_n2 == 0.0) return 0.0;
  switch (model) {
    case NoiseModel::kEnergy:
      return rng.normal(sigma_n2, sigma_n2);
    case NoiseModel::kAdditive:
      return rng.normal(0.0, std::sqrt(sigma_n2));
  }
  return 0.0;
}

namespace {

void check_lengths(std::size_t nodes, std::size_t powers, std::size_t draws) {
  if (nodes != powers || nodes != draws)
    throw UsageError(fmt::format("superpose: length mismatch (signs {}, powers {}, draws {})",
                                 nodes, powers, draws));
}

}  // namespace

SlotEnergyPair superpose(std::span<const Sign> signs, std::span<const double> powers,
                         std::span<const ChannelDraw> draws, double sigma_n2, RandomStream& rng,
                         NoiseModel model) {
  check_lengths(signs.size(), powers.size(), draws.size());
  SlotEnergyPair out;
  for (std::size_t m = 0; m < signs.size(); ++m) {
    if (!(powers[m] > 0.0)) throw UsageError("superpose: powers must be > 0");
    const SlotActivation t = ppm_encode(signs[m]);
    // C_R = 1, sqrt(E_s) = 1.
    const double gain = powers[m] * draws[m].intensity;
    out.e_plus += gain * t.plus;
    out.e_minus += gain * t.minus;
  }
  out.e_plus += draw_slot_noise(model, sigma_n2, rng);
  out.e_minus += draw_slot_noise(model, sigma_n2, rng);
  return out;
}

std::vector<SlotEnergyPair> superpose_all(std::span<const SignVector> node_signs,
                                          std::span<const double> powers,
                                          std::span<const ChannelDraw> draws, double sigma_n2,
                                          RandomStream& rng, NoiseModel model) {
  check_lengths(node_signs.size(), powers.size(), draws.size());
  const std::size_t q = node_signs.empty() ? 0 : node_signs.front().size();
  std::vector<SlotEnergyPair> pairs(q);
  for (std::size_t m = 0; m < node_signs.size(); ++m) {
    const SignVector& s = node_signs[m];
    if (s.size() != q) throw UsageError("superpose_all: sign vectors differ in length");
    if (!(powers[m] > 0.0)) throw UsageError("superpose_all: powers must be > 0");
    check_signs(s);
    const double gain = powers[m] * draws[m].intensity;
    for (std::size_t i = 0; i < q; ++i) {
      if (s[i] > 0)
        pairs[i].e_plus += gain;
      else
        pairs[i].e_minus += gain;
    }
  }
  for (auto& p : pairs) {
    p.e_plus += draw_slot_noise(model, sigma_n2, rng);
    p.e_minus += draw_slot_noise(model, sigma_n2, rng);
  }
  return pairs;
}

MvDecision detect_mv(std::span<const SlotEnergyPair> pairs) {
  MvDecision votes(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) votes[i] = pairs[i].delta() < 0.0 ? -1 : 1;
  return votes;
}

MvDecision ideal_majority(std::span<const SignVector> node_signs) {
  const std::size_t q = node_signs.empty() ? 0 : node_signs.front().size();
  std::vector<int> tally(q, 0);
  for (const auto& s : node_signs) {
    if (s.size() != q) throw UsageError("ideal_majority: sign vectors differ in length");
    for (std::size_t i = 0; i < q; ++i) tally[i] += s[i];
  }
  MvDecision votes(q);
  for (std::size_t i = 0; i < q; ++i) votes[i] = tally[i] < 0 ? -1 : 1;
  return votes;
}

SlotAssignment frame_map(std::size_t coordinate, std::size_t frame_capacity) {
  if (frame_capacity < 2 || frame_capacity % 2 != 0)
    throw UsageError("frame_map: frame capacity must be even and >= 2");
  const std::size_t per_frame = frame_capacity / 2;
  SlotAssignment a;
  a.frame = coordinate / per_frame;
  a.tau_plus = 2 * (coordinate % per_frame);
  a.tau_minus = a.tau_plus + 1;
  return a;
}

void write_slot_csv_header(std::ostream& out) { out << "round,coord,e_plus,e_minus,delta\n"; }

void write_slot_csv_rows(std::ostream& out, std::size_t round,
                         std::span<const SlotEnergyPair> pairs) {
  for (std::size_t i = 0; i < pairs.size(); ++i)
    out << fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", round, i, pairs[i].e_plus,
                       pairs[i].e_minus, pairs[i].delta());
}

}  // namespace optivote
