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
#include <iosfwd>
#include <span>
#include <vector>

#include "optivote/channel.hpp"
#include "optivote/random.hpp"

namespace optivote {

// One-bit vote. Stored as int8_t so sign vectors are compact; every element
// is exactly -1 or +1.
using Sign = std::int8_t;
using SignVector = std::vector<Sign>;
using MvDecision = SignVector;

// Throws UsageError unless every element is -1 or +1.
void check_signs(std::span<const Sign> signs);

// Activation levels of the (tau+, tau-) slot pair for one coordinate.
struct SlotActivation {
  double plus = 0.0;
  double minus = 0.0;
};

// Binary PPM with unit symbol energy: +1 lights tau+, -1 lights tau-.
SlotActivation ppm_encode(Sign sign);

// Inverse of ppm_encode on a noiseless activation: the lit slot wins.
Sign ppm_decode(SlotActivation slots);

struct SlotEnergyPair {
  double e_plus = 0.0;
  double e_minus = 0.0;
  double delta() const { return e_plus - e_minus; }
};

// How receiver noise enters each slot's energy statistic.
//  kEnergy:   e += N(sigma_n2, sigma_n2^2). Noise power sigma_n2 is added to
//             the mean energy and fluctuates on the same scale, so
//             theta / sigma_n2 is a dimensionless SNR.
//  kAdditive: e += N(0, sigma_n2), the zero-mean intensity-domain model.
enum class NoiseModel { kEnergy, kAdditive };

double draw_slot_noise(NoiseModel model, double sigma_n2, RandomStream& rng);

// Energies collected on one coordinate's slot pair. signs/powers/draws are
// indexed by active node. Only the two slot sums leave this function.
SlotEnergyPair superpose(std::span<const Sign> signs, std::span<const double> powers,
                         std::span<const ChannelDraw> draws, double sigma_n2, RandomStream& rng,
                         NoiseModel model = NoiseModel::kEnergy);

// All q coordinates at once. node_signs[k] is node k's SignVector. Noise is
// drawn in coordinate order from `rng`, tau+ before tau-.
std::vector<SlotEnergyPair> superpose_all(std::span<const SignVector> node_signs,
                                          std::span<const double> powers,
                                          std::span<const ChannelDraw> draws, double sigma_n2,
                                          RandomStream& rng, NoiseModel model = NoiseModel::kEnergy);

// sign(delta) per coordinate; delta == 0 resolves to +1.
MvDecision detect_mv(std::span<const SlotEnergyPair> pairs);

// Noise-free majority of the transmitted signs, ties to +1.
MvDecision ideal_majority(std::span<const SignVector> node_signs);

struct SlotAssignment {
  std::size_t frame = 0;
  std::size_t tau_plus = 0;
  std::size_t tau_minus = 0;
};

// Coordinate i -> adjacent slot pair. Each frame carries capacity/2
// coordinates; later coordinates spill into subsequent frames.
SlotAssignment frame_map(std::size_t coordinate, std::size_t frame_capacity);

// Per-round slot energy dump: round,coord,e_plus,e_minus,delta.
void write_slot_csv_header(std::ostream& out);
void write_slot_csv_rows(std::ostream& out, std::size_t round,
                         std::span<const SlotEnergyPair> pairs);

}  // namespace optivote
