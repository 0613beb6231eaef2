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

#include <nlohmann/json_fwd.hpp>

#include "optivote/channel.hpp"
#include "optivote/phy.hpp"

namespace optivote::mc {

struct McReport {
  std::string name;
  std::size_t samples = 0;
  double empirical = 0.0;
  double theoretical = 0.0;
  double standard_error = 0.0;
  bool pass = false;
  std::string tolerance_rule;
};

nlohmann::json to_json(const McReport& r);
nlohmann::json to_json(const std::vector<McReport>& reports);

struct McOptions {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  NoiseModel noise = NoiseModel::kEnergy;
};

// Copy of `params` with sigma_n2 chosen so that (p_avg * lambda_eff) / sigma_n2 == xi.
ChannelParams with_snr(const ChannelParams& params, double p_avg, double xi);

struct EnergyMeansReport {
  McReport plus;
  McReport minus;
};

// Mean slot energies for a fixed vote split at power p_avg against
// m * theta + sigma_n2 (two-sided, 3 SE).
EnergyMeansReport verify_energy_means(const ChannelParams& params, double p_avg, int m_plus,
                                      int m_minus, std::size_t samples,
                                      const McOptions& opts = {});

// Sample mean of P * I at P = p_avg against theta(p_avg, lambda_eff), 1% relative.
McReport verify_theta(const ChannelParams& params, double p_avg, std::size_t samples,
                      const McOptions& opts = {});

// Empirical means of h_l, h_p and I against their closed forms (3 SE each).
std::vector<McReport> verify_channel_moments(const ChannelParams& params, std::size_t samples,
                                             const McOptions& opts = {});

// Aggregate MV flip rate with i.i.d. node flips of probability q, true sign +1.
// One-sided: empirical <= error_bound + 3 SE.
McReport verify_error_bound(int M, double q, const ChannelParams& params, double p_avg,
                            std::size_t samples, const McOptions& opts = {});

// Sign flip of the mean of d_b draws N(g, alpha^2) against q_bound, one-sided 3 SE.
McReport verify_q_bound(double g_abs, double alpha, int d_b, std::size_t samples,
                        const McOptions& opts = {});

// Aggregate error conditioned on a strict +1 majority; passes iff below 1/2.
McReport verify_corollary1(int M, double q, const ChannelParams& params, double p_avg,
                           std::size_t samples, const McOptions& opts = {});

// Max relative gap between lambda_eff and lambda_oracle over `points` random
// parameter sets; passes iff <= 1e-6.
McReport verify_lambda_grid(std::size_t points, std::uint64_t seed);

struct SuiteOptions {
  std::size_t samples = 100000;
  McOptions mc;
  ChannelParams channel;
  double p_avg = 1.0;
};

// Every check above over the default verification grid.
std::vector<McReport> run_suite(const SuiteOptions& opts);

}  // namespace optivote::mc
