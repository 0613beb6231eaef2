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

#include <optional>

#include "optivote/random.hpp"

namespace optivote {

// Inter-satellite FSO link statistics. Distances are in meters.
struct ChannelParams {
  double d_min = 500e3;
  double d_max = 2000e3;
  double lambda_opt = 1550e-9;  // optical wavelength, m
  double a0 = 0.9;              // max collected-power fraction
  double xi_p = 1.5;            // pointing-jitter shape
  double sigma_n2 = 0.1;        // noise power per slot
  // Replaces (lambda_opt / 4 pi)^2 when set.
  std::optional<double> c_fspl_override;

  double c_fspl() const;

  // Throws UsageError when an invariant does not hold. With
  // `allow_point_shell` the distance range may collapse to a single radius.
  void validate(bool allow_point_shell = false) const;

  // Path-loss constant chosen so that h_l(d_min) = 1.
  static double normalized_c_fspl(double d_min) { return d_min * d_min; }

  bool operator==(const ChannelParams&) const = default;
};

struct ChannelDraw {
  double distance = 0.0;
  double h_l = 0.0;
  double h_p = 0.0;
  double intensity = 0.0;  // h_l * h_p
};

// Inverse-CDF maps, exposed so the endpoints can be tested exactly.
double distance_from_uniform(const ChannelParams& params, double u);
double pointing_from_uniform(const ChannelParams& params, double u);

double sample_distance(const ChannelParams& params, RandomStream& rng);
double sample_pointing(const ChannelParams& params, RandomStream& rng);

// One block-fading realization; the same draw serves both PPM slots of every
// coordinate in a round.
ChannelDraw sample_channel(const ChannelParams& params, RandomStream& rng);

// E[h_l] over the spherical-shell distance law.
double geometric_efficiency(const ChannelParams& params);
// E[h_p] under the power-law jitter density.
double pointing_efficiency(const ChannelParams& params);
// Closed-form E[I] = E[h_l] E[h_p].
double lambda_eff(const ChannelParams& params);

struct QuadratureResult {
  double geometric = 0.0;
  double pointing = 0.0;
  double value = 0.0;  // product
};

// Independent check on lambda_eff: integrates both factors numerically
// against their densities. Throws NumericError if the adaptive rule does not
// reach the requested tolerance.
QuadratureResult lambda_oracle_detail(const ChannelParams& params, double rel_tol = 1e-12);
double lambda_oracle(const ChannelParams& params);

}  // namespace optivote
