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

namespace optivote::theory {

// Received energy per satellite: C_R * sqrt(E_s) * p_avg * lambda.
double theta(double p_avg, double lambda, double c_r = 1.0, double e_s = 1.0);

struct EnergyMeans {
  double plus = 0.0;
  double minus = 0.0;
};

// Mean slot energies for a given vote split.
EnergyMeans energy_means(double m_plus, double m_minus, double theta, double sigma_n2);

// Effective SNR theta / sigma_n2.
double xi_snr(double theta, double sigma_n2);

// Upper bound on the aggregate MV error for per-node flip probability q:
//   M q / (M + 2/xi) + (1/xi) / (M + 2/xi).
double error_bound(double M, double xi, double q);

// Gauss-inequality bound on a single node's sign-flip probability.
double q_bound(double g_abs, double alpha, double d_b);

// error_bound with q replaced by sqrt(2) alpha / (3 |g| sqrt(d_b)); clamped
// to [0, 1].
double error_bound_full(double M, double xi, double g_abs, double alpha, double d_b);

// Strict majority for +1 and an aggregate error below one half.
bool corollary1_check(double m_plus, double M, double p_err);

struct ConvergenceInputs {
  double M = 1.0;
  double xi = 1.0;                // effective SNR
  double l1_smoothness = 1.0;     // ||L||_1
  double initial_gap = 0.0;       // F(w0) - F*
  std::vector<double> alpha;      // per-coordinate noise scale; ||alpha||_1 enters
  long long gamma = 1;
  long long N = 1;                // rounds
  long long d_b = 0;              // 0 -> derived as N / gamma; otherwise must equal it

  double alpha_l1() const;
};

// (1 + 2/(xi M)) / sqrt(gamma)
double convergence_delta(double xi, double M, long long gamma);

// Bound on (1/N) sum_n ||g^(n)||_1:
//   (1/sqrt N) [ delta sqrt(||L||_1) (gap + gamma/2) + (2 sqrt 2 / 3) sqrt(gamma) ||alpha||_1 ]
// Throws UsageError when N is not divisible by gamma.
double convergence_bound(const ConvergenceInputs& in);

// Same bound in its three-term expanded arrangement.
double convergence_bound_appendix(const ConvergenceInputs& in);

// Learning rate paired with the bound: 1 / sqrt(||L||_1 d_b).
double theorem1_learning_rate(double l1_smoothness, double d_b);

}  // namespace optivote::theory
