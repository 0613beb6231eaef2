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

#include "optivote/theory.hpp"

#include <fmt/format.h>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "optivote/errors.hpp"

namespace optivote::theory {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw UsageError(what);
}

}  // namespace

double theta(double p_avg, double lambda, double c_r, double e_s) {
  require(p_avg > 0.0, "theta: p_avg must be > 0");
  require(lambda > 0.0, "theta: lambda must be > 0");
  require(c_r > 0.0 && e_s > 0.0, "theta: c_r and e_s must be > 0");
  return c_r * std::sqrt(e_s) * p_avg * lambda;
}

EnergyMeans energy_means(double m_plus, double m_minus, double theta, double sigma_n2) {
  require(m_plus >= 0.0 && m_minus >= 0.0, "energy_means: vote counts must be >= 0");
  require(sigma_n2 >= 0.0, "energy_means: sigma_n2 must be >= 0");
  return {m_plus * theta + sigma_n2, m_minus * theta + sigma_n2};
}

double xi_snr(double theta, double sigma_n2) {
  require(sigma_n2 > 0.0, "xi_snr: sigma_n2 must be > 0");
  return theta / sigma_n2;
}

double error_bound(double M, double xi, double q) {
  require(M >= 1.0, "error_bound: M must be >= 1");
  require(xi > 0.0, "error_bound: xi must be > 0");
  require(q >= 0.0 && q <= 0.5, "error_bound: q must lie in [0, 1/2]");
  const double inv = 1.0 / xi;
  const double denom = M + 2.0 * inv;
  return M * q / denom + inv / denom;
}

double q_bound(double g_abs, double alpha, double d_b) {
  require(alpha > 0.0, "q_bound: alpha must be > 0");
  require(d_b >= 1.0, "q_bound: d_b must be >= 1");
  require(g_abs >= 0.0, "q_bound: |g| must be >= 0");
  if (g_abs == 0.0) return 0.5;
  const double z = g_abs * std::sqrt(d_b) / alpha;  // |g| / (alpha / sqrt(d_b))
  if (z > 2.0 / std::sqrt(3.0)) return (2.0 / 9.0) / (z * z);
  return 0.5 - z / (2.0 * std::sqrt(3.0));
}

double error_bound_full(double M, double xi, double g_abs, double alpha, double d_b) {
  require(M >= 1.0, "error_bound_full: M must be >= 1");
  require(xi > 0.0, "error_bound_full: xi must be > 0");
  require(alpha > 0.0, "error_bound_full: alpha must be > 0");
  require(d_b >= 1.0, "error_bound_full: d_b must be >= 1");
  require(g_abs >= 0.0, "error_bound_full: |g| must be >= 0");
  if (g_abs == 0.0) return 1.0;
  const double q = std::sqrt(2.0) * alpha / (3.0 * g_abs * std::sqrt(d_b));
  const double inv = 1.0 / xi;
  const double denom = M + 2.0 * inv;
  return std::clamp(M * q / denom + inv / denom, 0.0, 1.0);
}

bool corollary1_check(double m_plus, double M, double p_err) {
  require(m_plus >= 0.0 && m_plus <= M, "corollary1_check: need 0 <= m_plus <= M");
  return m_plus > M / 2.0 && p_err < 0.5;
}

double ConvergenceInputs::alpha_l1() const {
  return std::accumulate(alpha.begin(), alpha.end(), 0.0,
                         [](double acc, double a) { return acc + std::abs(a); });
}

double convergence_delta(double xi, double M, long long gamma) {
  require(xi > 0.0, "convergence: xi must be > 0");
  require(M >= 1.0, "convergence: M must be >= 1");
  require(gamma >= 1, "convergence: gamma must be >= 1");
  return (1.0 + 2.0 / (xi * M)) / std::sqrt(static_cast<double>(gamma));
}

namespace {

void check_inputs(const ConvergenceInputs& in) {
  require(in.N >= 1, "convergence: N must be >= 1");
  require(in.gamma >= 1, "convergence: gamma must be >= 1");
  if (in.N % in.gamma != 0)
    throw UsageError(fmt::format("convergence: N = {} is not divisible by gamma = {}", in.N,
                                 in.gamma));
  if (in.d_b != 0 && in.d_b != in.N / in.gamma)
    throw UsageError(fmt::format("convergence: d_b = {} but N / gamma = {}", in.d_b,
                                 in.N / in.gamma));
  require(in.l1_smoothness >= 0.0, "convergence: ||L||_1 must be >= 0");
  require(in.initial_gap >= 0.0, "convergence: F(w0) - F* must be >= 0");
}

}  // namespace

double convergence_bound(const ConvergenceInputs& in) {
  check_inputs(in);
  const double delta = convergence_delta(in.xi, in.M, in.gamma);
  const double g = static_cast<double>(in.gamma);
  const double inner = delta * std::sqrt(in.l1_smoothness) * (in.initial_gap + g / 2.0) +
                       (2.0 * std::sqrt(2.0) / 3.0) * std::sqrt(g) * in.alpha_l1();
  return inner / std::sqrt(static_cast<double>(in.N));
}

double convergence_bound_appendix(const ConvergenceInputs& in) {
  check_inputs(in);
  const double k = 1.0 + 2.0 / (in.M * in.xi);
  const double g = static_cast<double>(in.gamma);
  const double n = static_cast<double>(in.N);
  const double sl = std::sqrt(in.l1_smoothness);
  return k * std::sqrt(g) / (2.0 * std::sqrt(n)) * sl +
         k * sl * std::sqrt(n) / (n * std::sqrt(g)) * in.initial_gap +
         2.0 * std::sqrt(2.0) * std::sqrt(g) * in.alpha_l1() / (3.0 * std::sqrt(n));
}

double theorem1_learning_rate(double l1_smoothness, double d_b) {
  require(l1_smoothness > 0.0 && d_b >= 1.0, "scheduled learning rate: need ||L||_1 > 0, d_b >= 1");
  return 1.0 / std::sqrt(l1_smoothness * d_b);
}

}  // namespace optivote::theory
