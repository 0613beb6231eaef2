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

#include <gtest/gtest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "optivote/montecarlo.hpp"
#include "optivote/theory.hpp"

namespace optivote::mc {
namespace {

ChannelParams normalized() {
  ChannelParams p;
  p.c_fspl_override = ChannelParams::normalized_c_fspl(p.d_min);
  return p;
}

TEST(McReport, PassRuleIsStated) {
  const McReport r = verify_q_bound(1.0, 1.0, 4, 20000);
  EXPECT_FALSE(r.tolerance_rule.empty());
  EXPECT_EQ(r.pass, r.empirical <= r.theoretical + 3 * r.standard_error);
  const auto j = to_json(r);
  EXPECT_EQ(j.at("name"), r.name);
  EXPECT_EQ(j.at("pass"), r.pass);
}

TEST(EnergyMeans, PureNoise) {
  ChannelParams p = normalized();
  p.sigma_n2 = 0.5;
  const EnergyMeansReport r = verify_energy_means(p, 1.0, 0, 3, 50000);
  EXPECT_EQ(r.plus.theoretical, 0.5);
  EXPECT_NEAR(r.plus.empirical, 0.5, 4 * r.plus.standard_error);
  EXPECT_TRUE(r.plus.pass);
  EXPECT_TRUE(r.minus.pass);
}

TEST(EnergyMeans, BalancedSplitBothSlots) {
  const EnergyMeansReport r = verify_energy_means(normalized(), 1.0, 5, 5, 100000);
  EXPECT_TRUE(r.plus.pass) << r.plus.empirical << " vs " << r.plus.theoretical;
  EXPECT_TRUE(r.minus.pass) << r.minus.empirical << " vs " << r.minus.theoretical;
}

TEST(Theta, SampleMeanOfReceivedPower) {
  const McReport r = verify_theta(normalized(), 1.0, 200000);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.theoretical, theory::theta(1.0, lambda_eff(normalized())), 1e-15);
}

TEST(ChannelMoments, AllWithinThreeSe) {
  for (const McReport& r : verify_channel_moments(normalized(), 200000)) EXPECT_TRUE(r.pass) << r.name;
}

TEST(WithSnr, HitsRequestedXi) {
  const ChannelParams p = with_snr(normalized(), 2.0, 5.0);
  EXPECT_NEAR(theory::xi_snr(theory::theta(2.0, lambda_eff(p)), p.sigma_n2), 5.0, 1e-12);
}

TEST(ErrorBound, NearNoiselessNearPerfectVotes) {
  ChannelParams p = normalized();
  p.sigma_n2 = 1e-12;
  const McReport r = verify_error_bound(11, 1e-9, p, 1.0, 20000);
  EXPECT_EQ(r.empirical, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(ErrorBound, DefaultChannelElevenNodes) {
  EXPECT_TRUE(verify_error_bound(11, 0.2, normalized(), 1.0, 100000).pass);
}

TEST(ErrorBound, SingleNode) {
  const McReport r = verify_error_bound(1, 0.2, with_snr(normalized(), 1.0, 5.0), 1.0, 100000);
  EXPECT_GE(r.empirical, 0.2 - 3 * r.standard_error);
  EXPECT_TRUE(r.pass);
}

TEST(ErrorBound, AdditiveNoiseModelStillBounded) {
  McOptions o;
  o.noise = NoiseModel::kAdditive;
  for (double xi : {1.0, 5.0, 20.0})
    EXPECT_TRUE(verify_error_bound(10, 0.2, with_snr(normalized(), 1.0, xi), 1.0, 50000, o).pass)
        << "xi=" << xi;
}

TEST(QBound, DegenerateAndGaussianOracle) {
  const McReport zero = verify_q_bound(0.0, 1.0, 4, 100000);
  EXPECT_EQ(zero.theoretical, 0.5);
  EXPECT_NEAR(zero.empirical, 0.5, 4 * zero.standard_error);
  EXPECT_TRUE(zero.pass);

  // |g| sqrt(d_b) / alpha = 3.
  const McReport r = verify_q_bound(1.5, 1.0, 4, 400000);
  const double exact = 0.5 * std::erfc(3.0 / std::sqrt(2.0));
  EXPECT_NEAR(exact, 0.00135, 1e-5);
  EXPECT_DOUBLE_EQ(r.theoretical, 2.0 / 81.0);
  EXPECT_NEAR(r.empirical, exact, 4 * std::sqrt(exact / 400000));
  EXPECT_TRUE(r.pass);
}

TEST(StrictMajority, Examples) {
  const ChannelParams p = with_snr(normalized(), 1.0, 1.0);
  const McReport a = verify_corollary1(101, 0.49, p, 1.0, 20000);
  EXPECT_TRUE(a.pass);
  EXPECT_LT(a.empirical, 0.5);
  const McReport b = verify_corollary1(11, 0.1, p, 1.0, 50000);
  EXPECT_TRUE(b.pass);
  EXPECT_LT(b.empirical, 0.1);
  // Noiseless and homogeneous: a strict count majority always wins.
  ChannelParams quiet = normalized();
  quiet.sigma_n2 = 0.0;
  quiet.xi_p = 1e9;
  quiet.d_max = quiet.d_min * (1 + 1e-12);
  EXPECT_EQ(verify_corollary1(11, 0.3, quiet, 1.0, 20000).empirical, 0.0);
}

TEST(LambdaGrid, PassesAndIsReproducible) {
  const McReport a = verify_lambda_grid(20, 3), b = verify_lambda_grid(20, 3);
  EXPECT_TRUE(a.pass);
  EXPECT_LE(a.empirical, 1e-6);
  EXPECT_EQ(a.empirical, b.empirical);
}

TEST(Reproducibility, BitIdenticalAcrossThreadCounts) {
  McOptions one, four;
  four.threads = 4;
  const ChannelParams p = with_snr(normalized(), 1.0, 1.0);
  const McReport a = verify_error_bound(10, 0.2, p, 1.0, 30000, one);
  const McReport b = verify_error_bound(10, 0.2, p, 1.0, 30000, four);
  const McReport c = verify_error_bound(10, 0.2, p, 1.0, 30000, one);
  EXPECT_EQ(a.empirical, b.empirical);
  EXPECT_EQ(a.standard_error, b.standard_error);
  EXPECT_EQ(a.empirical, c.empirical);
  const EnergyMeansReport e1 = verify_energy_means(p, 1.0, 3, 2, 20000, one);
  const EnergyMeansReport e4 = verify_energy_means(p, 1.0, 3, 2, 20000, four);
  EXPECT_EQ(e1.plus.empirical, e4.plus.empirical);
}

TEST(Suite, SmallRunPassesEverything) {
  SuiteOptions o;
  o.samples = 20000;
  o.channel = normalized();
  const auto reports = run_suite(o);
  EXPECT_GE(reports.size(), 36u + 50u);
  for (const McReport& r : reports) EXPECT_TRUE(r.pass) << r.name;
}

}  // namespace
}  // namespace optivote::mc
