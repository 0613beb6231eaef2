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

#include "optivote/orchestrator.hpp"

#include <fmt/format.h>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <ostream>

#include "optivote/errors.hpp"
#include "optivote/parallel.hpp"
#include "optivote/phy.hpp"
#include "optivote/power.hpp"

namespace optivote {

std::vector<std::size_t> select_active(std::size_t M, std::size_t m, RandomStream& rng) {
  if (m < 1 || m > M) throw UsageError(fmt::format("select_active: need 1 <= m <= M (m={}, M={})", m, M));
  std::vector<std::size_t> ids(M);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  for (std::size_t k = 0; k < m; ++k) std::swap(ids[k], ids[k + rng.index(M - k)]);
  ids.resize(m);
  std::sort(ids.begin(), ids.end());
  return ids;
}

Eigen::VectorXd aggregate_fedavg_air(std::span<const Eigen::VectorXd> gradients,
                                     std::span<const double> powers,
                                     std::span<const ChannelDraw> draws, double sigma_n2,
                                     RandomStream& rng) {
  if (gradients.empty()) throw UsageError("aggregate_fedavg_air: need at least one gradient");
  if (gradients.size() != powers.size() || gradients.size() != draws.size())
    throw UsageError("aggregate_fedavg_air: length mismatch");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(gradients.front().size());
  for (std::size_t k = 0; k < gradients.size(); ++k) {
    if (gradients[k].size() != acc.size())
      throw UsageError("aggregate_fedavg_air: gradients differ in length");
    acc += powers[k] * draws[k].intensity * gradients[k];
  }
  acc /= static_cast<double>(gradients.size());
  if (sigma_n2 > 0.0) {
    const double sd = std::sqrt(sigma_n2);
    for (Eigen::Index i = 0; i < acc.size(); ++i) acc[i] += rng.normal(0.0, sd);
  }
  return acc;
}

DataBundle load_data(const Config& cfg) {
  const DatasetConfig& d = cfg.learner.dataset;
  if (d.kind == DatasetKind::kMnist)
    return {load_mnist_idx(d.train_images, d.train_labels),
            load_mnist_idx(d.test_images, d.test_labels)};
  return {make_synthetic(d.num_classes, d.n_train, d.dim, d.separation, cfg.run.seed, 0),
          make_synthetic(d.num_classes, d.n_test, d.dim, d.separation, cfg.run.seed, 1)};
}

Model initial_model(const Config& cfg, const Dataset& train) {
  const int d = static_cast<int>(train.dim());
  const int C = std::max(train.num_classes, 2);
  if (cfg.learner.model.arch == Arch::kLogistic) return Model::logistic(d, C);
  RandomStream rng = RandomStream::derive(cfg.run.seed, StreamTag::kModelInit);
  return Model::mlp(d, cfg.learner.model.hidden, C, rng);
}

namespace {

double fraction_mismatch(std::span<const Sign> a, std::span<const Sign> b) {
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i];
  return a.empty() ? 0.0 : static_cast<double>(diff) / static_cast<double>(a.size());
}

}  // namespace

RunSummary run(const Config& cfg, const DataBundle& data, const RunOptions& opts) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig& rc = cfg.run;
  const std::uint64_t seed = rc.seed;
  const ChannelParams channel = cfg.channel.params();
  channel.validate();
  const NoiseModel noise = cfg.channel.noise_model;

  PowerParams power_params = cfg.power.params;
  if (rc.scheme != Scheme::kOptivote) power_params.rho = 0.0;
  power_params.validate();

  const Dataset& train = data.train;
  const Dataset& test = data.test;
  const Partition parts = partition(train, rc.M, cfg.learner.partition, seed);
  for (std::size_t node = 0; node < parts.size(); ++node)
    if (parts[node].empty())
      throw UsageError(fmt::format("node {} received no training samples", node));

  Model model = initial_model(cfg, train);
  const double eta = rc.learning_rate();

  PowerState power = PowerState::initial(rc.M, power_params);
  MvDecision prev_decision;

  RunSummary summary;
  summary.config_hash = config_hash(cfg);
  summary.seed = seed;
  summary.rounds.reserve(rc.rounds);

  if (opts.power_csv) write_power_csv_header(*opts.power_csv);
  if (opts.slot_csv) write_slot_csv_header(*opts.slot_csv);

  for (std::size_t n = 0; n < rc.rounds; ++n) {
    RandomStream select_rng = RandomStream::derive(seed, StreamTag::kSelect, {n});
    const std::vector<std::size_t> active = select_active(rc.M, rc.m, select_rng);
    const std::size_t m = active.size();

    // Local computation: independent per node, one derived stream each.
    std::vector<Eigen::VectorXd> grads(m);
    parallel_for(m, opts.threads, [&](std::size_t k) {
      RandomStream rng = RandomStream::derive(seed, StreamTag::kGradient, {n, active[k]});
      grads[k] = local_update_direction(model, train, parts[active[k]], rc.d_b,
                                        cfg.learner.local_steps, eta, rng);
    });
    std::vector<SignVector> signs(m);
    for (std::size_t k = 0; k < m; ++k) signs[k] = sign_quantize(grads[k]);
    const MvDecision ideal = ideal_majority(signs);

    // Channel realizations, one per active node (block fading).
    std::vector<ChannelDraw> draws(m);
    std::vector<double> tx_power(m);
    for (std::size_t k = 0; k < m; ++k) {
      RandomStream rng = RandomStream::derive(seed, StreamTag::kChannel, {n, active[k]});
      draws[k] = sample_channel(channel, rng);
      tx_power[k] = power.p[active[k]];
    }
    RandomStream noise_rng = RandomStream::derive(seed, StreamTag::kNoise, {n});

    MvDecision decision;
    double mv_error = 0.0;
    switch (rc.scheme) {
      case Scheme::kIdealMv:
        decision = ideal;
        apply_mv_update(model, decision, eta);
        break;
      case Scheme::kOptivote:
      case Scheme::kOptivoteFixedPower: {
        // Each slot pair is detected on its own, so how coordinates spill
        // across frames (frame_map) does not change the decisions.
        const std::vector<SlotEnergyPair> pairs =
            superpose_all(signs, tx_power, draws, channel.sigma_n2, noise_rng, noise);
        decision = detect_mv(pairs);
        if (opts.slot_csv) write_slot_csv_rows(*opts.slot_csv, n, pairs);
        mv_error = fraction_mismatch(decision, ideal);
        apply_mv_update(model, decision, eta);
        break;
      }
      case Scheme::kFedavgAir: {
        const Eigen::VectorXd agg =
            aggregate_fedavg_air(grads, tx_power, draws, channel.sigma_n2, noise_rng);
        if (!agg.allFinite()) throw NumericError("fedavg_air aggregate is not finite");
        decision = sign_quantize(agg);
        mv_error = fraction_mismatch(decision, ideal);
        model.w -= eta * agg;
        break;
      }
    }

    // Consistency of this round's local signs with the previous broadcast;
    // produces the powers used from the next round on.
    RoundMetrics rm;
    rm.round = n;
    double score_sum = 0.0;
    if (!prev_decision.empty()) {
      for (std::size_t k = 0; k < m; ++k) {
        power.a[active[k]] = consistency_score(signs[k], prev_decision);
      }
      const PowerUpdate upd = update_powers(power, power_params, cfg.power.abar_scope, active);
      rm.power_step_sum = std::accumulate(upd.steps.begin(), upd.steps.end(), 0.0);
      power = upd.next;
    }
    for (std::size_t k = 0; k < m; ++k) score_sum += power.a[active[k]];
    prev_decision = decision;

    const auto [pmin, pmax] = std::minmax_element(power.p.begin(), power.p.end());
    rm.min_power = *pmin;
    rm.max_power = *pmax;
    rm.mean_power = std::accumulate(tx_power.begin(), tx_power.end(), 0.0) / static_cast<double>(m);
    rm.mean_consistency = score_sum / static_cast<double>(m);
    rm.mv_error_rate = mv_error;
    if (!model.w.allFinite()) throw NumericError(fmt::format("model diverged in round {}", n));
    rm.train_loss = evaluate(model, train).loss;
    rm.test_accuracy = evaluate(model, test).accuracy;
    if (!std::isfinite(rm.train_loss))
      throw NumericError(fmt::format("training loss is not finite in round {}", n));
    summary.rounds.push_back(rm);
    summary.decisions.push_back(std::move(decision));

    if (opts.power_csv) write_power_csv_rows(*opts.power_csv, n, power);
  }

  summary.final_accuracy =
      summary.rounds.empty() ? evaluate(model, test).accuracy : summary.rounds.back().test_accuracy;
  summary.final_model = std::move(model);
  summary.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return summary;
}

RunSummary run(const Config& cfg, const RunOptions& opts) { return run(cfg, load_data(cfg), opts); }

void write_metrics_csv(std::ostream& out, const RunSummary& s) {
  out << "round,train_loss,test_accuracy,mv_error_rate,mean_power,mean_consistency\n";
  for (const auto& r : s.rounds)
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.round, r.train_loss,
                       r.test_accuracy, r.mv_error_rate, r.mean_power, r.mean_consistency);
}

nlohmann::json summary_to_json(const RunSummary& s) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : s.rounds)
    rounds.push_back({{"round", r.round},
                      {"train_loss", r.train_loss},
                      {"test_accuracy", r.test_accuracy},
                      {"mv_error_rate", r.mv_error_rate},
                      {"mean_power", r.mean_power},
                      {"mean_consistency", r.mean_consistency}});
  return {{"config_hash", s.config_hash},
          {"seed", s.seed},
          {"rounds", rounds},
          {"final_accuracy", s.final_accuracy},
          {"wall_time_s", s.wall_time_s}};
}

}  // namespace optivote
