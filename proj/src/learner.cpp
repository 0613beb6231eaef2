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

#include "optivote/learner.hpp"

#include <fmt/format.h>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "optivote/errors.hpp"

namespace optivote {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

Dataset make_synthetic(int num_classes, std::size_t n, std::size_t d, double separation,
                       std::uint64_t seed, std::uint64_t sample_stream) {
  if (num_classes < 1 || n < 1 || d < 1)
    throw UsageError("make_synthetic: num_classes, n and d must be >= 1");

  const auto dd = static_cast<Eigen::Index>(d);
  RandomStream mean_rng = RandomStream::derive(seed, StreamTag::kData, {0xC1A55ULL});
  Eigen::MatrixXd raw(dd, num_classes);
  for (Eigen::Index c = 0; c < num_classes; ++c)
    for (Eigen::Index j = 0; j < dd; ++j) raw(j, c) = mean_rng.normal();

  Eigen::MatrixXd means(dd, num_classes);
  if (static_cast<std::size_t>(num_classes) <= d) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dd, num_classes);
    means = q * separation;
  } else {
    for (Eigen::Index c = 0; c < num_classes; ++c)
      means.col(c) = raw.col(c).normalized() * separation;
  }

  Dataset out;
  out.num_classes = num_classes;
  out.name = fmt::format("synthetic-c{}-d{}-s{}", num_classes, d, separation);
  out.features.resize(static_cast<Eigen::Index>(n), dd);
  out.labels.resize(n);

  RandomStream rng = RandomStream::derive(seed, StreamTag::kData, {1, sample_stream});
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % num_classes);
  for (std::size_t i = n; i > 1; --i) std::swap(labels[i - 1], labels[rng.index(i)]);

  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out.labels[i] = labels[i];
    for (Eigen::Index j = 0; j < dd; ++j)
      out.features(row, j) = means(j, labels[i]) + rng.normal();
  }
  return out;
}

Partition partition(const Dataset& data, std::size_t nodes, PartitionSpec spec,
                    std::uint64_t seed) {
  if (nodes < 1) throw UsageError("partition: need at least one node");
  RandomStream rng = RandomStream::derive(seed, StreamTag::kPartition);
  auto shuffle = [&rng](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
  };

  Partition parts(nodes);
  if (spec.mode == PartitionMode::kIid) {
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order);
    const std::size_t share = data.size() / nodes;
    for (std::size_t m = 0; m < nodes; ++m)
      parts[m].assign(order.begin() + static_cast<std::ptrdiff_t>(m * share),
                      order.begin() + static_cast<std::ptrdiff_t>((m + 1) * share));
    return parts;
  }

  if (spec.labels_per_node < 1) throw UsageError("partition: labels_per_node must be >= 1");
  const int classes = data.num_classes;
  const int per_node = std::min(spec.labels_per_node, classes);

  std::vector<std::size_t> label_order(static_cast<std::size_t>(classes));
  std::iota(label_order.begin(), label_order.end(), std::size_t{0});
  shuffle(label_order);

  // Consecutive windows over the shuffled label ring: distinct labels per node
  // and every label held by roughly nodes*per_node/classes nodes.
  std::vector<std::vector<std::size_t>> holders(static_cast<std::size_t>(classes));
  for (std::size_t m = 0; m < nodes; ++m)
    for (int j = 0; j < per_node; ++j) {
      const std::size_t label = label_order[(m * per_node + j) % classes];
      holders[label].push_back(m);
    }

  std::vector<std::vector<std::size_t>> by_label(static_cast<std::size_t>(classes));
  for (std::size_t i = 0; i < data.size(); ++i)
    by_label[static_cast<std::size_t>(data.labels[i])].push_back(i);

  for (int c = 0; c < classes; ++c) {
    auto& pool = by_label[static_cast<std::size_t>(c)];
    const auto& owners = holders[static_cast<std::size_t>(c)];
    if (owners.empty()) continue;
    shuffle(pool);
    const std::size_t share = pool.size() / owners.size();
    for (std::size_t k = 0; k < owners.size(); ++k)
      parts[owners[k]].insert(parts[owners[k]].end(),
                              pool.begin() + static_cast<std::ptrdiff_t>(k * share),
                              pool.begin() + static_cast<std::ptrdiff_t>((k + 1) * share));
  }
  for (auto& p : parts) std::sort(p.begin(), p.end());
  return parts;
}

std::size_t Model::parameter_count(Arch arch, int d, int hidden, int classes) {
  const auto D = static_cast<std::size_t>(d);
  const auto H = static_cast<std::size_t>(hidden);
  const auto C = static_cast<std::size_t>(classes);
  if (arch == Arch::kLogistic) return D * C + C;
  return D * H + H + H * C + C;
}

Model Model::logistic(int input_dim, int num_classes) {
  if (input_dim < 1 || num_classes < 2) throw UsageError("logistic: need d >= 1 and C >= 2");
  Model m;
  m.arch = Arch::kLogistic;
  m.input_dim = input_dim;
  m.num_classes = num_classes;
  m.w = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(parameter_count(Arch::kLogistic, input_dim, 0, num_classes)));
  return m;
}

Model Model::mlp(int input_dim, int hidden, int num_classes, RandomStream& rng) {
  if (input_dim < 1 || hidden < 1 || num_classes < 2)
    throw UsageError("mlp: need d >= 1, hidden >= 1 and C >= 2");
  Model m;
  m.arch = Arch::kMlp;
  m.input_dim = input_dim;
  m.hidden = hidden;
  m.num_classes = num_classes;
  m.w = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(parameter_count(Arch::kMlp, input_dim, hidden, num_classes)));
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < Eigen::Index(input_dim) * hidden; ++i) m.w[k++] = s1 * rng.normal();
  k += hidden;
  for (Eigen::Index i = 0; i < Eigen::Index(hidden) * num_classes; ++i)
    m.w[k++] = s2 * rng.normal();
  return m;
}

namespace {

RowMatrix gather(const Dataset& data, std::span<const std::size_t> rows) {
  RowMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(data.dim()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= data.size()) throw UsageError("row index out of range");
    x.row(static_cast<Eigen::Index>(r)) = data.features.row(static_cast<Eigen::Index>(rows[r]));
  }
  return x;
}

void check_model(const Model& model, const Dataset& data) {
  if (static_cast<std::size_t>(model.input_dim) != data.dim())
    throw UsageError(fmt::format("model expects {} features, dataset has {}", model.input_dim,
                                 data.dim()));
  if (model.num_classes < data.num_classes)
    throw UsageError("model has fewer classes than the dataset");
  if (model.size() != Model::parameter_count(model.arch, model.input_dim, model.hidden,
                                             model.num_classes))
    throw UsageError("model parameter vector has the wrong length");
}

// Row-wise softmax in place; returns per-row log-sum-exp.
Eigen::VectorXd softmax_rows(RowMatrix& z) {
  Eigen::VectorXd lse(z.rows());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double mx = z.row(r).maxCoeff();
    z.row(r) = (z.row(r).array() - mx).exp();
    const double s = z.row(r).sum();
    lse[r] = mx + std::log(s);
    z.row(r) /= s;
  }
  return lse;
}

struct Forward {
  RowMatrix hidden;  // MLP activations
  RowMatrix probs;
  double loss = 0.0;
};

Forward forward(const Model& model, const Dataset& data, const RowMatrix& x,
                std::span<const std::size_t> rows) {
  const int d = model.input_dim;
  const int C = model.num_classes;
  Forward f;
  RowMatrix z;
  if (model.arch == Arch::kLogistic) {
    ConstRowMap W(model.w.data(), C, d);
    Eigen::Map<const Eigen::RowVectorXd> b(model.w.data() + Eigen::Index(d) * C, C);
    z = x * W.transpose();
    z.rowwise() += b;
  } else {
    const int H = model.hidden;
    const double* p = model.w.data();
    ConstRowMap W1(p, H, d);
    Eigen::Map<const Eigen::RowVectorXd> b1(p + Eigen::Index(d) * H, H);
    ConstRowMap W2(p + Eigen::Index(d) * H + H, C, H);
    Eigen::Map<const Eigen::RowVectorXd> b2(p + Eigen::Index(d) * H + H + Eigen::Index(H) * C, C);
    f.hidden = x * W1.transpose();
    f.hidden.rowwise() += b1;
    f.hidden = f.hidden.array().tanh();
    z = f.hidden * W2.transpose();
    z.rowwise() += b2;
  }
  RowMatrix logits = z;
  const Eigen::VectorXd lse = softmax_rows(z);
  double total = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    total += lse[ri] - logits(ri, data.labels[rows[r]]);
  }
  f.probs = std::move(z);
  f.loss = rows.empty() ? 0.0 : total / static_cast<double>(rows.size());
  return f;
}

}  // namespace

LossGradient loss_and_gradient(const Model& model, const Dataset& data,
                               std::span<const std::size_t> rows) {
  check_model(model, data);
  if (rows.empty()) throw UsageError("loss_and_gradient: empty batch");
  const RowMatrix x = gather(data, rows);
  Forward f = forward(model, data, x, rows);

  const int d = model.input_dim;
  const int C = model.num_classes;
  const double inv_b = 1.0 / static_cast<double>(rows.size());

  // dL/dz = (softmax - onehot) / B
  RowMatrix dz = f.probs;
  for (std::size_t r = 0; r < rows.size(); ++r) dz(Eigen::Index(r), data.labels[rows[r]]) -= 1.0;
  dz *= inv_b;

  LossGradient out;
  out.loss = f.loss;
  out.grad = Eigen::VectorXd::Zero(model.w.size());
  double* g = out.grad.data();
  if (model.arch == Arch::kLogistic) {
    RowMap gW(g, C, d);
    gW = dz.transpose() * x;
    Eigen::Map<Eigen::RowVectorXd>(g + Eigen::Index(d) * C, C) = dz.colwise().sum();
  } else {
    const int H = model.hidden;
    ConstRowMap W2(model.w.data() + Eigen::Index(d) * H + H, C, H);
    RowMap gW1(g, H, d);
    Eigen::Map<Eigen::RowVectorXd> gb1(g + Eigen::Index(d) * H, H);
    RowMap gW2(g + Eigen::Index(d) * H + H, C, H);
    Eigen::Map<Eigen::RowVectorXd> gb2(g + Eigen::Index(d) * H + H + Eigen::Index(H) * C, C);
    gW2 = dz.transpose() * f.hidden;
    gb2 = dz.colwise().sum();
    RowMatrix dh = dz * W2;
    dh.array() *= 1.0 - f.hidden.array().square();
    gW1 = dh.transpose() * x;
    gb1 = dh.colwise().sum();
  }
  return out;
}

double batch_loss(const Model& model, const Dataset& data, std::span<const std::size_t> rows) {
  check_model(model, data);
  const RowMatrix x = gather(data, rows);
  return forward(model, data, x, rows).loss;
}

std::vector<std::size_t> sample_batch(std::span<const std::size_t> indices, std::size_t batch_size,
                                      RandomStream& rng) {
  if (indices.empty()) throw UsageError("sample_batch: no local samples");
  if (batch_size < 1) throw UsageError("sample_batch: batch size must be >= 1");
  std::vector<std::size_t> batch;
  batch.reserve(batch_size);
  if (batch_size > indices.size()) {
    for (std::size_t k = 0; k < batch_size; ++k) batch.push_back(indices[rng.index(indices.size())]);
    return batch;
  }
  std::vector<std::size_t> pool(indices.begin(), indices.end());
  for (std::size_t k = 0; k < batch_size; ++k) {
    const std::size_t j = k + rng.index(pool.size() - k);
    std::swap(pool[k], pool[j]);
    batch.push_back(pool[k]);
  }
  return batch;
}

Eigen::VectorXd local_gradient(const Model& model, const Dataset& data,
                               std::span<const std::size_t> indices, std::size_t batch_size,
                               RandomStream& rng) {
  const auto batch = sample_batch(indices, batch_size, rng);
  return loss_and_gradient(model, data, batch).grad;
}

Eigen::VectorXd local_update_direction(const Model& model, const Dataset& data,
                                       std::span<const std::size_t> indices,
                                       std::size_t batch_size, int steps, double eta,
                                       RandomStream& rng) {
  if (steps < 1) throw UsageError("local_steps must be >= 1");
  if (steps == 1) return local_gradient(model, data, indices, batch_size, rng);
  Model local = model;
  Eigen::VectorXd total = Eigen::VectorXd::Zero(model.w.size());
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXd g = local_gradient(local, data, indices, batch_size, rng);
    total += g;
    local.w -= eta * g;
  }
  return total;
}

SignVector sign_quantize(const Eigen::VectorXd& g) {
  SignVector s(static_cast<std::size_t>(g.size()));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (std::isnan(g[i])) throw NumericError(fmt::format("sign_quantize: NaN at coordinate {}", i));
    s[static_cast<std::size_t>(i)] = g[i] < 0.0 ? -1 : 1;
  }
  return s;
}

void apply_mv_update(Model& model, std::span<const Sign> mv, double eta) {
  if (mv.size() != model.size())
    throw UsageError(fmt::format("apply_mv_update: {} votes for {} parameters", mv.size(),
                                 model.size()));
  if (!(eta > 0.0)) throw UsageError("apply_mv_update: eta must be > 0");
  for (std::size_t i = 0; i < mv.size(); ++i)
    model.w[static_cast<Eigen::Index>(i)] -= eta * static_cast<double>(mv[i]);
}

Evaluation evaluate(const Model& model, const Dataset& data) {
  check_model(model, data);
  Evaluation ev;
  if (data.size() == 0) return ev;
  constexpr std::size_t kChunk = 4096;
  double loss = 0.0;
  std::size_t correct = 0;
  std::vector<std::size_t> rows;
  for (std::size_t lo = 0; lo < data.size(); lo += kChunk) {
    const std::size_t hi = std::min(data.size(), lo + kChunk);
    rows.resize(hi - lo);
    std::iota(rows.begin(), rows.end(), lo);
    const RowMatrix x = gather(data, rows);
    const Forward f = forward(model, data, x, rows);
    loss += f.loss * static_cast<double>(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      Eigen::Index best = 0;
      f.probs.row(static_cast<Eigen::Index>(r)).maxCoeff(&best);
      correct += best == data.labels[rows[r]];
    }
  }
  ev.loss = loss / static_cast<double>(data.size());
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return ev;
}

}  // namespace optivote
