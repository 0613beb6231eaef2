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

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "optivote/phy.hpp"
#include "optivote/random.hpp"

namespace optivote {

struct Dataset {
  Eigen::MatrixXd features;  // n x d, one sample per row
  std::vector<int> labels;   // n entries in [0, num_classes)
  int num_classes = 0;
  std::string name;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
};

// Gaussian class clusters with unit within-class variance. Class means are
// mutually orthogonal (when num_classes <= d) with norm `separation`, drawn
// from `seed`; `sample_stream` selects an independent batch of points around
// the same means, so train and test sets use different streams.
Dataset make_synthetic(int num_classes, std::size_t n, std::size_t d, double separation,
                       std::uint64_t seed, std::uint64_t sample_stream = 0);

// Big-endian IDX pair (images 0x00000803, labels 0x00000801). Pixels are
// scaled to [0, 1]. Throws FormatError naming the offending field.
Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path);

enum class PartitionMode { kIid, kNonIid };

struct PartitionSpec {
  PartitionMode mode = PartitionMode::kIid;
  int labels_per_node = 2;
  bool operator==(const PartitionSpec&) const = default;
};

using Partition = std::vector<std::vector<std::size_t>>;

// Disjoint index lists, one per node.
//   iid:     shuffled, equal split, remainder dropped.
//   non-iid: node m is assigned labels_per_node distinct labels; each label's
//            samples are split evenly among its holders, remainder dropped.
Partition partition(const Dataset& data, std::size_t nodes, PartitionSpec spec,
                    std::uint64_t seed);

enum class Arch { kLogistic, kMlp };

struct Model {
  Arch arch = Arch::kLogistic;
  int input_dim = 0;
  int num_classes = 0;
  int hidden = 0;  // MLP only
  Eigen::VectorXd w;

  // q = d*C + C, zero-initialized.
  static Model logistic(int input_dim, int num_classes);
  // One tanh hidden layer, q = d*H + H + H*C + C. Weights ~ N(0, 1/fan_in).
  static Model mlp(int input_dim, int hidden, int num_classes, RandomStream& rng);

  static std::size_t parameter_count(Arch arch, int input_dim, int hidden, int num_classes);
  std::size_t size() const { return static_cast<std::size_t>(w.size()); }
};

struct LossGradient {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

// Mean cross-entropy and its exact gradient over the listed rows.
LossGradient loss_and_gradient(const Model& model, const Dataset& data,
                               std::span<const std::size_t> rows);
double batch_loss(const Model& model, const Dataset& data, std::span<const std::size_t> rows);

// Uniform batch of size batch_size from `indices` (without replacement when
// it fits, with replacement otherwise).
std::vector<std::size_t> sample_batch(std::span<const std::size_t> indices, std::size_t batch_size,
                                      RandomStream& rng);

Eigen::VectorXd local_gradient(const Model& model, const Dataset& data,
                               std::span<const std::size_t> indices, std::size_t batch_size,
                               RandomStream& rng);

// Sum of `steps` local mini-batch gradients, taking a plain SGD step of size
// eta on a private copy between them. steps == 1 is local_gradient.
Eigen::VectorXd local_update_direction(const Model& model, const Dataset& data,
                                       std::span<const std::size_t> indices,
                                       std::size_t batch_size, int steps, double eta,
                                       RandomStream& rng);

// Per-coordinate sign, sign(0) = +1. NaN -> NumericError.
SignVector sign_quantize(const Eigen::VectorXd& g);

// w <- w - eta * v
void apply_mv_update(Model& model, std::span<const Sign> mv, double eta);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

Evaluation evaluate(const Model& model, const Dataset& data);

}  // namespace optivote
