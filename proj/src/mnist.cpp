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

#include <fmt/format.h>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <vector>

#include "optivote/errors.hpp"
#include "optivote/learner.hpp"

namespace optivote {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<unsigned char> read_all(const std::string& path, const std::string& field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(field, fmt::format("cannot open '{}'", path));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<unsigned char>& buf, std::size_t offset,
                   const std::string& field) {
  if (buf.size() < offset + 4) throw FormatError(field, "file truncated inside header");
  return (std::uint32_t(buf[offset]) << 24) | (std::uint32_t(buf[offset + 1]) << 16) |
         (std::uint32_t(buf[offset + 2]) << 8) | std::uint32_t(buf[offset + 3]);
}

}  // namespace

Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
  const auto img = read_all(images_path, "images");
  const auto lab = read_all(labels_path, "labels");

  if (be32(img, 0, "images.magic") != kImageMagic)
    throw FormatError("images.magic", fmt::format("expected 0x{:08x}, found 0x{:08x}",
                                                  kImageMagic, be32(img, 0, "images.magic")));
  if (be32(lab, 0, "labels.magic") != kLabelMagic)
    throw FormatError("labels.magic", fmt::format("expected 0x{:08x}, found 0x{:08x}",
                                                  kLabelMagic, be32(lab, 0, "labels.magic")));

  const std::size_t n_img = be32(img, 4, "images.count");
  const std::size_t rows = be32(img, 8, "images.rows");
  const std::size_t cols = be32(img, 12, "images.cols");
  const std::size_t n_lab = be32(lab, 4, "labels.count");
  if (n_img != n_lab)
    throw FormatError("count", fmt::format("{} images but {} labels", n_img, n_lab));
  if (n_img == 0) throw FormatError("images.count", "empty dataset");

  const std::size_t d = rows * cols;
  if (img.size() != 16 + n_img * d)
    throw FormatError("images.payload", fmt::format("expected {} bytes, file has {}",
                                                    16 + n_img * d, img.size()));
  if (lab.size() != 8 + n_lab)
    throw FormatError("labels.payload",
                      fmt::format("expected {} bytes, file has {}", 8 + n_lab, lab.size()));

  Dataset out;
  out.name = "mnist";
  out.features.resize(static_cast<Eigen::Index>(n_img), static_cast<Eigen::Index>(d));
  out.labels.resize(n_img);
  for (std::size_t i = 0; i < n_img; ++i) {
    const int y = lab[8 + i];
    if (y > 9) throw FormatError("labels.value", fmt::format("label {} at index {}", y, i));
    out.labels[i] = y;
    for (std::size_t j = 0; j < d; ++j)
      out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          img[16 + i * d + j] / 255.0;
  }
  out.num_classes = 10;
  return out;
}

}  // namespace optivote
