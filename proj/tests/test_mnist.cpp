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

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "optivote/errors.hpp"
#include "optivote/learner.hpp"

namespace optivote {
namespace {

namespace fs = std::filesystem;

void put_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) b.push_back(static_cast<std::uint8_t>(v >> s));
}

class MnistFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("optivote_mnist_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::vector<std::uint8_t>& bytes) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary)
        .write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    return p.string();
  }

  // n images of rows x cols with pixel value (i + r + c) % 256.
  static std::vector<std::uint8_t> images(std::uint32_t n, std::uint32_t rows, std::uint32_t cols,
                                          std::uint32_t magic = 0x00000803) {
    std::vector<std::uint8_t> b;
    put_be32(b, magic);
    put_be32(b, n);
    put_be32(b, rows);
    put_be32(b, cols);
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c) b.push_back(static_cast<std::uint8_t>((i + r + c) % 256));
    return b;
  }
  static std::vector<std::uint8_t> labels(std::uint32_t n, std::uint32_t magic = 0x00000801) {
    std::vector<std::uint8_t> b;
    put_be32(b, magic);
    put_be32(b, n);
    for (std::uint32_t i = 0; i < n; ++i) b.push_back(static_cast<std::uint8_t>((3 * i) % 10));
    return b;
  }

  fs::path dir_;
};

TEST_F(MnistFiles, ParsesHeaderAndScalesPixels) {
  const auto img = write("img", images(5, 3, 4));
  const auto lab = write("lab", labels(5));
  const Dataset d = load_mnist_idx(img, lab);
  ASSERT_EQ(d.size(), 5u);
  ASSERT_EQ(d.dim(), 12u);
  EXPECT_EQ(d.num_classes, 10);
  EXPECT_DOUBLE_EQ(d.features(2, 0), 2.0 / 255.0);
  EXPECT_DOUBLE_EQ(d.features(4, 11), (4 + 2 + 3) / 255.0);
  EXPECT_EQ(d.labels[3], 9);
  for (int y : d.labels) {
    EXPECT_GE(y, 0);
    EXPECT_LE(y, 9);
  }
}

TEST_F(MnistFiles, BadMagicNamesField) {
  const auto lab = write("lab", labels(2));
  try {
    load_mnist_idx(write("img", images(2, 2, 2, 0x00000801)), lab);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.field(), "images.magic");
  }
  try {
    load_mnist_idx(write("img2", images(2, 2, 2)), write("lab2", labels(2, 0x00000803)));
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.field(), "labels.magic");
  }
}

TEST_F(MnistFiles, TruncatedByOneByte) {
  auto img = images(4, 2, 2);
  img.pop_back();
  EXPECT_THROW(load_mnist_idx(write("img", img), write("lab", labels(4))), FormatError);
  auto lab = labels(4);
  lab.pop_back();
  EXPECT_THROW(load_mnist_idx(write("img2", images(4, 2, 2)), write("lab2", lab)), FormatError);
}

TEST_F(MnistFiles, CountMismatch) {
  EXPECT_THROW(load_mnist_idx(write("img", images(4, 2, 2)), write("lab", labels(3))), FormatError);
}

TEST_F(MnistFiles, MissingFile) {
  EXPECT_THROW(load_mnist_idx((dir_ / "nope").string(), (dir_ / "nope2").string()), FormatError);
}

// Runs only when a real training set is available.
TEST(MnistReal, StandardTrainSetDimensions) {
  const char* dir = std::getenv("OPTIVOTE_MNIST_DIR");
  if (!dir) GTEST_SKIP() << "OPTIVOTE_MNIST_DIR not set";
  const fs::path base(dir);
  const Dataset d = load_mnist_idx((base / "train-images-idx3-ubyte").string(),
                                   (base / "train-labels-idx1-ubyte").string());
  EXPECT_EQ(d.size(), 60000u);
  EXPECT_EQ(d.dim(), 784u);
}

}  // namespace
}  // namespace optivote
