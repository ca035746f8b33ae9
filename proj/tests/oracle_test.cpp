// Copyright 2026 The Covenant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "covenant/error.hpp"
#include "covenant/oracle.hpp"

namespace covenant {
namespace {

const DataType kI8 = DataType::Parse("i8");
const DataType kI32 = DataType::Parse("i32");

Tensor T(DataType dt, std::vector<int64_t> dims, std::vector<int64_t> data) {
  Tensor t{dt, std::move(dims), std::move(data)};
  t.Check();
  return t;
}

TEST(EvalCapability, ElementwiseWraps) {
  Tensor a = T(kI8, {3}, {100, -100, 5});
  Tensor b = T(kI8, {3}, {100, -100, -7});
  EXPECT_EQ(EvalCapability("ADD", {a, b}).data, (std::vector<int64_t>{-56, 56, -2}));
  EXPECT_EQ(EvalCapability("SUB", {a, b}).data, (std::vector<int64_t>{0, 0, 12}));
  EXPECT_EQ(EvalCapability("MUL", {a, b}).data, (std::vector<int64_t>{16, 16, -35}));
  EXPECT_EQ(EvalCapability("MAX", {a, b}).data, (std::vector<int64_t>{100, -100, 5}));
  EXPECT_EQ(EvalCapability("RELU", {b}).data, (std::vector<int64_t>{100, 0, 0}));
}

TEST(EvalCapability, Contractions) {
  Tensor a = T(kI8, {2}, {1, -2});
  Tensor b = T(kI8, {2, 2}, {3, 4, 5, 6});
  Tensor acc = T(kI32, {2}, {10, 20});
  // [1 -2] x [[3 4] [5 6]] = [-7 -8]
  EXPECT_EQ(EvalCapability("GEMM", {a, b, acc}, kI32).data, (std::vector<int64_t>{3, 12}));
  Tensor m = T(kI8, {2, 2}, {1, 2, 3, 4});
  EXPECT_EQ(EvalCapability("MMUL", {m, b}, kI32).data, (std::vector<int64_t>{13, 16, 29, 36}));
  Tensor x = T(kI8, {1}, {-3}), y = T(kI8, {1}, {4}), c = T(kI32, {1}, {5});
  EXPECT_EQ(EvalCapability("MAC", {x, y, c}, kI32).data, (std::vector<int64_t>{-7}));
}

TEST(EvalCapability, RejectsUnsupportedOperations) {
  Tensor a = T(kI32, {1}, {4});
  EXPECT_THROW(EvalCapability("DIV", {a, a}), Error);
  EXPECT_THROW(EvalCapability("SIGMOID", {a}), Error);
  EXPECT_THROW(EvalCapability("ADD", {a}), Error);
}

TEST(EvalLayer, GemmAddsBias) {
  std::map<std::string, Tensor> in = {
      {"a", T(kI8, {1, 2}, {2, 3})},
      {"b", T(kI8, {2, 2}, {1, -1, 4, 5})},
      {"bias", T(kI32, {2}, {100, -100})},
  };
  auto out = EvalLayer("gemm", {{"M", 1}, {"N", 2}, {"K", 2}}, in,
                       {{"a", kI8}, {"b", kI8}, {"bias", kI32}, {"c", kI32}});
  EXPECT_EQ(out.at("c").data, (std::vector<int64_t>{114, -87}));
}

TEST(EvalLayer, ConvolutionWithStride) {
  std::vector<int64_t> x(25);
  for (int i = 0; i < 25; ++i) x[i] = i;
  std::map<std::string, Tensor> in = {
      {"x", T(kI8, {1, 5, 5}, x)},
      {"w", T(kI8, {1, 1, 3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1})},
  };
  std::map<std::string, int64_t> p = {{"C", 1}, {"H", 5}, {"W", 5}, {"OC", 1}, {"KH", 3},
                                      {"KW", 3}, {"OH", 2}, {"OW", 2}, {"S", 2}};
  auto out = EvalLayer("conv2d", p, in, {{"x", kI8}, {"w", kI8}, {"y", kI32}});
  // Diagonal sums of the 3x3 windows anchored at (0,0), (0,2), (2,0), (2,2).
  EXPECT_EQ(out.at("y").data, (std::vector<int64_t>{18, 24, 48, 54}));
  p["OH"] = 3;
  EXPECT_THROW(EvalLayer("conv2d", p, in, {{"x", kI8}, {"w", kI8}, {"y", kI32}}), Error);
}

TEST(TensorFile, RoundTripsWithHeader) {
  Tensor t = T(DataType::Parse("u16"), {2, 3}, {0, 1, 2, 65535, 4, 5});
  std::vector<uint8_t> bytes = EncodeTensor(t);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "CVTN");
  EXPECT_EQ(DecodeTensor(bytes), t);
  bytes.pop_back();
  EXPECT_THROW(DecodeTensor(bytes), Error);
}

TEST(RandomTensor, DeterministicAndInRange) {
  Tensor a = RandomTensor(kI8, {64}, 42);
  EXPECT_EQ(a, RandomTensor(kI8, {64}, 42));
  EXPECT_NE(a, RandomTensor(kI8, {64}, 43));
  for (int64_t v : a.data) {
    EXPECT_GE(v, -128);
    EXPECT_LE(v, 127);
  }
}

}  // namespace
}  // namespace covenant
