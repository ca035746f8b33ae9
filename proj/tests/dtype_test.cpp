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

#include "covenant/dtype.hpp"
#include "covenant/error.hpp"

namespace covenant {
namespace {

TEST(DataType, ParsesNamesAndRanges) {
  DataType t = DataType::Parse("i16");
  EXPECT_TRUE(t.is_signed);
  EXPECT_EQ(t.bits, 16);
  EXPECT_EQ(t.min_value(), -32768);
  EXPECT_EQ(t.max_value(), 32767);
  DataType u = DataType::Parse("u8");
  EXPECT_FALSE(u.is_signed);
  EXPECT_EQ(u.max_value(), 255);
  EXPECT_EQ(u.ToString(), "u8");
  EXPECT_TRUE(IsDataTypeName("i32"));
  EXPECT_FALSE(IsDataTypeName("f32"));
  EXPECT_THROW(DataType::Parse("i7"), Error);
}

TEST(DataType, WrapsTwosComplement) {
  EXPECT_EQ(WrapTo(DataType::Parse("i8"), 128), -128);
  EXPECT_EQ(WrapTo(DataType::Parse("i8"), -129), 127);
  EXPECT_EQ(WrapTo(DataType::Parse("u8"), -1), 255);
  EXPECT_EQ(WrapTo(DataType::Parse("i32"), int64_t{1} << 31), -(int64_t{1} << 31));
  EXPECT_EQ(WrapTo(DataType::Parse("u16"), 70000), 70000 - 65536);
}

TEST(Capability, RoundTripsText) {
  Capability c = Capability::Parse("(i32,2)=GEMM((i8,2),(i8,2,2),(i32,2))");
  EXPECT_EQ(c.name, "GEMM");
  ASSERT_EQ(c.inputs.size(), 3u);
  EXPECT_EQ(c.inputs[1].dims, (std::vector<int64_t>{2, 2}));
  EXPECT_EQ(c.output.dtype, DataType::Parse("i32"));
  EXPECT_EQ(c.throughput(), 2);
  EXPECT_EQ(Capability::Parse(c.ToString()), c);
  EXPECT_EQ(Capability::Parse(" (i16, 1) = ADD ( (i16,1), (i16,1) ) ").ToString(),
            "(i16,1)=ADD((i16,1),(i16,1))");
}

TEST(Capability, RejectsMalformedText) {
  EXPECT_THROW(Capability::Parse("(i32,2)=ADD((i32,2)"), Error);
  EXPECT_THROW(Capability::Parse("ADD((i32,1))"), Error);
  EXPECT_THROW(Capability::Parse("(i32,0)=RELU((i32,0))"), Error);
}

}  // namespace
}  // namespace covenant
