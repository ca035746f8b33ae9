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

#include "covenant/codelet.hpp"
#include "covenant/error.hpp"
#include "covenant/oracle.hpp"
#include "test_support.hpp"

namespace covenant {
namespace {

using testing::Instantiated;
using testing::Template;

TEST(Codelet, ShippedCodeletsRoundTrip) {
  for (const std::string& name : OracleCodelets()) {
    Codelet c = Template(name);
    EXPECT_EQ(c.name, name);
    EXPECT_EQ(c.stage, CodeletStage::kTemplate);
    EXPECT_EQ(ParseCodelet(RenderCodelet(c)), c) << name;
  }
}

TEST(Codelet, InstantiateBindsShapesAndTypes) {
  Codelet c = Instantiated("gemm", "M=2,N=4,K=6,dtype=i8,dtype.c=i32,dtype.bias=i32");
  EXPECT_EQ(c.stage, CodeletStage::kInstantiated);
  EXPECT_EQ(c.Get("a").Extents(), (std::vector<int64_t>{2, 6}));
  EXPECT_EQ(c.Get("b").dtype, DataType::Parse("i8"));
  EXPECT_EQ(c.Get("c").dtype, DataType::Parse("i32"));
  EXPECT_TRUE(c.Params().empty());
  const LoopOp& m = std::get<LoopOp>(c.body[0].v);
  EXPECT_EQ(m.trip_count(), 2);
}

TEST(Codelet, InstantiateRejectsMissingBindings) {
  Codelet t = Template("add");
  EXPECT_THROW(Instantiate(t, {}, {{"a", DataType::Parse("i8")}}), Error);
  try {
    Instantiate(t, {{"N", 4}}, {});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.stage(), Stage::kInstantiate);
  }
}

TEST(Codelet, AffineIndicesEvaluate) {
  Codelet c = Instantiated(
      "conv2d", "C=1,H=5,W=5,OC=1,KH=3,KW=3,OH=2,OW=2,S=2,dtype=i8,dtype.y=i32");
  const Op* op = &c.body[0];
  while (std::holds_alternative<LoopOp>(op->v)) op = &std::get<LoopOp>(op->v).body[0];
  const ComputeOp& mac = std::get<ComputeOp>(op->v);
  const IndexExpr& row = mac.operands[0].index[1];
  EXPECT_EQ(row.Eval({{"oh", 1}, {"kh", 2}}), 4);
  EXPECT_TRUE(row.Uses("kh"));
  EXPECT_FALSE(row.Uses("kw"));
}

TEST(Codelet, LayerBindingParsesAndMerges) {
  LayerBinding a = LayerBinding::Parse("codelet=add, N=12, dtype=i16, dtype.c=i32");
  EXPECT_EQ(a.codelet, "add");
  EXPECT_EQ(a.params.at("N"), 12);
  LayerBinding b = LayerBinding::Parse("N=7\n# comment\n");
  a.Merge(b);
  EXPECT_EQ(a.params.at("N"), 7);
  auto d = a.DtypesFor(Template("add"));
  EXPECT_EQ(d.at("a"), DataType::Parse("i16"));
  EXPECT_EQ(d.at("c"), DataType::Parse("i32"));
  EXPECT_THROW(LayerBinding::Parse("N=twelve"), Error);
  EXPECT_THROW(LayerBinding::Parse("N"), Error);
}

TEST(Codelet, ParserRejectsBadPrograms) {
  EXPECT_THROW(ParseCodelet("cdlt x { a=inp([4], null, null); loop i(4) { loop i(2) { } } }"),
               ParseError);
  EXPECT_THROW(ParseCodelet("cdlt x { c=out([4], null, null); loop i(4) { "
                            "c[i]=compute(null, \"ADD\", q[i], c[i]); } }"),
               ParseError);
  EXPECT_THROW(ParseCodelet("cdlt x { a=inp([4], null, null); a=inp([4], null, null); }"),
               ParseError);
  EXPECT_NO_THROW(ParseCodelet("cdlt x { N=param(); loop i(N) { } loop i(N) { } }"));
}

}  // namespace
}  // namespace covenant
