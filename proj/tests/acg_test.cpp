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

#include <algorithm>
#include <string>

#include "covenant/acg.hpp"
#include "covenant/error.hpp"
#include "test_support.hpp"

namespace covenant {
namespace {

using testing::Fixture;

constexpr const char* kSmall = R"acg(
acg "small" {
  memory HOST { data_width=8; banks=1; depth=64; }
  memory A { data_width=8; banks=2; depth=16; }
  memory B { data_width=8; banks=2; depth=16; }
  compute PE { capability "(i8,1)=ADD((i8,1),(i8,1))"; }
  compute VPE { capability "(i8,4)=ADD((i8,4),(i8,4))"; }
  edge HOST <-> B { bandwidth=32; }
  edge HOST <-> A { bandwidth=32; }
  edge A <-> PE { bandwidth=8; }
  edge B <-> PE { bandwidth=8; }
  edge B <-> VPE { bandwidth=32; }
}
)acg";

bool Mentions(const std::vector<std::string>& v, const std::string& s) {
  return std::any_of(v.begin(), v.end(),
                     [&](const std::string& x) { return x.find(s) != std::string::npos; });
}

TEST(Acg, ShippedFixturesValidate) {
  for (const char* name :
       {"fig8acc", "fig9acc", "toyacc", "weaver-mini", "vliw-mini", "hvx-mini"}) {
    Package p = Fixture(name);
    EXPECT_EQ(p.acg.name, name);
    EXPECT_TRUE(ValidateAcg(p.acg).empty()) << name;
    EXPECT_FALSE(p.semantics.bindings.empty()) << name;
    EXPECT_FALSE(p.macros.macros.empty()) << name;
  }
}

TEST(Acg, CapacityCountsBanks) {
  Package p = Fixture("toyacc");
  const MemoryNode& s = p.acg.Memory("SCRATCH");
  EXPECT_EQ(AddressableElementBits(s), 224);
  EXPECT_EQ(CapacityBits(s), 229376);
  EXPECT_EQ(CapacityBits(s) / 8, 28672);
}

TEST(Acg, RenderParsesBack) {
  for (const char* name : {"toyacc", "vliw-mini"}) {
    Acg a = Fixture(name).acg;
    EXPECT_EQ(ParseAcg(RenderAcg(a)), a) << name;
  }
}

TEST(Acg, ShortestPathBreaksTiesByName) {
  Acg a = ParseAcg(kSmall);
  auto path = ShortestPath(a, "HOST", "PE");
  ASSERT_EQ(path.size(), 2u);
  EXPECT_EQ(path[0].dst, "A");
  EXPECT_EQ(path[1].dst, "PE");
  EXPECT_TRUE(ShortestPath(a, "A", "A").empty());
  EXPECT_THROW(ShortestPath(a, "HOST", "NOPE"), Error);
}

TEST(Acg, PathsDoNotCrossComputeNodes) {
  // VPE is adjacent to B only; reaching it from A must go back through HOST.
  Acg a = ParseAcg(kSmall);
  auto path = ShortestPath(a, "A", "VPE");
  ASSERT_EQ(path.size(), 3u);
  EXPECT_EQ(path[0].dst, "HOST");
  EXPECT_EQ(path[1].dst, "B");
}

TEST(Acg, HighestLevelMemory) {
  // A and HOST both total four hops to the compute nodes; name order decides.
  EXPECT_EQ(HighestLevelMemory(ParseAcg(kSmall)), "A");
  EXPECT_EQ(HighestLevelMemory(Fixture("toyacc").acg), "DRAM");
  EXPECT_EQ(HighestLevelMemory(Fixture("weaver-mini").acg), "DRAM");
  EXPECT_EQ(HighestLevelMemory(Fixture("hvx-mini").acg), "L2");
}

TEST(Acg, SupportingNodesOrderByThroughput) {
  Acg a = ParseAcg(kSmall);
  auto s = SupportingNodes(a, "ADD", DataType::Parse("i8"));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].node, "VPE");
  EXPECT_EQ(s[1].node, "PE");
  EXPECT_TRUE(SupportingNodes(a, "ADD", DataType::Parse("i16")).empty());
  EXPECT_TRUE(SupportingNodes(a, "MUL", DataType::Parse("i8")).empty());
}

TEST(Acg, ValidationReportsStructuralErrors) {
  Acg a = ParseAcg(R"acg(acg "bad" {
    memory M { data_width=8; banks=1; depth=4; }
    compute P { capability "(i8,1)=ADD((i8,1),(i8,1))"; }
    compute Q { capability "(i8,1)=ADD((i8,1),(i8,1))"; }
    edge M -> P { bandwidth=8; }
    mnemonic X(1) { ifield("A", 4, read("M", 1)) }
    mnemonic Y(1) { ifield("A", 4), attr("resource", "P") }
  })acg");
  auto v = ValidateAcg(a);
  EXPECT_TRUE(Mentions(v, "unreachable compute node Q"));
  EXPECT_TRUE(Mentions(v, "X has no resource"));
  EXPECT_TRUE(Mentions(v, "duplicate opcode 1"));
}

TEST(Acg, ParseErrorsCarryPositions) {
  try {
    ParseAcg("acg \"x\" {\n  memory M { data_width=8; banks=1 }\n}");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(ParseAcg("acg \"x\" { edge A -> B { bandwidth=8; } }"), Error);
  EXPECT_THROW(ParseAcg("acg \"x\" { compute P { capability \"nonsense\"; } }"), Error);
}

TEST(Acg, LoadPackageRejectsInvalidGraphs) {
  EXPECT_THROW(LoadPackage(testing::TestDir() / "fixtures" / "missing.acg"), Error);
}

}  // namespace
}  // namespace covenant
