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

#include "covenant/error.hpp"
#include "covenant/layout.hpp"
#include "covenant/scheduler.hpp"
#include "test_support.hpp"

namespace covenant {
namespace {

using testing::Fixture;
using testing::Instantiated;
using testing::Scheduled;

const ComputeOp& FirstCompute(const std::vector<Op>& body) {
  for (const Op& op : body) {
    if (auto* c = std::get_if<ComputeOp>(&op.v)) return *c;
    if (auto* l = std::get_if<LoopOp>(&op.v)) return FirstCompute(l->body);
  }
  throw std::runtime_error("no compute");
}

std::vector<std::pair<int64_t, int64_t>> Pairs(const ValidTilingSet& v, const std::string& loop) {
  std::vector<std::pair<int64_t, int64_t>> out;
  for (const auto& p : v.permutations) {
    out.emplace_back(p.factors.at(loop)[0], p.factors.at(loop)[1]);
  }
  return out;
}

TEST(MapCompute, PrefersWidestDividingNode) {
  Acg acg = Fixture("fig8acc").acg;
  Codelet even = MapCompute(Instantiated("add", "N=12,dtype=i16"), acg);
  EXPECT_EQ(*FirstCompute(even.body).loc, "PE2");
  EXPECT_EQ(even.Get("a").loc, "MEM1");
  Codelet odd = MapCompute(Instantiated("add", "N=7,dtype=i16"), acg);
  EXPECT_EQ(*FirstCompute(odd.body).loc, "PE1");
}

TEST(MapCompute, ReportsUnsupportedOperations) {
  Acg acg = Fixture("fig8acc").acg;
  try {
    MapCompute(Instantiated("add", "N=4,dtype=i32"), acg);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.stage(), Stage::kSchedule);
    EXPECT_NE(std::string(e.what()).find("ADD"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("i32"), std::string::npos);
  }
}

TEST(MapCompute, ElementwiseLanesMustAgree) {
  // A four-lane elementwise MAC cannot carry matmul: a steps over k while c steps over n.
  Acg acg = ParseAcg(R"acg(acg "lanes" {
    memory M { data_width=32; banks=1; depth=4096; }
    compute V { capability "(i32,4)=MAC((i32,4),(i32,4),(i32,4))"; }
    edge M <-> V { bandwidth=128; }
  })acg");
  EXPECT_THROW(Schedule(Instantiated("matmul", "M=4,N=4,K=4,dtype=i32"), acg), Error);
}

TEST(InsertTransfers, StagesOperandsNextToCompute) {
  Acg acg = Fixture("fig8acc").acg;
  Codelet s = Scheduled("add", "N=12,dtype=i16", acg);
  EXPECT_EQ(s.stage, CodeletStage::kScheduled);
  EXPECT_EQ(s.Get("a1").loc, "MEM2");
  EXPECT_EQ(s.Get("b1").loc, "MEM2");
  EXPECT_EQ(s.Get("c1").loc, "MEM2");
  const ComputeOp& add = FirstCompute(s.body);
  EXPECT_EQ(add.operands[0].surrogate, "a1");
  EXPECT_EQ(add.result.surrogate, "c1");
}

TEST(ValidTilings, MatchesHandCountForSmallScratchpad) {
  // Three 16-bit tiles share 18 slots of MEM2, so the inner tile is at most 6.
  Acg acg = Fixture("fig8acc").acg;
  Codelet s = Scheduled("add", "N=12,dtype=i16", acg);
  ValidTilingSet v = ValidTilings(s, acg);
  EXPECT_EQ(Pairs(v, "n"), (std::vector<std::pair<int64_t, int64_t>>{
                               {2, 6}, {3, 4}, {4, 3}, {6, 2}, {12, 1}}));
}

TEST(ValidTilings, StrictAlignmentUsesFullRowWidth) {
  Acg acg = Fixture("toyacc").acg;
  Codelet s = Scheduled("add", "N=8,dtype=i8", acg);
  EXPECT_EQ(Pairs(ValidTilings(s, acg), "n"),
            (std::vector<std::pair<int64_t, int64_t>>{{1, 8}, {2, 4}}));
  EXPECT_TRUE(ValidTilings(s, acg, true).permutations.empty());
}

TEST(ValidTilings, SharedLoopNamesEnumerateOnce) {
  Acg acg = Fixture("toyacc").acg;
  Codelet s = Scheduled("fc", "B=5,O=2,I=8,dtype=i8,dtype.y=i32,dtype.bias=i32", acg);
  std::vector<TilingPermutation> v = ValidTilings(s, acg).permutations;
  EXPECT_EQ(std::adjacent_find(v.begin(), v.end()), v.end());
  EXPECT_EQ(v.size(), 16u);
}

TEST(SelectTiling, CostsAndExecutability) {
  Acg acg = Fixture("fig8acc").acg;
  Codelet s = Scheduled("add", "N=12,dtype=i16", acg);
  ValidTilingSet v = ValidTilings(s, acg);
  auto at = [&](int64_t inner) {
    for (const auto& p : v.permutations) {
      if (p.inner("n") == inner) return p;
    }
    throw std::runtime_error("missing tiling");
  };
  // Two outer steps of three one-beat transfers plus six two-lane adds.
  EXPECT_EQ(TilingCost(s, at(6), acg), 12);
  EXPECT_EQ(TilingCost(s, at(4), acg), 15);
  EXPECT_TRUE(Executable(s, at(6), acg));
  EXPECT_FALSE(Executable(s, at(3), acg));
  EXPECT_FALSE(Executable(s, at(1), acg));
  EXPECT_EQ(SelectTiling(v, s, acg), at(6));
}

TEST(SplitLoops, ProducesTiledNest) {
  Acg acg = Fixture("fig8acc").acg;
  Codelet t = Schedule(Instantiated("add", "N=12,dtype=i16"), acg);
  EXPECT_EQ(t.stage, CodeletStage::kTiled);
  const std::string text = RenderCodelet(t);
  EXPECT_NE(text.find("loop n(2, stride=6)"), std::string::npos) << text;
  EXPECT_NE(text.find("a1=transfer(a[n], \"MEM2\", [6]);"), std::string::npos) << text;
  EXPECT_NE(text.find("loop n1(3, stride=2)"), std::string::npos) << text;
  EXPECT_NE(text.find("c1[n1]=compute(\"PE2\", \"ADD\", a1[n1], b1[n1]);"), std::string::npos)
      << text;
  EXPECT_NE(text.find("transfer(c1, c[n], [6]);"), std::string::npos) << text;
  EXPECT_TRUE(LayoutFits(t, acg));
}

TEST(Boxes, ContiguityFollowsRowMajorOrder) {
  EXPECT_TRUE(IsContiguousBox({1, 4}, {3, 4}));
  EXPECT_FALSE(IsContiguousBox({2, 2}, {3, 4}));
  EXPECT_TRUE(IsContiguousBox({1, 1, 4}, {2, 3, 4}));
  EXPECT_TRUE(IsContiguousBox({1, 3, 4}, {2, 3, 4}));
  EXPECT_FALSE(IsContiguousBox({2, 1, 4}, {2, 3, 4}));
}

TEST(Layout, ResetsLocalsBetweenNests) {
  Acg acg = Fixture("vliw-mini").acg;
  Codelet t = Schedule(Instantiated("gemm", "M=4,N=4,K=4,dtype=i32"), acg);
  Layout l = PlanLayout(t, acg);
  EXPECT_EQ(l.Of("a").node, "DRAM");
  EXPECT_EQ(l.Of("c1").node, "VMEM");
  EXPECT_EQ(l.Of("c2").base_slot, 0);
  EXPECT_LE(l.rows_used.at("VMEM"), acg.Memory("VMEM").depth);
}

}  // namespace
}  // namespace covenant
