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

#include <filesystem>

#include "covenant/error.hpp"
#include "covenant/pipeline.hpp"
#include "test_support.hpp"

namespace covenant {
namespace {

using testing::Fixture;
using testing::Template;

LayerBinding L(const char* text) { return LayerBinding::Parse(text); }

TEST(OptFlags, ParsesAnyOrder) {
  OptFlags f = OptFlags::Parse("pack, parallelize");
  EXPECT_TRUE(f.parallelize);
  EXPECT_TRUE(f.pack);
  EXPECT_FALSE(f.unroll);
  EXPECT_EQ(f.ToString(), "parallelize,pack");
  EXPECT_EQ(OptFlags::Parse("").ToString(), "");
  EXPECT_THROW(OptFlags::Parse("vectorize"), Error);
}

TEST(Compile, RecordsEveryStage) {
  Package p = Fixture("fig9acc");
  CompileResult r = Compile(Template("relu"), L("N=25,dtype=i32"), p, OptFlags::Parse("parallelize"));
  EXPECT_EQ(r.instantiated.stage, CodeletStage::kInstantiated);
  EXPECT_EQ(r.mapped.stage, CodeletStage::kMapped);
  EXPECT_EQ(r.scheduled.stage, CodeletStage::kScheduled);
  EXPECT_EQ(r.tiled.stage, CodeletStage::kTiled);
  EXPECT_EQ(r.optimized.stage, CodeletStage::kOptimized);
  int64_t compute = 0;
  for (const Mnemonic& m : r.stream) compute += m.name == "RELU";
  EXPECT_EQ(compute, 10);
  EXPECT_EQ(DecodeProgram(r.program.binary, p.acg), r.packets);
}

TEST(Compile, MatchesGoldenBinary) {
  Package p = Fixture("toyacc");
  CompileResult r = Compile(Template("add"), L("N=12,dtype=i16"), p, {});
  EXPECT_EQ(r.program.binary, ReadBytes(testing::TestDir() / "golden" / "add12_toyacc.cvnt"));
}

TEST(Compile, IsDeterministic) {
  Package p = Fixture("vliw-mini");
  OptFlags all = OptFlags::Parse("parallelize,unroll,pack");
  CompileResult a = Compile(Template("gemm"), L("M=4,N=4,K=4,dtype=i32"), p, all);
  CompileResult b = Compile(Template("gemm"), L("M=4,N=4,K=4,dtype=i32"), p, all);
  EXPECT_EQ(a.program.binary, b.program.binary);
  EXPECT_EQ(a.program.listing, b.program.listing);
}

TEST(Verify, PassesAcrossFixtures) {
  struct Case {
    const char* pkg;
    const char* codelet;
    const char* layer;
  };
  const Case cases[] = {
      {"fig8acc", "add", "N=12,dtype=i16"},
      {"toyacc", "matmul", "M=3,N=4,K=5,dtype=i8,dtype.c=i32"},
      {"toyacc", "fc", "B=2,I=4,O=6,dtype=i8,dtype.y=i32,dtype.bias=i32"},
      {"weaver-mini", "matmul", "M=4,N=4,K=4,dtype=i8,dtype.c=i32"},
      {"hvx-mini", "max", "N=19,dtype=i32"},
      {"vliw-mini", "conv2d", "C=2,H=4,W=4,OC=2,KH=3,KW=3,OH=2,OW=2,S=1,dtype=i32"},
  };
  for (const Case& c : cases) {
    VerifyReport r = Verify(Template(c.codelet), L(c.layer), Fixture(c.pkg), 7, {});
    EXPECT_TRUE(r.pass) << c.pkg << " " << c.codelet << "\n" << r.ToText();
  }
}

TEST(Verify, DetectsTamperedBinary) {
  Package p = Fixture("fig8acc");
  CompileResult r = Compile(Template("add"), L("N=12,dtype=i16"), p, {});
  std::vector<Packet> packets = DecodeProgram(r.program.binary, p.acg);
  for (Packet& pk : packets) {
    for (Mnemonic& m : pk.slots) {
      if (m.name == "ADD") m.values[1] = m.values[0];  // a + a
    }
  }
  std::vector<uint8_t> bad = EncodeProgram(packets, p.acg).binary;
  VerifyReport v = Verify(Template("add"), L("N=12,dtype=i16"), p, 3, {}, &bad);
  EXPECT_FALSE(v.pass);
  ASSERT_TRUE(v.mismatch.has_value());
  EXPECT_EQ(v.mismatch->tensor, "c");
  EXPECT_NE(v.ToText().find("FAIL"), std::string::npos);
}

TEST(Verify, SeedsChangeInputsNotOutcome) {
  Package p = Fixture("fig9acc");
  auto in1 = RandomInputs(Compile(Template("add"), L("N=8,dtype=i32"), p, {}).instantiated, 1);
  auto in2 = RandomInputs(Compile(Template("add"), L("N=8,dtype=i32"), p, {}).instantiated, 2);
  EXPECT_NE(in1.at("a"), in2.at("a"));
  EXPECT_NE(in1.at("a"), in1.at("b"));
  EXPECT_TRUE(Verify(Template("add"), L("N=8,dtype=i32"), p, 2, {}).pass);
}

TEST(Package, LookupByNameAndBrokenBindings) {
  EXPECT_EQ(FindPackage("toyacc").filename(), "toyacc.acg");
  EXPECT_EQ(FindCodelet("relu").filename(), "relu.cdlt");
  EXPECT_THROW(FindPackage("no-such-package"), Error);

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "covenant_broken_pkg";
  fs::create_directories(dir);
  fs::path src = testing::SourceDir() / "packages" / "fig8acc";
  for (const char* ext : {".acg", ".mm"}) {
    fs::copy_file(src / (std::string("fig8acc") + ext), dir / (std::string("fig8acc") + ext),
                  fs::copy_options::overwrite_existing);
  }
  WriteText(dir / "fig8acc.sem", "bind LD { move(MEM1->MEM2, SRC, DST, LEN, DT); }\n");
  EXPECT_THROW(LoadPackage(dir / "fig8acc.acg"), Error);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace covenant
