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

#include "covenant/codegen.hpp"
#include "covenant/error.hpp"
#include "covenant/simulator.hpp"
#include "test_support.hpp"

namespace covenant {
namespace {

using testing::Fixture;

const DataType kI16 = DataType::Parse("i16");
const DataType kI32 = DataType::Parse("i32");

TEST(MemoryImage, StoresElementsAcrossSlots) {
  MemoryImage narrow(MemoryNode{"D", 8, 1, 16});
  EXPECT_EQ(narrow.SlotsPer(kI32), 4);
  narrow.Write(4, kI32, -2);
  EXPECT_EQ(narrow.Read(4, kI32), -2);
  EXPECT_EQ(narrow.Read(4, DataType::Parse("u8")), 0xfe);
  EXPECT_EQ(narrow.Read(7, DataType::Parse("i8")), -1);
  EXPECT_THROW(narrow.Write(13, kI32, 1), Error);
  MemoryImage wide(MemoryNode{"S", 32, 2, 4});
  EXPECT_EQ(wide.slot_count(), 8);
  wide.Write(7, DataType::Parse("i8"), -5);
  EXPECT_EQ(wide.Read(7, DataType::Parse("i8")), -5);
  EXPECT_EQ(wide.Read(7, kI32) & 0xff, 0xfb);
}

TEST(Semantics, ParserChecksAgainstGraph) {
  Acg acg = Fixture("fig8acc").acg;
  EXPECT_THROW(ParseSemantics("bind NOPE { }", acg), Error);
  EXPECT_THROW(ParseSemantics("bind LD { move(MEM1->PE1, SRC, DST, LEN, DT); }", acg), Error);
  EXPECT_THROW(ParseSemantics("bind ADD { apply(PE1, \"(i16,2)=ADD((i16,2),(i16,2))\", "
                              "out=MEM2:DST, in=MEM2:SRC1, in=MEM2:SRC2); }",
                              acg),
               Error);
  EXPECT_THROW(ParseSemantics("bind ADD { apply(PE1, \"(i16,1)=ADD((i16,1),(i16,1))\", "
                              "in=MEM2:SRC1, in=MEM2:SRC2); }",
                              acg),
               Error);
  EXPECT_THROW(ParseSemantics("bind LD { move(MEM1->MEM2, SRC, NOPE, LEN, DT); }", acg), Error);
}

TEST(Run, ExecutesHandWrittenProgram) {
  Package p = Fixture("fig8acc");
  Images img = BlankImages(p.acg);
  for (int i = 0; i < 4; ++i) {
    img.at("MEM1").Write(i, kI16, 10 + i);
    img.at("MEM1").Write(4 + i, kI16, 100 * i - 150);
  }
  MnemonicStream s = {
      MakeMnemonic(p.acg, "LD", {0, 0, 4, 0}),
      MakeMnemonic(p.acg, "LD", {4, 4, 4, 0}),
      MakeMnemonic(p.acg, "ADD", {0, 4, 8, 1, 0}),
      MakeMnemonic(p.acg, "ADD", {2, 6, 10, 0, 0}),
      MakeMnemonic(p.acg, "ST", {8, 20, 3, 0}),
  };
  RunResult r = covenant::Run(SingletonPackets(s), p.acg, p.semantics, img);
  const MemoryImage& out = r.images.at("MEM1");
  EXPECT_EQ(out.Read(20, kI16), 10 - 150);
  EXPECT_EQ(out.Read(21, kI16), 11 - 50);
  EXPECT_EQ(out.Read(22, kI16), 12 + 50);
  EXPECT_EQ(out.Read(23, kI16), 0);  // the scalar add on PE1 covered one lane only
  EXPECT_EQ(r.metrics.mnemonic_count, 5);
  EXPECT_EQ(r.metrics.cycles, 5);
  EXPECT_EQ(r.metrics.per_node_op_counts.at("PE2"), 1);
  EXPECT_EQ(r.metrics.per_node_op_counts.at("PE1"), 1);
  EXPECT_EQ(r.metrics.transfer_bits.at("MEM1->MEM2"), 128);
  EXPECT_EQ(r.metrics.transfer_bits.at("MEM2->MEM1"), 48);
}

TEST(Run, WrapsArithmetic) {
  Package p = Fixture("fig8acc");
  Images img = BlankImages(p.acg);
  img.at("MEM2").Write(0, kI16, 32767);
  img.at("MEM2").Write(1, kI16, 1);
  RunResult r = covenant::Run(SingletonPackets({MakeMnemonic(p.acg, "ADD", {0, 1, 2, 0, 0})}), p.acg,
                    p.semantics, img);
  EXPECT_EQ(r.images.at("MEM2").Read(2, kI16), -32768);
}

TEST(Run, RejectsConflictingWritesInOnePacket) {
  Package p = Fixture("vliw-mini");
  Packet pk;
  pk.slots = {MakeMnemonic(p.acg, "LD", {0, 0, 2, 0}), MakeMnemonic(p.acg, "ADD", {8, 9, 1, 0, 0})};
  pk.resources = {"VMEM", "SCALAR"};
  try {
    covenant::Run(std::vector<Packet>{pk}, p.acg, p.semantics, BlankImages(p.acg));
    FAIL() << "expected a fault";
  } catch (const Error& e) {
    EXPECT_EQ(e.stage(), Stage::kSimulate);
  }
}

TEST(Run, PacketsReadBeforeWriting) {
  Package p = Fixture("vliw-mini");
  Images img = BlankImages(p.acg);
  img.at("DRAM").Write(0, kI32, 7);
  img.at("VMEM").Write(0, kI32, 3);
  img.at("VMEM").Write(1, kI32, 4);
  Packet pk;
  pk.slots = {MakeMnemonic(p.acg, "LD", {0, 0, 1, 0}), MakeMnemonic(p.acg, "ADD", {0, 1, 2, 0, 0})};
  pk.resources = {"VMEM", "SCALAR"};
  RunResult r = covenant::Run(std::vector<Packet>{pk}, p.acg, p.semantics, img);
  EXPECT_EQ(r.images.at("VMEM").Read(0, kI32), 7);
  EXPECT_EQ(r.images.at("VMEM").Read(2, kI32), 7);
  EXPECT_EQ(r.metrics.packet_count, 1);
  EXPECT_EQ(r.metrics.mnemonic_count, 2);
}

TEST(Semantics, EveryMnemonicNeedsABinding) {
  Package p = Fixture("fig8acc");
  EXPECT_THROW(ParseSemantics("bind LD { move(MEM1->MEM2, SRC, DST, LEN, DT); }", p.acg), Error);
}

TEST(Run, DecodesBinaries) {
  Package p = Fixture("fig8acc");
  MnemonicStream s = {MakeMnemonic(p.acg, "LD", {0, 0, 2, 0})};
  Images img = BlankImages(p.acg);
  img.at("MEM1").Write(1, kI16, -9);
  RunResult a = covenant::Run(EncodeProgram(s, p.acg).binary, p.acg, p.semantics, img);
  EXPECT_EQ(a.images.at("MEM2").Read(1, kI16), -9);
  EXPECT_NE(a.metrics.ToJson().find("\"cycles\": 1"), std::string::npos) << a.metrics.ToJson();
}

}  // namespace
}  // namespace covenant
