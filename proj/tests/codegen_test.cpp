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

#include "covenant/codegen.hpp"
#include "covenant/error.hpp"
#include "covenant/layout.hpp"
#include "test_support.hpp"

namespace covenant {
namespace {

using testing::Fixture;
using testing::Instantiated;

Acg Fig6() { return ParseAcg(ReadText(testing::TestDir() / "fixtures" / "fig6.acg")); }

// Reference packer: opcode then fields, most significant bit first, zero padded.
std::vector<uint8_t> PackBits(const Acg& acg, const Mnemonic& m) {
  const MnemonicDef& def = *acg.FindMnemonic(m.name);
  std::vector<bool> bits;
  auto put = [&](uint64_t v, int w) {
    for (int i = w - 1; i >= 0; --i) bits.push_back((v >> i) & 1);
  };
  put(static_cast<uint64_t>(def.opcode), acg.opcode_width);
  for (size_t i = 0; i < def.fields.size(); ++i) put(static_cast<uint64_t>(m.values[i]), def.fields[i].width);
  std::vector<uint8_t> out((bits.size() + 7) / 8, 0);
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 8] |= static_cast<uint8_t>(0x80 >> (i % 8));
  }
  return out;
}

TEST(Encode, ExampleAddMatchesBitLayout) {
  Acg acg = Fig6();
  Mnemonic m = MakeMnemonic(acg, "ADD", {3, 0, 1, 1});
  EXPECT_EQ(m.resource, "VECTOR");
  EXPECT_EQ(MnemonicToString(m, acg), "ADD #3, #0, #1, VECTOR");
  Encoded e = Encode(m, acg);
  EXPECT_EQ(e.bits, 33);
  EXPECT_EQ(e.bytes, (std::vector<uint8_t>{0x03, 0x03, 0x00, 0x01, 0x80}));
  EXPECT_EQ(e.bytes, PackBits(acg, m));
  size_t used = 0;
  EXPECT_EQ(Decode(e.bytes.data(), e.bytes.size(), acg, &used), m);
  EXPECT_EQ(used, 5u);
}

TEST(Encode, RejectsOutOfRangeFields) {
  Acg acg = Fig6();
  EXPECT_THROW(MakeMnemonic(acg, "ADD", {256, 0, 0, 0}), Error);
  EXPECT_THROW(MakeMnemonic(acg, "ADD", {0, 0, 0, 2}), Error);
  EXPECT_THROW(MakeMnemonic(acg, "ADD", {0, 0, 0}), Error);
  EXPECT_THROW(MakeMnemonic(acg, "SUB", {0, 0, 0, 0}), Error);
  const uint8_t unknown[] = {0x09, 0, 0, 0, 0};
  EXPECT_THROW(Decode(unknown, sizeof unknown, acg), Error);
}

TEST(Encode, AgreesWithReferenceOnEveryFixtureMnemonic) {
  for (const char* name :
       {"fig8acc", "fig9acc", "toyacc", "weaver-mini", "vliw-mini", "hvx-mini"}) {
    Acg acg = Fixture(name).acg;
    for (const MnemonicDef& def : acg.mnemonics) {
      std::vector<int64_t> v;
      for (const FieldDef& f : def.fields) {
        v.push_back(f.kind == FieldDef::Kind::kEnum ? static_cast<int64_t>(f.enum_values.size()) - 1
                                                    : (int64_t{1} << f.width) - 1);
      }
      Mnemonic m = MakeMnemonic(acg, def.name, v);
      EXPECT_EQ(Encode(m, acg).bytes, PackBits(acg, m)) << name << " " << def.name;
    }
  }
}

TEST(Macros, ParseErrorsNameTheProblem) {
  Acg acg = Fixture("fig8acc").acg;
  EXPECT_THROW(ParseMacros("transfer MEM1 -> MEM2 { LD(SRC=src, DST=dst); }", acg), Error);
  EXPECT_THROW(ParseMacros("transfer MEM1 -> PE1 { LD(SRC=src, DST=dst, LEN=len, DT=dtype); }",
                           acg),
               Error);
  EXPECT_THROW(ParseMacros("compute \"(i16,4)=ADD((i16,4),(i16,4))\" on PE1 { }", acg), Error);
  EXPECT_THROW(ParseMacros("transfer MEM1 -> MEM2 { LD(SRC=op(0), DST=dst, LEN=len, DT=dtype); }",
                           acg),
               Error);
  MacroRegistry r = Fixture("fig8acc").macros;
  EXPECT_NE(r.FindTransfer("MEM1", "MEM2"), nullptr);
  EXPECT_EQ(r.FindTransfer("MEM1", "MEM1"), nullptr);
}

TEST(Lower, FlattensTiledAdd) {
  Package p = Fixture("fig8acc");
  Codelet t = Schedule(Instantiated("add", "N=12,dtype=i16"), p.acg);
  MnemonicStream s = Lower(t, p.acg, p.macros);
  ASSERT_EQ(s.size(), 12u);
  auto count = [&](const char* n) {
    return std::count_if(s.begin(), s.end(), [&](const Mnemonic& m) { return m.name == n; });
  };
  EXPECT_EQ(count("LD"), 4);
  EXPECT_EQ(count("ADD"), 6);
  EXPECT_EQ(count("ST"), 2);
  Layout l = PlanLayout(t, p.acg);
  // Second load of b: MEM1 address of b plus six elements, into b1.
  EXPECT_EQ(s[7].values[0], l.Of("b").base_slot + 6);
  EXPECT_EQ(s[7].values[1], l.Of("b1").base_slot);
  EXPECT_EQ(s[7].values[2], 6);
  EXPECT_EQ(MnemonicToString(s[2], p.acg), "ADD #6, #12, #0, PE2, i16");
}

TEST(Lower, SplitsTransfersByBandwidth) {
  Package p = Fixture("toyacc");
  Codelet t = Schedule(Instantiated("add", "N=30,dtype=i16"), p.acg);
  MnemonicStream s = Lower(t, p.acg, p.macros);
  int64_t loads = 0, elements = 0;
  for (const Mnemonic& m : s) {
    if (m.name != "LD") continue;
    ++loads;
    elements += m.values[2];
    EXPECT_LE(m.values[2] * 16, 224);
  }
  EXPECT_EQ(elements, 60);
  EXPECT_EQ(loads, 6);  // two operands of 30 elements in chunks of 14
}

TEST(Program, ContainerRoundTrips) {
  Acg acg = Fixture("vliw-mini").acg;
  std::vector<Packet> packets(2);
  packets[0].slots = {MakeMnemonic(acg, "LD", {0, 0, 4, 0}),
                      MakeMnemonic(acg, "ADD", {8, 12, 16, 0, 0})};
  packets[1].slots = {MakeMnemonic(acg, "ST", {16, 64, 4, 0})};
  for (Packet& p : packets) {
    for (const Mnemonic& m : p.slots) p.resources.insert(m.resource);
  }
  Program prog = EncodeProgram(packets, acg);
  const std::vector<uint8_t>& b = prog.binary;
  ASSERT_GE(b.size(), 8u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "CVNT");
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[5] | (b[6] << 8), static_cast<int>(acg.name.size()));
  EXPECT_EQ(DecodeProgram(b, acg), packets);
  EXPECT_NE(prog.listing.find("{ LD #0, #0, #4, i32; ADD #8, #12, #16, SCALAR, i32 }"),
            std::string::npos)
      << prog.listing;
  std::vector<uint8_t> cut(b.begin(), b.end() - 1);
  EXPECT_THROW(DecodeProgram(cut, acg), Error);
  EXPECT_THROW(DecodeProgram(b, Fixture("toyacc").acg), Error);
}

}  // namespace
}  // namespace covenant
