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

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "covenant/acg.hpp"
#include "covenant/codelet.hpp"

namespace covenant {

// A concrete mnemonic. Enumerated fields hold the zero-based index of their
// value.
struct Mnemonic {
  std::string name;
  std::vector<int64_t> values;
  std::string resource;

  friend bool operator==(const Mnemonic&, const Mnemonic&) = default;
};

using MnemonicStream = std::vector<Mnemonic>;

// Builds a mnemonic from field values, checking arity and ranges, and
// resolves the consumed resource from the `resource` attribute (a node name
// or the name of an enumerated field whose value names the node).
Mnemonic MakeMnemonic(const Acg& acg, std::string_view name, std::vector<int64_t> values);
void CheckMnemonic(const Mnemonic& m, const Acg& acg);
std::string MnemonicToString(const Mnemonic& m, const Acg& acg);

struct Packet {
  std::vector<Mnemonic> slots;
  std::set<std::string> resources;

  friend bool operator==(const Packet&, const Packet&) = default;
};

// Macro-mnemonic templates. Each field is bound to a literal or to a value
// derived from the op being expanded.
struct FieldSource {
  enum class Kind { kInt, kEnum, kOperand, kResult, kStride, kSrc, kDst, kLen, kDtype };
  Kind kind = Kind::kInt;
  int64_t value = 0;   // kInt literal, operand index for kOperand/kStride (-1: result)
  std::string text;    // kEnum literal

  friend bool operator==(const FieldSource&, const FieldSource&) = default;
};

struct MacroStep {
  std::string mnemonic;
  std::vector<std::pair<std::string, FieldSource>> fields;

  friend bool operator==(const MacroStep&, const MacroStep&) = default;
};

struct MacroMnemonic {
  enum class Kind { kCompute, kTransfer };
  Kind kind = Kind::kCompute;
  std::string capability;  // canonical capability text (compute)
  std::string node;        // compute node, or transfer source memory
  std::string dst;         // transfer destination memory
  std::vector<MacroStep> steps;

  friend bool operator==(const MacroMnemonic&, const MacroMnemonic&) = default;
};

struct MacroRegistry {
  std::vector<MacroMnemonic> macros;

  const MacroMnemonic* FindCompute(const Capability& cap, std::string_view node) const;
  const MacroMnemonic* FindTransfer(std::string_view src, std::string_view dst) const;
};

// `compute "<capability>" on NODE { MNEM(F=src, ...); ... }`
// `transfer SRC -> DST { MNEM(F=src, ...); ... }`
MacroRegistry ParseMacros(std::string_view text, const Acg& acg);

// Fully unrolls loops and expands every op through its macro-mnemonic.
// Transfers move ceil(bits / bandwidth) chunks per edge.
MnemonicStream Lower(const Codelet& codelet, const Acg& acg, const MacroRegistry& registry);

struct Encoded {
  std::vector<uint8_t> bytes;
  int bits = 0;  // significant bits before padding
};

// Opcode then fields, most significant bit first, zero padded to a byte.
Encoded Encode(const Mnemonic& m, const Acg& acg);
// Decodes one mnemonic from the front of `data` and reports bytes consumed.
Mnemonic Decode(const uint8_t* data, size_t size, const Acg& acg, size_t* consumed = nullptr);

struct Program {
  std::vector<uint8_t> binary;
  std::string listing;
};

std::vector<Packet> SingletonPackets(const MnemonicStream& stream);
Program EncodeProgram(const std::vector<Packet>& packets, const Acg& acg);
Program EncodeProgram(const MnemonicStream& stream, const Acg& acg);
std::vector<Packet> DecodeProgram(const std::vector<uint8_t>& binary, const Acg& acg);
std::string ListPackets(const std::vector<Packet>& packets, const Acg& acg);

}  // namespace covenant
