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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "covenant/dtype.hpp"

namespace covenant {

struct MemoryNode {
  std::string name;
  int64_t data_width = 0;  // bits per bank slot
  int64_t banks = 1;
  int64_t depth = 1;

  int64_t slot_count() const { return depth * banks; }

  friend bool operator==(const MemoryNode&, const MemoryNode&) = default;
};

int64_t AddressableElementBits(const MemoryNode& node);
int64_t CapacityBits(const MemoryNode& node);

struct ComputeNode {
  std::string name;
  std::vector<Capability> capabilities;

  friend bool operator==(const ComputeNode&, const ComputeNode&) = default;
};

struct Edge {
  std::string src;
  std::string dst;
  int64_t bandwidth = 0;  // bits per transfer operation

  friend bool operator==(const Edge&, const Edge&) = default;
};

// One factor of an access span: an integer or the value of a named field.
using SpanTerm = std::variant<int64_t, std::string>;

// Read/write annotation on an address field. The accessed interval is
// [field value, field value + product(span)) in slots of `node`.
struct FieldAccess {
  enum class Mode { kRead, kWrite };
  Mode mode = Mode::kRead;
  std::string node;
  std::vector<SpanTerm> span;

  friend bool operator==(const FieldAccess&, const FieldAccess&) = default;
};

struct FieldDef {
  enum class Kind { kInt, kEnum };
  std::string name;
  int width = 0;
  Kind kind = Kind::kInt;
  std::vector<std::string> enum_values;
  std::optional<FieldAccess> access;

  friend bool operator==(const FieldDef&, const FieldDef&) = default;
};

struct MnemonicDef {
  std::string name;
  int64_t opcode = 0;
  std::vector<FieldDef> fields;
  std::vector<std::pair<std::string, std::string>> attrs;

  std::optional<std::string> Attr(std::string_view key) const;
  // Index of `name` in fields, or -1.
  int FieldIndex(std::string_view field) const;
  int total_bits(int opcode_width) const;

  friend bool operator==(const MnemonicDef&, const MnemonicDef&) = default;
};

struct Acg {
  std::string name;
  std::vector<MemoryNode> memories;
  std::vector<ComputeNode> computes;
  std::vector<Edge> edges;
  std::vector<MnemonicDef> mnemonics;
  std::optional<int> vliw_slots;
  int opcode_width = 8;

  const MemoryNode* FindMemory(std::string_view name) const;
  const ComputeNode* FindCompute(std::string_view name) const;
  const Edge* FindEdge(std::string_view src, std::string_view dst) const;
  const MnemonicDef* FindMnemonic(std::string_view name) const;
  const MnemonicDef* FindOpcode(int64_t opcode) const;
  bool HasNode(std::string_view name) const;
  bool IsMemory(std::string_view name) const { return FindMemory(name) != nullptr; }
  const MemoryNode& Memory(std::string_view name) const;
  int slots() const { return vliw_slots.value_or(1); }

  friend bool operator==(const Acg&, const Acg&) = default;
};

Acg ParseAcg(std::string_view text);
std::string RenderAcg(const Acg& acg);

// Empty iff every structural invariant holds; otherwise one message per
// violation in a deterministic order.
std::vector<std::string> ValidateAcg(const Acg& acg);

// Minimum-hop directed path whose intermediate nodes are all memories. Ties
// go to the lexicographically smallest sequence of intermediate node names.
// Throws when `dst` is unreachable.
std::vector<Edge> ShortestPath(const Acg& acg, std::string_view src,
                               std::string_view dst);

// Minimum hop count from `src` to every node, passing through memories only
// (-1 when unreachable).
std::vector<std::pair<std::string, int>> HopDistances(const Acg& acg,
                                                      std::string_view src);

std::string HighestLevelMemory(const Acg& acg);

struct Support {
  std::string node;
  Capability capability;
};

// Capabilities named `op` whose inputs are all of `dtype`, ordered by
// descending throughput then node name.
std::vector<Support> SupportingNodes(const Acg& acg, std::string_view op,
                                     DataType dtype);

// Same ordering, matching an exact per-input dtype signature.
std::vector<Support> SupportingNodes(const Acg& acg, std::string_view op,
                                     const std::vector<DataType>& inputs);

}  // namespace covenant
