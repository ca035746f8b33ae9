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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "covenant/acg.hpp"
#include "covenant/codegen.hpp"

namespace covenant {

// Byte store for one memory node. Slot `s` starts at bit s * data_width;
// an element occupies its dtype's bits (little endian) from the start of its
// first slot, with the rest of a padded slot held at zero.
class MemoryImage {
 public:
  MemoryImage() = default;
  explicit MemoryImage(const MemoryNode& node);

  const std::string& node() const { return node_; }
  int64_t slot_count() const { return slots_; }
  int64_t data_width() const { return data_width_; }
  const std::vector<uint8_t>& bytes() const { return bytes_; }

  int64_t Read(int64_t slot, DataType dtype) const;
  void Write(int64_t slot, DataType dtype, int64_t value);
  int64_t SlotsPer(DataType dtype) const;

  friend bool operator==(const MemoryImage&, const MemoryImage&) = default;

 private:
  void Check(int64_t slot, DataType dtype) const;

  std::string node_;
  int64_t data_width_ = 8;
  int64_t slots_ = 0;
  std::vector<uint8_t> bytes_;
};

using Images = std::map<std::string, MemoryImage>;

Images BlankImages(const Acg& acg);

// Field reference or literal used as an effect argument.
struct Arg {
  std::variant<int64_t, std::string> v;
  friend bool operator==(const Arg&, const Arg&) = default;
};

struct Location {
  bool queue = false;
  std::string node;
  Arg address;
  std::optional<Arg> stride;
  friend bool operator==(const Location&, const Location&) = default;
};

struct Effect {
  enum class Verb { kLoad, kApply, kStore, kMove };
  Verb verb = Verb::kMove;
  std::string node;      // load/store memory, apply compute node, move source
  std::string dst;       // move destination
  Capability capability;  // apply
  std::vector<Location> inputs;
  Location output;
  Arg src, to, count;    // move: src/dst address and element count
  Arg address;           // load/store address
  Arg dtype;             // dtype name literal or enumerated field
  friend bool operator==(const Effect&, const Effect&) = default;
};

struct Binding {
  std::string mnemonic;
  std::vector<std::pair<std::string, std::string>> when;  // enum field == value
  std::vector<Effect> effects;
  friend bool operator==(const Binding&, const Binding&) = default;
};

struct SemanticSet {
  std::vector<Binding> bindings;
  const Binding* Match(const Mnemonic& m, const Acg& acg) const;
};

// `bind NAME [when F=V, ...] { effect; ... }`
SemanticSet ParseSemantics(std::string_view text, const Acg& acg);

struct RunMetrics {
  int64_t mnemonic_count = 0;
  int64_t packet_count = 0;
  std::map<std::string, int64_t> per_node_op_counts;
  std::map<std::string, int64_t> transfer_bits;  // key "SRC->DST"
  int64_t cycles = 0;

  std::string ToJson() const;
  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

struct RunResult {
  Images images;
  RunMetrics metrics;
};

RunResult Run(const std::vector<Packet>& packets, const Acg& acg, const SemanticSet& sem,
              Images initial);
RunResult Run(const std::vector<uint8_t>& binary, const Acg& acg, const SemanticSet& sem,
              Images initial);

}  // namespace covenant
