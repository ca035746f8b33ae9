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
#include <string>
#include <vector>

#include "covenant/acg.hpp"
#include "covenant/codegen.hpp"
#include "covenant/codelet.hpp"

namespace covenant {

// Splits the innermost compute loops across several supporting nodes whose
// widths sum to the new loop stride. Identity when no greedy combination
// (widest first) divides the loop extent.
Codelet Parallelize(const Codelet& codelet, const Acg& acg);

// Coalesces consecutive iterations of the innermost transfer-carrying loop
// while the coalesced transfers fit the edge bandwidth and the enlarged
// tiles fit their memories.
Codelet UnrollLoops(const Codelet& codelet, const Acg& acg);

// Memory interval a mnemonic field reads or writes.
struct Access {
  std::string node;
  int64_t lo = 0;
  int64_t hi = 0;  // exclusive
  bool write = false;
  bool unknown = false;  // enumerated address: conflicts with the resource
};

std::vector<Access> AccessesOf(const Mnemonic& m, const Acg& acg);
bool Dependent(const Mnemonic& a, const Mnemonic& b, const Acg& acg);

// Greedy forward packing into VLIW packets.
std::vector<Packet> PackMnemonics(const MnemonicStream& stream, const Acg& acg);

}  // namespace covenant
