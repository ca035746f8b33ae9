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
#include <string>
#include <vector>

#include "covenant/acg.hpp"
#include "covenant/codelet.hpp"

namespace covenant {

// Factor list per loop, outer to inner. Two-level tilings store
// {outer trip count, inner trip count}.
struct TilingPermutation {
  std::map<std::string, std::vector<int64_t>> factors;

  int64_t inner(const std::string& loop) const { return factors.at(loop).back(); }
  std::string ToString() const;

  friend bool operator==(const TilingPermutation&, const TilingPermutation&) = default;
  friend auto operator<=>(const TilingPermutation&, const TilingPermutation&) = default;
};

struct ValidTilingSet {
  std::vector<TilingPermutation> permutations;  // sorted
};

// Per-loop element step a compute op imposes through its capability's
// operand dimensions (absent loops step by 1).
std::map<std::string, int64_t> VectorSteps(const Codelet& codelet, const ComputeOp& op);

Codelet MapCompute(const Codelet& codelet, const Acg& acg);
Codelet InsertTransfers(const Codelet& codelet, const Acg& acg);

// Tiling validation with capacity accumulation and source-alignment checks,
// evaluated per permutation over the transfers of a scheduled codelet.
// Alignment is checked against the source data width, or against the full
// addressable element when `strict_alignment` is set.
ValidTilingSet ValidTilings(const Codelet& codelet, const Acg& acg,
                            bool strict_alignment = false);

// Additional executability checks applied before selection: capability
// granularity divides the inner tile, every moved box is contiguous, and
// the resulting allocation fits every memory node.
bool Executable(const Codelet& scheduled, const TilingPermutation& p, const Acg& acg);

// Estimated mnemonic count for a tiling (transfer requests plus compute
// invocations).
int64_t TilingCost(const Codelet& scheduled, const TilingPermutation& p, const Acg& acg);

TilingPermutation SelectTiling(const ValidTilingSet& v, const Codelet& codelet,
                               const Acg& acg);

Codelet SplitLoops(const Codelet& codelet, const TilingPermutation& p);

// map -> insert transfers -> validate -> select -> split.
Codelet Schedule(const Codelet& codelet, const Acg& acg);

// Box extents a slice touches when each loop runs `tile[loop]` iterations.
std::vector<int64_t> BoxExtents(const Slice& slice, const std::map<std::string, int64_t>& tile,
                                const std::map<std::string, int64_t>& loop_strides);

// Nonzero-extent box with every dimension after the first non-unit one
// spanning the full surrogate extent.
bool IsContiguousBox(const std::vector<int64_t>& box, const std::vector<int64_t>& extents);

}  // namespace covenant
