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

#include "covenant/layout.hpp"

#include <algorithm>

#include "covenant/error.hpp"

namespace covenant {
namespace {

int64_t RowsFor(const Surrogate& s, const MemoryNode& mem) {
  if (!s.dtype) throw Error(Stage::kCodegen, "surrogate " + s.name + " has no dtype");
  int64_t slots = s.element_count() * SlotsPerElement(mem, *s.dtype);
  return (slots + mem.banks - 1) / mem.banks;
}

struct Planner {
  const Codelet& codelet;
  const Acg& acg;
  Layout layout;
  std::map<std::string, int64_t> persistent;
  std::map<std::string, int64_t> cursor;
  std::string overflow;

  void Place(const Surrogate& s, std::map<std::string, int64_t>& rows) {
    if (!s.loc || !acg.IsMemory(*s.loc)) {
      throw Error(Stage::kCodegen, "surrogate " + s.name + " is not placed in a memory node");
    }
    const MemoryNode& mem = acg.Memory(*s.loc);
    int64_t base = rows[mem.name];
    int64_t end = base + RowsFor(s, mem);
    rows[mem.name] = end;
    layout.placements[s.name] = Placement{mem.name, base * mem.banks};
    int64_t& peak = layout.rows_used[mem.name];
    peak = std::max(peak, end);
    if (end > mem.depth && overflow.empty()) {
      overflow = "memory " + mem.name + " overflows: " + std::to_string(end) + " rows needed, " +
                 std::to_string(mem.depth) + " available";
    }
  }

  void Run() {
    for (const Surrogate& s : codelet.surrogates) {
      if (s.kind == SurrogateKind::kInp || s.kind == SurrogateKind::kOut) Place(s, persistent);
    }
    cursor = persistent;
    for (const Op& top : codelet.body) {
      ForEachOp(std::vector<Op>{top}, [&](const Op& op) {
        const auto* t = std::get_if<TransferOp>(&op.v);
        if (t && t->allocating()) Place(codelet.Get(t->result), cursor);
      });
      if (std::holds_alternative<LoopOp>(top.v)) cursor = persistent;
    }
  }
};

}  // namespace

const Placement& Layout::Of(const std::string& surrogate) const {
  auto it = placements.find(surrogate);
  if (it == placements.end()) throw Error(Stage::kCodegen, "no placement for " + surrogate);
  return it->second;
}

Layout PlanLayout(const Codelet& codelet, const Acg& acg) {
  Planner p{codelet, acg, {}, {}, {}, {}};
  p.Run();
  if (!p.overflow.empty()) throw Error(Stage::kCodegen, p.overflow);
  return p.layout;
}

bool LayoutFits(const Codelet& codelet, const Acg& acg) {
  Planner p{codelet, acg, {}, {}, {}, {}};
  try {
    p.Run();
  } catch (const Error&) {
    return false;
  }
  return p.overflow.empty();
}

}  // namespace covenant
