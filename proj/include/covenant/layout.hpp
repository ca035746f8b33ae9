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

#include "covenant/acg.hpp"
#include "covenant/codelet.hpp"

namespace covenant {

struct Placement {
  std::string node;
  int64_t base_slot = 0;
};

// Static storage assignment. Inputs and outputs are placed first and live
// for the whole program; locals use a per-node bump allocator (row granular)
// that resets after every top-level loop nest.
struct Layout {
  std::map<std::string, Placement> placements;
  std::map<std::string, int64_t> rows_used;  // peak rows per memory node

  const Placement& Of(const std::string& surrogate) const;
};

// Throws Error(kCodegen) when a node's depth is exceeded.
Layout PlanLayout(const Codelet& codelet, const Acg& acg);

// Non-throwing variant used by tiling selection.
bool LayoutFits(const Codelet& codelet, const Acg& acg);

}  // namespace covenant
