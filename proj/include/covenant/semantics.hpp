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

#include <array>
#include <string>
#include <string_view>

#include "covenant/error.hpp"

namespace covenant {

// Integer semantics contract shared by the simulator and the reference
// oracle. Each side implements the arithmetic on its own.
//   kWrap:     two's-complement wrap at the output width
//   kExact:    result is exact (no wrap needed)
//   kAccWrap:  accumulate products into the accumulator input, wrap at the
//              output width
enum class Rounding { kWrap, kExact, kAccWrap };

struct OpSemantics {
  std::string_view name;
  int arity;         // elementwise inputs, or 2/3 for contractions
  Rounding rounding;
  bool contraction;  // sums products over a shared dimension
};

inline constexpr std::array<OpSemantics, 9> kOpTable{{
    {"ADD", 2, Rounding::kWrap, false},
    {"SUB", 2, Rounding::kWrap, false},
    {"MUL", 2, Rounding::kWrap, false},
    {"MAX", 2, Rounding::kExact, false},
    {"MIN", 2, Rounding::kExact, false},
    {"RELU", 1, Rounding::kExact, false},
    {"MAC", 3, Rounding::kAccWrap, false},
    {"MMUL", 2, Rounding::kAccWrap, true},
    {"GEMM", 3, Rounding::kAccWrap, true},
}};

// Operations that are recognized but deliberately unsupported.
inline constexpr std::array<std::string_view, 3> kUnsupportedOps{{"DIV", "SIGMOID", "TANH"}};

inline const OpSemantics& LookupOp(std::string_view name, Stage stage) {
  for (const OpSemantics& op : kOpTable) {
    if (op.name == name) return op;
  }
  for (std::string_view u : kUnsupportedOps) {
    if (u == name) throw Error(stage, "operation " + std::string(name) + " is not supported");
  }
  throw Error(stage, "unknown operation " + std::string(name));
}

}  // namespace covenant
