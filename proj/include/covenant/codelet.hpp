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
#include "covenant/dtype.hpp"

namespace covenant {

// Integer literal or, before instantiation, a param name.
struct Dim {
  int64_t value = 0;
  std::string param;

  static Dim Of(int64_t v) { return Dim{v, {}}; }
  static Dim Param(std::string p) { return Dim{0, std::move(p)}; }
  bool symbolic() const { return !param.empty(); }
  std::string ToString() const { return symbolic() ? param : std::to_string(value); }
  // Throws if still symbolic.
  int64_t Get() const;

  friend bool operator==(const Dim&, const Dim&) = default;
};

enum class SurrogateKind { kInp, kOut, kParam, kLocal };

const char* SurrogateKindName(SurrogateKind kind);

struct Surrogate {
  std::string name;
  SurrogateKind kind = SurrogateKind::kInp;
  std::vector<Dim> shape;
  std::optional<DataType> dtype;
  std::optional<std::string> loc;

  std::vector<int64_t> Extents() const;
  int64_t element_count() const;

  friend bool operator==(const Surrogate&, const Surrogate&) = default;
};

// coef * loop, where coef is an integer or (in templates) a param.
struct IndexTerm {
  std::string loop;
  Dim coef = Dim::Of(1);

  friend bool operator==(const IndexTerm&, const IndexTerm&) = default;
};

// Sum of loop terms plus an integer constant, e.g. `n1+2` or `oh*S+kh`.
struct IndexExpr {
  std::vector<IndexTerm> terms;
  int64_t constant = 0;

  static IndexExpr Loop(std::string name) { return IndexExpr{{IndexTerm{std::move(name)}}, 0}; }
  static IndexExpr Const(int64_t c) { return IndexExpr{{}, c}; }
  bool Uses(std::string_view loop) const;
  std::string ToString() const;
  int64_t Eval(const std::map<std::string, int64_t>& env) const;

  friend bool operator==(const IndexExpr&, const IndexExpr&) = default;
};

// Surrogate reference with one index expression per dimension. An empty
// index denotes the origin of the surrogate.
struct Slice {
  std::string surrogate;
  std::vector<IndexExpr> index;

  std::string ToString() const;
  friend bool operator==(const Slice&, const Slice&) = default;
};

struct TypedConstant {
  DataType dtype;
  int64_t value = 0;

  friend bool operator==(const TypedConstant&, const TypedConstant&) = default;
};

struct Op;

struct LoopOp {
  std::string name;
  Dim lower = Dim::Of(0);
  Dim upper;
  Dim stride = Dim::Of(1);
  std::vector<Op> body;

  int64_t trip_count() const;
  friend bool operator==(const LoopOp&, const LoopOp&);
};

struct ComputeOp {
  std::optional<std::string> loc;
  std::string capability_name;
  std::vector<Slice> operands;
  Slice result;
  // Exact capability chosen by compute mapping.
  std::optional<Capability> capability;

  friend bool operator==(const ComputeOp&, const ComputeOp&) = default;
};

struct TransferOp {
  std::variant<Slice, TypedConstant> source;
  // Node name: allocate `result` there. Slice: overwrite in place.
  std::variant<std::string, Slice> destination;
  std::string result;  // new local name for allocating transfers
  std::vector<Dim> sizes;
  // Loop names whose tile factors size this transfer.
  std::vector<std::string> offsets;

  bool allocating() const { return std::holds_alternative<std::string>(destination); }
  bool constant_source() const { return std::holds_alternative<TypedConstant>(source); }
  friend bool operator==(const TransferOp&, const TransferOp&) = default;
};

struct Op {
  std::variant<LoopOp, ComputeOp, TransferOp> v;

  Op(LoopOp l) : v(std::move(l)) {}
  Op(ComputeOp c) : v(std::move(c)) {}
  Op(TransferOp t) : v(std::move(t)) {}

  friend bool operator==(const Op&, const Op&) = default;
};

enum class CodeletStage { kTemplate, kInstantiated, kMapped, kScheduled, kTiled, kOptimized };

const char* StageLabel(CodeletStage stage);

struct Codelet {
  std::string name;
  std::vector<Surrogate> surrogates;  // params, inputs, outputs and locals
  std::vector<Op> body;
  CodeletStage stage = CodeletStage::kTemplate;

  const Surrogate* Find(std::string_view name) const;
  Surrogate* Find(std::string_view name);
  const Surrogate& Get(std::string_view name) const;
  std::vector<std::string> Params() const;

  friend bool operator==(const Codelet&, const Codelet&) = default;
};

Codelet ParseCodelet(std::string_view text);
std::string RenderCodelet(const Codelet& codelet);

// Layer binding file: `codelet=add`, `N=12`, `dtype=i16`, `dtype.c=i32`.
struct LayerBinding {
  std::string codelet;
  std::map<std::string, int64_t> params;
  std::optional<DataType> dtype;
  std::map<std::string, DataType> overrides;

  // Later entries win. Accepts newline or comma separated key=value.
  static LayerBinding Parse(std::string_view text);
  void Merge(const LayerBinding& other);
  // Per-surrogate dtypes for every inp/out of `tmpl`.
  std::map<std::string, DataType> DtypesFor(const Codelet& tmpl) const;
};

Codelet Instantiate(const Codelet& tmpl, const std::map<std::string, int64_t>& bindings,
                    const std::map<std::string, DataType>& dtypes);

// Peak simultaneously-live bits per memory node, using surrogate lifetimes
// scoped to the loop that holds the allocating transfer.
std::map<std::string, int64_t> Footprint(const Codelet& codelet, const Acg& acg);

// Slots a value of `dtype` occupies in `node` (sub-width values are padded
// to a full slot; wide values span several slots).
int64_t SlotsPerElement(const MemoryNode& node, DataType dtype);

// Visits every op in program order, depth first.
template <typename Fn>
void ForEachOp(const std::vector<Op>& body, Fn&& fn) {
  for (const Op& op : body) {
    fn(op);
    if (const auto* loop = std::get_if<LoopOp>(&op.v)) ForEachOp(loop->body, fn);
  }
}

template <typename Fn>
void ForEachOpMut(std::vector<Op>& body, Fn&& fn) {
  for (Op& op : body) {
    fn(op);
    if (auto* loop = std::get_if<LoopOp>(&op.v)) ForEachOpMut(loop->body, fn);
  }
}

}  // namespace covenant
