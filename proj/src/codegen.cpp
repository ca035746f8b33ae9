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

#include "covenant/codegen.hpp"

#include <algorithm>

#include "covenant/error.hpp"
#include "covenant/layout.hpp"
#include "covenant/scheduler.hpp"

namespace covenant {
namespace {

struct Site {
  int64_t address = 0;  // slot address of the slice origin
  int64_t row_stride = 0;  // slots between rows of the innermost two dims
};

class Lowerer {
 public:
  Lowerer(const Codelet& c, const Acg& acg, const MacroRegistry& reg)
      : c_(c), acg_(acg), reg_(reg), layout_(PlanLayout(c, acg)) {}

  MnemonicStream Run() {
    Walk(c_.body);
    return std::move(out_);
  }

 private:
  void Walk(const std::vector<Op>& body) {
    for (const Op& op : body) {
      if (const auto* l = std::get_if<LoopOp>(&op.v)) {
        int64_t lo = l->lower.Get(), hi = l->upper.Get(), st = l->stride.Get();
        for (int64_t v = lo; v < hi; v += st) {
          env_[l->name] = v;
          Walk(l->body);
        }
        env_.erase(l->name);
      } else if (const auto* cop = std::get_if<ComputeOp>(&op.v)) {
        Compute(*cop);
      } else {
        Transfer(std::get<TransferOp>(op.v));
      }
    }
  }

  Site Locate(const Slice& s) const {
    const Surrogate& sur = c_.Get(s.surrogate);
    const Placement& pl = layout_.Of(s.surrogate);
    const MemoryNode& mem = acg_.Memory(pl.node);
    int64_t spe = SlotsPerElement(mem, *sur.dtype);
    std::vector<int64_t> ext = sur.Extents();
    int64_t linear = 0;
    if (!s.index.empty()) {
      if (s.index.size() != ext.size()) {
        throw Error(Stage::kCodegen, "rank mismatch in " + s.ToString());
      }
      for (size_t d = 0; d < ext.size(); ++d) {
        int64_t v = s.index[d].Eval(env_);
        if (v < 0 || v >= ext[d]) {
          throw Error(Stage::kCodegen, "index " + std::to_string(v) + " out of bounds in " +
                                           s.ToString());
        }
        linear = linear * ext[d] + v;
      }
    }
    Site site;
    site.address = pl.base_slot + linear * spe;
    site.row_stride = (ext.empty() ? 1 : ext.back()) * spe;
    return site;
  }

  int64_t EnumIndex(const FieldDef& f, const std::string& v) const {
    auto it = std::find(f.enum_values.begin(), f.enum_values.end(), v);
    if (it == f.enum_values.end()) {
      throw Error(Stage::kCodegen, "'" + v + "' is not a value of field " + f.name);
    }
    return it - f.enum_values.begin();
  }

  template <typename Resolve>
  void Expand(const MacroMnemonic& macro, Resolve&& resolve) {
    for (const MacroStep& step : macro.steps) {
      const MnemonicDef& def = *acg_.FindMnemonic(step.mnemonic);
      std::vector<int64_t> values(def.fields.size(), 0);
      for (const auto& [name, src] : step.fields) {
        const FieldDef& f = def.fields[def.FieldIndex(name)];
        int64_t v = 0;
        switch (src.kind) {
          case FieldSource::Kind::kInt:
            v = src.value;
            break;
          case FieldSource::Kind::kEnum:
            v = EnumIndex(f, src.text);
            break;
          default:
            v = resolve(src, f);
        }
        values[def.FieldIndex(name)] = v;
      }
      out_.push_back(MakeMnemonic(acg_, def.name, std::move(values)));
    }
  }

  void Compute(const ComputeOp& op) {
    if (!op.capability || !op.loc) {
      throw Error(Stage::kCodegen, "compute " + op.capability_name + " is not mapped");
    }
    const MacroMnemonic* macro = reg_.FindCompute(*op.capability, *op.loc);
    if (!macro) {
      throw Error(Stage::kCodegen, "no macro-mnemonic for compute " + op.capability->ToString() +
                                       " on " + *op.loc);
    }
    std::vector<Site> sites;
    for (const Slice& s : op.operands) sites.push_back(Locate(s));
    Site res = Locate(op.result);
    std::string dtype = c_.Get(op.result.surrogate).dtype->ToString();
    Expand(*macro, [&](const FieldSource& src, const FieldDef& f) -> int64_t {
      switch (src.kind) {
        case FieldSource::Kind::kOperand:
        case FieldSource::Kind::kStride: {
          if (src.kind == FieldSource::Kind::kStride && src.value == -1) return res.row_stride;
          if (src.value < 0 || src.value >= static_cast<int64_t>(sites.size())) {
            throw Error(Stage::kCodegen, "operand index out of range in macro for " + *op.loc);
          }
          const Site& s = sites[src.value];
          return src.kind == FieldSource::Kind::kOperand ? s.address : s.row_stride;
        }
        case FieldSource::Kind::kResult:
          return res.address;
        case FieldSource::Kind::kDtype:
          return EnumIndex(f, dtype);
        default:
          throw Error(Stage::kCodegen, "field source not valid for compute");
      }
    });
  }

  void Transfer(const TransferOp& t) {
    if (t.constant_source()) return;
    const Slice& src = std::get<Slice>(t.source);
    const Surrogate& ssur = c_.Get(src.surrogate);
    std::string from = *ssur.loc;
    Site s = Locate(src);
    Site d;
    std::string to;
    if (t.allocating()) {
      to = std::get<std::string>(t.destination);
      d = Locate(Slice{t.result, {}});
    } else {
      const Slice& dst = std::get<Slice>(t.destination);
      to = *c_.Get(dst.surrogate).loc;
      d = Locate(dst);
      CheckBox(t, dst);
    }
    CheckBox(t, src);
    const Edge* edge = acg_.FindEdge(from, to);
    if (!edge) throw Error(Stage::kCodegen, "no edge " + from + " -> " + to);
    const MacroMnemonic* macro = reg_.FindTransfer(from, to);
    if (!macro) throw Error(Stage::kCodegen, "no macro-mnemonic for transfer " + from + " -> " + to);
    DataType dt = *ssur.dtype;
    if (edge->bandwidth % dt.bits != 0) {
      throw Error(Stage::kCodegen, "bandwidth of edge " + from + " -> " + to +
                                       " is not a multiple of " + dt.ToString());
    }
    int64_t n = 1;
    for (const Dim& dim : t.sizes) n *= dim.Get();
    int64_t per = edge->bandwidth / dt.bits;
    int64_t sspe = SlotsPerElement(acg_.Memory(from), dt);
    int64_t dspe = SlotsPerElement(acg_.Memory(to), dt);
    for (int64_t k = 0; k * per < n; ++k) {
      int64_t len = std::min(per, n - k * per);
      Expand(*macro, [&](const FieldSource& fs, const FieldDef& f) -> int64_t {
        switch (fs.kind) {
          case FieldSource::Kind::kSrc:
            return s.address + k * per * sspe;
          case FieldSource::Kind::kDst:
            return d.address + k * per * dspe;
          case FieldSource::Kind::kLen:
            return len;
          case FieldSource::Kind::kDtype:
            return EnumIndex(f, dt.ToString());
          default:
            throw Error(Stage::kCodegen, "field source not valid for transfer");
        }
      });
    }
  }

  void CheckBox(const TransferOp& t, const Slice& s) const {
    const Surrogate& sur = c_.Get(s.surrogate);
    std::vector<int64_t> box;
    for (const Dim& d : t.sizes) box.push_back(d.Get());
    std::vector<int64_t> ext = sur.Extents();
    if (sur.kind == SurrogateKind::kLocal && s.index.empty()) {
      if (box != ext) throw Error(Stage::kCodegen, "transfer size differs from local " + sur.name);
      return;
    }
    if (!IsContiguousBox(box, ext)) {
      throw Error(Stage::kCodegen, "transfer box of " + sur.name + " is not contiguous");
    }
  }

  const Codelet& c_;
  const Acg& acg_;
  const MacroRegistry& reg_;
  Layout layout_;
  std::map<std::string, int64_t> env_;
  MnemonicStream out_;
};

}  // namespace

MnemonicStream Lower(const Codelet& codelet, const Acg& acg, const MacroRegistry& registry) {
  if (codelet.stage != CodeletStage::kTiled && codelet.stage != CodeletStage::kOptimized) {
    throw Error(Stage::kCodegen, "lowering requires a tiled codelet");
  }
  return Lowerer(codelet, acg, registry).Run();
}

}  // namespace covenant
