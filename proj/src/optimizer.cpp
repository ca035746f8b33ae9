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

#include "covenant/optimizer.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "covenant/error.hpp"
#include "covenant/layout.hpp"
#include "covenant/scheduler.hpp"

namespace covenant {
namespace {

void ShiftSlice(Slice& s, const std::string& loop, int64_t by) {
  for (IndexExpr& e : s.index) {
    for (const IndexTerm& t : e.terms) {
      if (t.loop == loop) e.constant += t.coef.Get() * by;
    }
  }
}

bool Adjacent(const Codelet& c, const ComputeOp& op, const std::string& node, const Acg& acg) {
  for (const Slice& s : op.operands) {
    if (!acg.FindEdge(*c.Get(s.surrogate).loc, node)) return false;
  }
  return acg.FindEdge(node, *c.Get(op.result.surrogate).loc) != nullptr;
}

// Width of `cap` along `loop` when it vectorizes only that loop, else -1.
int64_t WidthAlong(const Codelet& c, ComputeOp op, const Capability& cap, const std::string& loop) {
  op.capability = cap;
  std::map<std::string, int64_t> steps;
  try {
    steps = VectorSteps(c, op);
  } catch (const Error&) {
    return -1;
  }
  int64_t width = 1;
  for (const auto& [l, s] : steps) {
    if (l != loop) return -1;
    width = s;
  }
  return width;
}

void ParallelizeBody(const Codelet& c, std::vector<Op>& body, const Acg& acg) {
  for (Op& op : body) {
    auto* loop = std::get_if<LoopOp>(&op.v);
    if (!loop) continue;
    ParallelizeBody(c, loop->body, acg);
    if (loop->body.size() != 1) continue;
    const auto* cop = std::get_if<ComputeOp>(&loop->body[0].v);
    if (!cop || !cop->capability || !cop->loc) continue;
    int64_t current = WidthAlong(c, *cop, *cop->capability, loop->name);
    if (current < 1 || loop->stride.Get() != current) continue;
    int64_t extent = loop->upper.Get() - loop->lower.Get();
    std::vector<DataType> inputs;
    for (const Slice& s : cop->operands) inputs.push_back(*c.Get(s.surrogate).dtype);
    DataType out = *c.Get(cop->result.surrogate).dtype;
    std::vector<std::pair<Support, int64_t>> chosen;
    int64_t sum = 0;
    bool apply = false;
    for (const Support& cand : SupportingNodes(acg, cop->capability_name, inputs)) {
      if (cand.capability.output.dtype != out) continue;
      int64_t w = WidthAlong(c, *cop, cand.capability, loop->name);
      if (w < 1 || !Adjacent(c, *cop, cand.node, acg)) continue;
      chosen.emplace_back(cand, w);
      sum += w;
      if (extent % sum == 0 && sum > current) {
        apply = true;
        break;
      }
    }
    if (!apply) continue;
    ComputeOp base = *cop;
    loop->body.clear();
    int64_t offset = 0;
    for (const auto& [support, w] : chosen) {
      ComputeOp part = base;
      part.loc = support.node;
      part.capability = support.capability;
      for (Slice& s : part.operands) ShiftSlice(s, loop->name, offset);
      ShiftSlice(part.result, loop->name, offset);
      loop->body.push_back(std::move(part));
      offset += w;
    }
    loop->stride = Dim::Of(sum);
  }
}

}  // namespace

Codelet Parallelize(const Codelet& in, const Acg& acg) {
  if (in.stage == CodeletStage::kTemplate || in.stage == CodeletStage::kInstantiated) {
    throw Error(Stage::kOptimize, "parallelize requires a mapped codelet");
  }
  Codelet c = in;
  ParallelizeBody(in, c.body, acg);
  if (c.stage == CodeletStage::kTiled) c.stage = CodeletStage::kOptimized;
  return c;
}

namespace {

struct Growth {
  // Per local: dims indexed by the unrolled loop and their coefficient.
  std::map<std::string, std::vector<std::pair<size_t, int64_t>>> dims;
};

std::vector<std::pair<size_t, int64_t>> DimsUsing(const Slice& s, const std::string& loop) {
  std::vector<std::pair<size_t, int64_t>> out;
  for (size_t d = 0; d < s.index.size(); ++d) {
    for (const IndexTerm& t : s.index[d].terms) {
      if (t.loop == loop) out.emplace_back(d, t.coef.Get());
    }
  }
  return out;
}

bool IsLocal(const Codelet& c, const std::string& name) {
  return c.Get(name).kind == SurrogateKind::kLocal;
}

Growth MapLocals(const Codelet& c, const LoopOp& loop) {
  Growth g;
  for (const Op& op : loop.body) {
    const auto* t = std::get_if<TransferOp>(&op.v);
    if (!t || t->constant_source()) continue;
    const Slice& src = std::get<Slice>(t->source);
    if (t->allocating()) {
      if (IsLocal(c, src.surrogate)) {
        if (g.dims.count(src.surrogate)) g.dims[t->result] = g.dims[src.surrogate];
      } else {
        g.dims[t->result] = DimsUsing(src, loop.name);
      }
    } else {
      const Slice& dst = std::get<Slice>(t->destination);
      if (IsLocal(c, src.surrogate) && !IsLocal(c, dst.surrogate)) {
        g.dims[src.surrogate] = DimsUsing(dst, loop.name);
      }
    }
  }
  for (auto it = g.dims.begin(); it != g.dims.end();) {
    it = it->second.empty() ? g.dims.erase(it) : std::next(it);
  }
  return g;
}

void GrowDims(std::vector<Dim>& dims, const std::vector<std::pair<size_t, int64_t>>& which,
              int64_t by) {
  for (const auto& [d, coef] : which) {
    if (d < dims.size()) dims[d] = Dim::Of(dims[d].Get() + coef * by);
  }
}

void ShiftBlock(const Codelet& c, std::vector<Op>& block, const Growth& g, const std::string& loop,
                int64_t by) {
  ForEachOpMut(block, [&](Op& op) {
    auto* cop = std::get_if<ComputeOp>(&op.v);
    if (!cop) return;
    auto shift = [&](Slice& s) {
      auto it = g.dims.find(s.surrogate);
      if (it != g.dims.end()) {
        for (const auto& [d, coef] : it->second) {
          if (d < s.index.size()) s.index[d].constant += coef * by;
        }
      } else if (!IsLocal(c, s.surrogate)) {
        ShiftSlice(s, loop, by);
      }
    };
    for (Slice& s : cop->operands) shift(s);
    shift(cop->result);
  });
}

int64_t TransferBits(const Codelet& c, const TransferOp& t) {
  int64_t n = 1;
  for (const Dim& d : t.sizes) n *= d.Get();
  const Slice& src = std::get<Slice>(t.source);
  return n * c.Get(src.surrogate).dtype->bits;
}

std::string TransferDst(const Codelet& c, const TransferOp& t) {
  if (const auto* n = std::get_if<std::string>(&t.destination)) return *n;
  return *c.Get(std::get<Slice>(t.destination).surrogate).loc;
}

bool Scales(const Codelet& c, const TransferOp& t, const Growth& g) {
  if (t.constant_source()) return false;
  if (t.allocating()) return g.dims.count(t.result) > 0;
  return g.dims.count(std::get<Slice>(t.source).surrogate) > 0;
}

// Applies factor `u` to the loop at `path` inside `c`; returns false when the
// result is not executable.
bool TryUnroll(Codelet& c, LoopOp& loop, const Growth& g, int64_t u, const Acg& acg) {
  const int64_t step = loop.stride.Get();
  const int64_t grow = (u - 1) * step;
  std::vector<Op> loads, block, stores;
  bool seen_block = false;
  for (const Op& op : loop.body) {
    if (std::holds_alternative<TransferOp>(op.v)) {
      (seen_block ? stores : loads).push_back(op);
    } else {
      seen_block = true;
      block.push_back(op);
    }
  }
  for (Surrogate& s : c.surrogates) {
    auto it = g.dims.find(s.name);
    if (it != g.dims.end()) GrowDims(s.shape, it->second, grow);
  }
  auto resize = [&](std::vector<Op>& ops) {
    for (Op& op : ops) {
      auto* t = std::get_if<TransferOp>(&op.v);
      if (!t) continue;
      std::string local = t->allocating() ? t->result
                          : t->constant_source() ? std::string()
                                                 : std::get<Slice>(t->source).surrogate;
      auto it = g.dims.find(local);
      if (it != g.dims.end()) GrowDims(t->sizes, it->second, grow);
    }
  };
  resize(loads);
  resize(stores);
  resize(c.body);
  std::vector<Op> body = loads;
  for (int64_t k = 0; k < u; ++k) {
    std::vector<Op> copy = block;
    ShiftBlock(c, copy, g, loop.name, k * step);
    body.insert(body.end(), copy.begin(), copy.end());
  }
  body.insert(body.end(), stores.begin(), stores.end());
  loop.body = std::move(body);
  loop.stride = Dim::Of(step * u);
  for (const Op& op : loop.body) {
    const auto* t = std::get_if<TransferOp>(&op.v);
    if (!t || t->constant_source()) continue;
    for (const Slice* s : {std::get_if<Slice>(&t->source), std::get_if<Slice>(&t->destination)}) {
      if (!s || IsLocal(c, s->surrogate)) continue;
      std::vector<int64_t> box;
      for (const Dim& d : t->sizes) box.push_back(d.Get());
      if (!IsContiguousBox(box, c.Get(s->surrogate).Extents())) return false;
    }
  }
  return LayoutFits(c, acg);
}

LoopOp& LoopAt(std::vector<Op>& body, const std::vector<size_t>& path) {
  LoopOp* l = &std::get<LoopOp>(body[path[0]].v);
  for (size_t i = 1; i < path.size(); ++i) l = &std::get<LoopOp>(l->body[path[i]].v);
  return *l;
}

void CollectTargets(const std::vector<Op>& body, std::vector<size_t>& path,
                    std::vector<std::vector<size_t>>& out) {
  for (size_t i = 0; i < body.size(); ++i) {
    const auto* l = std::get_if<LoopOp>(&body[i].v);
    if (!l) continue;
    path.push_back(i);
    bool direct = false, nested = false;
    for (const Op& inner : l->body) direct |= std::holds_alternative<TransferOp>(inner.v);
    ForEachOp(l->body, [&](const Op& o) {
      if (const auto* il = std::get_if<LoopOp>(&o.v)) {
        for (const Op& x : il->body) nested |= std::holds_alternative<TransferOp>(x.v);
      }
    });
    if (direct && !nested) {
      out.push_back(path);
    } else {
      CollectTargets(l->body, path, out);
    }
    path.pop_back();
  }
}

}  // namespace

Codelet UnrollLoops(const Codelet& in, const Acg& acg) {
  if (in.stage != CodeletStage::kTiled && in.stage != CodeletStage::kOptimized) {
    throw Error(Stage::kOptimize, "unroll requires a tiled codelet");
  }
  Codelet c = in;
  std::vector<std::vector<size_t>> targets;
  std::vector<size_t> path;
  CollectTargets(c.body, path, targets);
  for (const std::vector<size_t>& at : targets) {
    LoopOp* loop = &LoopAt(c.body, at);
    Growth g = MapLocals(c, *loop);
    int64_t limit = loop->trip_count();
    bool any = false;
    for (const Op& op : loop->body) {
      const auto* t = std::get_if<TransferOp>(&op.v);
      if (!t || !Scales(c, *t, g)) continue;
      const Slice& src = std::get<Slice>(t->source);
      const Edge* e = acg.FindEdge(*c.Get(src.surrogate).loc, TransferDst(c, *t));
      if (!e) continue;
      limit = std::min(limit, e->bandwidth / TransferBits(c, *t));
      any = true;
    }
    if (!any) continue;
    int64_t trips = loop->trip_count();
    for (int64_t u = limit; u > 1; --u) {
      if (trips % u != 0) continue;
      Codelet trial = c;
      if (TryUnroll(trial, LoopAt(trial.body, at), g, u, acg)) {
        c = std::move(trial);
        break;
      }
    }
  }
  c.stage = CodeletStage::kOptimized;
  return c;
}

std::vector<Access> AccessesOf(const Mnemonic& m, const Acg& acg) {
  const MnemonicDef* def = acg.FindMnemonic(m.name);
  if (!def) throw Error(Stage::kOptimize, "unknown mnemonic " + m.name);
  if (m.resource.empty()) {
    throw Error(Stage::kOptimize, "mnemonic " + m.name + " has no resource annotation");
  }
  std::vector<Access> out;
  for (size_t i = 0; i < def->fields.size(); ++i) {
    const FieldDef& f = def->fields[i];
    if (!f.access) continue;
    Access a;
    a.node = f.access->node;
    a.write = f.access->mode == FieldAccess::Mode::kWrite;
    if (f.kind == FieldDef::Kind::kEnum) {
      a.unknown = true;
    } else {
      int64_t span = 1;
      for (const SpanTerm& t : f.access->span) {
        if (const auto* v = std::get_if<int64_t>(&t)) {
          span *= *v;
        } else {
          span *= m.values.at(def->FieldIndex(std::get<std::string>(t)));
        }
      }
      a.lo = m.values.at(i);
      a.hi = a.lo + span;
    }
    out.push_back(a);
  }
  if (out.empty()) {
    throw Error(Stage::kOptimize, "mnemonic " + m.name + " has no read/write annotation");
  }
  return out;
}

namespace {

bool AnyUnknown(const std::vector<Access>& v) {
  return std::any_of(v.begin(), v.end(), [](const Access& x) { return x.unknown; });
}

bool Conflict(const Mnemonic& a, const std::vector<Access>& xa, const Mnemonic& b,
              const std::vector<Access>& xb) {
  if (a.resource == b.resource && (AnyUnknown(xa) || AnyUnknown(xb))) return true;
  for (const Access& p : xa) {
    for (const Access& q : xb) {
      if (p.node != q.node || (!p.write && !q.write)) continue;
      if (p.unknown || q.unknown) return true;
      if (p.lo < q.hi && q.lo < p.hi) return true;
    }
  }
  return false;
}

// Hoisting candidates considered past the packet head.
constexpr size_t kLookahead = 64;

}  // namespace

bool Dependent(const Mnemonic& a, const Mnemonic& b, const Acg& acg) {
  return Conflict(a, AccessesOf(a, acg), b, AccessesOf(b, acg));
}

std::vector<Packet> PackMnemonics(const MnemonicStream& stream, const Acg& acg) {
  if (!acg.vliw_slots) throw Error(Stage::kOptimize, "ACG " + acg.name + " is not a VLIW machine");
  const size_t slots = static_cast<size_t>(*acg.vliw_slots);
  std::vector<std::vector<Access>> acc;
  acc.reserve(stream.size());
  for (const Mnemonic& m : stream) acc.push_back(AccessesOf(m, acg));
  auto dep = [&](size_t x, size_t y) { return Conflict(stream[x], acc[x], stream[y], acc[y]); };
  std::vector<bool> packed(stream.size(), false);
  std::vector<Packet> out;
  for (size_t i = 0; i < stream.size(); ++i) {
    if (packed[i]) continue;
    Packet p;
    std::vector<size_t> members{i};
    std::vector<size_t> skipped;
    p.slots.push_back(stream[i]);
    p.resources.insert(stream[i].resource);
    packed[i] = true;
    const size_t end = std::min(stream.size(), i + 1 + kLookahead);
    for (size_t j = i + 1; j < end && p.slots.size() < slots; ++j) {
      if (packed[j]) continue;
      bool ok = !p.resources.count(stream[j].resource);
      for (size_t k : skipped) ok = ok && !dep(k, j);
      for (size_t k : members) ok = ok && !dep(k, j);
      if (!ok) {
        skipped.push_back(j);
        continue;
      }
      members.push_back(j);
      p.slots.push_back(stream[j]);
      p.resources.insert(stream[j].resource);
      packed[j] = true;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace covenant
