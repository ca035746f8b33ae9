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

#include "covenant/scheduler.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "covenant/error.hpp"
#include "covenant/layout.hpp"
#include "covenant/semantics.hpp"

namespace covenant {
namespace {

struct LoopInfo {
  std::string name;
  int64_t lower = 0;
  int64_t upper = 0;
  int64_t stride = 1;
  int64_t trip = 0;
};

std::vector<LoopInfo> CollectLoops(const std::vector<Op>& body) {
  std::vector<LoopInfo> loops;
  ForEachOp(body, [&](const Op& op) {
    if (const auto* l = std::get_if<LoopOp>(&op.v)) {
      loops.push_back({l->name, l->lower.Get(), l->upper.Get(), l->stride.Get(), l->trip_count()});
    }
  });
  return loops;
}

std::vector<std::string> SliceLoops(const Slice& s) {
  std::vector<std::string> out;
  for (const IndexExpr& e : s.index) {
    for (const IndexTerm& t : e.terms) {
      if (std::find(out.begin(), out.end(), t.loop) == out.end()) out.push_back(t.loop);
    }
  }
  return out;
}

std::string DtypeList(const std::vector<DataType>& dts) {
  std::string out;
  for (size_t i = 0; i < dts.size(); ++i) out += (i ? "," : "") + dts[i].ToString();
  return out;
}

// Adds the loop stepped by each non-unit capability dimension and returns
// those loops in dimension order.
std::vector<std::string> AddSteps(const Slice& slice, const OperandSpec& spec,
                                  std::map<std::string, int64_t>& steps) {
  std::vector<std::string> order;
  const size_t r = spec.dims.size();
  const size_t n = slice.index.size();
  for (size_t j = 0; j < r; ++j) {
    int64_t d = spec.dims[j];
    if (d == 1) continue;
    if (j + n < r) {
      throw Error(Stage::kSchedule, "operand " + slice.surrogate + " has fewer dimensions than " +
                                        spec.ToString());
    }
    const IndexExpr& e = slice.index[n - r + j];
    if (e.terms.size() != 1 || e.terms[0].coef.symbolic() ||
        e.terms[0].coef.value != 1) {
      throw Error(Stage::kSchedule, "index " + e.ToString() + " of " + slice.surrogate +
                                        " cannot be vectorized by " + spec.ToString());
    }
    auto [it, inserted] = steps.emplace(e.terms[0].loop, d);
    if (!inserted && it->second != d) {
      throw Error(Stage::kSchedule, "conflicting vector widths for loop " + e.terms[0].loop);
    }
    order.push_back(e.terms[0].loop);
  }
  return order;
}

}  // namespace

std::string TilingPermutation::ToString() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [loop, f] : factors) {
    os << (first ? "" : ", ") << loop << ":(";
    for (size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i];
    os << ")";
    first = false;
  }
  os << "}";
  return os.str();
}

std::map<std::string, int64_t> VectorSteps(const Codelet&, const ComputeOp& op) {
  std::map<std::string, int64_t> steps;
  if (!op.capability) return steps;
  const Capability& cap = *op.capability;
  std::vector<std::string> lanes = AddSteps(op.result, cap.output, steps);
  bool contraction = false;
  for (const OpSemantics& s : kOpTable) {
    if (s.name == cap.name) contraction = s.contraction;
  }
  for (size_t i = 0; i < op.operands.size() && i < cap.inputs.size(); ++i) {
    std::vector<std::string> in = AddSteps(op.operands[i], cap.inputs[i], steps);
    if (!contraction && in != lanes) {
      throw Error(Stage::kSchedule, "operand " + op.operands[i].surrogate +
                                        " is not aligned with the result lanes of " +
                                        cap.ToString());
    }
  }
  return steps;
}

Codelet MapCompute(const Codelet& in, const Acg& acg) {
  if (in.stage == CodeletStage::kTemplate) {
    throw Error(Stage::kSchedule, "codelet " + in.name + " must be instantiated before mapping");
  }
  Codelet c = in;
  std::optional<std::string> top;
  for (Surrogate& s : c.surrogates) {
    if (s.kind != SurrogateKind::kInp && s.kind != SurrogateKind::kOut) continue;
    if (!s.loc) {
      if (!top) top = HighestLevelMemory(acg);
      s.loc = *top;
    } else if (!acg.IsMemory(*s.loc)) {
      throw Error(Stage::kSchedule, "surrogate " + s.name + " placed in unknown memory " + *s.loc);
    }
  }
  std::map<std::string, LoopInfo> loops;
  for (const LoopInfo& l : CollectLoops(c.body)) loops[l.name] = l;

  ForEachOpMut(c.body, [&](Op& op) {
    auto* cop = std::get_if<ComputeOp>(&op.v);
    if (!cop) return;
    std::vector<DataType> inputs;
    for (const Slice& s : cop->operands) inputs.push_back(*c.Get(s.surrogate).dtype);
    DataType out = *c.Get(cop->result.surrogate).dtype;
    for (const Support& cand : SupportingNodes(acg, cop->capability_name, inputs)) {
      if (cand.capability.output.dtype != out) continue;
      if (cop->loc && *cop->loc != cand.node) continue;
      ComputeOp trial = *cop;
      trial.capability = cand.capability;
      std::map<std::string, int64_t> steps;
      try {
        steps = VectorSteps(c, trial);
      } catch (const Error&) {
        continue;
      }
      bool ok = true;
      for (const auto& [loop, step] : steps) {
        auto it = loops.find(loop);
        if (it == loops.end() || it->second.stride != 1 ||
            (it->second.upper - it->second.lower) % step != 0) {
          ok = false;
        }
      }
      if (!ok) continue;
      cop->loc = cand.node;
      cop->capability = cand.capability;
      return;
    }
    std::vector<DataType> sig = inputs;
    throw Error(Stage::kSchedule, "unmappable operation " + cop->capability_name +
                                      " for dtype " + DtypeList(sig));
  });
  c.stage = CodeletStage::kMapped;
  return c;
}

namespace {

class Inserter {
 public:
  Inserter(Codelet& c, const Acg& acg) : c_(c), acg_(acg) {
    for (const Surrogate& s : c.surrogates) names_.insert(s.name);
    for (const LoopInfo& l : CollectLoops(c.body)) names_.insert(l.name);
  }

  std::vector<Op> RewriteTop(const std::vector<Op>& body) {
    std::vector<Op> out;
    for (const Op& op : body) {
      hoisted_.clear();
      std::vector<Op> part = Rewrite({op});
      out.insert(out.end(), hoisted_.begin(), hoisted_.end());
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }

 private:
  std::vector<Op> Rewrite(const std::vector<Op>& body) {
    std::vector<Op> out;
    for (const Op& op : body) {
      if (const auto* l = std::get_if<LoopOp>(&op.v)) {
        LoopOp copy = *l;
        copy.body = Rewrite(l->body);
        out.push_back(std::move(copy));
      } else if (const auto* cop = std::get_if<ComputeOp>(&op.v)) {
        Expand(*cop, out);
      } else {
        out.push_back(op);
      }
    }
    return out;
  }

  std::string Fresh(const std::string& base) {
    for (int k = 1;; ++k) {
      std::string name = base + std::to_string(k);
      if (names_.insert(name).second) return name;
    }
  }

  std::string NewLocal(const std::string& base, const Surrogate& like, const std::string& loc) {
    Surrogate s;
    s.name = Fresh(base);
    s.kind = SurrogateKind::kLocal;
    s.shape.assign(like.shape.size(), Dim::Of(1));
    s.dtype = like.dtype;
    s.loc = loc;
    c_.surrogates.push_back(s);
    return s.name;
  }

  static std::vector<Dim> Ones(const Surrogate& s) {
    return std::vector<Dim>(s.shape.size(), Dim::Of(1));
  }

  TransferOp Alloc(const Slice& src, const std::string& dst, const std::string& name,
                   const Surrogate& root, const Slice& anchor) {
    TransferOp t;
    t.source = src;
    t.destination = dst;
    t.result = name;
    t.sizes = Ones(root);
    t.offsets = SliceLoops(anchor);
    return t;
  }

  void Expand(ComputeOp op, std::vector<Op>& out) {
    const std::string node = *op.loc;
    const Slice result = op.result;
    const Surrogate root = c_.Get(result.surrogate);
    const std::string home = *root.loc;
    int acc = -1;
    for (size_t i = 0; i < op.operands.size(); ++i) {
      if (op.operands[i] == result) acc = static_cast<int>(i);
    }
    bool direct = acg_.FindEdge(node, home) && (acc < 0 || acg_.FindEdge(home, node));
    std::optional<std::string> mem;
    Slice local_result = result;
    if (!direct) {
      std::vector<Edge> wpath = ShortestPath(acg_, node, home);
      mem = wpath[0].dst;
      if (!acg_.IsMemory(*mem)) {
        throw Error(Stage::kSchedule, "result of " + node + " does not reach a memory node");
      }
      std::string name = NewLocal(root.name, root, *mem);
      local_result = Slice{name, result.index};
      if (acc >= 0) {
        if (!acg_.FindEdge(*mem, node)) {
          throw Error(Stage::kSchedule,
                      "accumulator in " + *mem + " is not readable by " + node);
        }
        Slice prev = result;
        std::vector<Edge> lpath = ShortestPath(acg_, home, *mem);
        for (size_t j = 0; j < lpath.size(); ++j) {
          std::string dst = lpath[j].dst;
          std::string lname = j + 1 == lpath.size() ? name : NewLocal(root.name, root, dst);
          out.push_back(Alloc(prev, dst, lname, root, result));
          prev = Slice{lname, result.index};
        }
      } else {
        TransferOp t;
        t.source = TypedConstant{*root.dtype, 0};
        t.destination = *mem;
        t.result = name;
        t.sizes = Ones(root);
        t.offsets = SliceLoops(result);
        hoisted_.push_back(std::move(t));
      }
    }
    for (size_t i = 0; i < op.operands.size(); ++i) {
      if (static_cast<int>(i) == acc) {
        op.operands[i] = local_result;
        continue;
      }
      const Slice operand = op.operands[i];
      const Surrogate src = c_.Get(operand.surrogate);
      std::vector<Edge> path = ShortestPath(acg_, *src.loc, node);
      Slice prev = operand;
      for (size_t j = 0; j + 1 < path.size(); ++j) {
        std::string dst = path[j].dst;
        std::string lname = NewLocal(src.name, src, dst);
        out.push_back(Alloc(prev, dst, lname, src, operand));
        prev = Slice{lname, operand.index};
      }
      op.operands[i] = prev;
    }
    op.result = local_result;
    out.push_back(op);
    if (!mem) return;
    std::vector<Edge> bpath = ShortestPath(acg_, *mem, home);
    Slice prev = local_result;
    for (size_t j = 0; j < bpath.size(); ++j) {
      if (j + 1 == bpath.size()) {
        TransferOp t;
        t.source = prev;
        t.destination = result;
        t.sizes = Ones(root);
        t.offsets = SliceLoops(result);
        out.push_back(std::move(t));
      } else {
        std::string lname = NewLocal(root.name, root, bpath[j].dst);
        out.push_back(Alloc(prev, bpath[j].dst, lname, root, result));
        prev = Slice{lname, result.index};
      }
    }
  }

  Codelet& c_;
  const Acg& acg_;
  std::set<std::string> names_;
  std::vector<Op> hoisted_;
};

}  // namespace

Codelet InsertTransfers(const Codelet& in, const Acg& acg) {
  if (in.stage != CodeletStage::kMapped) {
    throw Error(Stage::kSchedule, "transfer insertion requires a mapped codelet");
  }
  Codelet c = in;
  Inserter ins(c, acg);
  c.body = ins.RewriteTop(in.body);
  c.stage = CodeletStage::kScheduled;
  return c;
}

namespace {

std::string NodeOfDestination(const Codelet& c, const TransferOp& t) {
  if (const auto* n = std::get_if<std::string>(&t.destination)) return *n;
  return *c.Get(std::get<Slice>(t.destination).surrogate).loc;
}

DataType DtypeOfTransfer(const Codelet& c, const TransferOp& t) {
  if (const auto* k = std::get_if<TypedConstant>(&t.source)) return k->dtype;
  return *c.Get(std::get<Slice>(t.source).surrogate).dtype;
}

std::vector<const TransferOp*> Transfers(const Codelet& c) {
  std::vector<const TransferOp*> out;
  ForEachOp(c.body, [&](const Op& op) {
    if (const auto* t = std::get_if<TransferOp>(&op.v)) out.push_back(t);
  });
  return out;
}

int64_t OffsetProduct(const TransferOp& t, const TilingPermutation& p) {
  int64_t prod = 1;
  for (const std::string& l : t.offsets) {
    auto it = p.factors.find(l);
    if (it != p.factors.end()) prod *= it->second.back();
  }
  return prod;
}

bool PassesCapacity(const Codelet& c, const Acg& acg, const std::vector<const TransferOp*>& ts,
                    const TilingPermutation& p, bool strict) {
  std::map<std::string, int64_t> storage;
  for (const TransferOp* t : ts) {
    int64_t xfer = DtypeOfTransfer(c, *t).bits * OffsetProduct(*t, p);
    std::string dst = NodeOfDestination(c, *t);
    const MemoryNode* mem = acg.FindMemory(dst);
    if (!mem) return false;
    storage[dst] += xfer;
    if (!t->constant_source()) {
      const MemoryNode& src = acg.Memory(*c.Get(std::get<Slice>(t->source).surrogate).loc);
      if (xfer % (strict ? AddressableElementBits(src) : src.data_width) != 0) return false;
    }
    if (storage[dst] > CapacityBits(*mem)) return false;
  }
  return true;
}

std::vector<int64_t> Divisors(int64_t n) {
  std::vector<int64_t> out;
  for (int64_t d = 1; d <= n; ++d) {
    if (n % d == 0) out.push_back(d);
  }
  return out;
}

std::map<std::string, int64_t> TileElements(const Codelet& c, const TilingPermutation& p,
                                            std::map<std::string, int64_t>* strides) {
  std::map<std::string, int64_t> tile;
  for (const LoopInfo& l : CollectLoops(c.body)) {
    tile[l.name] = p.factors.count(l.name) ? p.inner(l.name) : l.trip;
    if (strides) (*strides)[l.name] = l.stride;
  }
  return tile;
}

}  // namespace

ValidTilingSet ValidTilings(const Codelet& c, const Acg& acg, bool strict) {
  std::vector<LoopInfo> loops;
  std::set<std::string> seen;
  for (const LoopInfo& l : CollectLoops(c.body)) {
    if (seen.insert(l.name).second) loops.push_back(l);
  }
  std::vector<const TransferOp*> ts = Transfers(c);
  ValidTilingSet out;
  TilingPermutation p;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == loops.size()) {
      if (PassesCapacity(c, acg, ts, p, strict)) out.permutations.push_back(p);
      return;
    }
    for (int64_t d : Divisors(loops[i].trip)) {
      p.factors[loops[i].name] = {loops[i].trip / d, d};
      rec(i + 1);
    }
    p.factors.erase(loops[i].name);
  };
  rec(0);
  std::sort(out.permutations.begin(), out.permutations.end());
  return out;
}

std::vector<int64_t> BoxExtents(const Slice& slice, const std::map<std::string, int64_t>& tile,
                                const std::map<std::string, int64_t>& loop_strides) {
  std::vector<int64_t> box;
  for (const IndexExpr& e : slice.index) {
    int64_t ext = 1;
    for (const IndexTerm& t : e.terms) {
      int64_t coef = t.coef.Get();
      if (coef < 0) throw Error(Stage::kSchedule, "negative index coefficient in " + e.ToString());
      auto it = tile.find(t.loop);
      int64_t n = it == tile.end() ? 1 : it->second;
      auto st = loop_strides.find(t.loop);
      int64_t s = st == loop_strides.end() ? 1 : st->second;
      ext += coef * (n - 1) * s;
    }
    box.push_back(ext);
  }
  return box;
}

bool IsContiguousBox(const std::vector<int64_t>& box, const std::vector<int64_t>& extents) {
  if (box.size() != extents.size()) return false;
  bool seen = false;
  for (size_t i = 0; i < box.size(); ++i) {
    if (box[i] < 1 || box[i] > extents[i]) return false;
    if (seen && box[i] != extents[i]) return false;
    if (box[i] > 1) seen = true;
  }
  return true;
}

bool Executable(const Codelet& c, const TilingPermutation& p, const Acg& acg) {
  std::map<std::string, int64_t> strides;
  std::map<std::string, int64_t> tile = TileElements(c, p, &strides);
  bool ok = true;
  ForEachOp(c.body, [&](const Op& op) {
    if (!ok) return;
    if (const auto* cop = std::get_if<ComputeOp>(&op.v)) {
      for (const auto& [loop, step] : VectorSteps(c, *cop)) {
        if (tile.count(loop) && (tile[loop] * strides[loop]) % step != 0) ok = false;
      }
    } else if (const auto* t = std::get_if<TransferOp>(&op.v)) {
      std::vector<const Slice*> globals;
      if (const auto* s = std::get_if<Slice>(&t->source)) globals.push_back(s);
      if (const auto* s = std::get_if<Slice>(&t->destination)) globals.push_back(s);
      for (const Slice* s : globals) {
        const Surrogate& sur = c.Get(s->surrogate);
        if (sur.kind == SurrogateKind::kLocal) continue;
        if (!IsContiguousBox(BoxExtents(*s, tile, strides), sur.Extents())) ok = false;
      }
    }
  });
  if (!ok) return false;
  try {
    return LayoutFits(SplitLoops(c, p), acg);
  } catch (const Error&) {
    return false;
  }
}

int64_t TilingCost(const Codelet& c, const TilingPermutation& p, const Acg& acg) {
  std::map<std::string, int64_t> trips;
  for (const LoopInfo& l : CollectLoops(c.body)) trips[l.name] = l.trip;
  int64_t cost = 0;
  std::function<void(const std::vector<Op>&, int64_t, int64_t)> walk =
      [&](const std::vector<Op>& body, int64_t outer, int64_t total) {
        for (const Op& op : body) {
          if (const auto* l = std::get_if<LoopOp>(&op.v)) {
            int64_t o = p.factors.count(l->name) ? p.factors.at(l->name).front() : 1;
            walk(l->body, outer * o, total * trips[l->name]);
          } else if (const auto* t = std::get_if<TransferOp>(&op.v)) {
            if (t->constant_source()) continue;
            std::string src = *c.Get(std::get<Slice>(t->source).surrogate).loc;
            const Edge* e = acg.FindEdge(src, NodeOfDestination(c, *t));
            int64_t bw = e ? e->bandwidth : 1;
            int64_t bits = DtypeOfTransfer(c, *t).bits * OffsetProduct(*t, p);
            cost += outer * ((bits + bw - 1) / bw);
          } else if (const auto* cop = std::get_if<ComputeOp>(&op.v)) {
            int64_t n = total;
            for (const auto& step : VectorSteps(c, *cop)) n /= step.second;
            cost += n;
          }
        }
      };
  walk(c.body, 1, 1);
  return cost;
}

TilingPermutation SelectTiling(const ValidTilingSet& v, const Codelet& c, const Acg& acg) {
  std::vector<LoopInfo> loops = CollectLoops(c.body);
  const TilingPermutation* best = nullptr;
  int64_t best_cost = 0;
  auto better = [&](const TilingPermutation& a, int64_t ca, const TilingPermutation& b,
                    int64_t cb) {
    if (ca != cb) return ca < cb;
    for (auto it = loops.rbegin(); it != loops.rend(); ++it) {
      int64_t ia = a.inner(it->name), ib = b.inner(it->name);
      if (ia != ib) return ia > ib;
    }
    return a < b;
  };
  for (const TilingPermutation& p : v.permutations) {
    if (!Executable(c, p, acg)) continue;
    int64_t cost = TilingCost(c, p, acg);
    if (!best || better(p, cost, *best, best_cost)) {
      best = &p;
      best_cost = cost;
    }
  }
  if (!best) throw Error(Stage::kSchedule, "no valid tiling for codelet " + c.name);
  return *best;
}

namespace {

struct SplitLoop {
  LoopInfo info;
  int64_t outer = 1;
  int64_t inner = 1;
  int64_t step = 1;
  std::string inner_name;
  bool outer_elided() const { return outer == 1; }
  bool inner_elided() const { return !outer_elided() && inner == 1; }
};

class Splitter {
 public:
  Splitter(Codelet& c, const TilingPermutation& p) : c_(c), p_(p) {
    for (const Surrogate& s : c.surrogates) names_.insert(s.name);
    for (const LoopInfo& l : CollectLoops(c.body)) {
      names_.insert(l.name);
      tile_[l.name] = p.factors.count(l.name) ? p.inner(l.name) : l.trip;
      strides_[l.name] = l.stride;
    }
  }

  void ShapeLocals() {
    std::set<std::string> done;
    auto visit = [&](const Slice& s) {
      Surrogate* sur = c_.Find(s.surrogate);
      if (!sur || sur->kind != SurrogateKind::kLocal || done.count(s.surrogate)) return;
      if (s.index.size() != sur->shape.size()) return;
      done.insert(s.surrogate);
      sur->shape.clear();
      for (int64_t e : BoxExtents(s, tile_, strides_)) sur->shape.push_back(Dim::Of(e));
    };
    ForEachOp(c_.body, [&](const Op& op) {
      if (const auto* cop = std::get_if<ComputeOp>(&op.v)) {
        for (const Slice& s : cop->operands) visit(s);
        visit(cop->result);
      } else if (const auto* t = std::get_if<TransferOp>(&op.v)) {
        if (const auto* s = std::get_if<Slice>(&t->source)) visit(*s);
        if (const auto* s = std::get_if<Slice>(&t->destination)) visit(*s);
      }
    });
  }

  std::vector<Op> SplitTop(const std::vector<Op>& body) {
    std::vector<Op> out;
    for (const Op& op : body) {
      if (const auto* l = std::get_if<LoopOp>(&op.v)) {
        std::vector<Op> nest = SplitNest(*l);
        out.insert(out.end(), nest.begin(), nest.end());
      } else if (const auto* t = std::get_if<TransferOp>(&op.v)) {
        out.push_back(Sized(*t, {}));
      } else {
        out.push_back(op);
      }
    }
    return out;
  }

 private:
  bool IsLocal(const std::string& name) const {
    return c_.Get(name).kind == SurrogateKind::kLocal;
  }

  const SplitLoop* Find(const std::string& loop) const {
    for (const SplitLoop& s : loops_) {
      if (s.info.name == loop) return &s;
    }
    return nullptr;
  }

  IndexExpr OuterIndex(const IndexExpr& e) const {
    IndexExpr r;
    r.constant = e.constant;
    for (const IndexTerm& t : e.terms) {
      const SplitLoop* s = Find(t.loop);
      if (!s) {
        r.terms.push_back(t);
      } else if (s->outer_elided()) {
        r.constant += t.coef.Get() * s->info.lower;
      } else {
        r.terms.push_back(t);
      }
    }
    return r;
  }

  IndexExpr LocalIndex(const IndexExpr& e) const {
    IndexExpr r;
    for (const IndexTerm& t : e.terms) {
      const SplitLoop* s = Find(t.loop);
      if (!s) continue;
      if (s->outer_elided()) {
        r.terms.push_back(t);
        r.constant -= t.coef.Get() * s->info.lower;
      } else if (!s->inner_elided()) {
        r.terms.push_back(IndexTerm{s->inner_name, t.coef});
      }
    }
    return r;
  }

  IndexExpr DirectIndex(const IndexExpr& e) const {
    IndexExpr r;
    r.constant = e.constant;
    for (const IndexTerm& t : e.terms) {
      r.terms.push_back(t);
      const SplitLoop* s = Find(t.loop);
      if (s && !s->outer_elided() && !s->inner_elided()) {
        r.terms.push_back(IndexTerm{s->inner_name, t.coef});
      }
    }
    return r;
  }

  Slice MapSlice(const Slice& s, IndexExpr (Splitter::*fn)(const IndexExpr&) const) const {
    Slice r{s.surrogate, {}};
    for (const IndexExpr& e : s.index) r.index.push_back((this->*fn)(e));
    return r;
  }

  Slice ComputeSlice(const Slice& s) const {
    return MapSlice(s, IsLocal(s.surrogate) ? &Splitter::LocalIndex : &Splitter::DirectIndex);
  }

  Slice TransferSlice(const Slice& s) const {
    if (IsLocal(s.surrogate)) return Slice{s.surrogate, {}};
    return MapSlice(s, &Splitter::OuterIndex);
  }

  TransferOp Sized(const TransferOp& t, const std::vector<Op>&) const {
    TransferOp r = t;
    const Slice* anchor = std::get_if<Slice>(&t.source);
    if (const auto* d = std::get_if<Slice>(&t.destination); d && !IsLocal(d->surrogate)) {
      anchor = d;
    }
    if (anchor) {
      r.sizes.clear();
      for (int64_t e : BoxExtents(*anchor, tile_, strides_)) r.sizes.push_back(Dim::Of(e));
      r.source = TransferSlice(std::get<Slice>(t.source));
      if (const auto* d = std::get_if<Slice>(&t.destination)) r.destination = TransferSlice(*d);
    } else {
      r.sizes = c_.Get(t.result).shape;
    }
    return r;
  }

  std::string Fresh(const std::string& base) {
    for (int k = 1;; ++k) {
      std::string name = base + std::to_string(k);
      if (names_.insert(name).second) return name;
    }
  }

  std::vector<Op> SplitNest(const LoopOp& top) {
    loops_.clear();
    const LoopOp* cur = &top;
    while (true) {
      SplitLoop s;
      s.info = {cur->name, cur->lower.Get(), cur->upper.Get(), cur->stride.Get(), cur->trip_count()};
      auto it = p_.factors.find(cur->name);
      if (it == p_.factors.end()) {
        s.outer = 1;
        s.inner = s.info.trip;
      } else {
        s.outer = it->second.front();
        s.inner = it->second.back();
        if (s.outer * s.inner != s.info.trip) {
          throw Error(Stage::kSchedule, "tiling of loop " + cur->name + " does not cover " +
                                            std::to_string(s.info.trip) + " iterations");
        }
      }
      s.step = s.info.stride;
      loops_.push_back(s);
      if (cur->body.size() == 1 && std::holds_alternative<LoopOp>(cur->body[0].v)) {
        cur = &std::get<LoopOp>(cur->body[0].v);
        continue;
      }
      for (const Op& op : cur->body) {
        if (std::holds_alternative<LoopOp>(op.v)) {
          throw Error(Stage::kSchedule, "tiling requires perfectly nested loops");
        }
      }
      break;
    }
    const std::vector<Op>& inner_body = cur->body;
    for (const Op& op : inner_body) {
      if (const auto* cop = std::get_if<ComputeOp>(&op.v)) {
        for (const auto& [loop, step] : VectorSteps(c_, *cop)) {
          for (SplitLoop& s : loops_) {
            if (s.info.name == loop) s.step = std::max(s.step, step);
          }
        }
      }
    }
    for (SplitLoop& s : loops_) {
      s.inner_name = s.outer_elided() ? s.info.name : Fresh(s.info.name);
    }

    size_t first = inner_body.size(), last = 0;
    for (size_t i = 0; i < inner_body.size(); ++i) {
      if (std::holds_alternative<ComputeOp>(inner_body[i].v)) {
        first = std::min(first, i);
        last = i;
      }
    }
    if (first == inner_body.size()) first = last = 0;
    std::vector<Op> loads, computes, stores;
    for (size_t i = 0; i < inner_body.size(); ++i) {
      const Op& op = inner_body[i];
      if (const auto* t = std::get_if<TransferOp>(&op.v)) {
        (i < first ? loads : stores).push_back(Sized(*t, {}));
      } else if (const auto* cop = std::get_if<ComputeOp>(&op.v)) {
        ComputeOp r = *cop;
        for (Slice& s : r.operands) s = ComputeSlice(s);
        r.result = ComputeSlice(r.result);
        computes.push_back(std::move(r));
      } else {
        computes.push_back(op);
      }
    }
    (void)last;

    std::vector<Op> body = computes;
    for (auto it = loops_.rbegin(); it != loops_.rend(); ++it) {
      if (it->inner_elided()) continue;
      LoopOp l;
      l.name = it->inner_name;
      int64_t lo = it->outer_elided() ? it->info.lower : 0;
      l.lower = Dim::Of(lo);
      l.upper = Dim::Of(lo + it->inner * it->info.stride);
      l.stride = Dim::Of(it->step);
      l.body = std::move(body);
      body = {Op(std::move(l))};
    }
    std::vector<Op> mid = loads;
    mid.insert(mid.end(), body.begin(), body.end());
    mid.insert(mid.end(), stores.begin(), stores.end());
    for (auto it = loops_.rbegin(); it != loops_.rend(); ++it) {
      if (it->outer_elided()) continue;
      LoopOp l;
      l.name = it->info.name;
      l.lower = Dim::Of(it->info.lower);
      l.upper = Dim::Of(it->info.upper);
      l.stride = Dim::Of(it->inner * it->info.stride);
      l.body = std::move(mid);
      mid = {Op(std::move(l))};
    }
    return mid;
  }

  Codelet& c_;
  const TilingPermutation& p_;
  std::set<std::string> names_;
  std::map<std::string, int64_t> tile_;
  std::map<std::string, int64_t> strides_;
  std::vector<SplitLoop> loops_;
};

}  // namespace

Codelet SplitLoops(const Codelet& in, const TilingPermutation& p) {
  if (in.stage != CodeletStage::kScheduled) {
    throw Error(Stage::kSchedule, "loop splitting requires a scheduled codelet");
  }
  Codelet c = in;
  Splitter s(c, p);
  s.ShapeLocals();
  c.body = s.SplitTop(in.body);
  c.stage = CodeletStage::kTiled;
  return c;
}

Codelet Schedule(const Codelet& codelet, const Acg& acg) {
  Codelet scheduled = InsertTransfers(MapCompute(codelet, acg), acg);
  ValidTilingSet v = ValidTilings(scheduled, acg);
  if (v.permutations.empty()) {
    throw Error(Stage::kSchedule, "no valid tiling for codelet " + codelet.name);
  }
  return SplitLoops(scheduled, SelectTiling(v, scheduled, acg));
}

}  // namespace covenant
