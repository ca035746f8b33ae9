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

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "covenant/codelet.hpp"
#include "covenant/error.hpp"

namespace covenant {

int64_t Dim::Get() const {
  if (symbolic()) {
    throw Error(Stage::kInstantiate, "unresolved param '" + param + "'");
  }
  return value;
}

const char* SurrogateKindName(SurrogateKind kind) {
  switch (kind) {
    case SurrogateKind::kInp: return "inp";
    case SurrogateKind::kOut: return "out";
    case SurrogateKind::kParam: return "param";
    case SurrogateKind::kLocal: return "local";
  }
  return "?";
}

const char* StageLabel(CodeletStage stage) {
  switch (stage) {
    case CodeletStage::kTemplate: return "template";
    case CodeletStage::kInstantiated: return "instantiated";
    case CodeletStage::kMapped: return "mapped";
    case CodeletStage::kScheduled: return "scheduled";
    case CodeletStage::kTiled: return "tiled";
    case CodeletStage::kOptimized: return "optimized";
  }
  return "?";
}

std::vector<int64_t> Surrogate::Extents() const {
  std::vector<int64_t> out;
  for (const Dim& d : shape) out.push_back(d.Get());
  return out;
}

int64_t Surrogate::element_count() const {
  int64_t n = 1;
  for (const Dim& d : shape) n *= d.Get();
  return n;
}

bool IndexExpr::Uses(std::string_view loop) const {
  return std::any_of(terms.begin(), terms.end(),
                     [&](const IndexTerm& t) { return t.loop == loop; });
}

std::string IndexExpr::ToString() const {
  std::string s;
  for (const IndexTerm& t : terms) {
    if (!s.empty()) s += "+";
    s += t.loop;
    if (t.coef.symbolic() || t.coef.value != 1) s += "*" + t.coef.ToString();
  }
  if (constant != 0 || s.empty()) {
    if (!s.empty() && constant > 0) s += "+";
    if (!s.empty() && constant < 0) {
      s += "-" + std::to_string(-constant);
    } else {
      s += std::to_string(constant);
    }
  }
  return s;
}

int64_t IndexExpr::Eval(const std::map<std::string, int64_t>& env) const {
  int64_t v = constant;
  for (const IndexTerm& t : terms) {
    auto it = env.find(t.loop);
    if (it == env.end()) {
      throw Error(Stage::kCodegen, "index refers to inactive loop " + t.loop);
    }
    v += t.coef.Get() * it->second;
  }
  return v;
}

std::string Slice::ToString() const {
  std::string s = surrogate;
  for (const IndexExpr& e : index) s += "[" + e.ToString() + "]";
  return s;
}

int64_t LoopOp::trip_count() const {
  int64_t lo = lower.Get(), hi = upper.Get(), st = stride.Get();
  if (hi <= lo) return 0;
  return (hi - lo + st - 1) / st;
}

bool operator==(const LoopOp& a, const LoopOp& b) {
  return a.name == b.name && a.lower == b.lower && a.upper == b.upper &&
         a.stride == b.stride && a.body == b.body;
}

const Surrogate* Codelet::Find(std::string_view n) const {
  for (const auto& s : surrogates) {
    if (s.name == n) return &s;
  }
  return nullptr;
}

Surrogate* Codelet::Find(std::string_view n) {
  for (auto& s : surrogates) {
    if (s.name == n) return &s;
  }
  return nullptr;
}

const Surrogate& Codelet::Get(std::string_view n) const {
  const Surrogate* s = Find(n);
  if (s == nullptr) throw Error(Stage::kSchedule, "unknown surrogate '" + std::string(n) + "'");
  return *s;
}

std::vector<std::string> Codelet::Params() const {
  std::vector<std::string> out;
  for (const auto& s : surrogates) {
    if (s.kind == SurrogateKind::kParam) out.push_back(s.name);
  }
  return out;
}

int64_t SlotsPerElement(const MemoryNode& node, DataType dtype) {
  return (dtype.bits + node.data_width - 1) / node.data_width;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string RenderDims(const std::vector<Dim>& dims) {
  std::string s = "[";
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ", ";
    s += dims[i].ToString();
  }
  return s + "]";
}

std::string RenderLoopHeader(const LoopOp& l) {
  std::string s = "loop " + l.name + "(";
  bool concrete = !l.lower.symbolic() && !l.upper.symbolic() && !l.stride.symbolic();
  if (l.lower == Dim::Of(0) && l.stride == Dim::Of(1)) {
    s += l.upper.ToString();
  } else if (concrete && l.lower.value == 0 && l.upper.value % l.stride.value == 0) {
    s += std::to_string(l.upper.value / l.stride.value) +
         ", stride=" + std::to_string(l.stride.value);
  } else {
    s += l.lower.ToString() + ", " + l.upper.ToString() + ", " + l.stride.ToString();
  }
  return s + ")";
}

void RenderBody(const std::vector<Op>& body, int depth, std::ostringstream& os) {
  std::string pad(2 * depth, ' ');
  for (const Op& op : body) {
    if (const auto* l = std::get_if<LoopOp>(&op.v)) {
      os << pad << RenderLoopHeader(*l) << " {\n";
      RenderBody(l->body, depth + 1, os);
      os << pad << "}\n";
    } else if (const auto* c = std::get_if<ComputeOp>(&op.v)) {
      os << pad << c->result.ToString() << "=compute("
         << (c->loc ? "\"" + *c->loc + "\"" : std::string("null")) << ", \""
         << c->capability_name << "\"";
      for (const Slice& s : c->operands) os << ", " << s.ToString();
      os << ");\n";
    } else {
      const auto& t = std::get<TransferOp>(op.v);
      os << pad;
      if (t.allocating()) os << t.result << "=";
      os << "transfer(";
      if (const auto* k = std::get_if<TypedConstant>(&t.source)) {
        os << k->dtype.ToString() << "(" << k->value << ")";
      } else {
        os << std::get<Slice>(t.source).ToString();
      }
      os << ", ";
      if (t.allocating()) {
        os << '"' << std::get<std::string>(t.destination) << '"';
      } else {
        os << std::get<Slice>(t.destination).ToString();
      }
      os << ", " << RenderDims(t.sizes) << ");\n";
    }
  }
}

}  // namespace

std::string RenderCodelet(const Codelet& codelet) {
  bool has_decls = std::any_of(codelet.surrogates.begin(), codelet.surrogates.end(),
                               [](const Surrogate& s) { return s.kind != SurrogateKind::kLocal; });
  if (!has_decls && codelet.body.empty()) return "cdlt " + codelet.name + " { }\n";
  std::ostringstream os;
  os << "cdlt " << codelet.name << " {\n";
  for (const Surrogate& s : codelet.surrogates) {
    if (s.kind == SurrogateKind::kLocal) continue;
    os << "  " << s.name << "=";
    if (s.kind == SurrogateKind::kParam) {
      os << "param();\n";
      continue;
    }
    os << SurrogateKindName(s.kind) << "(" << RenderDims(s.shape) << ", "
       << (s.dtype ? s.dtype->ToString() : "null") << ", "
       << (s.loc ? "\"" + *s.loc + "\"" : std::string("null")) << ");\n";
  }
  RenderBody(codelet.body, 1, os);
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Layer bindings

LayerBinding LayerBinding::Parse(std::string_view text) {
  LayerBinding out;
  std::string item;
  auto flush = [&]() {
    std::string s;
    for (char c : item) {
      if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    }
    item.clear();
    if (s.empty() || s[0] == '#') return;
    auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw Error(Stage::kParse, "layer binding entry '" + s + "' is not key=value");
    }
    std::string key = s.substr(0, eq), value = s.substr(eq + 1);
    if (key == "codelet") {
      out.codelet = value;
    } else if (key == "dtype") {
      out.dtype = DataType::Parse(value);
    } else if (key.rfind("dtype.", 0) == 0) {
      out.overrides[key.substr(6)] = DataType::Parse(value);
    } else {
      try {
        size_t used = 0;
        int64_t v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        out.params[key] = v;
      } catch (const std::exception&) {
        throw Error(Stage::kParse, "layer binding " + key + " has non-integer value '" +
                                       value + "'");
      }
    }
  };
  bool comment = false;
  for (char c : text) {
    if (c == '\n') {
      comment = false;
      flush();
    } else if (comment) {
      continue;
    } else if (c == '#') {
      comment = true;
    } else if (c == ',') {
      flush();
    } else {
      item += c;
    }
  }
  flush();
  return out;
}

void LayerBinding::Merge(const LayerBinding& other) {
  if (!other.codelet.empty()) codelet = other.codelet;
  for (const auto& [k, v] : other.params) params[k] = v;
  if (other.dtype) dtype = other.dtype;
  for (const auto& [k, v] : other.overrides) overrides[k] = v;
}

std::map<std::string, DataType> LayerBinding::DtypesFor(const Codelet& tmpl) const {
  std::map<std::string, DataType> out;
  for (const Surrogate& s : tmpl.surrogates) {
    if (s.kind != SurrogateKind::kInp && s.kind != SurrogateKind::kOut) continue;
    if (dtype) out[s.name] = *dtype;
  }
  for (const auto& [k, v] : overrides) out[k] = v;
  return out;
}

// ---------------------------------------------------------------------------
// Instantiation

namespace {

Dim Resolve(const Dim& d, const std::map<std::string, int64_t>& bindings) {
  if (!d.symbolic()) return d;
  auto it = bindings.find(d.param);
  if (it == bindings.end()) {
    throw Error(Stage::kInstantiate, "missing binding for param '" + d.param + "'");
  }
  return Dim::Of(it->second);
}

Slice ResolveSlice(Slice s, const std::map<std::string, int64_t>& b) {
  for (IndexExpr& e : s.index) {
    for (IndexTerm& t : e.terms) t.coef = Resolve(t.coef, b);
  }
  return s;
}

void ResolveBody(std::vector<Op>& body, const std::map<std::string, int64_t>& b) {
  for (Op& op : body) {
    if (auto* l = std::get_if<LoopOp>(&op.v)) {
      l->lower = Resolve(l->lower, b);
      l->upper = Resolve(l->upper, b);
      l->stride = Resolve(l->stride, b);
      if (l->stride.value < 1) {
        throw Error(Stage::kInstantiate, "loop " + l->name + " has non-positive stride");
      }
      if (l->upper.value <= l->lower.value) {
        throw Error(Stage::kInstantiate, "loop " + l->name + " has an empty range");
      }
      ResolveBody(l->body, b);
    } else if (auto* c = std::get_if<ComputeOp>(&op.v)) {
      for (Slice& s : c->operands) s = ResolveSlice(s, b);
      c->result = ResolveSlice(c->result, b);
    } else {
      auto& t = std::get<TransferOp>(op.v);
      if (auto* s = std::get_if<Slice>(&t.source)) *s = ResolveSlice(*s, b);
      if (auto* s = std::get_if<Slice>(&t.destination)) *s = ResolveSlice(*s, b);
      for (Dim& d : t.sizes) d = Resolve(d, b);
    }
  }
}

}  // namespace

Codelet Instantiate(const Codelet& tmpl, const std::map<std::string, int64_t>& bindings,
                    const std::map<std::string, DataType>& dtypes) {
  for (const auto& [name, dt] : dtypes) {
    const Surrogate* s = tmpl.Find(name);
    if (s == nullptr) {
      throw Error(Stage::kInstantiate, "dtype given for unknown surrogate '" + name + "'");
    }
    if (s->kind == SurrogateKind::kParam) {
      throw Error(Stage::kInstantiate, "param '" + name + "' cannot carry a dtype");
    }
  }
  Codelet out;
  out.name = tmpl.name;
  for (const Surrogate& s : tmpl.surrogates) {
    if (s.kind == SurrogateKind::kParam) {
      if (!bindings.contains(s.name)) {
        throw Error(Stage::kInstantiate, "missing binding for param '" + s.name + "'");
      }
      continue;
    }
    Surrogate r = s;
    for (Dim& d : r.shape) {
      d = Resolve(d, bindings);
      if (d.value < 1) {
        throw Error(Stage::kInstantiate, "surrogate " + s.name + " has non-positive dimension");
      }
    }
    auto it = dtypes.find(s.name);
    if (it != dtypes.end()) r.dtype = it->second;
    out.surrogates.push_back(r);
  }
  out.body = tmpl.body;
  ResolveBody(out.body, bindings);
  // Local dtypes follow their sources, in program order.
  ForEachOp(out.body, [&](const Op& op) {
    const auto* t = std::get_if<TransferOp>(&op.v);
    if (t == nullptr || !t->allocating()) return;
    Surrogate* local = out.Find(t->result);
    if (const auto* k = std::get_if<TypedConstant>(&t->source)) {
      local->dtype = k->dtype;
    } else {
      const Surrogate* src = out.Find(std::get<Slice>(t->source).surrogate);
      if (src && src->dtype) local->dtype = src->dtype;
    }
  });
  for (const Surrogate& s : out.surrogates) {
    if (!s.dtype) {
      throw Error(Stage::kInstantiate, "missing dtype for surrogate '" + s.name + "'");
    }
  }
  out.stage = tmpl.stage == CodeletStage::kTemplate ? CodeletStage::kInstantiated : tmpl.stage;
  return out;
}

// ---------------------------------------------------------------------------
// Footprint

namespace {

struct Interval {
  int64_t first = -1;
  int64_t last = -1;
};

void Number(const std::vector<Op>& body, int64_t& pos, std::map<std::string, Interval>& live) {
  auto use = [&](const std::string& name) {
    auto it = live.find(name);
    if (it != live.end()) it->second.last = std::max(it->second.last, pos);
  };
  for (const Op& op : body) {
    ++pos;
    if (const auto* l = std::get_if<LoopOp>(&op.v)) {
      Number(l->body, pos, live);
    } else if (const auto* c = std::get_if<ComputeOp>(&op.v)) {
      for (const Slice& s : c->operands) use(s.surrogate);
      use(c->result.surrogate);
    } else {
      const auto& t = std::get<TransferOp>(op.v);
      if (const auto* s = std::get_if<Slice>(&t.source)) use(s->surrogate);
      if (const auto* s = std::get_if<Slice>(&t.destination)) use(s->surrogate);
      if (t.allocating()) live[t.result] = Interval{pos, pos};
    }
  }
}

}  // namespace

std::map<std::string, int64_t> Footprint(const Codelet& codelet, const Acg& acg) {
  std::map<std::string, int64_t> peak;
  for (const auto& m : acg.memories) peak[m.name] = 0;
  std::map<std::string, Interval> live;
  int64_t pos = 0;
  Number(codelet.body, pos, live);
  std::map<std::string, std::vector<std::pair<Interval, int64_t>>> per_node;
  for (const auto& [name, iv] : live) {
    const Surrogate& s = codelet.Get(name);
    if (!s.loc || !acg.IsMemory(*s.loc)) {
      throw Error(Stage::kSchedule, "transfer destination " + s.loc.value_or("?") +
                                        " is not a memory node of " + acg.name);
    }
    const MemoryNode& m = acg.Memory(*s.loc);
    int64_t bits = s.element_count() * SlotsPerElement(m, *s.dtype) * m.data_width;
    per_node[*s.loc].push_back({iv, bits});
  }
  for (const auto& [node, items] : per_node) {
    for (int64_t p = 1; p <= pos; ++p) {
      int64_t total = 0;
      for (const auto& [iv, bits] : items) {
        if (iv.first <= p && p <= iv.last) total += bits;
      }
      peak[node] = std::max(peak[node], total);
    }
  }
  return peak;
}

}  // namespace covenant
