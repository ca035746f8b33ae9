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

#include "covenant/simulator.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include <json.hpp>

#include "covenant/error.hpp"
#include "covenant/lexer.hpp"
#include "covenant/semantics.hpp"

namespace covenant {

MemoryImage::MemoryImage(const MemoryNode& node)
    : node_(node.name),
      data_width_(node.data_width),
      slots_(node.slot_count()),
      bytes_(static_cast<size_t>((CapacityBits(node) + 7) / 8), 0) {}

int64_t MemoryImage::SlotsPer(DataType dtype) const {
  return (dtype.bits + data_width_ - 1) / data_width_;
}

void MemoryImage::Check(int64_t slot, DataType dtype) const {
  if (slot < 0 || slot + SlotsPer(dtype) > slots_) {
    throw Error(Stage::kSimulate, "address " + std::to_string(slot) + " out of bounds in " + node_);
  }
}

int64_t MemoryImage::Read(int64_t slot, DataType dtype) const {
  Check(slot, dtype);
  uint64_t raw = 0;
  int64_t base = slot * data_width_;
  for (int i = 0; i < dtype.bits; ++i) {
    int64_t bit = base + i;
    if ((bytes_[bit / 8] >> (bit % 8)) & 1) raw |= uint64_t{1} << i;
  }
  return WrapTo(dtype, static_cast<int64_t>(raw));
}

void MemoryImage::Write(int64_t slot, DataType dtype, int64_t value) {
  Check(slot, dtype);
  uint64_t raw = static_cast<uint64_t>(value);
  int64_t base = slot * data_width_;
  int64_t span = SlotsPer(dtype) * data_width_;
  for (int64_t i = 0; i < span; ++i) {
    int64_t bit = base + i;
    uint8_t mask = static_cast<uint8_t>(1u << (bit % 8));
    bool on = i < dtype.bits && ((raw >> i) & 1);
    if (on) {
      bytes_[bit / 8] |= mask;
    } else {
      bytes_[bit / 8] &= static_cast<uint8_t>(~mask);
    }
  }
}

Images BlankImages(const Acg& acg) {
  Images out;
  for (const MemoryNode& m : acg.memories) out.emplace(m.name, MemoryImage(m));
  return out;
}

namespace {

class SemParser {
 public:
  SemParser(std::string_view text, const Acg& acg) : ts_(text), acg_(acg) {}

  SemanticSet Parse() {
    SemanticSet set;
    while (!ts_.AtEnd()) {
      ts_.ExpectKeyword("bind");
      const Token& at = ts_.Peek();
      Binding b;
      b.mnemonic = ts_.ExpectIdent("mnemonic name");
      def_ = acg_.FindMnemonic(b.mnemonic);
      if (!def_) ts_.FailAt(at, "unknown mnemonic " + b.mnemonic);
      if (ts_.AcceptIdent("when")) {
        do {
          const Token& ft = ts_.Peek();
          std::string f = ts_.ExpectIdent("field name");
          ts_.ExpectPunct("=");
          std::string v = ts_.ExpectIdent("enum value");
          int idx = def_->FieldIndex(f);
          if (idx < 0 || def_->fields[idx].kind != FieldDef::Kind::kEnum) {
            ts_.FailAt(ft, "'" + f + "' is not an enumerated field of " + b.mnemonic);
          }
          const auto& vals = def_->fields[idx].enum_values;
          if (std::find(vals.begin(), vals.end(), v) == vals.end()) {
            ts_.FailAt(ft, "'" + v + "' is not a value of field " + f);
          }
          b.when.emplace_back(f, v);
        } while (ts_.AcceptPunct(","));
      }
      for (const Binding& o : set.bindings) {
        if (o.mnemonic == b.mnemonic && o.when == b.when) {
          ts_.FailAt(at, "duplicate binding for " + b.mnemonic);
        }
      }
      ts_.ExpectPunct("{");
      while (!ts_.AcceptPunct("}")) {
        b.effects.push_back(ParseEffect());
        ts_.ExpectPunct(";");
      }
      set.bindings.push_back(std::move(b));
    }
    for (const MnemonicDef& d : acg_.mnemonics) {
      bool bound = std::any_of(set.bindings.begin(), set.bindings.end(),
                               [&](const Binding& b) { return b.mnemonic == d.name; });
      if (!bound) throw Error(Stage::kParse, "mnemonic " + d.name + " has no binding");
    }
    return set;
  }

 private:
  std::string Memory() {
    const Token& t = ts_.Peek();
    std::string n = ts_.ExpectIdent("memory node");
    if (!acg_.IsMemory(n)) ts_.FailAt(t, "unknown memory node " + n);
    return n;
  }

  Arg ParseArg() {
    const Token& t = ts_.Peek();
    if (t.kind == TokenKind::kInt) return Arg{ts_.ExpectInt()};
    std::string f = ts_.ExpectIdent("field name or integer");
    if (def_->FieldIndex(f) < 0) ts_.FailAt(t, "mnemonic " + def_->name + " has no field " + f);
    return Arg{f};
  }

  Arg ParseDtype() {
    const Token& t = ts_.Peek();
    std::string f = ts_.ExpectIdent("data type or field name");
    if (def_->FieldIndex(f) >= 0) return Arg{f};
    if (!IsDataTypeName(f)) ts_.FailAt(t, "unknown data type " + f);
    return Arg{f};
  }

  Location ParseLocation() {
    Location loc;
    if (ts_.AcceptIdent("queue")) {
      loc.queue = true;
      return loc;
    }
    loc.node = Memory();
    ts_.ExpectPunct(":");
    loc.address = ParseArg();
    if (ts_.AcceptPunct(":")) loc.stride = ParseArg();
    return loc;
  }

  Effect ParseEffect() {
    const Token& at = ts_.Peek();
    std::string verb = ts_.ExpectIdent("effect");
    Effect e;
    ts_.ExpectPunct("(");
    if (verb == "move") {
      e.verb = Effect::Verb::kMove;
      e.node = Memory();
      ts_.ExpectPunct("->");
      e.dst = Memory();
      if (!acg_.FindEdge(e.node, e.dst)) ts_.FailAt(at, "no edge " + e.node + " -> " + e.dst);
      ts_.ExpectPunct(",");
      e.src = ParseArg();
      ts_.ExpectPunct(",");
      e.to = ParseArg();
      ts_.ExpectPunct(",");
      e.count = ParseArg();
      ts_.ExpectPunct(",");
      e.dtype = ParseDtype();
    } else if (verb == "load" || verb == "store") {
      e.verb = verb == "load" ? Effect::Verb::kLoad : Effect::Verb::kStore;
      e.node = Memory();
      ts_.ExpectPunct(",");
      e.address = ParseArg();
      ts_.ExpectPunct(",");
      e.count = ParseArg();
      ts_.ExpectPunct(",");
      e.dtype = ParseDtype();
    } else if (verb == "apply") {
      e.verb = Effect::Verb::kApply;
      const Token& nt = ts_.Peek();
      e.node = ts_.ExpectIdent("compute node");
      const ComputeNode* node = acg_.FindCompute(e.node);
      if (!node) ts_.FailAt(nt, "unknown compute node " + e.node);
      ts_.ExpectPunct(",");
      const Token& ct = ts_.Peek();
      try {
        e.capability = Capability::Parse(ts_.ExpectString("capability"));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& err) {
        ts_.FailAt(ct, std::string("malformed capability: ") + err.what());
      }
      if (std::find(node->capabilities.begin(), node->capabilities.end(), e.capability) ==
          node->capabilities.end()) {
        ts_.FailAt(ct, "compute node " + e.node + " lacks capability " + e.capability.ToString());
      }
      bool has_out = false;
      while (ts_.AcceptPunct(",")) {
        const Token& kt = ts_.Peek();
        std::string key = ts_.ExpectIdent("'in' or 'out'");
        ts_.ExpectPunct("=");
        if (key == "in") {
          e.inputs.push_back(ParseLocation());
        } else if (key == "out") {
          e.output = ParseLocation();
          has_out = true;
        } else {
          ts_.FailAt(kt, "expected 'in' or 'out', got " + key);
        }
      }
      if (!has_out) ts_.FailAt(at, "apply needs an out= location");
      if (e.inputs.size() != e.capability.inputs.size()) {
        ts_.FailAt(at, "apply needs " + std::to_string(e.capability.inputs.size()) + " inputs");
      }
    } else {
      ts_.FailAt(at, "unknown effect '" + verb + "'");
    }
    ts_.ExpectPunct(")");
    return e;
  }

  TokenStream ts_;
  const Acg& acg_;
  const MnemonicDef* def_ = nullptr;
};

}  // namespace

const Binding* SemanticSet::Match(const Mnemonic& m, const Acg& acg) const {
  const MnemonicDef* def = acg.FindMnemonic(m.name);
  if (!def) return nullptr;
  for (const Binding& b : bindings) {
    if (b.mnemonic != m.name) continue;
    bool ok = true;
    for (const auto& [f, v] : b.when) {
      const FieldDef& fd = def->fields[def->FieldIndex(f)];
      ok = ok && fd.enum_values.at(m.values[def->FieldIndex(f)]) == v;
    }
    if (ok) return &b;
  }
  return nullptr;
}

SemanticSet ParseSemantics(std::string_view text, const Acg& acg) {
  return SemParser(text, acg).Parse();
}

namespace {

int64_t Arith(std::string_view op, DataType dt, int64_t a, int64_t b, int64_t c) {
  if (op == "ADD") return WrapTo(dt, a + b);
  if (op == "SUB") return WrapTo(dt, a - b);
  if (op == "MUL") return WrapTo(dt, a * b);
  if (op == "MAX") return std::max(a, b);
  if (op == "MIN") return std::min(a, b);
  if (op == "RELU") return std::max<int64_t>(a, 0);
  return WrapTo(dt, c + a * b);
}

struct PendingWrite {
  std::string node;
  int64_t slot;
  DataType dtype;
  int64_t value;
};

class Machine {
 public:
  Machine(const Acg& acg, const SemanticSet& sem, Images images)
      : acg_(acg), sem_(sem), images_(std::move(images)) {
    for (const MemoryNode& m : acg.memories) {
      if (!images_.count(m.name)) images_.emplace(m.name, MemoryImage(m));
    }
  }

  void Step(const Packet& p) {
    std::vector<PendingWrite> writes;
    for (const Mnemonic& m : p.slots) Execute(m, writes);
    std::set<std::pair<std::string, int64_t>> touched;
    for (const PendingWrite& w : writes) {
      int64_t span = images_.at(w.node).SlotsPer(w.dtype);
      for (int64_t s = w.slot; s < w.slot + span; ++s) {
        if (!touched.emplace(w.node, s).second && p.slots.size() > 1) {
          throw Error(Stage::kSimulate, "write-write collision at " + w.node + "[" +
                                            std::to_string(s) + "] within a packet");
        }
      }
    }
    for (const PendingWrite& w : writes) images_.at(w.node).Write(w.slot, w.dtype, w.value);
    metrics_.mnemonic_count += static_cast<int64_t>(p.slots.size());
    metrics_.packet_count += 1;
  }

  RunResult Finish() {
    metrics_.cycles = metrics_.packet_count;
    return RunResult{std::move(images_), metrics_};
  }

 private:
  int64_t Value(const Mnemonic& m, const Arg& a) const {
    if (const auto* v = std::get_if<int64_t>(&a.v)) return *v;
    const MnemonicDef* def = acg_.FindMnemonic(m.name);
    return m.values.at(def->FieldIndex(std::get<std::string>(a.v)));
  }

  DataType Dtype(const Mnemonic& m, const Arg& a) const {
    const std::string& name = std::get<std::string>(a.v);
    const MnemonicDef* def = acg_.FindMnemonic(m.name);
    int idx = def->FieldIndex(name);
    if (idx < 0) return DataType::Parse(name);
    const FieldDef& f = def->fields[idx];
    if (f.kind != FieldDef::Kind::kEnum) {
      throw Error(Stage::kSimulate, "field " + name + " does not name a data type");
    }
    return DataType::Parse(f.enum_values.at(m.values[idx]));
  }

  const MemoryImage& Image(const std::string& node) const { return images_.at(node); }

  // Slot of element `j` of an operand with shape `dims` at a location.
  int64_t SlotOf(const Mnemonic& m, const Location& loc, const OperandSpec& spec, int64_t j) const {
    const MemoryImage& img = Image(loc.node);
    int64_t spe = img.SlotsPer(spec.dtype);
    int64_t base = Value(m, loc.address);
    if (spec.dims.size() < 2 || !loc.stride) return base + j * spe;
    int64_t cols = spec.dims.back();
    return base + (j / cols) * Value(m, *loc.stride) + (j % cols) * spe;
  }

  void Execute(const Mnemonic& m, std::vector<PendingWrite>& writes) {
    const Binding* b = sem_.Match(m, acg_);
    if (!b) throw Error(Stage::kSimulate, "unbound mnemonic " + MnemonicToString(m, acg_));
    std::deque<int64_t> in_queue, out_queue;
    for (const Effect& e : b->effects) {
      switch (e.verb) {
        case Effect::Verb::kMove: {
          DataType dt = Dtype(m, e.dtype);
          const MemoryImage& src = Image(e.node);
          int64_t n = Value(m, e.count);
          int64_t s = Value(m, e.src), d = Value(m, e.to);
          int64_t sspe = src.SlotsPer(dt), dspe = Image(e.dst).SlotsPer(dt);
          for (int64_t j = 0; j < n; ++j) {
            int64_t v = src.Read(s + j * sspe, dt);
            Image(e.dst).Read(d + j * dspe, dt);
            writes.push_back({e.dst, d + j * dspe, dt, v});
          }
          metrics_.transfer_bits[e.node + "->" + e.dst] += n * dt.bits;
          break;
        }
        case Effect::Verb::kLoad: {
          DataType dt = Dtype(m, e.dtype);
          const MemoryImage& img = Image(e.node);
          int64_t a = Value(m, e.address);
          for (int64_t j = 0; j < Value(m, e.count); ++j) {
            in_queue.push_back(img.Read(a + j * img.SlotsPer(dt), dt));
          }
          break;
        }
        case Effect::Verb::kStore: {
          DataType dt = Dtype(m, e.dtype);
          const MemoryImage& img = Image(e.node);
          int64_t a = Value(m, e.address);
          for (int64_t j = 0; j < Value(m, e.count); ++j) {
            if (out_queue.empty()) throw Error(Stage::kSimulate, "store from an empty queue");
            img.Read(a + j * img.SlotsPer(dt), dt);
            writes.push_back({e.node, a + j * img.SlotsPer(dt), dt, out_queue.front()});
            out_queue.pop_front();
          }
          break;
        }
        case Effect::Verb::kApply:
          Apply(m, e, in_queue, out_queue, writes);
          break;
      }
    }
  }

  void Apply(const Mnemonic& m, const Effect& e, std::deque<int64_t>& in_queue,
             std::deque<int64_t>& out_queue, std::vector<PendingWrite>& writes) {
    const Capability& cap = e.capability;
    std::vector<std::vector<int64_t>> ins;
    for (size_t i = 0; i < cap.inputs.size(); ++i) {
      const OperandSpec& spec = cap.inputs[i];
      const Location& loc = e.inputs[i];
      std::vector<int64_t> vals;
      for (int64_t j = 0; j < spec.element_count(); ++j) {
        if (loc.queue) {
          if (in_queue.empty()) throw Error(Stage::kSimulate, "apply reads an empty queue");
          vals.push_back(WrapTo(spec.dtype, in_queue.front()));
          in_queue.pop_front();
        } else {
          vals.push_back(Image(loc.node).Read(SlotOf(m, loc, spec, j), spec.dtype));
        }
      }
      ins.push_back(std::move(vals));
    }
    std::vector<int64_t> out = Evaluate(cap, ins);
    for (size_t j = 0; j < out.size(); ++j) {
      if (e.output.queue) {
        out_queue.push_back(out[j]);
      } else {
        int64_t slot = SlotOf(m, e.output, cap.output, static_cast<int64_t>(j));
        Image(e.output.node).Read(slot, cap.output.dtype);
        writes.push_back({e.output.node, slot, cap.output.dtype, out[j]});
      }
    }
    metrics_.per_node_op_counts[e.node] += 1;
  }

  static std::vector<int64_t> Evaluate(const Capability& cap,
                                       const std::vector<std::vector<int64_t>>& in) {
    const OpSemantics& sem = LookupOp(cap.name, Stage::kSimulate);
    if (static_cast<int>(cap.inputs.size()) != sem.arity &&
        !(sem.contraction && cap.inputs.size() == 2)) {
      throw Error(Stage::kSimulate, "capability " + cap.ToString() + " has wrong arity");
    }
    const DataType dt = cap.output.dtype;
    const int64_t n = cap.output.element_count();
    std::vector<int64_t> out(static_cast<size_t>(n), 0);
    if (sem.contraction) {
      // (K)x(K,N)[+(N)] or (M,K)x(K,N)[+(M,N)].
      const auto& a = cap.inputs.at(0).dims;
      int64_t rows = a.size() == 1 ? 1 : a[0];
      int64_t k = a.back();
      int64_t cols = n / rows;
      for (int64_t r = 0; r < rows; ++r) {
        for (int64_t c = 0; c < cols; ++c) {
          int64_t acc = in.size() > 2 ? in[2][r * cols + c] : 0;
          for (int64_t x = 0; x < k; ++x) {
            acc = Arith("MAC", dt, in[0][r * k + x], in[1][x * cols + c], acc);
          }
          out[r * cols + c] = acc;
        }
      }
      return out;
    }
    for (int64_t j = 0; j < n; ++j) {
      int64_t a = in.at(0).at(j);
      int64_t b = in.size() > 1 ? in[1].at(j) : 0;
      int64_t c = in.size() > 2 ? in[2].at(j) : 0;
      out[j] = Arith(cap.name, dt, a, b, c);
    }
    return out;
  }

  const Acg& acg_;
  const SemanticSet& sem_;
  Images images_;
  RunMetrics metrics_;
};

}  // namespace

std::string RunMetrics::ToJson() const {
  nlohmann::ordered_json j;
  j["mnemonic_count"] = mnemonic_count;
  j["packet_count"] = packet_count;
  j["per_node_op_counts"] = per_node_op_counts;
  j["transfer_bits"] = transfer_bits;
  j["cycles"] = cycles;
  return j.dump(2);
}

RunResult Run(const std::vector<Packet>& packets, const Acg& acg, const SemanticSet& sem,
              Images initial) {
  Machine machine(acg, sem, std::move(initial));
  for (const Packet& p : packets) machine.Step(p);
  return machine.Finish();
}

RunResult Run(const std::vector<uint8_t>& binary, const Acg& acg, const SemanticSet& sem,
              Images initial) {
  return Run(DecodeProgram(binary, acg), acg, sem, std::move(initial));
}

}  // namespace covenant
