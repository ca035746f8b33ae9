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

#include <set>

#include "covenant/acg.hpp"
#include "covenant/lexer.hpp"

namespace covenant {
namespace {

class AcgParser {
 public:
  explicit AcgParser(std::string_view text) : ts_(text) {}

  Acg Parse() {
    ts_.ExpectKeyword("acg");
    acg_.name = ts_.ExpectString("ACG name");
    while (ts_.Peek().kind == TokenKind::kIdent) {
      const Token& key = ts_.Next();
      ts_.ExpectPunct("=");
      int64_t value = ts_.ExpectInt();
      if (key.text == "vliw_slots") {
        if (value < 1) ts_.FailAt(key, "vliw_slots must be positive");
        acg_.vliw_slots = static_cast<int>(value);
      } else if (key.text == "opcode_width") {
        if (value < 1 || value > 32) ts_.FailAt(key, "opcode_width out of range");
        acg_.opcode_width = static_cast<int>(value);
      } else {
        ts_.FailAt(key, "unknown ACG attribute '" + key.text + "'");
      }
    }
    ts_.ExpectPunct("{");
    while (!ts_.AcceptPunct("}")) {
      if (ts_.AtEnd()) ts_.Fail("expected '}', got end of input");
      const Token& kw = ts_.Peek();
      if (ts_.AcceptIdent("memory")) {
        ParseMemory(kw);
      } else if (ts_.AcceptIdent("compute")) {
        ParseCompute(kw);
      } else if (ts_.AcceptIdent("edge")) {
        ParseEdge();
      } else if (ts_.AcceptIdent("mnemonic")) {
        ParseMnemonic();
      } else {
        ts_.Fail("expected 'memory', 'compute', 'edge' or 'mnemonic', got " +
                 Describe(kw));
      }
    }
    if (!ts_.AtEnd()) ts_.Fail("trailing input after ACG");
    for (const auto& [tok, e] : pending_edges_) {
      if (!names_.contains(e.src)) ts_.FailAt(tok, "edge references unknown node " + e.src);
      if (!names_.contains(e.dst)) ts_.FailAt(tok, "edge references unknown node " + e.dst);
    }
    return acg_;
  }

 private:
  void DeclareNode(const Token& at, const std::string& name) {
    if (!names_.insert(name).second) ts_.FailAt(at, "duplicate node name " + name);
  }

  void ParseMemory(const Token& kw) {
    MemoryNode m;
    m.name = ts_.ExpectIdent("memory name");
    DeclareNode(kw, m.name);
    ts_.ExpectPunct("{");
    std::set<std::string> seen;
    while (!ts_.AcceptPunct("}")) {
      const Token& key = ts_.Peek();
      std::string k = ts_.ExpectIdent("memory attribute");
      ts_.ExpectPunct("=");
      int64_t v = ts_.ExpectInt();
      if (v < 1) ts_.FailAt(key, "memory attribute " + k + " must be positive");
      if (k == "data_width") {
        m.data_width = v;
      } else if (k == "banks") {
        m.banks = v;
      } else if (k == "depth") {
        m.depth = v;
      } else {
        ts_.FailAt(key, "unknown memory attribute '" + k + "'");
      }
      seen.insert(k);
      ts_.ExpectPunct(";");
    }
    for (const char* need : {"data_width", "banks", "depth"}) {
      if (!seen.contains(need)) {
        ts_.FailAt(kw, "memory " + m.name + " is missing " + need);
      }
    }
    acg_.memories.push_back(m);
  }

  void ParseCompute(const Token& kw) {
    ComputeNode c;
    c.name = ts_.ExpectIdent("compute name");
    DeclareNode(kw, c.name);
    ts_.ExpectPunct("{");
    while (!ts_.AcceptPunct("}")) {
      ts_.ExpectKeyword("capability");
      const Token& spec = ts_.Peek();
      std::string text = ts_.ExpectString("capability string");
      try {
        c.capabilities.push_back(Capability::Parse(text));
      } catch (const Error& e) {
        ts_.FailAt(spec, std::string("malformed capability \"") + text + "\": " + e.what());
      }
      ts_.ExpectPunct(";");
    }
    acg_.computes.push_back(c);
  }

  void ParseEdge() {
    const Token& at = ts_.Peek();
    std::string a = ts_.ExpectIdent("node name");
    bool both = false;
    if (ts_.AcceptPunct("<->")) {
      both = true;
    } else {
      ts_.ExpectPunct("->");
    }
    std::string b = ts_.ExpectIdent("node name");
    ts_.ExpectPunct("{");
    ts_.ExpectKeyword("bandwidth");
    ts_.ExpectPunct("=");
    int64_t bw = ts_.ExpectInt("bandwidth");
    ts_.ExpectPunct(";");
    ts_.ExpectPunct("}");
    Edge e{a, b, bw};
    acg_.edges.push_back(e);
    pending_edges_.emplace_back(at, e);
    if (both) {
      Edge r{b, a, bw};
      acg_.edges.push_back(r);
    }
  }

  FieldAccess ParseAccess() {
    FieldAccess acc;
    const Token& mode = ts_.Peek();
    std::string m = ts_.ExpectIdent("'read' or 'write'");
    if (m == "read") {
      acc.mode = FieldAccess::Mode::kRead;
    } else if (m == "write") {
      acc.mode = FieldAccess::Mode::kWrite;
    } else {
      ts_.FailAt(mode, "expected 'read' or 'write', got " + Describe(mode));
    }
    ts_.ExpectPunct("(");
    acc.node = ts_.ExpectString("memory name");
    while (ts_.AcceptPunct(",")) {
      if (ts_.Peek().kind == TokenKind::kInt) {
        acc.span.emplace_back(ts_.ExpectInt());
      } else {
        acc.span.emplace_back(ts_.ExpectIdent("span term"));
      }
    }
    ts_.ExpectPunct(")");
    return acc;
  }

  void ParseMnemonic() {
    MnemonicDef m;
    m.name = ts_.ExpectIdent("mnemonic name");
    ts_.ExpectPunct("(");
    m.opcode = ts_.ExpectInt("opcode");
    ts_.ExpectPunct(")");
    ts_.ExpectPunct("{");
    bool first = true;
    while (!ts_.AcceptPunct("}")) {
      if (!first) ts_.ExpectPunct(",");
      first = false;
      const Token& kw = ts_.Peek();
      std::string kind = ts_.ExpectIdent("'ifield', 'efield' or 'attr'");
      ts_.ExpectPunct("(");
      if (kind == "attr") {
        std::string k = ts_.ExpectString("attribute key");
        ts_.ExpectPunct(",");
        std::string v = ts_.ExpectString("attribute value");
        m.attrs.emplace_back(k, v);
      } else if (kind == "ifield" || kind == "efield") {
        FieldDef f;
        f.name = ts_.ExpectString("field name");
        ts_.ExpectPunct(",");
        f.width = static_cast<int>(ts_.ExpectInt("field width"));
        if (kind == "efield") {
          f.kind = FieldDef::Kind::kEnum;
          ts_.ExpectPunct(",");
          ts_.ExpectPunct("[");
          if (!ts_.IsPunct("]")) {
            f.enum_values.push_back(ts_.ExpectString("enum value"));
            while (ts_.AcceptPunct(",")) f.enum_values.push_back(ts_.ExpectString("enum value"));
          }
          ts_.ExpectPunct("]");
        }
        if (ts_.AcceptPunct(",")) f.access = ParseAccess();
        m.fields.push_back(f);
      } else {
        ts_.FailAt(kw, "expected 'ifield', 'efield' or 'attr', got " + Describe(kw));
      }
      ts_.ExpectPunct(")");
    }
    acg_.mnemonics.push_back(m);
  }

  TokenStream ts_;
  Acg acg_;
  std::set<std::string> names_;
  std::vector<std::pair<Token, Edge>> pending_edges_;
};

}  // namespace

Acg ParseAcg(std::string_view text) { return AcgParser(text).Parse(); }

}  // namespace covenant
