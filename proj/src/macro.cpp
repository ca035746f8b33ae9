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
#include <set>

#include "covenant/codegen.hpp"
#include "covenant/error.hpp"
#include "covenant/lexer.hpp"

namespace covenant {
namespace {

class MacroParser {
 public:
  MacroParser(std::string_view text, const Acg& acg) : ts_(text), acg_(acg) {}

  MacroRegistry Parse() {
    MacroRegistry reg;
    while (!ts_.AtEnd()) {
      const Token& at = ts_.Peek();
      MacroMnemonic m;
      if (ts_.AcceptIdent("compute")) {
        m.kind = MacroMnemonic::Kind::kCompute;
        const Token& spec = ts_.Peek();
        std::string text = ts_.ExpectString("capability");
        Capability cap;
        try {
          cap = Capability::Parse(text);
        } catch (const Error& e) {
          ts_.FailAt(spec, std::string("malformed capability: ") + e.what());
        }
        m.capability = cap.ToString();
        ts_.ExpectKeyword("on");
        const Token& nt = ts_.Peek();
        m.node = ts_.ExpectIdent("compute node");
        const ComputeNode* node = acg_.FindCompute(m.node);
        if (!node) ts_.FailAt(nt, "unknown compute node " + m.node);
        if (std::find(node->capabilities.begin(), node->capabilities.end(), cap) ==
            node->capabilities.end()) {
          ts_.FailAt(spec, "compute node " + m.node + " lacks capability " + m.capability);
        }
      } else if (ts_.AcceptIdent("transfer")) {
        m.kind = MacroMnemonic::Kind::kTransfer;
        const Token& nt = ts_.Peek();
        m.node = ts_.ExpectIdent("memory node");
        ts_.ExpectPunct("->");
        m.dst = ts_.ExpectIdent("memory node");
        if (!acg_.FindEdge(m.node, m.dst)) ts_.FailAt(nt, "no edge " + m.node + " -> " + m.dst);
      } else {
        ts_.FailAt(at, "expected 'compute' or 'transfer', got " + Describe(at));
      }
      for (const MacroMnemonic& other : reg.macros) {
        if (other.kind == m.kind && other.capability == m.capability && other.node == m.node &&
            other.dst == m.dst) {
          ts_.FailAt(at, "duplicate macro-mnemonic");
        }
      }
      ts_.ExpectPunct("{");
      while (!ts_.AcceptPunct("}")) m.steps.push_back(ParseStep(m.kind));
      reg.macros.push_back(std::move(m));
    }
    return reg;
  }

 private:
  MacroStep ParseStep(MacroMnemonic::Kind kind) {
    const Token& at = ts_.Peek();
    MacroStep step;
    step.mnemonic = ts_.ExpectIdent("mnemonic name");
    const MnemonicDef* def = acg_.FindMnemonic(step.mnemonic);
    if (!def) ts_.FailAt(at, "unknown mnemonic " + step.mnemonic);
    ts_.ExpectPunct("(");
    std::set<std::string> seen;
    if (!ts_.AcceptPunct(")")) {
      do {
        const Token& ft = ts_.Peek();
        std::string field = ts_.ExpectIdent("field name");
        int idx = def->FieldIndex(field);
        if (idx < 0) ts_.FailAt(ft, "mnemonic " + def->name + " has no field " + field);
        if (!seen.insert(field).second) ts_.FailAt(ft, "field " + field + " assigned twice");
        ts_.ExpectPunct("=");
        step.fields.emplace_back(field, ParseSource(def->fields[idx], kind));
      } while (ts_.AcceptPunct(","));
      ts_.ExpectPunct(")");
    }
    ts_.ExpectPunct(";");
    for (const FieldDef& f : def->fields) {
      if (!seen.count(f.name)) ts_.FailAt(at, "field " + f.name + " of " + def->name + " is unbound");
    }
    return step;
  }

  FieldSource ParseSource(const FieldDef& field, MacroMnemonic::Kind kind) {
    const Token& at = ts_.Peek();
    FieldSource s;
    bool compute = kind == MacroMnemonic::Kind::kCompute;
    if (at.kind == TokenKind::kInt || ts_.IsPunct("-")) {
      s.kind = FieldSource::Kind::kInt;
      s.value = ts_.ExpectInt();
      if (field.kind == FieldDef::Kind::kEnum) ts_.FailAt(at, "field " + field.name + " is enumerated");
      return s;
    }
    std::string word = ts_.ExpectIdent("field source");
    auto require = [&](bool ok, const char* what) {
      if (!ok) ts_.FailAt(at, std::string("'") + what + "' is not available here");
    };
    if (word == "op" || word == "stride") {
      require(compute, word.c_str());
      ts_.ExpectPunct("(");
      s.kind = word == "op" ? FieldSource::Kind::kOperand : FieldSource::Kind::kStride;
      if (s.kind == FieldSource::Kind::kStride && ts_.AcceptIdent("res")) {
        s.value = -1;
      } else {
        s.value = ts_.ExpectInt("operand index");
      }
      ts_.ExpectPunct(")");
    } else if (word == "res") {
      require(compute, "res");
      s.kind = FieldSource::Kind::kResult;
    } else if (word == "src" || word == "dst" || word == "len") {
      require(!compute, word.c_str());
      s.kind = word == "src"   ? FieldSource::Kind::kSrc
               : word == "dst" ? FieldSource::Kind::kDst
                               : FieldSource::Kind::kLen;
    } else if (word == "dtype") {
      s.kind = FieldSource::Kind::kDtype;
      if (field.kind != FieldDef::Kind::kEnum) ts_.FailAt(at, "dtype needs an enumerated field");
      return s;
    } else {
      s.kind = FieldSource::Kind::kEnum;
      s.text = word;
      if (field.kind != FieldDef::Kind::kEnum ||
          std::find(field.enum_values.begin(), field.enum_values.end(), word) ==
              field.enum_values.end()) {
        ts_.FailAt(at, "'" + word + "' is not a value of field " + field.name);
      }
      return s;
    }
    if (field.kind == FieldDef::Kind::kEnum) ts_.FailAt(at, "field " + field.name + " is enumerated");
    return s;
  }

  TokenStream ts_;
  const Acg& acg_;
};

}  // namespace

const MacroMnemonic* MacroRegistry::FindCompute(const Capability& cap, std::string_view node) const {
  std::string key = cap.ToString();
  for (const MacroMnemonic& m : macros) {
    if (m.kind == MacroMnemonic::Kind::kCompute && m.capability == key && m.node == node) return &m;
  }
  return nullptr;
}

const MacroMnemonic* MacroRegistry::FindTransfer(std::string_view src, std::string_view dst) const {
  for (const MacroMnemonic& m : macros) {
    if (m.kind == MacroMnemonic::Kind::kTransfer && m.node == src && m.dst == dst) return &m;
  }
  return nullptr;
}

MacroRegistry ParseMacros(std::string_view text, const Acg& acg) {
  return MacroParser(text, acg).Parse();
}

}  // namespace covenant
