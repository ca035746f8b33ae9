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

#include "covenant/codelet.hpp"
#include "covenant/lexer.hpp"

namespace covenant {
namespace {

class CodeletParser {
 public:
  explicit CodeletParser(std::string_view text) : ts_(text) {}

  Codelet Parse() {
    ts_.ExpectKeyword("cdlt");
    cdlt_.name = ts_.ExpectIdent("codelet name");
    ts_.ExpectPunct("{");
    cdlt_.body = ParseBlock();
    if (!ts_.AtEnd()) ts_.Fail("trailing input after codelet");
    return cdlt_;
  }

 private:
  // Parses statements up to and including the closing brace.
  std::vector<Op> ParseBlock() {
    std::vector<Op> body;
    while (!ts_.AcceptPunct("}")) {
      if (ts_.AtEnd()) ts_.Fail("expected '}', got end of input");
      if (ts_.IsIdent("loop") && ts_.Peek(1).kind == TokenKind::kIdent) {
        body.emplace_back(ParseLoop());
      } else if (ts_.IsIdent("transfer") && ts_.IsPunct("(", 1)) {
        ts_.Next();
        body.emplace_back(ParseTransferCall(""));
        ts_.AcceptPunct(";");
      } else {
        ParseAssignment(body);
      }
    }
    return body;
  }

  Dim ParseDim() {
    if (ts_.Peek().kind == TokenKind::kIdent) {
      const Token& t = ts_.Peek();
      std::string name = ts_.ExpectIdent();
      const Surrogate* s = cdlt_.Find(name);
      if (s == nullptr || s->kind != SurrogateKind::kParam) {
        ts_.FailAt(t, "undeclared param " + name);
      }
      return Dim::Param(name);
    }
    return Dim::Of(ts_.ExpectInt("dimension"));
  }

  std::vector<Dim> ParseDimList() {
    std::vector<Dim> dims;
    ts_.ExpectPunct("[");
    if (!ts_.IsPunct("]")) {
      dims.push_back(ParseDim());
      while (ts_.AcceptPunct(",")) dims.push_back(ParseDim());
    }
    ts_.ExpectPunct("]");
    return dims;
  }

  LoopOp ParseLoop() {
    ts_.ExpectKeyword("loop");
    const Token& at = ts_.Peek();
    LoopOp l;
    l.name = ts_.ExpectIdent("loop name");
    if (IsActiveLoop(l.name)) ts_.FailAt(at, "duplicate loop name " + l.name);
    ts_.ExpectPunct("(");
    std::vector<Dim> args{ParseDim()};
    std::optional<Dim> stride;
    while (ts_.AcceptPunct(",")) {
      if (ts_.IsIdent("stride") && ts_.IsPunct("=", 1)) {
        ts_.Next();
        ts_.Next();
        stride = ParseDim();
      } else {
        args.push_back(ParseDim());
      }
    }
    ts_.ExpectPunct(")");
    if (stride) {
      if (args.size() != 1) ts_.FailAt(at, "stride= form takes a single count");
      if (args[0].symbolic() || stride->symbolic()) {
        ts_.FailAt(at, "stride= form requires integer count and stride");
      }
      l.upper = Dim::Of(args[0].value * stride->value);
      l.stride = *stride;
    } else if (args.size() == 1) {
      l.upper = args[0];
    } else if (args.size() == 2 || args.size() == 3) {
      l.lower = args[0];
      l.upper = args[1];
      if (args.size() == 3) l.stride = args[2];
    } else {
      ts_.FailAt(at, "loop takes one to three bounds");
    }
    if (!l.stride.symbolic() && l.stride.value < 1) ts_.FailAt(at, "loop stride must be positive");
    ts_.ExpectPunct("{");
    active_loops_.push_back(l.name);
    l.body = ParseBlock();
    active_loops_.pop_back();
    return l;
  }

  bool IsActiveLoop(const std::string& name) const {
    return std::find(active_loops_.begin(), active_loops_.end(), name) != active_loops_.end();
  }

  IndexExpr ParseIndexExpr() {
    IndexExpr e;
    bool negate = false;
    while (true) {
      const Token& t = ts_.Peek();
      if (t.kind == TokenKind::kInt) {
        int64_t v = ts_.ExpectInt();
        if (ts_.AcceptPunct("*")) {
          const Token& lt = ts_.Peek();
          std::string loop = ts_.ExpectIdent("loop name");
          if (!IsActiveLoop(loop)) ts_.FailAt(lt, "undeclared index " + loop);
          e.terms.push_back(IndexTerm{loop, Dim::Of(negate ? -v : v)});
        } else {
          e.constant += negate ? -v : v;
        }
      } else if (t.kind == TokenKind::kIdent) {
        std::string loop = ts_.ExpectIdent();
        if (!IsActiveLoop(loop)) ts_.FailAt(t, "undeclared index " + loop);
        IndexTerm term{loop, Dim::Of(negate ? -1 : 1)};
        if (ts_.AcceptPunct("*")) {
          Dim coef = ParseDim();
          if (negate) {
            if (coef.symbolic()) ts_.FailAt(t, "negated param coefficient");
            coef.value = -coef.value;
          }
          term.coef = coef;
        }
        e.terms.push_back(term);
      } else {
        ts_.Fail("expected index expression, got " + Describe(t));
      }
      if (ts_.AcceptPunct("+")) {
        negate = false;
      } else if (ts_.AcceptPunct("-")) {
        negate = true;
      } else {
        break;
      }
    }
    return e;
  }

  Slice ParseSlice() {
    const Token& t = ts_.Peek();
    Slice s;
    s.surrogate = ts_.ExpectIdent("surrogate name");
    const Surrogate* decl = cdlt_.Find(s.surrogate);
    if (decl == nullptr || decl->kind == SurrogateKind::kParam) {
      ts_.FailAt(t, "undeclared surrogate " + s.surrogate);
    }
    while (ts_.AcceptPunct("[")) {
      s.index.push_back(ParseIndexExpr());
      ts_.ExpectPunct("]");
    }
    return s;
  }

  std::optional<std::string> ParseLoc() {
    if (ts_.AcceptIdent("null")) return std::nullopt;
    return ts_.ExpectString("location");
  }

  std::optional<DataType> ParseDtype() {
    const Token& t = ts_.Peek();
    std::string name = ts_.ExpectIdent("data type");
    if (name == "null") return std::nullopt;
    if (!IsDataTypeName(name)) ts_.FailAt(t, "unknown data type '" + name + "'");
    return DataType::Parse(name);
  }

  void Declare(const Token& at, Surrogate s) {
    if (cdlt_.Find(s.name) != nullptr) ts_.FailAt(at, "duplicate surrogate " + s.name);
    cdlt_.surrogates.push_back(std::move(s));
  }

  static std::vector<std::string> LoopsOf(const Slice& s) {
    std::vector<std::string> out;
    for (const IndexExpr& e : s.index) {
      for (const IndexTerm& t : e.terms) {
        if (std::find(out.begin(), out.end(), t.loop) == out.end()) out.push_back(t.loop);
      }
    }
    return out;
  }

  // After `transfer` has been consumed.
  TransferOp ParseTransferCall(const std::string& result) {
    const Token& at = ts_.Peek();
    TransferOp t;
    t.result = result;
    ts_.ExpectPunct("(");
    if (ts_.Peek().kind == TokenKind::kIdent && IsDataTypeName(ts_.Peek().text) &&
        ts_.IsPunct("(", 1)) {
      TypedConstant k;
      k.dtype = DataType::Parse(ts_.Next().text);
      ts_.ExpectPunct("(");
      k.value = ts_.ExpectInt("constant value");
      ts_.ExpectPunct(")");
      t.source = k;
    } else {
      t.source = ParseSlice();
    }
    ts_.ExpectPunct(",");
    if (ts_.Peek().kind == TokenKind::kString) {
      t.destination = ts_.ExpectString();
    } else {
      t.destination = ParseSlice();
    }
    ts_.ExpectPunct(",");
    t.sizes = ParseDimList();
    ts_.ExpectPunct(")");
    if (t.allocating() == result.empty()) {
      ts_.FailAt(at, t.allocating() ? "allocating transfer needs a result name"
                                    : "overwriting transfer cannot define a surrogate");
    }
    if (const auto* s = std::get_if<Slice>(&t.source)) {
      t.offsets = LoopsOf(*s);
    } else if (const auto* d = std::get_if<Slice>(&t.destination)) {
      t.offsets = LoopsOf(*d);
    }
    if (t.allocating()) {
      Surrogate local;
      local.name = result;
      local.kind = SurrogateKind::kLocal;
      local.shape = t.sizes;
      local.loc = std::get<std::string>(t.destination);
      if (const auto* k = std::get_if<TypedConstant>(&t.source)) {
        local.dtype = k->dtype;
      } else {
        local.dtype = cdlt_.Find(std::get<Slice>(t.source).surrogate)->dtype;
      }
      Declare(at, local);
    }
    return t;
  }

  void ParseAssignment(std::vector<Op>& body) {
    const Token& at = ts_.Peek();
    std::string name = ts_.ExpectIdent("statement");
    if (ts_.IsPunct("[") ) {
      Slice result;
      result.surrogate = name;
      const Surrogate* decl = cdlt_.Find(name);
      if (decl == nullptr || decl->kind == SurrogateKind::kParam) {
        ts_.FailAt(at, "undeclared surrogate " + name);
      }
      while (ts_.AcceptPunct("[")) {
        result.index.push_back(ParseIndexExpr());
        ts_.ExpectPunct("]");
      }
      ts_.ExpectPunct("=");
      ts_.ExpectKeyword("compute");
      body.emplace_back(ParseCompute(result));
      ts_.AcceptPunct(";");
      return;
    }
    ts_.ExpectPunct("=");
    const Token& kw = ts_.Peek();
    std::string kind = ts_.ExpectIdent("'param', 'inp', 'out', 'transfer' or 'compute'");
    if (kind == "compute") {
      const Surrogate* decl = cdlt_.Find(name);
      if (decl == nullptr || decl->kind == SurrogateKind::kParam) {
        ts_.FailAt(at, "undeclared surrogate " + name);
      }
      body.emplace_back(ParseCompute(Slice{name, {}}));
    } else if (kind == "transfer") {
      body.emplace_back(ParseTransferCall(name));
    } else if (kind == "param") {
      ts_.ExpectPunct("(");
      ts_.ExpectPunct(")");
      Declare(at, Surrogate{name, SurrogateKind::kParam, {}, std::nullopt, std::nullopt});
    } else if (kind == "inp" || kind == "out") {
      Surrogate s;
      s.name = name;
      s.kind = kind == "inp" ? SurrogateKind::kInp : SurrogateKind::kOut;
      ts_.ExpectPunct("(");
      if (ts_.IsPunct("[")) {
        s.shape = ParseDimList();
        ts_.ExpectPunct(",");
        s.dtype = ParseDtype();
        ts_.ExpectPunct(",");
        s.loc = ParseLoc();
      } else {
        s.loc = ParseLoc();
        ts_.ExpectPunct(",");
        s.shape = ParseDimList();
        ts_.ExpectPunct(",");
        s.dtype = ParseDtype();
      }
      ts_.ExpectPunct(")");
      if (s.shape.empty()) ts_.FailAt(kw, "surrogate " + name + " needs a shape");
      Declare(at, s);
    } else {
      ts_.FailAt(kw, "expected 'param', 'inp', 'out', 'transfer' or 'compute', got " +
                         Describe(kw));
    }
    ts_.AcceptPunct(";");
  }

  ComputeOp ParseCompute(Slice result) {
    ComputeOp c;
    c.result = std::move(result);
    ts_.ExpectPunct("(");
    c.loc = ParseLoc();
    ts_.ExpectPunct(",");
    c.capability_name = ts_.ExpectString("capability name");
    while (ts_.AcceptPunct(",")) c.operands.push_back(ParseSlice());
    ts_.ExpectPunct(")");
    return c;
  }

  TokenStream ts_;
  Codelet cdlt_;
  std::vector<std::string> active_loops_;
};

}  // namespace

Codelet ParseCodelet(std::string_view text) { return CodeletParser(text).Parse(); }

}  // namespace covenant
