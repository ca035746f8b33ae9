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

#include "covenant/lexer.hpp"

#include <cctype>

namespace covenant {

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int column = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = column;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) ||
              text[j] == '_')) {
        ++j;
      }
      tok.kind = TokenKind::kIdent;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      tok.kind = TokenKind::kInt;
      tok.text = std::string(text.substr(i, j - i));
      try {
        tok.value = std::stoll(tok.text);
      } catch (const std::out_of_range&) {
        throw ParseError(line, column, "integer literal out of range");
      }
      advance(j - i);
    } else if (c == '"') {
      size_t j = i + 1;
      while (j < text.size() && text[j] != '"' && text[j] != '\n') ++j;
      if (j >= text.size() || text[j] != '"') {
        throw ParseError(line, column, "unterminated string literal");
      }
      tok.kind = TokenKind::kString;
      tok.text = std::string(text.substr(i + 1, j - i - 1));
      advance(j - i + 1);
    } else if (text.substr(i, 3) == "<->") {
      tok.kind = TokenKind::kPunct;
      tok.text = "<->";
      advance(3);
    } else if (text.substr(i, 2) == "->") {
      tok.kind = TokenKind::kPunct;
      tok.text = "->";
      advance(2);
    } else {
      tok.kind = TokenKind::kPunct;
      tok.text = std::string(1, c);
      advance(1);
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = TokenKind::kEnd;
  end.line = line;
  end.column = column;
  out.push_back(end);
  return out;
}

std::string Describe(const Token& token) {
  switch (token.kind) {
    case TokenKind::kEnd:
      return "end of input";
    case TokenKind::kString:
      return "string \"" + token.text + "\"";
    default:
      return "'" + token.text + "'";
  }
}

const Token& TokenStream::Peek(size_t ahead) const {
  size_t idx = pos_ + ahead;
  if (idx >= tokens_.size()) return tokens_.back();
  return tokens_[idx];
}

const Token& TokenStream::Next() {
  const Token& tok = Peek();
  if (pos_ < tokens_.size() - 1) ++pos_;
  return tok;
}

bool TokenStream::IsPunct(std::string_view p, size_t ahead) const {
  const Token& t = Peek(ahead);
  return t.kind == TokenKind::kPunct && t.text == p;
}

bool TokenStream::IsIdent(std::string_view name, size_t ahead) const {
  const Token& t = Peek(ahead);
  return t.kind == TokenKind::kIdent && t.text == name;
}

bool TokenStream::AcceptPunct(std::string_view p) {
  if (!IsPunct(p)) return false;
  Next();
  return true;
}

bool TokenStream::AcceptIdent(std::string_view name) {
  if (!IsIdent(name)) return false;
  Next();
  return true;
}

void TokenStream::ExpectPunct(std::string_view p) {
  if (!AcceptPunct(p)) {
    Fail("expected '" + std::string(p) + "', got " + Describe(Peek()));
  }
}

void TokenStream::ExpectKeyword(std::string_view name) {
  if (!AcceptIdent(name)) {
    Fail("expected '" + std::string(name) + "', got " + Describe(Peek()));
  }
}

std::string TokenStream::ExpectIdent(std::string_view what) {
  if (Peek().kind != TokenKind::kIdent) {
    Fail("expected " + std::string(what) + ", got " + Describe(Peek()));
  }
  return Next().text;
}

std::string TokenStream::ExpectString(std::string_view what) {
  if (Peek().kind != TokenKind::kString) {
    Fail("expected " + std::string(what) + ", got " + Describe(Peek()));
  }
  return Next().text;
}

int64_t TokenStream::ExpectInt(std::string_view what) {
  bool negative = AcceptPunct("-");
  if (Peek().kind != TokenKind::kInt) {
    Fail("expected " + std::string(what) + ", got " + Describe(Peek()));
  }
  int64_t v = Next().value;
  return negative ? -v : v;
}

void TokenStream::Fail(const std::string& message) const { FailAt(Peek(), message); }

void TokenStream::FailAt(const Token& token, const std::string& message) const {
  throw ParseError(token.line, token.column, message);
}

}  // namespace covenant
