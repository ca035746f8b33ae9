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
#include <string>
#include <string_view>
#include <vector>

#include "covenant/error.hpp"

namespace covenant {

enum class TokenKind { kIdent, kInt, kString, kPunct, kEnd };

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;
  int64_t value = 0;
  int line = 1;
  int column = 1;
};

// Tokenizer shared by every text format in the toolkit. `#` starts a line
// comment; `->` and `<->` are single punctuation tokens.
std::vector<Token> Tokenize(std::string_view text);

// Cursor over a token vector with the usual expect/accept helpers.
class TokenStream {
 public:
  explicit TokenStream(std::string_view text) : tokens_(Tokenize(text)) {}

  const Token& Peek(size_t ahead = 0) const;
  const Token& Next();
  bool AtEnd() const { return Peek().kind == TokenKind::kEnd; }

  bool IsPunct(std::string_view p, size_t ahead = 0) const;
  bool IsIdent(std::string_view name, size_t ahead = 0) const;
  bool AcceptPunct(std::string_view p);
  bool AcceptIdent(std::string_view name);

  void ExpectPunct(std::string_view p);
  void ExpectKeyword(std::string_view name);
  std::string ExpectIdent(std::string_view what = "identifier");
  std::string ExpectString(std::string_view what = "string");
  int64_t ExpectInt(std::string_view what = "integer");

  [[noreturn]] void Fail(const std::string& message) const;
  [[noreturn]] void FailAt(const Token& token, const std::string& message) const;

 private:
  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

std::string Describe(const Token& token);

}  // namespace covenant
