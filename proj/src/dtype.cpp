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

#include "covenant/dtype.hpp"

#include <sstream>

#include "covenant/lexer.hpp"

namespace covenant {

const char* StageName(Stage stage) {
  switch (stage) {
    case Stage::kParse: return "parse";
    case Stage::kValidate: return "validate";
    case Stage::kInstantiate: return "instantiate";
    case Stage::kSchedule: return "schedule";
    case Stage::kOptimize: return "optimize";
    case Stage::kCodegen: return "codegen";
    case Stage::kSimulate: return "simulate";
    case Stage::kOracle: return "oracle";
    case Stage::kIo: return "io";
  }
  return "unknown";
}

bool IsDataTypeName(std::string_view text) {
  return text == "i8" || text == "i16" || text == "i32" || text == "u8" ||
         text == "u16" || text == "u32";
}

DataType DataType::Parse(std::string_view text) {
  if (!IsDataTypeName(text)) {
    throw Error(Stage::kParse, "unknown data type '" + std::string(text) + "'");
  }
  DataType dt;
  dt.is_signed = text[0] == 'i';
  dt.bits = std::stoi(std::string(text.substr(1)));
  return dt;
}

std::string DataType::ToString() const {
  return (is_signed ? "i" : "u") + std::to_string(bits);
}

int64_t DataType::min_value() const {
  return is_signed ? -(int64_t{1} << (bits - 1)) : 0;
}

int64_t DataType::max_value() const {
  return is_signed ? (int64_t{1} << (bits - 1)) - 1 : (int64_t{1} << bits) - 1;
}

int64_t WrapTo(DataType dtype, int64_t value) {
  uint64_t mask = (uint64_t{1} << dtype.bits) - 1;
  uint64_t raw = static_cast<uint64_t>(value) & mask;
  if (dtype.is_signed && (raw >> (dtype.bits - 1)) != 0) {
    return static_cast<int64_t>(raw) - (int64_t{1} << dtype.bits);
  }
  return static_cast<int64_t>(raw);
}

int64_t OperandSpec::element_count() const {
  int64_t n = 1;
  for (int64_t d : dims) n *= d;
  return n;
}

std::string OperandSpec::ToString() const {
  std::string s = "(" + dtype.ToString();
  for (int64_t d : dims) s += "," + std::to_string(d);
  return s + ")";
}

namespace {

OperandSpec ParseOperand(TokenStream& ts) {
  OperandSpec spec;
  ts.ExpectPunct("(");
  const Token& tok = ts.Peek();
  std::string name = ts.ExpectIdent("data type");
  if (!IsDataTypeName(name)) ts.FailAt(tok, "unknown data type '" + name + "'");
  spec.dtype = DataType::Parse(name);
  while (ts.AcceptPunct(",")) {
    int64_t d = ts.ExpectInt("dimension");
    if (d < 1) ts.Fail("operand dimension must be positive");
    spec.dims.push_back(d);
  }
  if (spec.dims.empty()) ts.Fail("operand needs at least one dimension");
  ts.ExpectPunct(")");
  return spec;
}

}  // namespace

Capability Capability::Parse(std::string_view text) {
  TokenStream ts(text);
  Capability cap;
  cap.output = ParseOperand(ts);
  ts.ExpectPunct("=");
  cap.name = ts.ExpectIdent("capability name");
  ts.ExpectPunct("(");
  if (!ts.IsPunct(")")) {
    cap.inputs.push_back(ParseOperand(ts));
    while (ts.AcceptPunct(",")) cap.inputs.push_back(ParseOperand(ts));
  }
  ts.ExpectPunct(")");
  if (!ts.AtEnd()) ts.Fail("trailing input after capability");
  return cap;
}

std::string Capability::ToString() const {
  std::string s = output.ToString() + "=" + name + "(";
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (i) s += ",";
    s += inputs[i].ToString();
  }
  return s + ")";
}

}  // namespace covenant
