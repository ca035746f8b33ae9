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

namespace covenant {

struct DataType {
  bool is_signed = true;
  int bits = 32;

  static DataType Parse(std::string_view text);
  std::string ToString() const;

  int64_t min_value() const;
  int64_t max_value() const;

  friend bool operator==(const DataType&, const DataType&) = default;
  friend auto operator<=>(const DataType&, const DataType&) = default;
};

bool IsDataTypeName(std::string_view text);

// Two's-complement wrap of `value` into `dtype`.
int64_t WrapTo(DataType dtype, int64_t value);

struct OperandSpec {
  DataType dtype;
  std::vector<int64_t> dims;

  int64_t element_count() const;
  std::string ToString() const;

  friend bool operator==(const OperandSpec&, const OperandSpec&) = default;
};

// A typed coarse-grained operation, e.g. "(i32,64)=GEMM((i8,64),(i8,64,64),(i32,64))".
struct Capability {
  std::string name;
  std::vector<OperandSpec> inputs;
  OperandSpec output;

  static Capability Parse(std::string_view text);
  std::string ToString() const;

  // Output elements produced per invocation.
  int64_t throughput() const { return output.element_count(); }

  friend bool operator==(const Capability&, const Capability&) = default;
};

}  // namespace covenant
