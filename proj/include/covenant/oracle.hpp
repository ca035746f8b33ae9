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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covenant/dtype.hpp"

namespace covenant {

// Row-major integer tensor.
struct Tensor {
  DataType dtype;
  std::vector<int64_t> dims;
  std::vector<int64_t> data;

  static Tensor Zeros(DataType dtype, std::vector<int64_t> dims);
  int64_t element_count() const;
  // Throws unless |data| matches dims and every element fits dtype.
  void Check() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// Naive evaluation of one capability. The output dtype defaults to the
// accumulator's dtype (MAC, GEMM) or the first input's.
Tensor EvalCapability(std::string_view name, const std::vector<Tensor>& inputs,
                      std::optional<DataType> output = std::nullopt);

// Whole-layer reference for a shipped codelet, keyed by surrogate name.
std::map<std::string, Tensor> EvalLayer(std::string_view codelet,
                                        const std::map<std::string, int64_t>& params,
                                        const std::map<std::string, Tensor>& inputs,
                                        const std::map<std::string, DataType>& dtypes);

// Codelets EvalLayer knows.
std::vector<std::string> OracleCodelets();

// CVTN tensor files: 16-byte header (magic, dtype code, rank, four u16
// dims, two reserved bytes) then little-endian elements of the dtype width.
std::vector<uint8_t> EncodeTensor(const Tensor& t);
Tensor DecodeTensor(const std::vector<uint8_t>& bytes);

// Deterministic uniform tensor over the dtype's range (splitmix64 stream).
Tensor RandomTensor(DataType dtype, std::vector<int64_t> dims, uint64_t seed);

}  // namespace covenant
