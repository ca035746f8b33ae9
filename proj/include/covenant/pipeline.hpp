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

#include "covenant/codegen.hpp"
#include "covenant/codelet.hpp"
#include "covenant/layout.hpp"
#include "covenant/oracle.hpp"
#include "covenant/package.hpp"
#include "covenant/simulator.hpp"

namespace covenant {

struct OptFlags {
  bool parallelize = false;
  bool unroll = false;
  bool pack = false;

  // Comma separated subset of parallelize,unroll,pack (order ignored).
  static OptFlags Parse(std::string_view list);
  std::string ToString() const;
};

struct CompileResult {
  Codelet instantiated;
  Codelet mapped;
  Codelet scheduled;
  Codelet tiled;
  Codelet optimized;
  Layout layout;
  MnemonicStream stream;
  std::vector<Packet> packets;
  Program program;
};

CompileResult Compile(const Codelet& tmpl, const LayerBinding& layer, const Package& pkg,
                      const OptFlags& opt);

// Random inputs for every inp surrogate of an instantiated codelet.
std::map<std::string, Tensor> RandomInputs(const Codelet& codelet, uint64_t seed);

// Places inputs at their compiled addresses in fresh images.
Images PreloadInputs(const Codelet& codelet, const Layout& layout, const Acg& acg,
                     const std::map<std::string, Tensor>& inputs);

// Reads every out surrogate back from the final images.
std::map<std::string, Tensor> ReadOutputs(const Codelet& codelet, const Layout& layout,
                                          const Images& images);

struct Mismatch {
  std::string tensor;
  int64_t index = 0;
  int64_t expected = 0;
  int64_t got = 0;
};

struct VerifyReport {
  bool pass = false;
  std::optional<Mismatch> mismatch;
  RunMetrics metrics;

  std::string ToText() const;
  std::string ToJson() const;
};

// Compiles, simulates on seeded random inputs and compares against the
// reference. `binary` replaces the compiled program image when given.
VerifyReport Verify(const Codelet& tmpl, const LayerBinding& layer, const Package& pkg,
                    uint64_t seed, const OptFlags& opt,
                    const std::vector<uint8_t>* binary = nullptr);

}  // namespace covenant
