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

#include <filesystem>
#include <string>

#include "covenant/codelet.hpp"
#include "covenant/package.hpp"
#include "covenant/scheduler.hpp"

namespace covenant::testing {

inline std::filesystem::path SourceDir() { return COVENANT_SOURCE_DIR; }
inline std::filesystem::path TestDir() { return COVENANT_TEST_DIR; }

inline Package Fixture(const std::string& name) {
  return LoadPackage(SourceDir() / "packages" / name / (name + ".acg"));
}

inline Codelet Template(const std::string& name) {
  return ParseCodelet(ReadText(SourceDir() / "codelets" / (name + ".cdlt")));
}

inline Codelet Instantiated(const std::string& name, const std::string& layer) {
  Codelet t = Template(name);
  LayerBinding b = LayerBinding::Parse(layer);
  return Instantiate(t, b.params, b.DtypesFor(t));
}

// Mapped codelet with transfers inserted, ready for tiling.
inline Codelet Scheduled(const std::string& name, const std::string& layer, const Acg& acg) {
  return InsertTransfers(MapCompute(Instantiated(name, layer), acg), acg);
}

}  // namespace covenant::testing
