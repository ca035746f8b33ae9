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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "covenant/acg.hpp"
#include "covenant/codegen.hpp"
#include "covenant/simulator.hpp"

namespace covenant {

// A target package: `<stem>.acg` plus sibling `<stem>.sem` and `<stem>.mm`.
struct Package {
  std::string name;
  std::filesystem::path acg_path;
  Acg acg;
  SemanticSet semantics;
  MacroRegistry macros;
};

// Parses and validates the ACG, then loads bindings and macro-mnemonics
// when present.
Package LoadPackage(const std::filesystem::path& acg_path);

// Resolves a package by file path, directory, or name. Names are searched in
// COVENANT_PACKAGE_PATH (colon separated) and then the shipped packages.
std::filesystem::path FindPackage(std::string_view spec);

// Resolves a codelet by file path or by name in the shipped library.
std::filesystem::path FindCodelet(std::string_view spec);

std::string ReadText(const std::filesystem::path& path);
std::vector<uint8_t> ReadBytes(const std::filesystem::path& path);
void WriteBytes(const std::filesystem::path& path, const std::vector<uint8_t>& bytes);
void WriteText(const std::filesystem::path& path, std::string_view text);

}  // namespace covenant
