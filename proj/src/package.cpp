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

#include "covenant/package.hpp"

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "covenant/error.hpp"

namespace covenant {
namespace fs = std::filesystem;

namespace {

std::vector<fs::path> SearchRoots(const char* sub, bool use_env) {
  std::vector<fs::path> roots;
  if (const char* env = std::getenv("COVENANT_PACKAGE_PATH"); use_env && env) {
    std::stringstream ss(env);
    std::string item;
    while (std::getline(ss, item, ':')) {
      if (!item.empty()) roots.emplace_back(item);
    }
  }
  roots.push_back(fs::path(COVENANT_SOURCE_DIR) / sub);
  return roots;
}

}  // namespace

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Stage::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<uint8_t> ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Stage::kIo, "cannot read " + path.string());
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteBytes(const fs::path& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Stage::kIo, "cannot write " + path.string());
}

void WriteText(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(Stage::kIo, "cannot write " + path.string());
}

Package LoadPackage(const fs::path& acg_path) {
  Package pkg;
  pkg.acg_path = acg_path;
  pkg.name = acg_path.stem().string();
  pkg.acg = ParseAcg(ReadText(acg_path));
  std::vector<std::string> problems = ValidateAcg(pkg.acg);
  if (!problems.empty()) throw Error(Stage::kValidate, problems.front());
  fs::path sem = fs::path(acg_path).replace_extension(".sem");
  if (fs::exists(sem)) pkg.semantics = ParseSemantics(ReadText(sem), pkg.acg);
  fs::path mm = fs::path(acg_path).replace_extension(".mm");
  if (fs::exists(mm)) pkg.macros = ParseMacros(ReadText(mm), pkg.acg);
  return pkg;
}

fs::path FindPackage(std::string_view spec) {
  fs::path p(spec);
  if (fs::is_regular_file(p)) return p;
  if (fs::is_directory(p)) {
    fs::path inner = p / (p.filename().string() + ".acg");
    if (fs::is_regular_file(inner)) return inner;
  }
  for (const fs::path& root : SearchRoots("packages", true)) {
    fs::path cand = root / std::string(spec) / (std::string(spec) + ".acg");
    if (fs::is_regular_file(cand)) return cand;
    cand = root / (std::string(spec) + ".acg");
    if (fs::is_regular_file(cand)) return cand;
  }
  throw Error(Stage::kIo, "no ACG package named " + std::string(spec));
}

fs::path FindCodelet(std::string_view spec) {
  fs::path p(spec);
  if (fs::is_regular_file(p)) return p;
  for (const fs::path& root : SearchRoots("codelets", false)) {
    fs::path cand = root / (std::string(spec) + ".cdlt");
    if (fs::is_regular_file(cand)) return cand;
  }
  throw Error(Stage::kIo, "no codelet named " + std::string(spec));
}

}  // namespace covenant
