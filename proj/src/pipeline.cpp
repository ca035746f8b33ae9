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

#include "covenant/pipeline.hpp"

#include <cctype>
#include <sstream>

#include <json.hpp>

#include "covenant/error.hpp"
#include "covenant/optimizer.hpp"
#include "covenant/scheduler.hpp"

namespace covenant {

OptFlags OptFlags::Parse(std::string_view list) {
  OptFlags f;
  std::stringstream ss{std::string(list)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::erase_if(item, [](unsigned char c) { return std::isspace(c); });
    if (item == "parallelize") {
      f.parallelize = true;
    } else if (item == "unroll") {
      f.unroll = true;
    } else if (item == "pack") {
      f.pack = true;
    } else if (!item.empty()) {
      throw Error(Stage::kOptimize, "unknown optimization '" + item + "'");
    }
  }
  return f;
}

std::string OptFlags::ToString() const {
  std::string out;
  for (auto [on, name] : {std::pair{parallelize, "parallelize"}, std::pair{unroll, "unroll"},
                          std::pair{pack, "pack"}}) {
    if (on) out += (out.empty() ? "" : ",") + std::string(name);
  }
  return out;
}

CompileResult Compile(const Codelet& tmpl, const LayerBinding& layer, const Package& pkg,
                      const OptFlags& opt) {
  if (!layer.codelet.empty() && layer.codelet != tmpl.name) {
    throw Error(Stage::kInstantiate,
                "layer binds codelet " + layer.codelet + " but the template is " + tmpl.name);
  }
  const Acg& acg = pkg.acg;
  CompileResult r;
  r.instantiated = Instantiate(tmpl, layer.params, layer.DtypesFor(tmpl));
  r.mapped = MapCompute(r.instantiated, acg);
  r.scheduled = InsertTransfers(r.mapped, acg);
  ValidTilingSet v = ValidTilings(r.scheduled, acg);
  if (v.permutations.empty()) {
    throw Error(Stage::kSchedule, "no valid tiling for codelet " + tmpl.name);
  }
  r.tiled = SplitLoops(r.scheduled, SelectTiling(v, r.scheduled, acg));
  r.optimized = r.tiled;
  if (opt.parallelize) r.optimized = Parallelize(r.optimized, acg);
  if (opt.unroll) r.optimized = UnrollLoops(r.optimized, acg);
  r.layout = PlanLayout(r.optimized, acg);
  r.stream = Lower(r.optimized, acg, pkg.macros);
  r.packets = opt.pack && acg.vliw_slots ? PackMnemonics(r.stream, acg) : SingletonPackets(r.stream);
  r.program = EncodeProgram(r.packets, acg);
  return r;
}

std::map<std::string, Tensor> RandomInputs(const Codelet& c, uint64_t seed) {
  std::map<std::string, Tensor> out;
  uint64_t i = 0;
  for (const Surrogate& s : c.surrogates) {
    if (s.kind != SurrogateKind::kInp) continue;
    ++i;
    out[s.name] = RandomTensor(*s.dtype, s.Extents(), seed * 0x9e3779b97f4a7c15ULL + i);
  }
  return out;
}

Images PreloadInputs(const Codelet& c, const Layout& layout, const Acg& acg,
                     const std::map<std::string, Tensor>& inputs) {
  Images images = BlankImages(acg);
  for (const auto& [name, t] : inputs) {
    const Surrogate& s = c.Get(name);
    if (t.dims != s.Extents()) throw Error(Stage::kSimulate, "input " + name + " has wrong shape");
    const Placement& p = layout.Of(name);
    MemoryImage& img = images.at(p.node);
    int64_t spe = img.SlotsPer(*s.dtype);
    for (size_t j = 0; j < t.data.size(); ++j) {
      img.Write(p.base_slot + static_cast<int64_t>(j) * spe, *s.dtype, t.data[j]);
    }
  }
  return images;
}

std::map<std::string, Tensor> ReadOutputs(const Codelet& c, const Layout& layout,
                                          const Images& images) {
  std::map<std::string, Tensor> out;
  for (const Surrogate& s : c.surrogates) {
    if (s.kind != SurrogateKind::kOut) continue;
    Tensor t = Tensor::Zeros(*s.dtype, s.Extents());
    const Placement& p = layout.Of(s.name);
    const MemoryImage& img = images.at(p.node);
    int64_t spe = img.SlotsPer(*s.dtype);
    for (size_t j = 0; j < t.data.size(); ++j) {
      t.data[j] = img.Read(p.base_slot + static_cast<int64_t>(j) * spe, *s.dtype);
    }
    out[s.name] = std::move(t);
  }
  return out;
}

std::string VerifyReport::ToText() const {
  std::ostringstream os;
  if (pass) {
    os << "PASS";
  } else if (mismatch) {
    os << "FAIL " << mismatch->tensor << "[" << mismatch->index << "]: expected "
       << mismatch->expected << ", got " << mismatch->got;
  } else {
    os << "FAIL";
  }
  os << "\n" << metrics.ToJson() << "\n";
  return os.str();
}

std::string VerifyReport::ToJson() const {
  nlohmann::ordered_json j;
  j["result"] = pass ? "PASS" : "FAIL";
  if (mismatch) {
    j["mismatch"] = {{"tensor", mismatch->tensor},
                     {"index", mismatch->index},
                     {"expected", mismatch->expected},
                     {"got", mismatch->got}};
  }
  j["metrics"] = nlohmann::ordered_json::parse(metrics.ToJson());
  return j.dump(2);
}

VerifyReport Verify(const Codelet& tmpl, const LayerBinding& layer, const Package& pkg,
                    uint64_t seed, const OptFlags& opt, const std::vector<uint8_t>* binary) {
  CompileResult r = Compile(tmpl, layer, pkg, opt);
  std::map<std::string, Tensor> inputs = RandomInputs(r.instantiated, seed);
  Images images = PreloadInputs(r.optimized, r.layout, pkg.acg, inputs);
  RunResult run = Run(binary ? *binary : r.program.binary, pkg.acg, pkg.semantics, std::move(images));
  std::map<std::string, DataType> dtypes;
  for (const Surrogate& s : r.instantiated.surrogates) dtypes[s.name] = *s.dtype;
  std::map<std::string, Tensor> expected = EvalLayer(tmpl.name, layer.params, inputs, dtypes);
  std::map<std::string, Tensor> got = ReadOutputs(r.optimized, r.layout, run.images);
  VerifyReport report;
  report.metrics = run.metrics;
  report.pass = true;
  for (const auto& [name, want] : expected) {
    auto it = got.find(name);
    if (it == got.end()) throw Error(Stage::kOracle, "compiled codelet has no output " + name);
    for (size_t i = 0; i < want.data.size(); ++i) {
      if (want.data[i] != it->second.data[i]) {
        report.pass = false;
        report.mismatch = Mismatch{name, static_cast<int64_t>(i), want.data[i], it->second.data[i]};
        return report;
      }
    }
  }
  return report;
}

}  // namespace covenant
