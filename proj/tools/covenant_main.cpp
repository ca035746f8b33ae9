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

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "covenant/error.hpp"
#include "covenant/package.hpp"
#include "covenant/pipeline.hpp"

namespace {

using namespace covenant;
namespace fs = std::filesystem;

enum Exit { kOk = 0, kUsage = 1, kCompile = 2, kMismatch = 3, kFault = 4 };

struct Config {
  std::string acg;
  std::string cdlt;
  std::vector<std::string> layers;
  std::string opt;
  std::string emit = "binary";
  std::string out;
  std::string bin;
  uint64_t seed = 1;
  bool json = false;
  std::vector<std::string> metrics;
};

// Entries that name a readable file are loaded first; inline entries
// override them.
LayerBinding ResolveLayer(const std::vector<std::string>& layers) {
  LayerBinding files, inline_entries;
  for (const std::string& l : layers) {
    std::error_code ec;
    if (l.find('=') == std::string::npos && fs::is_regular_file(l, ec)) {
      files.Merge(LayerBinding::Parse(ReadText(l)));
    } else {
      inline_entries.Merge(LayerBinding::Parse(l));
    }
  }
  files.Merge(inline_entries);
  return files;
}

struct Loaded {
  Package pkg;
  Codelet tmpl;
  LayerBinding layer;
};

Loaded Load(const Config& cfg) {
  Loaded l{LoadPackage(FindPackage(cfg.acg)), {}, ResolveLayer(cfg.layers)};
  std::string cdlt = cfg.cdlt;
  if (cdlt.empty()) {
    if (l.layer.codelet.empty()) throw Error(Stage::kIo, "no codelet given (--cdlt or codelet= in --layer)");
    cdlt = l.layer.codelet;
  }
  l.tmpl = ParseCodelet(ReadText(FindCodelet(cdlt)));
  return l;
}

void Emit(const Config& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    WriteText(cfg.out, text);
  }
}

nlohmann::json Tagged(const VerifyReport& r, const Loaded& l, const Config& cfg) {
  nlohmann::json j = nlohmann::json::parse(r.metrics.ToJson());
  j["acg"] = l.pkg.acg.name;
  j["codelet"] = l.tmpl.name;
  j["opt"] = OptFlags::Parse(cfg.opt).ToString();
  j["pass"] = r.pass;
  return j;
}

int Compile(const Config& cfg) {
  Loaded l = Load(cfg);
  CompileResult r = covenant::Compile(l.tmpl, l.layer, l.pkg, OptFlags::Parse(cfg.opt));
  const std::string& e = cfg.emit;
  if (e == "instantiated") {
    Emit(cfg, RenderCodelet(r.instantiated));
  } else if (e == "mapped") {
    Emit(cfg, RenderCodelet(r.mapped));
  } else if (e == "scheduled") {
    Emit(cfg, RenderCodelet(r.scheduled));
  } else if (e == "tiled") {
    Emit(cfg, RenderCodelet(r.tiled));
  } else if (e == "optimized") {
    Emit(cfg, RenderCodelet(r.optimized));
  } else if (e == "mnemonics") {
    Emit(cfg, r.program.listing);
  } else {
    if (cfg.out.empty()) throw CLI::ValidationError("--emit=binary needs -o");
    WriteBytes(cfg.out, r.program.binary);
    WriteText(cfg.out + ".lst", r.program.listing);
    std::cout << cfg.out << ": " << r.program.binary.size() << " bytes, "
              << r.stream.size() << " mnemonics, " << r.packets.size() << " packets\n";
  }
  return kOk;
}

int Verify(const Config& cfg) {
  Loaded l = Load(cfg);
  std::vector<uint8_t> bin;
  if (!cfg.bin.empty()) bin = ReadBytes(cfg.bin);
  VerifyReport r = covenant::Verify(l.tmpl, l.layer, l.pkg, cfg.seed, OptFlags::Parse(cfg.opt),
                                    cfg.bin.empty() ? nullptr : &bin);
  nlohmann::json j = Tagged(r, l, cfg);
  if (!cfg.out.empty()) WriteText(cfg.out, j.dump(2) + "\n");
  std::cout << (cfg.json ? j.dump(2) + "\n" : r.ToText());
  return r.pass ? kOk : kMismatch;
}

int Simulate(const Config& cfg) {
  Loaded l = Load(cfg);
  CompileResult c = covenant::Compile(l.tmpl, l.layer, l.pkg, OptFlags::Parse(cfg.opt));
  std::vector<uint8_t> bin = cfg.bin.empty() ? c.program.binary : ReadBytes(cfg.bin);
  auto inputs = RandomInputs(c.instantiated, cfg.seed);
  Images images = PreloadInputs(c.instantiated, c.layout, l.pkg.acg, inputs);
  RunResult run = Run(bin, l.pkg.acg, l.pkg.semantics, std::move(images));
  nlohmann::json j = nlohmann::json::parse(run.metrics.ToJson());
  j["acg"] = l.pkg.acg.name;
  j["codelet"] = l.tmpl.name;
  j["opt"] = OptFlags::Parse(cfg.opt).ToString();
  nlohmann::json outs;
  for (const auto& [name, t] : ReadOutputs(c.instantiated, c.layout, run.images)) {
    outs[name] = t.data;
  }
  j["outputs"] = outs;
  Emit(cfg, j.dump(2) + "\n");
  return kOk;
}

std::string Ratio(double a, double b) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << (b == 0 ? 0.0 : a / b);
  return s.str();
}

int Report(const Config& cfg) {
  std::vector<nlohmann::json> rows;
  for (const std::string& path : cfg.metrics) {
    try {
      rows.push_back(nlohmann::json::parse(ReadText(path)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Stage::kIo, path + ": malformed metrics JSON: " + e.what());
    }
    const nlohmann::json& j = rows.back();
    if (!j.is_object() || !j.contains("cycles") || !j.contains("mnemonic_count")) {
      throw Error(Stage::kIo, path + ": not a metrics file");
    }
    if (j.value("acg", "") != rows.front().value("acg", "")) {
      throw Error(Stage::kIo, path + ": ACG " + j.value("acg", "?") + " does not match " +
                                  rows.front().value("acg", "?"));
    }
  }
  const double base = rows.front()["cycles"].get<double>();
  std::ostringstream out;
  out << "file,opt,cycles,mnemonics,packets,transfer_bits,ratio\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const nlohmann::json& j = rows[i];
    int64_t bits = 0;
    if (j.contains("transfer_bits")) {
      for (const auto& [k, v] : j["transfer_bits"].items()) bits += v.get<int64_t>();
    }
    std::string opt = j.value("opt", "");
    std::replace(opt.begin(), opt.end(), ',', '+');
    out << cfg.metrics[i] << "," << (opt.empty() ? "none" : opt) << "," << j["cycles"] << ","
        << j["mnemonic_count"] << "," << j.value("packet_count", 0) << "," << bits << ","
        << Ratio(j["cycles"].get<double>(), base) << "\n";
  }
  Emit(cfg, out.str());
  return kOk;
}

int InspectAcg(const Config& cfg) {
  Package p = LoadPackage(FindPackage(cfg.acg));
  std::ostringstream out;
  out << "acg " << p.acg.name << " vliw_slots=" << p.acg.vliw_slots.value_or(1)
      << " opcode_width=" << p.acg.opcode_width << "\n";
  out << "highest memory: " << HighestLevelMemory(p.acg) << "\n";
  out << "memories:\n";
  for (const MemoryNode& m : p.acg.memories) {
    const int64_t bits = CapacityBits(m);
    out << "  " << m.name << " data_width=" << m.data_width << " banks=" << m.banks
        << " depth=" << m.depth << " capacity=" << bits << " bits (" << bits / 8 << " bytes)\n";
  }
  out << "capabilities:\n";
  for (const ComputeNode& c : p.acg.computes) {
    for (const Capability& cap : c.capabilities) {
      out << "  " << c.name << " " << cap.ToString() << "\n";
    }
  }
  out << "edges:\n";
  for (const Edge& e : p.acg.edges) {
    out << "  " << e.src << " -> " << e.dst << " bandwidth=" << e.bandwidth << "\n";
  }
  out << "mnemonics: " << p.acg.mnemonics.size() << "\n";
  Emit(cfg, out.str());
  return kOk;
}

int ExitFor(const Error& e) {
  switch (e.stage()) {
    case Stage::kSimulate:
      return kFault;
    default:
      return kCompile;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covenant: compiles codelets against an architecture covenant graph"};
  app.require_subcommand(1);
  Config cfg;

  auto common = [&](CLI::App* c, bool needs_codelet) {
    c->add_option("--acg", cfg.acg, "ACG file, package directory or package name")->required();
    if (!needs_codelet) return;
    c->add_option("--cdlt", cfg.cdlt, "codelet file or name");
    c->add_option("--layer", cfg.layers, "layer bindings k=v,... or a file (repeatable)");
    c->add_option("--opt", cfg.opt, "parallelize,unroll,pack");
    c->add_option("--seed", cfg.seed, "input seed");
  };

  CLI::App* compile = app.add_subcommand("compile", "compile a codelet to a binary");
  common(compile, true);
  compile->add_option("--emit", cfg.emit, "stage to emit")
      ->check(CLI::IsMember({"instantiated", "mapped", "scheduled", "tiled", "optimized",
                             "mnemonics", "binary"}));
  compile->add_option("-o,--output", cfg.out, "output path");

  CLI::App* simulate = app.add_subcommand("simulate", "run a program on seeded inputs");
  common(simulate, true);
  simulate->add_option("--bin", cfg.bin, "binary to run instead of the compiled one");
  simulate->add_option("-o,--output", cfg.out, "metrics output path");

  CLI::App* verify = app.add_subcommand("verify", "compare the simulated program to the reference");
  common(verify, true);
  verify->add_option("--bin", cfg.bin, "binary to verify instead of the compiled one");
  verify->add_option("-o,--output", cfg.out, "metrics output path");
  verify->add_flag("--json", cfg.json, "print the report as JSON");

  CLI::App* report = app.add_subcommand("report", "tabulate metrics files");
  report->add_option("metrics", cfg.metrics, "metrics JSON files")->required();
  report->add_option("-o,--output", cfg.out, "CSV output path");

  CLI::App* inspect = app.add_subcommand("inspect-acg", "summarize a validated ACG");
  common(inspect, false);
  inspect->add_option("-o,--output", cfg.out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*compile) return Compile(cfg);
    if (*simulate) return Simulate(cfg);
    if (*verify) return Verify(cfg);
    if (*report) return Report(cfg);
    if (*inspect) return InspectAcg(cfg);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << StageName(e.stage()) << "]: " << e.what() << "\n";
    return ExitFor(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCompile;
  }
  return kUsage;
}
