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

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "covenant/acg.hpp"
#include "covenant/error.hpp"

namespace covenant {

int64_t AddressableElementBits(const MemoryNode& node) {
  return node.data_width * node.banks;
}

int64_t CapacityBits(const MemoryNode& node) {
  return node.depth * AddressableElementBits(node);
}

std::optional<std::string> MnemonicDef::Attr(std::string_view key) const {
  for (const auto& [k, v] : attrs) {
    if (k == key) return v;
  }
  return std::nullopt;
}

int MnemonicDef::FieldIndex(std::string_view field) const {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].name == field) return static_cast<int>(i);
  }
  return -1;
}

int MnemonicDef::total_bits(int opcode_width) const {
  int bits = opcode_width;
  for (const FieldDef& f : fields) bits += f.width;
  return bits;
}

const MemoryNode* Acg::FindMemory(std::string_view n) const {
  for (const auto& m : memories) {
    if (m.name == n) return &m;
  }
  return nullptr;
}

const ComputeNode* Acg::FindCompute(std::string_view n) const {
  for (const auto& c : computes) {
    if (c.name == n) return &c;
  }
  return nullptr;
}

const Edge* Acg::FindEdge(std::string_view src, std::string_view dst) const {
  for (const auto& e : edges) {
    if (e.src == src && e.dst == dst) return &e;
  }
  return nullptr;
}

const MnemonicDef* Acg::FindMnemonic(std::string_view n) const {
  for (const auto& m : mnemonics) {
    if (m.name == n) return &m;
  }
  return nullptr;
}

const MnemonicDef* Acg::FindOpcode(int64_t opcode) const {
  for (const auto& m : mnemonics) {
    if (m.opcode == opcode) return &m;
  }
  return nullptr;
}

bool Acg::HasNode(std::string_view n) const {
  return FindMemory(n) != nullptr || FindCompute(n) != nullptr;
}

const MemoryNode& Acg::Memory(std::string_view n) const {
  const MemoryNode* m = FindMemory(n);
  if (m == nullptr) {
    throw Error(Stage::kValidate, "unknown memory node '" + std::string(n) + "'");
  }
  return *m;
}

namespace {

std::string RenderSpan(const std::vector<SpanTerm>& span) {
  std::string s;
  for (const SpanTerm& t : span) {
    s += ", ";
    if (std::holds_alternative<int64_t>(t)) {
      s += std::to_string(std::get<int64_t>(t));
    } else {
      s += std::get<std::string>(t);
    }
  }
  return s;
}

std::string RenderField(const FieldDef& f) {
  std::ostringstream os;
  if (f.kind == FieldDef::Kind::kInt) {
    os << "ifield(\"" << f.name << "\", " << f.width;
  } else {
    os << "efield(\"" << f.name << "\", " << f.width << ", [";
    for (size_t i = 0; i < f.enum_values.size(); ++i) {
      os << (i ? ", " : "") << '"' << f.enum_values[i] << '"';
    }
    os << "]";
  }
  if (f.access) {
    os << ", " << (f.access->mode == FieldAccess::Mode::kRead ? "read" : "write")
       << "(\"" << f.access->node << "\"" << RenderSpan(f.access->span) << ")";
  }
  os << ")";
  return os.str();
}

}  // namespace

std::string RenderAcg(const Acg& acg) {
  std::ostringstream os;
  os << "acg \"" << acg.name << "\"";
  if (acg.vliw_slots) os << " vliw_slots=" << *acg.vliw_slots;
  if (acg.opcode_width != 8) os << " opcode_width=" << acg.opcode_width;
  os << " {\n";
  for (const auto& m : acg.memories) {
    os << "  memory " << m.name << " { data_width=" << m.data_width
       << "; banks=" << m.banks << "; depth=" << m.depth << "; }\n";
  }
  for (const auto& c : acg.computes) {
    os << "  compute " << c.name << " {";
    for (const auto& cap : c.capabilities) {
      os << " capability \"" << cap.ToString() << "\";";
    }
    os << " }\n";
  }
  for (const auto& e : acg.edges) {
    os << "  edge " << e.src << " -> " << e.dst << " { bandwidth=" << e.bandwidth
       << "; }\n";
  }
  for (const auto& m : acg.mnemonics) {
    os << "  mnemonic " << m.name << "(" << m.opcode << ") {";
    bool first = true;
    for (const auto& f : m.fields) {
      os << (first ? " " : ", ") << RenderField(f);
      first = false;
    }
    for (const auto& [k, v] : m.attrs) {
      os << (first ? " " : ", ") << "attr(\"" << k << "\", \"" << v << "\")";
      first = false;
    }
    os << " }\n";
  }
  os << "}\n";
  return os.str();
}

std::vector<std::pair<std::string, int>> HopDistances(const Acg& acg,
                                                      std::string_view src) {
  std::map<std::string, int> dist;
  std::deque<std::string> queue;
  dist[std::string(src)] = 0;
  queue.emplace_back(src);
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    if (cur != src && acg.FindCompute(cur)) continue;
    for (const Edge& e : acg.edges) {
      if (e.src == cur && !dist.contains(e.dst)) {
        dist[e.dst] = dist[cur] + 1;
        queue.push_back(e.dst);
      }
    }
  }
  std::vector<std::pair<std::string, int>> out;
  auto add = [&](const std::string& n) {
    auto it = dist.find(n);
    out.emplace_back(n, it == dist.end() ? -1 : it->second);
  };
  for (const auto& m : acg.memories) add(m.name);
  for (const auto& c : acg.computes) add(c.name);
  return out;
}

std::vector<std::string> ValidateAcg(const Acg& acg) {
  std::vector<std::string> v;
  std::set<std::string> names;
  for (const auto& m : acg.memories) {
    if (!names.insert(m.name).second) v.push_back("duplicate node name " + m.name);
    if (m.data_width < 1 || m.banks < 1 || m.depth < 1) {
      v.push_back("memory " + m.name + " attributes must be positive");
    }
  }
  for (const auto& c : acg.computes) {
    if (!names.insert(c.name).second) v.push_back("duplicate node name " + c.name);
    std::set<std::string> keys;
    for (const auto& cap : c.capabilities) {
      std::string key = cap.name;
      for (const auto& in : cap.inputs) key += "|" + in.ToString();
      if (!keys.insert(key).second) {
        v.push_back("duplicate capability " + cap.ToString() + " on " + c.name);
      }
    }
  }
  std::set<std::pair<std::string, std::string>> seen_edges;
  for (const auto& e : acg.edges) {
    std::string label = e.src + " -> " + e.dst;
    if (!acg.HasNode(e.src) || !acg.HasNode(e.dst)) {
      v.push_back("edge " + label + " references unknown node");
      continue;
    }
    if (e.src == e.dst) v.push_back("edge " + label + " is a self loop");
    if (!acg.IsMemory(e.src) && !acg.IsMemory(e.dst)) {
      v.push_back("edge must touch a memory node");
    }
    if (e.bandwidth < 1) v.push_back("edge " + label + " bandwidth must be positive");
    if (!seen_edges.insert({e.src, e.dst}).second) {
      v.push_back("duplicate edge " + label);
    }
  }
  std::set<std::string> reachable;
  for (const auto& m : acg.memories) {
    for (const auto& [n, d] : HopDistances(acg, m.name)) {
      if (d >= 0) reachable.insert(n);
    }
  }
  for (const auto& c : acg.computes) {
    if (!reachable.contains(c.name)) v.push_back("unreachable compute node " + c.name);
  }
  if (acg.vliw_slots && *acg.vliw_slots < 1) v.push_back("vliw_slots must be positive");
  if (acg.opcode_width < 1 || acg.opcode_width > 32) {
    v.push_back("opcode_width must be in [1, 32]");
  }
  std::set<std::string> mnames;
  std::set<int64_t> opcodes;
  for (const auto& m : acg.mnemonics) {
    if (!mnames.insert(m.name).second) v.push_back("duplicate mnemonic " + m.name);
    if (!opcodes.insert(m.opcode).second) {
      v.push_back("duplicate opcode " + std::to_string(m.opcode));
    }
    if (m.opcode < 0 || (acg.opcode_width < 63 && m.opcode >= (int64_t{1} << acg.opcode_width))) {
      v.push_back("opcode of " + m.name + " does not fit opcode_width");
    }
    for (const auto& f : m.fields) {
      std::string where = m.name + "." + f.name;
      if (f.width < 1 || f.width > 62) v.push_back("field " + where + " width out of range");
      if (f.kind == FieldDef::Kind::kEnum) {
        if (f.enum_values.empty() ||
            (f.width < 62 && static_cast<int64_t>(f.enum_values.size()) > (int64_t{1} << f.width))) {
          v.push_back("field " + where + " has too many enum values");
        }
      }
      if (f.access) {
        if (!acg.IsMemory(f.access->node)) {
          v.push_back("field " + where + " accesses unknown memory " + f.access->node);
        }
        for (const auto& t : f.access->span) {
          if (std::holds_alternative<std::string>(t) &&
              m.FieldIndex(std::get<std::string>(t)) < 0) {
            v.push_back("field " + where + " span names unknown field " +
                        std::get<std::string>(t));
          }
        }
      }
    }
    auto res = m.Attr("resource");
    if (!res) {
      v.push_back("mnemonic " + m.name + " has no resource attribute");
    } else if (!acg.HasNode(*res)) {
      int idx = m.FieldIndex(*res);
      bool ok = idx >= 0 && m.fields[idx].kind == FieldDef::Kind::kEnum;
      if (ok) {
        for (const auto& val : m.fields[idx].enum_values) ok = ok && acg.HasNode(val);
      }
      if (!ok) v.push_back("mnemonic " + m.name + " resource is not a node or node enum");
    }
  }
  return v;
}

std::vector<Edge> ShortestPath(const Acg& acg, std::string_view src,
                               std::string_view dst) {
  if (!acg.HasNode(src) || !acg.HasNode(dst)) {
    throw Error(Stage::kSchedule, "unknown node in path query " + std::string(src) +
                                      " -> " + std::string(dst));
  }
  if (src == dst) return {};
  // Reverse BFS gives the distance to dst; walking forward greedily along
  // the lexicographically smallest successor realizes the tie-break.
  std::map<std::string, int> to_dst;
  std::deque<std::string> queue;
  to_dst[std::string(dst)] = 0;
  queue.emplace_back(dst);
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    for (const Edge& e : acg.edges) {
      if (e.dst == cur && !to_dst.contains(e.src) && (e.src == src || !acg.FindCompute(e.src))) {
        to_dst[e.src] = to_dst[cur] + 1;
        queue.push_back(e.src);
      }
    }
  }
  auto it = to_dst.find(std::string(src));
  if (it == to_dst.end()) {
    throw Error(Stage::kSchedule, "no path from " + std::string(src) + " to " +
                                      std::string(dst));
  }
  std::vector<Edge> path;
  std::string cur(src);
  while (cur != dst) {
    int want = to_dst[cur] - 1;
    const Edge* best = nullptr;
    for (const Edge& e : acg.edges) {
      if (e.src != cur) continue;
      auto d = to_dst.find(e.dst);
      if (d == to_dst.end() || d->second != want) continue;
      if (best == nullptr || e.dst < best->dst) best = &e;
    }
    path.push_back(*best);
    cur = best->dst;
  }
  return path;
}

std::string HighestLevelMemory(const Acg& acg) {
  std::optional<std::string> best;
  int64_t best_score = -1;
  for (const auto& m : acg.memories) {
    auto dist = HopDistances(acg, m.name);
    int64_t score = 0;
    bool reaches_all = true;
    for (const auto& c : acg.computes) {
      auto it = std::find_if(dist.begin(), dist.end(),
                             [&](const auto& p) { return p.first == c.name; });
      if (it->second < 0) {
        reaches_all = false;
        break;
      }
      score += it->second;
    }
    if (!reaches_all) continue;
    if (score > best_score || (score == best_score && m.name < *best)) {
      best = m.name;
      best_score = score;
    }
  }
  if (!best) {
    throw Error(Stage::kSchedule,
                "no memory node reaches every compute node in " + acg.name);
  }
  return *best;
}

namespace {

std::vector<Support> SortSupport(std::vector<Support> out) {
  std::stable_sort(out.begin(), out.end(), [](const Support& a, const Support& b) {
    if (a.capability.throughput() != b.capability.throughput()) {
      return a.capability.throughput() > b.capability.throughput();
    }
    return a.node < b.node;
  });
  return out;
}

}  // namespace

std::vector<Support> SupportingNodes(const Acg& acg, std::string_view op,
                                     DataType dtype) {
  std::vector<Support> out;
  for (const auto& c : acg.computes) {
    for (const auto& cap : c.capabilities) {
      if (cap.name != op) continue;
      bool all = std::all_of(cap.inputs.begin(), cap.inputs.end(),
                             [&](const OperandSpec& s) { return s.dtype == dtype; });
      if (all) out.push_back({c.name, cap});
    }
  }
  return SortSupport(std::move(out));
}

std::vector<Support> SupportingNodes(const Acg& acg, std::string_view op,
                                     const std::vector<DataType>& inputs) {
  std::vector<Support> out;
  for (const auto& c : acg.computes) {
    for (const auto& cap : c.capabilities) {
      if (cap.name != op || cap.inputs.size() != inputs.size()) continue;
      bool match = true;
      for (size_t i = 0; i < inputs.size(); ++i) {
        match = match && cap.inputs[i].dtype == inputs[i];
      }
      if (match) out.push_back({c.name, cap});
    }
  }
  return SortSupport(std::move(out));
}

}  // namespace covenant
