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

#include "covenant/codegen.hpp"
#include "covenant/error.hpp"

namespace covenant {
namespace {

constexpr uint8_t kVersion = 1;

const MnemonicDef& DefOf(const Acg& acg, std::string_view name) {
  const MnemonicDef* def = acg.FindMnemonic(name);
  if (!def) throw Error(Stage::kCodegen, "unknown mnemonic " + std::string(name));
  return *def;
}

class BitWriter {
 public:
  void Put(uint64_t value, int width) {
    for (int i = width - 1; i >= 0; --i) {
      if (bits_ % 8 == 0) bytes_.push_back(0);
      if ((value >> i) & 1) bytes_.back() |= static_cast<uint8_t>(0x80 >> (bits_ % 8));
      ++bits_;
    }
  }
  Encoded Take() { return Encoded{std::move(bytes_), bits_}; }

 private:
  std::vector<uint8_t> bytes_;
  int bits_ = 0;
};

class BitReader {
 public:
  BitReader(const uint8_t* data, size_t size) : data_(data), size_(size) {}
  uint64_t Get(int width) {
    uint64_t v = 0;
    for (int i = 0; i < width; ++i, ++pos_) {
      if (pos_ / 8 >= size_) throw Error(Stage::kCodegen, "truncated mnemonic");
      v = (v << 1) | ((data_[pos_ / 8] >> (7 - pos_ % 8)) & 1);
    }
    return v;
  }

 private:
  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
};

void PutU16(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  PutU16(out, v & 0xffff);
  PutU16(out, v >> 16);
}

}  // namespace

Mnemonic MakeMnemonic(const Acg& acg, std::string_view name, std::vector<int64_t> values) {
  const MnemonicDef& def = DefOf(acg, name);
  Mnemonic m{def.name, std::move(values), {}};
  if (m.values.size() != def.fields.size()) {
    throw Error(Stage::kCodegen, "mnemonic " + def.name + " takes " +
                                     std::to_string(def.fields.size()) + " fields, got " +
                                     std::to_string(m.values.size()));
  }
  if (auto res = def.Attr("resource")) {
    int idx = def.FieldIndex(*res);
    if (idx >= 0 && def.fields[idx].kind == FieldDef::Kind::kEnum) {
      int64_t v = m.values[idx];
      if (v >= 0 && v < static_cast<int64_t>(def.fields[idx].enum_values.size())) {
        m.resource = def.fields[idx].enum_values[v];
      }
    } else {
      m.resource = *res;
    }
  }
  CheckMnemonic(m, acg);
  return m;
}

void CheckMnemonic(const Mnemonic& m, const Acg& acg) {
  const MnemonicDef& def = DefOf(acg, m.name);
  if (m.values.size() != def.fields.size()) {
    throw Error(Stage::kCodegen, "mnemonic " + def.name + " has wrong arity");
  }
  for (size_t i = 0; i < def.fields.size(); ++i) {
    const FieldDef& f = def.fields[i];
    int64_t v = m.values[i];
    int64_t limit = f.kind == FieldDef::Kind::kEnum ? static_cast<int64_t>(f.enum_values.size())
                                                    : (int64_t{1} << f.width);
    if (v < 0 || v >= limit) {
      throw Error(Stage::kCodegen, "value " + std::to_string(v) + " out of range for field " +
                                       f.name + " of " + def.name);
    }
  }
  if (!m.resource.empty() && !acg.HasNode(m.resource)) {
    throw Error(Stage::kCodegen, "mnemonic " + def.name + " names unknown resource " + m.resource);
  }
}

std::string MnemonicToString(const Mnemonic& m, const Acg& acg) {
  const MnemonicDef& def = DefOf(acg, m.name);
  std::string out = m.name;
  for (size_t i = 0; i < def.fields.size() && i < m.values.size(); ++i) {
    out += i ? ", " : " ";
    const FieldDef& f = def.fields[i];
    if (f.kind == FieldDef::Kind::kEnum) {
      out += f.enum_values.at(m.values[i]);
    } else {
      out += "#" + std::to_string(m.values[i]);
    }
  }
  return out;
}

Encoded Encode(const Mnemonic& m, const Acg& acg) {
  CheckMnemonic(m, acg);
  const MnemonicDef& def = DefOf(acg, m.name);
  if (def.opcode < 0 || def.opcode >= (int64_t{1} << acg.opcode_width)) {
    throw Error(Stage::kCodegen, "opcode of " + def.name + " exceeds the opcode width");
  }
  BitWriter w;
  w.Put(def.opcode, acg.opcode_width);
  for (size_t i = 0; i < def.fields.size(); ++i) w.Put(m.values[i], def.fields[i].width);
  return w.Take();
}

Mnemonic Decode(const uint8_t* data, size_t size, const Acg& acg, size_t* consumed) {
  BitReader r(data, size);
  int64_t opcode = static_cast<int64_t>(r.Get(acg.opcode_width));
  const MnemonicDef* def = acg.FindOpcode(opcode);
  if (!def) throw Error(Stage::kCodegen, "unknown opcode " + std::to_string(opcode));
  size_t bytes = (def->total_bits(acg.opcode_width) + 7) / 8;
  if (bytes > size) throw Error(Stage::kCodegen, "truncated mnemonic " + def->name);
  std::vector<int64_t> values;
  for (const FieldDef& f : def->fields) values.push_back(static_cast<int64_t>(r.Get(f.width)));
  if (consumed) *consumed = bytes;
  return MakeMnemonic(acg, def->name, std::move(values));
}

std::vector<Packet> SingletonPackets(const MnemonicStream& stream) {
  std::vector<Packet> out;
  for (const Mnemonic& m : stream) out.push_back(Packet{{m}, {m.resource}});
  return out;
}

std::string ListPackets(const std::vector<Packet>& packets, const Acg& acg) {
  std::string out;
  for (const Packet& p : packets) {
    if (p.slots.size() == 1) {
      out += MnemonicToString(p.slots[0], acg);
    } else {
      out += "{ ";
      for (size_t i = 0; i < p.slots.size(); ++i) {
        out += (i ? "; " : "") + MnemonicToString(p.slots[i], acg);
      }
      out += " }";
    }
    out += "\n";
  }
  return out;
}

Program EncodeProgram(const std::vector<Packet>& packets, const Acg& acg) {
  Program prog;
  std::vector<uint8_t>& out = prog.binary;
  out.insert(out.end(), {'C', 'V', 'N', 'T', kVersion});
  PutU16(out, static_cast<uint32_t>(acg.name.size()));
  out.insert(out.end(), acg.name.begin(), acg.name.end());
  out.push_back(static_cast<uint8_t>(acg.opcode_width));
  out.push_back(static_cast<uint8_t>(acg.slots()));
  uint32_t count = 0;
  for (const Packet& p : packets) count += static_cast<uint32_t>(p.slots.size());
  PutU32(out, count);
  for (const Packet& p : packets) {
    if (p.slots.empty() || p.slots.size() > static_cast<size_t>(acg.slots())) {
      throw Error(Stage::kCodegen, "packet size " + std::to_string(p.slots.size()) +
                                       " does not fit " + std::to_string(acg.slots()) + " slots");
    }
    if (acg.slots() > 1) out.push_back(static_cast<uint8_t>(p.slots.size()));
    for (const Mnemonic& m : p.slots) {
      Encoded e = Encode(m, acg);
      out.insert(out.end(), e.bytes.begin(), e.bytes.end());
    }
  }
  prog.listing = ListPackets(packets, acg);
  return prog;
}

Program EncodeProgram(const MnemonicStream& stream, const Acg& acg) {
  return EncodeProgram(SingletonPackets(stream), acg);
}

std::vector<Packet> DecodeProgram(const std::vector<uint8_t>& bin, const Acg& acg) {
  size_t pos = 0;
  auto need = [&](size_t n) {
    if (pos + n > bin.size()) throw Error(Stage::kCodegen, "truncated program image");
  };
  auto u8 = [&]() {
    need(1);
    return bin[pos++];
  };
  auto u16 = [&]() {
    uint32_t lo = u8();
    return lo | (uint32_t{u8()} << 8);
  };
  need(4);
  if (bin[0] != 'C' || bin[1] != 'V' || bin[2] != 'N' || bin[3] != 'T') {
    throw Error(Stage::kCodegen, "bad program magic");
  }
  pos = 4;
  if (u8() != kVersion) throw Error(Stage::kCodegen, "unsupported program version");
  size_t len = u16();
  need(len);
  std::string name(bin.begin() + pos, bin.begin() + pos + len);
  pos += len;
  if (name != acg.name) throw Error(Stage::kCodegen, "program targets ACG " + name);
  if (u8() != acg.opcode_width) throw Error(Stage::kCodegen, "opcode width mismatch");
  int slots = u8();
  if (slots != acg.slots()) throw Error(Stage::kCodegen, "slot count mismatch");
  uint32_t count = u16();
  count |= u16() << 16;
  std::vector<Packet> packets;
  uint32_t seen = 0;
  while (seen < count) {
    size_t n = slots > 1 ? u8() : 1;
    if (n == 0 || n > static_cast<size_t>(slots)) throw Error(Stage::kCodegen, "bad packet size");
    Packet p;
    for (size_t i = 0; i < n; ++i) {
      size_t used = 0;
      Mnemonic m = Decode(bin.data() + pos, bin.size() - pos, acg, &used);
      pos += used;
      p.resources.insert(m.resource);
      p.slots.push_back(std::move(m));
    }
    seen += static_cast<uint32_t>(n);
    packets.push_back(std::move(p));
  }
  if (seen != count || pos != bin.size()) throw Error(Stage::kCodegen, "trailing bytes in program");
  return packets;
}

}  // namespace covenant
