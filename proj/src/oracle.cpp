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

#include "covenant/oracle.hpp"

#include <algorithm>

#include "covenant/error.hpp"
#include "covenant/semantics.hpp"

namespace covenant {
namespace {

[[noreturn]] void Fail(const std::string& msg) { throw Error(Stage::kOracle, msg); }

std::string DimsText(const std::vector<int64_t>& dims) {
  std::string s = "[";
  for (size_t i = 0; i < dims.size(); ++i) s += (i ? "," : "") + std::to_string(dims[i]);
  return s + "]";
}

// Reference arithmetic, written independently of the simulator.
int64_t Combine(std::string_view op, DataType out, int64_t a, int64_t b) {
  switch (op[0]) {
    case 'A':
      return WrapTo(out, a + b);
    case 'S':
      return WrapTo(out, a - b);
    case 'M':
      if (op == "MUL") return WrapTo(out, a * b);
      if (op == "MAX") return a > b ? a : b;
      return a < b ? a : b;
    default:
      return a > 0 ? a : 0;
  }
}

const Tensor& Input(const std::map<std::string, Tensor>& in, const std::string& name,
                    const std::vector<int64_t>& dims) {
  auto it = in.find(name);
  if (it == in.end()) Fail("missing input tensor " + name);
  if (it->second.dims != dims) {
    Fail("input " + name + " has shape " + DimsText(it->second.dims) + ", expected " +
         DimsText(dims));
  }
  return it->second;
}

int64_t Param(const std::map<std::string, int64_t>& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) Fail("missing binding for " + name);
  if (it->second < 1) Fail("binding " + name + " must be positive");
  return it->second;
}

DataType DtypeOf(const std::map<std::string, DataType>& dtypes, const std::string& name) {
  auto it = dtypes.find(name);
  if (it == dtypes.end()) Fail("missing dtype for " + name);
  return it->second;
}

// out[i][j] = bias + sum_k a[i][k] * b[k][j], wrapped to `dt`.
Tensor Contract(const Tensor& a, const Tensor& b, const Tensor* bias, DataType dt, int64_t rows,
                int64_t inner, int64_t cols) {
  Tensor out = Tensor::Zeros(dt, {rows, cols});
  for (int64_t i = 0; i < rows; ++i) {
    for (int64_t j = 0; j < cols; ++j) {
      int64_t sum = 0;
      if (bias) sum = bias->data.size() == static_cast<size_t>(cols) ? bias->data[j]
                                                                     : bias->data[i * cols + j];
      for (int64_t k = 0; k < inner; ++k) sum += a.data[i * inner + k] * b.data[k * cols + j];
      out.data[i * cols + j] = WrapTo(dt, sum);
    }
  }
  return out;
}

}  // namespace

Tensor Tensor::Zeros(DataType dtype, std::vector<int64_t> dims) {
  Tensor t{dtype, std::move(dims), {}};
  t.data.assign(static_cast<size_t>(t.element_count()), 0);
  return t;
}

int64_t Tensor::element_count() const {
  int64_t n = 1;
  for (int64_t d : dims) n *= d;
  return n;
}

void Tensor::Check() const {
  if (static_cast<int64_t>(data.size()) != element_count()) {
    Fail("tensor holds " + std::to_string(data.size()) + " elements for shape " + DimsText(dims));
  }
  for (int64_t v : data) {
    if (v < dtype.min_value() || v > dtype.max_value()) {
      Fail("value " + std::to_string(v) + " does not fit " + dtype.ToString());
    }
  }
}

Tensor EvalCapability(std::string_view name, const std::vector<Tensor>& in,
                      std::optional<DataType> output) {
  const OpSemantics& sem = LookupOp(name, Stage::kOracle);
  if (static_cast<int>(in.size()) != sem.arity && !(name == "GEMM" && in.size() == 2)) {
    Fail(std::string(name) + " takes " + std::to_string(sem.arity) + " inputs");
  }
  for (const Tensor& t : in) t.Check();
  if (sem.contraction) {
    const Tensor& a = in[0];
    const Tensor& b = in[1];
    int64_t rows = a.dims.size() == 1 ? 1 : a.dims[0];
    int64_t inner = a.dims.back();
    if (a.dims.size() > 2 || b.dims.size() != 2 || b.dims[0] != inner) {
      Fail(std::string(name) + " shape mismatch " + DimsText(a.dims) + " x " + DimsText(b.dims));
    }
    int64_t cols = b.dims[1];
    const Tensor* bias = in.size() > 2 ? &in[2] : nullptr;
    if (bias && bias->element_count() != cols && bias->element_count() != rows * cols) {
      Fail(std::string(name) + " accumulator shape mismatch " + DimsText(bias->dims));
    }
    DataType dt = output.value_or(bias ? bias->dtype : a.dtype);
    Tensor out = Contract(a, b, bias, dt, rows, inner, cols);
    if (a.dims.size() == 1) out.dims = {cols};
    return out;
  }
  for (const Tensor& t : in) {
    if (t.dims != in[0].dims) Fail(std::string(name) + " shape mismatch");
  }
  if (name == "MAC") {
    DataType dt = output.value_or(in[2].dtype);
    Tensor out = Tensor::Zeros(dt, in[0].dims);
    for (size_t i = 0; i < out.data.size(); ++i) {
      out.data[i] = WrapTo(dt, in[2].data[i] + in[0].data[i] * in[1].data[i]);
    }
    return out;
  }
  DataType dt = output.value_or(in[0].dtype);
  Tensor out = Tensor::Zeros(dt, in[0].dims);
  for (size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = Combine(name, dt, in[0].data[i], in.size() > 1 ? in[1].data[i] : 0);
  }
  return out;
}

std::vector<std::string> OracleCodelets() {
  return {"add", "conv2d", "fc", "gemm", "matmul", "max", "mul", "relu", "sub"};
}

std::map<std::string, Tensor> EvalLayer(std::string_view codelet,
                                        const std::map<std::string, int64_t>& p,
                                        const std::map<std::string, Tensor>& in,
                                        const std::map<std::string, DataType>& dt) {
  const std::string name(codelet);
  if (name == "add" || name == "sub" || name == "mul" || name == "max") {
    const int64_t n = Param(p, "N");
    const Tensor& a = Input(in, "a", {n});
    const Tensor& b = Input(in, "b", {n});
    DataType out = DtypeOf(dt, "c");
    Tensor c = Tensor::Zeros(out, {n});
    std::string op = name == "add" ? "ADD" : name == "sub" ? "SUB" : name == "mul" ? "MUL" : "MAX";
    for (int64_t i = 0; i < n; ++i) c.data[i] = Combine(op, out, a.data[i], b.data[i]);
    return {{"c", c}};
  }
  if (name == "relu") {
    const int64_t n = Param(p, "N");
    const Tensor& a = Input(in, "a", {n});
    Tensor c = Tensor::Zeros(DtypeOf(dt, "c"), {n});
    for (int64_t i = 0; i < n; ++i) c.data[i] = a.data[i] < 0 ? 0 : a.data[i];
    return {{"c", c}};
  }
  if (name == "matmul" || name == "gemm" || name == "fc") {
    const bool fc = name == "fc";
    const int64_t m = Param(p, fc ? "B" : "M");
    const int64_t k = Param(p, fc ? "I" : "K");
    const int64_t n = Param(p, fc ? "O" : "N");
    const Tensor& a = Input(in, fc ? "x" : "a", {m, k});
    const Tensor& b = Input(in, fc ? "w" : "b", {k, n});
    const Tensor* bias = name == "matmul" ? nullptr : &Input(in, "bias", {n});
    const std::string out_name = fc ? "y" : "c";
    DataType out = DtypeOf(dt, out_name);
    Tensor c = Tensor::Zeros(out, {m, n});
    for (int64_t i = 0; i < m; ++i) {
      for (int64_t j = 0; j < n; ++j) {
        int64_t acc = bias ? bias->data[j] : 0;
        for (int64_t x = 0; x < k; ++x) acc += a.data[i * k + x] * b.data[x * n + j];
        c.data[i * n + j] = WrapTo(out, acc);
      }
    }
    return {{out_name, c}};
  }
  if (name == "conv2d") {
    const int64_t C = Param(p, "C"), H = Param(p, "H"), W = Param(p, "W");
    const int64_t OC = Param(p, "OC"), KH = Param(p, "KH"), KW = Param(p, "KW");
    const int64_t OH = Param(p, "OH"), OW = Param(p, "OW"), S = Param(p, "S");
    if ((OH - 1) * S + KH != H || (OW - 1) * S + KW != W) {
      Fail("conv2d bindings are inconsistent: output " + std::to_string(OH) + "x" +
           std::to_string(OW) + " does not cover input " + std::to_string(H) + "x" +
           std::to_string(W));
    }
    const Tensor& x = Input(in, "x", {C, H, W});
    const Tensor& w = Input(in, "w", {OC, C, KH, KW});
    DataType out = DtypeOf(dt, "y");
    Tensor y = Tensor::Zeros(out, {OC, OH, OW});
    for (int64_t o = 0; o < OC; ++o) {
      for (int64_t r = 0; r < OH; ++r) {
        for (int64_t q = 0; q < OW; ++q) {
          int64_t acc = 0;
          for (int64_t c = 0; c < C; ++c) {
            for (int64_t i = 0; i < KH; ++i) {
              for (int64_t j = 0; j < KW; ++j) {
                acc += x.data[(c * H + r * S + i) * W + q * S + j] *
                       w.data[((o * C + c) * KH + i) * KW + j];
              }
            }
          }
          y.data[(o * OH + r) * OW + q] = WrapTo(out, acc);
        }
      }
    }
    return {{"y", y}};
  }
  Fail("no reference for codelet " + name);
}

namespace {

constexpr uint8_t kCodes[][3] = {{1, 1, 8}, {2, 1, 16}, {3, 1, 32},
                                 {4, 0, 8}, {5, 0, 16}, {6, 0, 32}};

uint8_t CodeOf(DataType dt) {
  for (const auto& c : kCodes) {
    if ((c[1] != 0) == dt.is_signed && c[2] == dt.bits) return c[0];
  }
  Fail("dtype " + dt.ToString() + " has no tensor file code");
}

}  // namespace

std::vector<uint8_t> EncodeTensor(const Tensor& t) {
  t.Check();
  if (t.dims.size() > 4) Fail("tensor files hold at most 4 dimensions");
  std::vector<uint8_t> out{'C', 'V', 'T', 'N', CodeOf(t.dtype), static_cast<uint8_t>(t.dims.size())};
  for (size_t i = 0; i < 4; ++i) {
    int64_t d = i < t.dims.size() ? t.dims[i] : 0;
    if (d > 0xffff) Fail("dimension too large for a tensor file");
    out.push_back(d & 0xff);
    out.push_back((d >> 8) & 0xff);
  }
  out.push_back(0);
  out.push_back(0);
  const int bytes = t.dtype.bits / 8;
  for (int64_t v : t.data) {
    uint64_t raw = static_cast<uint64_t>(v);
    for (int b = 0; b < bytes; ++b) out.push_back((raw >> (8 * b)) & 0xff);
  }
  return out;
}

Tensor DecodeTensor(const std::vector<uint8_t>& in) {
  if (in.size() < 16 || in[0] != 'C' || in[1] != 'V' || in[2] != 'T' || in[3] != 'N') {
    Fail("not a tensor file");
  }
  Tensor t;
  bool known = false;
  for (const auto& c : kCodes) {
    if (c[0] == in[4]) {
      t.dtype = DataType{c[1] != 0, c[2]};
      known = true;
    }
  }
  if (!known) Fail("unknown tensor dtype code " + std::to_string(in[4]));
  if (in[5] > 4) Fail("tensor rank exceeds 4");
  for (int i = 0; i < in[5]; ++i) t.dims.push_back(in[6 + 2 * i] | (in[7 + 2 * i] << 8));
  const size_t bytes = static_cast<size_t>(t.dtype.bits / 8);
  const size_t n = static_cast<size_t>(t.element_count());
  if (in.size() != 16 + n * bytes) Fail("tensor file size does not match its header");
  for (size_t i = 0; i < n; ++i) {
    uint64_t raw = 0;
    for (size_t b = 0; b < bytes; ++b) raw |= uint64_t{in[16 + i * bytes + b]} << (8 * b);
    t.data.push_back(WrapTo(t.dtype, static_cast<int64_t>(raw)));
  }
  return t;
}

Tensor RandomTensor(DataType dtype, std::vector<int64_t> dims, uint64_t seed) {
  Tensor t = Tensor::Zeros(dtype, std::move(dims));
  uint64_t state = seed;
  const uint64_t range = static_cast<uint64_t>(dtype.max_value() - dtype.min_value()) + 1;
  for (int64_t& v : t.data) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    v = dtype.min_value() + static_cast<int64_t>(z % range);
  }
  return t;
}

}  // namespace covenant
