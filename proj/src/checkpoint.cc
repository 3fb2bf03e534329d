// Copyright 2026 The DIMNet-Toy Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dimnet/checkpoint.h"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dimnet/error.h"

namespace dimnet {

namespace {

constexpr char kMagic[8] = {'D', 'I', 'M', 'N', 'E', 'T', 'C', 'K'};

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  void U32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os_.write(reinterpret_cast<const char*>(b), 4);
  }
  void U64(std::uint64_t v) {
    U32(static_cast<std::uint32_t>(v));
    U32(static_cast<std::uint32_t>(v >> 32));
  }
  void Str(const std::string& s) {
    U64(s.size());
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void F64(double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    U64(bits);
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  Reader(std::istream& is, std::string path) : is_(is), path_(std::move(path)) {}
  std::uint32_t U32() {
    unsigned char b[4];
    if (!is_.read(reinterpret_cast<char*>(b), 4)) Truncated();
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t U64() {
    std::uint64_t lo = U32();
    std::uint64_t hi = U32();
    return lo | (hi << 32);
  }
  std::string Str() {
    const std::uint64_t n = U64();
    if (n > (1ull << 30)) Fail(ErrorCode::kIo, path_ + ": corrupt string length");
    std::string s(n, '\0');
    if (n > 0 && !is_.read(s.data(), static_cast<std::streamsize>(n))) Truncated();
    return s;
  }
  double F64() {
    std::uint64_t bits = U64();
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  }

 private:
  [[noreturn]] void Truncated() { Fail(ErrorCode::kIo, path_ + ": truncated checkpoint"); }
  std::istream& is_;
  std::string path_;
};

}  // namespace

Checkpoint MakeCheckpoint(const DimNet& model) {
  Checkpoint c;
  c.config_text = ConfigToText(model.config());
  c.fine_tokens = model.inventory().tokens(Side::kFine);
  c.coarse_tokens = model.inventory().tokens(Side::kCoarse);
  const ag::ParamStore& ps = model.params();
  for (int i = 0; i < ps.size(); ++i) c.tensors.push_back({ps.at(i).name, ps.at(i).value});
  return c;
}

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) Fail(ErrorCode::kIo, "cannot write " + tmp);
    os.write(kMagic, sizeof(kMagic));
    Writer w(os);
    w.U32(static_cast<std::uint32_t>(ckpt.version));
    w.Str(ckpt.config_text);
    for (const auto* side : {&ckpt.fine_tokens, &ckpt.coarse_tokens}) {
      w.U32(static_cast<std::uint32_t>(side->size()));
      for (const std::string& t : *side) w.Str(t);
    }
    w.U32(static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const NamedTensor& t : ckpt.tensors) {
      w.Str(t.name);
      w.U32(static_cast<std::uint32_t>(t.value.rows()));
      w.U32(static_cast<std::uint32_t>(t.value.cols()));
      for (Eigen::Index r = 0; r < t.value.rows(); ++r)
        for (Eigen::Index c = 0; c < t.value.cols(); ++c) w.F64(t.value(r, c));
    }
    if (!os.flush()) Fail(ErrorCode::kIo, "write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    Fail(ErrorCode::kIo, "cannot rename " + tmp + " to " + path);
}

void SaveModel(const std::string& path, const DimNet& model) {
  SaveCheckpoint(path, MakeCheckpoint(model));
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorCode::kIo, "missing checkpoint: " + path);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    Fail(ErrorCode::kIo, path + ": not a checkpoint");
  Reader r(is, path);
  Checkpoint c;
  c.version = static_cast<int>(r.U32());
  if (c.version != kCheckpointVersion)
    Fail(ErrorCode::kIo, path + ": unsupported checkpoint version " + std::to_string(c.version));
  c.config_text = r.Str();
  for (auto* side : {&c.fine_tokens, &c.coarse_tokens}) {
    const std::uint32_t n = r.U32();
    for (std::uint32_t i = 0; i < n; ++i) side->push_back(r.Str());
  }
  const std::uint32_t n = r.U32();
  for (std::uint32_t i = 0; i < n; ++i) {
    NamedTensor t;
    t.name = r.Str();
    const std::uint32_t rows = r.U32(), cols = r.U32();
    t.value.resize(rows, cols);
    for (std::uint32_t a = 0; a < rows; ++a)
      for (std::uint32_t b = 0; b < cols; ++b) t.value(a, b) = r.F64();
    c.tensors.push_back(std::move(t));
  }
  return c;
}

void CopyTensors(const Checkpoint& ckpt, DimNet* model) {
  ag::ParamStore& ps = model->params();
  if (static_cast<int>(ckpt.tensors.size()) != ps.size())
    Fail(ErrorCode::kConfig, "checkpoint has " + std::to_string(ckpt.tensors.size()) +
                                 " tensors, model expects " + std::to_string(ps.size()));
  for (const NamedTensor& t : ckpt.tensors) {
    ag::Parameter* p = ps.Find(t.name);
    if (p == nullptr) Fail(ErrorCode::kConfig, "checkpoint tensor '" + t.name + "' unknown to model");
    if (p->value.rows() != t.value.rows() || p->value.cols() != t.value.cols())
      Fail(ErrorCode::kConfig, "checkpoint tensor '" + t.name + "' has wrong shape");
    p->value = t.value;
  }
}

namespace {

void CompareShapeKeys(const Config& stored, const Config& expected) {
  std::istringstream a(ModelConfigText(stored)), b(ModelConfigText(expected));
  std::string la, lb;
  while (std::getline(a, la) && std::getline(b, lb)) {
    if (la != lb)
      Fail(ErrorCode::kConfig, "checkpoint config mismatch: stored '" + la +
                                   "' vs requested '" + lb + "'");
  }
}

}  // namespace

std::unique_ptr<DimNet> RestoreModel(const Checkpoint& ckpt, const Config* expected) {
  Config stored;
  ApplyConfigText(ckpt.config_text, &stored, "checkpoint");
  Config use = stored;
  if (expected != nullptr) {
    CompareShapeKeys(stored, *expected);
    use = *expected;
    use.model.seed = stored.model.seed;
  }
  UnitInventory inv(ckpt.fine_tokens, ckpt.coarse_tokens);
  auto model = std::make_unique<DimNet>(use, inv);
  CopyTensors(ckpt, model.get());
  return model;
}

}  // namespace dimnet
