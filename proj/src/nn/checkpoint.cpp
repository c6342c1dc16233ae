// Copyright 2026 The FlowProver Authors
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

#include "flowprover/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace flowprover::nn {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'F', 'P', 'C', 'K', 'P', 'T', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  template <typename T>
  void pod(const T& v) {
    out_.append(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void str(const std::string& s) {
    pod(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }
  void store(const ParamStore& ps) {
    pod(static_cast<std::uint32_t>(ps.tensors().size()));
    for (const auto& [name, t] : ps.tensors()) {
      str(name);
      pod(static_cast<std::uint64_t>(t.rows));
      pod(static_cast<std::uint64_t>(t.cols));
      out_.append(reinterpret_cast<const char*>(t.data.data()),
                  t.data.size() * sizeof(double));
    }
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& in) : in_(in) {}

  template <typename T>
  T pod() {
    T v;
    need(sizeof v);
    std::memcpy(&v, in_.data() + pos_, sizeof v);
    pos_ += sizeof v;
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint32_t>();
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  ParamStore store() {
    ParamStore ps;
    const auto n = pod<std::uint32_t>();
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::string name = str();
      const auto rows = pod<std::uint64_t>();
      const auto cols = pod<std::uint64_t>();
      if (cols != 0 && rows > (in_.size() / sizeof(double)) / cols) {
        throw CheckpointError("tensor '" + name + "' larger than file");
      }
      Tensor& t = ps.add(name, rows, cols);
      const std::size_t bytes = t.data.size() * sizeof(double);
      need(bytes);
      std::memcpy(t.data.data(), in_.data() + pos_, bytes);
      pos_ += bytes;
    }
    return ps;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw CheckpointError("truncated checkpoint");
  }
  const std::string& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  for (const char c : kMagic) w.pod(c);
  w.pod(kVersion);
  w.pod(static_cast<std::uint32_t>(ckpt.meta.size()));
  for (const auto& [k, v] : ckpt.meta) {
    w.str(k);
    w.str(v);
  }
  w.store(ckpt.params);
  w.pod(static_cast<std::uint8_t>(ckpt.optimizer.has_value()));
  if (ckpt.optimizer) {
    w.pod(ckpt.optimizer->step);
    w.store(ckpt.optimizer->m);
    w.store(ckpt.optimizer->v);
  }
  return w.take();
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  for (const char c : kMagic) {
    if (r.pod<char>() != c) throw CheckpointError("bad checkpoint magic");
  }
  if (const auto version = r.pod<std::uint32_t>(); version != kVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  const auto n_meta = r.pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.str();
    ckpt.meta[std::move(k)] = r.str();
  }
  ckpt.params = r.store();
  if (r.pod<std::uint8_t>() != 0) {
    AdamWState st;
    st.step = r.pod<std::int64_t>();
    st.m = r.store();
    st.v = r.store();
    ckpt.optimizer = std::move(st);
  }
  if (!r.done()) throw CheckpointError("trailing bytes in checkpoint");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open " + path.string() + " for writing");
  const std::string bytes = serialize_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_checkpoint(ss.str());
}

}  // namespace flowprover::nn
