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

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "flowprover/nn/optim.hpp"
#include "flowprover/nn/param_store.hpp"

namespace flowprover::nn {

// Binary, little-endian, version 1:
//   "FPCKPT\0\0" | u32 version | u32 n_meta { str key, str value }
//   | store params | u8 has_optimizer [ i64 step | store m | store v ]
// where str = u32 length + bytes and store = u32 count { str name, u64 rows,
// u64 cols, f64[rows*cols] }. Doubles are stored bit-exactly.
struct Checkpoint {
  std::map<std::string, std::string> meta;
  ParamStore params;
  std::optional<AdamWState> optimizer;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace flowprover::nn
