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

#include "flowprover/nn/param_store.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "flowprover/simd/kernels.hpp"
#include "flowprover/util/hash.hpp"

namespace flowprover::nn {

Tensor& ParamStore::add(const std::string& name, std::size_t rows, std::size_t cols) {
  auto [it, inserted] = tensors_.try_emplace(name);
  if (!inserted) throw std::logic_error("duplicate parameter '" + name + "'");
  it->second.rows = rows;
  it->second.cols = cols;
  it->second.data.assign(rows * cols, 0.0);
  return it->second;
}

Tensor& ParamStore::at(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw std::out_of_range("no parameter '" + name + "'");
  return it->second;
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw std::out_of_range("no parameter '" + name + "'");
  return it->second;
}

std::size_t ParamStore::num_values() const {
  std::size_t n = 0;
  for (const auto& [_, t] : tensors_) n += t.size();
  return n;
}

ParamStore ParamStore::zeros_like() const {
  ParamStore out;
  for (const auto& [name, t] : tensors_) out.add(name, t.rows, t.cols);
  return out;
}

void ParamStore::set_zero() {
  for (auto& [_, t] : tensors_) std::fill(t.data.begin(), t.data.end(), 0.0);
}

bool ParamStore::all_finite() const {
  for (const auto& [_, t] : tensors_) {
    for (const double v : t.data) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

double ParamStore::squared_norm() const {
  const auto& k = simd::active();
  double s = 0.0;
  for (const auto& [_, t] : tensors_) s += k.sum_squares(t.data.data(), t.size());
  return s;
}

std::uint64_t ParamStore::content_hash() const {
  std::uint64_t h = kFnvOffset;
  for (const auto& [name, t] : tensors_) {
    h = fnv1a64(name, h);
    h = hash_combine(h, t.rows);
    h = hash_combine(h, t.cols);
    for (const double v : t.data) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      h = hash_combine(h, bits);
    }
  }
  return h;
}

}  // namespace flowprover::nn
