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

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace flowprover::nn {

// Row-major dense f64 matrix; vectors are rows x 1.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  std::size_t size() const noexcept { return data.size(); }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> span() noexcept { return data; }
  std::span<const double> span() const noexcept { return data; }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// Named parameters. Shapes are fixed once added.
class ParamStore {
 public:
  Tensor& add(const std::string& name, std::size_t rows, std::size_t cols);

  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;

  const std::map<std::string, Tensor>& tensors() const noexcept { return tensors_; }
  std::map<std::string, Tensor>& tensors() noexcept { return tensors_; }
  std::size_t num_values() const;

  // Same names and shapes, all zeros.
  ParamStore zeros_like() const;
  void set_zero();
  bool all_finite() const;
  double squared_norm() const;
  // Hash over names, shapes and exact bit patterns.
  std::uint64_t content_hash() const;

  friend bool operator==(const ParamStore&, const ParamStore&) = default;

 private:
  std::map<std::string, Tensor> tensors_;
};

}  // namespace flowprover::nn
