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
#include <span>
#include <string>
#include <vector>

#include "flowprover/nn/param_store.hpp"
#include "flowprover/util/rng.hpp"

namespace flowprover::nn {

// input -> tanh(hidden) -> tanh(hidden) -> linear(output)
struct MlpShape {
  std::size_t input = 164;
  std::size_t hidden = 128;
  std::size_t output = 36;
};

inline constexpr const char* kW1 = "mlp.w1";
inline constexpr const char* kB1 = "mlp.b1";
inline constexpr const char* kW2 = "mlp.w2";
inline constexpr const char* kB2 = "mlp.b2";
inline constexpr const char* kW3 = "mlp.w3";
inline constexpr const char* kB3 = "mlp.b3";

// Adds zero-filled MLP parameters to `store`.
void add_mlp_params(ParamStore& store, const MlpShape& shape);

// Gaussian init scaled by 1/sqrt(fan_in); the output layer is further scaled
// by `output_scale`. Biases are zero.
void init_mlp_random(ParamStore& store, Rng& rng, double output_scale = 1.0);

MlpShape mlp_shape(const ParamStore& store);

// Activations recorded by the forward pass; enough for an exact backward.
struct MlpTape {
  std::vector<double> input;
  std::vector<double> hidden1;
  std::vector<double> hidden2;
};

struct MlpOutput {
  std::vector<double> logits;
  MlpTape tape;

  // Last hidden activation.
  const std::vector<double>& hidden() const noexcept { return tape.hidden2; }
};

MlpOutput mlp_forward(const ParamStore& store, std::span<const double> x);

// Accumulates d(loss)/d(params) into `grads` (same names as `store`) given the
// upstream gradient on the logits and, optionally, extra gradient arriving at
// the last hidden layer from heads attached there. Either may be empty.
void mlp_backward(const ParamStore& store, const MlpTape& tape,
                  std::span<const double> d_logits,
                  std::span<const double> d_hidden, ParamStore& grads);

}  // namespace flowprover::nn
