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

#include <cstdint>
#include <stdexcept>

#include "flowprover/nn/param_store.hpp"

namespace flowprover::nn {

struct AdamWConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
  double clip_norm = 0.5;  // <= 0 disables clipping
};

class NonFiniteGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scales `grads` in place so its global L2 norm is at most `max_norm`.
// Returns the norm before clipping.
double clip_global_norm(ParamStore& grads, double max_norm);

struct AdamWState {
  std::int64_t step = 0;
  ParamStore m;
  ParamStore v;

  friend bool operator==(const AdamWState&, const AdamWState&) = default;
};

class AdamW {
 public:
  AdamW(const ParamStore& params, AdamWConfig config);

  // Global-norm clip, then one AdamW update. Throws NonFiniteGradient and
  // leaves params and moments untouched if any gradient is NaN/Inf.
  // Returns the pre-clip gradient norm.
  double step(ParamStore& params, ParamStore& grads);

  const AdamWConfig& config() const noexcept { return config_; }
  AdamWConfig& config() noexcept { return config_; }
  const AdamWState& state() const noexcept { return state_; }
  void restore(AdamWState state);

 private:
  AdamWConfig config_;
  AdamWState state_;
};

}  // namespace flowprover::nn
