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

#include "flowprover/nn/optim.hpp"

#include <cmath>

#include "flowprover/simd/kernels.hpp"

namespace flowprover::nn {

double clip_global_norm(ParamStore& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& [_, t] : grads.tensors()) {
      for (double& v : t.data) v *= scale;
    }
  }
  return norm;
}

AdamW::AdamW(const ParamStore& params, AdamWConfig config)
    : config_(config), state_{0, params.zeros_like(), params.zeros_like()} {}

double AdamW::step(ParamStore& params, ParamStore& grads) {
  if (!grads.all_finite()) throw NonFiniteGradient("non-finite gradient");
  const double norm = clip_global_norm(grads, config_.clip_norm);

  ++state_.step;
  const auto t = static_cast<double>(state_.step);
  const simd::AdamWParams p{config_.lr,
                            config_.beta1,
                            config_.beta2,
                            config_.eps,
                            config_.weight_decay,
                            1.0 - std::pow(config_.beta1, t),
                            1.0 - std::pow(config_.beta2, t)};
  const auto& k = simd::active();
  for (auto& [name, param] : params.tensors()) {
    Tensor& g = grads.at(name);
    k.adamw(param.data.data(), g.data.data(), state_.m.at(name).data.data(),
            state_.v.at(name).data.data(), param.size(), p);
  }
  return norm;
}

void AdamW::restore(AdamWState state) { state_ = std::move(state); }

}  // namespace flowprover::nn
