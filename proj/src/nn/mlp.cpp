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

#include "flowprover/nn/mlp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string_view>

#include "flowprover/simd/kernels.hpp"

namespace flowprover::nn {

void add_mlp_params(ParamStore& store, const MlpShape& shape) {
  store.add(kW1, shape.hidden, shape.input);
  store.add(kB1, shape.hidden, 1);
  store.add(kW2, shape.hidden, shape.hidden);
  store.add(kB2, shape.hidden, 1);
  store.add(kW3, shape.output, shape.hidden);
  store.add(kB3, shape.output, 1);
}

void init_mlp_random(ParamStore& store, Rng& rng, double output_scale) {
  for (const char* name : {kW1, kW2, kW3}) {
    Tensor& w = store.at(name);
    double scale = 1.0 / std::sqrt(static_cast<double>(w.cols));
    if (std::string_view(name) == kW3) scale *= output_scale;
    for (double& v : w.data) v = scale * standard_normal(rng);
  }
  for (const char* name : {kB1, kB2, kB3}) {
    auto& b = store.at(name).data;
    std::fill(b.begin(), b.end(), 0.0);
  }
}

MlpShape mlp_shape(const ParamStore& store) {
  return MlpShape{store.at(kW1).cols, store.at(kW1).rows, store.at(kW3).rows};
}

MlpOutput mlp_forward(const ParamStore& store, std::span<const double> x) {
  const auto& k = simd::active();
  const Tensor& w1 = store.at(kW1);
  const Tensor& w2 = store.at(kW2);
  const Tensor& w3 = store.at(kW3);
  assert(x.size() == w1.cols && "input dimension mismatch");

  MlpOutput out;
  out.tape.input.assign(x.begin(), x.end());
  out.tape.hidden1.resize(w1.rows);
  out.tape.hidden2.resize(w2.rows);
  out.logits.resize(w3.rows);

  k.gemv(w1.data.data(), x.data(), store.at(kB1).data.data(),
         out.tape.hidden1.data(), w1.rows, w1.cols);
  for (double& v : out.tape.hidden1) v = std::tanh(v);
  k.gemv(w2.data.data(), out.tape.hidden1.data(), store.at(kB2).data.data(),
         out.tape.hidden2.data(), w2.rows, w2.cols);
  for (double& v : out.tape.hidden2) v = std::tanh(v);
  k.gemv(w3.data.data(), out.tape.hidden2.data(), store.at(kB3).data.data(),
         out.logits.data(), w3.rows, w3.cols);
  return out;
}

void mlp_backward(const ParamStore& store, const MlpTape& tape,
                  std::span<const double> d_logits,
                  std::span<const double> d_hidden, ParamStore& grads) {
  const auto& k = simd::active();
  const Tensor& w2 = store.at(kW2);
  const Tensor& w3 = store.at(kW3);
  const std::size_t h = w2.rows;

  std::vector<double> d2(h, 0.0);
  if (!d_hidden.empty()) {
    assert(d_hidden.size() == h);
    std::copy(d_hidden.begin(), d_hidden.end(), d2.begin());
  }
  if (!d_logits.empty()) {
    assert(d_logits.size() == w3.rows);
    k.outer_acc(d_logits.data(), tape.hidden2.data(), grads.at(kW3).data.data(),
                w3.rows, w3.cols);
    k.axpy(1.0, d_logits.data(), grads.at(kB3).data.data(), w3.rows);
    k.gemv_transposed_acc(w3.data.data(), d_logits.data(), d2.data(), w3.rows,
                          w3.cols);
  }

  // through tanh: d/da tanh(a) = 1 - tanh(a)^2
  for (std::size_t i = 0; i < h; ++i) {
    d2[i] *= 1.0 - tape.hidden2[i] * tape.hidden2[i];
  }
  k.outer_acc(d2.data(), tape.hidden1.data(), grads.at(kW2).data.data(), w2.rows,
              w2.cols);
  k.axpy(1.0, d2.data(), grads.at(kB2).data.data(), h);

  std::vector<double> d1(tape.hidden1.size(), 0.0);
  k.gemv_transposed_acc(w2.data.data(), d2.data(), d1.data(), w2.rows, w2.cols);
  for (std::size_t i = 0; i < d1.size(); ++i) {
    d1[i] *= 1.0 - tape.hidden1[i] * tape.hidden1[i];
  }
  const Tensor& w1 = store.at(kW1);
  k.outer_acc(d1.data(), tape.input.data(), grads.at(kW1).data.data(), w1.rows,
              w1.cols);
  k.axpy(1.0, d1.data(), grads.at(kB1).data.data(), w1.rows);
}

}  // namespace flowprover::nn
