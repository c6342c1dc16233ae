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

#include "flowprover/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "flowprover/util/rng.hpp"

namespace flowprover::nn {

double gradient_relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

GradCheckResult check_gradients(ParamStore& params, const ParamStore& analytic,
                                const std::function<double()>& loss, double eps,
                                std::size_t coords_per_tensor, std::uint64_t seed) {
  GradCheckResult result;
  Rng rng(seed);
  for (auto& [name, tensor] : params.tensors()) {
    const Tensor& grad = analytic.at(name);
    std::vector<std::size_t> idx(tensor.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (coords_per_tensor != 0 && coords_per_tensor < idx.size()) {
      for (std::size_t i = 0; i < coords_per_tensor; ++i) {
        std::swap(idx[i], idx[i + uniform_index(rng, idx.size() - i)]);
      }
      idx.resize(coords_per_tensor);
    }
    for (const std::size_t i : idx) {
      const double saved = tensor.data[i];
      tensor.data[i] = saved + eps;
      const double plus = loss();
      tensor.data[i] = saved - eps;
      const double minus = loss();
      tensor.data[i] = saved;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double err = gradient_relative_error(grad.data[i], numeric);
      ++result.checked;
      if (result.checked == 1 || err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst_param = name;
        result.worst_index = i;
        result.worst_analytic = grad.data[i];
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace flowprover::nn
