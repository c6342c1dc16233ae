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
#include <functional>
#include <string>

#include "flowprover/nn/param_store.hpp"

namespace flowprover::nn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// |a - n| / max(|a|, |n|, 1e-6)
double gradient_relative_error(double analytic, double numeric);

// Central differences of `loss` (re-evaluated against the perturbed `params`)
// compared to `analytic`. Checks up to `coords_per_tensor` randomly chosen
// entries per tensor (0 = every entry). `params` is restored on return.
GradCheckResult check_gradients(ParamStore& params, const ParamStore& analytic,
                                const std::function<double()>& loss,
                                double eps = 1e-5,
                                std::size_t coords_per_tensor = 0,
                                std::uint64_t seed = 1);

}  // namespace flowprover::nn
