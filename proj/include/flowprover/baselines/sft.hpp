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
#include <vector>

#include "flowprover/data/theorem.hpp"
#include "flowprover/gfn/trainer.hpp"
#include "flowprover/nn/optim.hpp"
#include "flowprover/policy/policy_net.hpp"

namespace flowprover::baselines {

// Mean over the ground-truth steps of -log P_F(t_i | history-encoded s_{i-1}).
// Accumulates gradients into `grads` when non-null.
double sft_loss(const policy::PolicyNet& net, const data::Theorem& thm,
                nn::ParamStore* grads);

// Fraction of ground-truth steps whose action has the highest logit under
// the given encoding.
double gt_top1_accuracy(const policy::PolicyNet& net,
                        const std::vector<data::Theorem>& theorems,
                        policy::EncodingMode mode = policy::EncodingMode::History);

struct SftConfig {
  nn::AdamWConfig optim{};
  std::uint64_t seed = 0;
};

// One theorem per step, epochs in a fresh random order. Never calls the
// environment.
class SftTrainer {
 public:
  SftTrainer(policy::PolicyNet& net, const SftConfig& cfg,
             std::vector<data::Theorem> train);

  gfn::StepMetrics sft_step(const data::Theorem& thm);
  gfn::StepMetrics step();

  std::int64_t steps_done() const noexcept { return step_; }
  nn::AdamW& optimizer() noexcept { return opt_; }

 private:
  policy::PolicyNet& net_;
  std::vector<data::Theorem> train_;
  nn::AdamW opt_;
  nn::ParamStore grads_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::int64_t step_ = 0;
};

}  // namespace flowprover::baselines
