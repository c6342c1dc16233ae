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
#include <span>
#include <vector>

#include "flowprover/data/theorem.hpp"
#include "flowprover/gfn/reward.hpp"
#include "flowprover/gfn/trainer.hpp"
#include "flowprover/nn/optim.hpp"
#include "flowprover/policy/policy_net.hpp"
#include "flowprover/rm/reward_model.hpp"

namespace flowprover::baselines {

struct PpoConfig {
  double clip_eps = 0.2;
  int ppo_epochs = 4;
  double value_coef = 0.5;
  double discount = 1.0;
  int rollouts_per_theorem = 5;
  int max_depth = 3;
  nn::AdamWConfig optim{};
  gfn::RewardSpec reward{};
  std::uint64_t seed = 0;
};

inline constexpr const char* kValueW = "value.w";
inline constexpr const char* kValueB = "value.b";

// Linear map from the policy's last hidden layer to V(s).
struct ValueHead {
  nn::ParamStore params;

  static ValueHead zeros(std::size_t hidden = 128);
  double value(std::span<const double> hidden) const;
};

// min(r * A, clip(r, 1 - eps, 1 + eps) * A)
double ppo_clip_contribution(double ratio, double advantage, double eps);
// d/dr of the contribution: A on the unclipped branch, 0 on the clipped one.
double ppo_clip_ratio_grad(double ratio, double advantage, double eps);

// One (state, action) of a rollout, with quantities frozen at collection.
struct PpoSample {
  const data::Theorem* theorem = nullptr;
  std::vector<env::Tactic> history;
  env::ProofState state;
  int action = 0;
  double old_log_prob = 0.0;
  double ret = 0.0;        // G_t
  double advantage = 0.0;  // G_t - V(s_t) at collection
};

struct PpoLoss {
  double loss = 0.0;       // -surrogate + value_coef * value_mse
  double surrogate = 0.0;  // mean clipped contribution
  double value_mse = 0.0;
};

// Accumulates policy-trunk/head gradients into `policy_grads` and value-head
// gradients into `value_grads` when they are non-null.
PpoLoss ppo_loss(const policy::PolicyNet& net, const ValueHead& value,
                 std::span<const PpoSample> samples, const PpoConfig& cfg,
                 nn::ParamStore* policy_grads, nn::ParamStore* value_grads);

// Rolls out the current policy at T = 1. Every step's return is the
// terminal log-reward (discount 1, zero intermediate reward).
std::vector<PpoSample> collect_rollouts(const policy::PolicyNet& net,
                                        const ValueHead& value,
                                        std::span<const data::Theorem> thms,
                                        const PpoConfig& cfg,
                                        const rm::RewardModel* rm, Rng& rng,
                                        gfn::StepMetrics* metrics);

class PpoTrainer {
 public:
  PpoTrainer(policy::PolicyNet& net, ValueHead& value, const rm::RewardModel* rm,
             const PpoConfig& cfg, std::vector<data::Theorem> train);

  gfn::StepMetrics ppo_step(std::span<const data::Theorem> thms);
  gfn::StepMetrics step();

  std::int64_t steps_done() const noexcept { return step_; }

 private:
  policy::PolicyNet& net_;
  ValueHead& value_;
  const rm::RewardModel* rm_;
  PpoConfig cfg_;
  std::vector<data::Theorem> train_;
  nn::AdamW policy_opt_;
  nn::AdamW value_opt_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::int64_t step_ = 0;
};

}  // namespace flowprover::baselines
