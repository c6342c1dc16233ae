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

#include <bitset>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowprover/data/theorem.hpp"
#include "flowprover/env/prover.hpp"
#include "flowprover/nn/checkpoint.hpp"
#include "flowprover/nn/mlp.hpp"
#include "flowprover/nn/param_store.hpp"
#include "flowprover/policy/encoding.hpp"
#include "flowprover/util/rng.hpp"

namespace flowprover::policy {

// Actions outside the mask get logit -inf. The full mask is the normal
// operating mode; narrower masks exist for the enumeration test suite.
class ActionMask {
 public:
  static ActionMask full();
  // intro, split, left, right, exact h1, apply h1
  static ActionMask micro();
  static ActionMask from_bits(std::uint64_t bits);

  bool allows(int action) const { return bits_.test(static_cast<std::size_t>(action)); }
  std::vector<int> actions() const;
  std::size_t count() const { return bits_.count(); }
  std::uint64_t bits() const { return bits_.to_ullong(); }

  friend bool operator==(const ActionMask&, const ActionMask&) = default;

 private:
  std::bitset<env::kNumActions> bits_;
};

inline constexpr const char* kLogZW = "logz.w";
inline constexpr const char* kLogZB = "logz.b";

// Forward policy P_F(t|s) plus an optional linear log Z head on the last
// hidden layer.
class PolicyNet {
 public:
  static PolicyNet zeros(bool with_log_z = true,
                         ActionMask mask = ActionMask::full());
  // Gaussian trunk; the output layer is scaled by `output_scale`, so the
  // default starts from the exactly uniform policy.
  static PolicyNet random(std::uint64_t seed, bool with_log_z = true,
                          ActionMask mask = ActionMask::full(),
                          double output_scale = 0.0);

  nn::ParamStore& params() noexcept { return params_; }
  const nn::ParamStore& params() const noexcept { return params_; }
  const ActionMask& mask() const noexcept { return mask_; }
  bool has_log_z() const { return params_.contains(kLogZW); }

 private:
  PolicyNet(nn::ParamStore params, ActionMask mask)
      : params_(std::move(params)), mask_(mask) {}

  nn::ParamStore params_;
  ActionMask mask_;

  friend PolicyNet policy_from_checkpoint(const nn::Checkpoint& ckpt);
};

// One evaluation of the network on an encoded state.
struct PolicyEval {
  nn::MlpOutput mlp;
  std::vector<double> logits;     // masked entries are -inf
  std::vector<double> log_probs;  // log softmax(logits), T = 1
};

PolicyEval evaluate(const PolicyNet& net, const EncodedState& es);

std::vector<double> action_logits(const PolicyNet& net, const EncodedState& es);

struct SampledAction {
  env::Tactic tactic;
  int action = 0;
  double log_pf = 0.0;  // under T = 1 whatever the sampling temperature
};

// Samples from softmax(logits / temperature). Consumes exactly one uniform.
SampledAction sample_action(const PolicyEval& eval, double temperature, Rng& rng);
SampledAction sample_action(const PolicyNet& net, const EncodedState& es,
                            double temperature, Rng& rng);

// Log Z from the history encoding of the theorem's initial state.
double predict_log_z(const PolicyNet& net, const data::Theorem& thm);

struct LogZEval {
  nn::MlpOutput mlp;
  double log_z = 0.0;
};
LogZEval evaluate_log_z(const PolicyNet& net, const data::Theorem& thm);

// grads += scale * d log P_F(action | state) / d params
void accumulate_log_prob_grad(const PolicyNet& net, const PolicyEval& eval,
                              int action, double scale, nn::ParamStore& grads);
// grads += scale * d logits . d_logits / d params, for an arbitrary upstream
// gradient on the logits (masked entries must be zero).
void accumulate_logits_grad(const PolicyNet& net, const PolicyEval& eval,
                            std::span<const double> d_logits,
                            nn::ParamStore& grads);
// grads += scale * d log Z / d params
void accumulate_log_z_grad(const PolicyNet& net, const LogZEval& eval,
                           double scale, nn::ParamStore& grads);

// Checkpoint meta keys: "kind" = "policy", "mask" = hex bits.
nn::Checkpoint to_checkpoint(const PolicyNet& net,
                             std::map<std::string, std::string> meta = {});
PolicyNet policy_from_checkpoint(const nn::Checkpoint& ckpt);

}  // namespace flowprover::policy
