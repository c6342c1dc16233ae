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
#include <filesystem>
#include <string>
#include <vector>

#include "flowprover/data/theorem.hpp"
#include "flowprover/env/prover.hpp"
#include "flowprover/nn/optim.hpp"
#include "flowprover/policy/policy_net.hpp"
#include "flowprover/search/best_first.hpp"
#include "flowprover/util/rng.hpp"

namespace flowprover::rm {

// Frozen tactic scorer: a policy-shaped network without a log Z head that
// always sees the history-less encoding.
class RewardModel {
 public:
  // All-zero weights: every action scores -ln 36.
  static RewardModel uniform();
  static RewardModel random(std::uint64_t seed);
  explicit RewardModel(policy::PolicyNet net);

  const policy::PolicyNet& net() const noexcept { return net_; }
  policy::PolicyNet& net() noexcept { return net_; }

 private:
  policy::PolicyNet net_;
};

// log softmax over all 36 actions of the history-less encoding of `s`.
std::vector<double> rm_log_probs(const RewardModel& rm, const env::ProofState& s);
double rm_score(const RewardModel& rm, const env::ProofState& s, const env::Tactic& t);

// One ground-truth (state -> action) pair.
struct GtPair {
  const data::Theorem* theorem = nullptr;
  std::size_t step = 0;  // index into gt_proof
  env::ProofState state;
  int action = 0;
};
std::vector<GtPair> gt_pairs(const std::vector<data::Theorem>& theorems);

struct RmTrainConfig {
  int epochs = 20;
  std::size_t batch_size = 8;
  std::uint64_t seed = 0;
  nn::AdamWConfig optim{};
};

struct RmTrainReport {
  std::vector<double> epoch_losses;    // mean cross-entropy per epoch
  std::vector<double> epoch_accuracy;  // top-1 on the training pairs after each epoch
};

// Cross-entropy on every ground-truth pair of `train`.
RewardModel rm_train(const std::vector<data::Theorem>& train,
                     const RmTrainConfig& cfg, RmTrainReport* report = nullptr);

// Fraction of pairs whose ground-truth action has the highest logit.
double top1_accuracy(const RewardModel& rm, const std::vector<GtPair>& pairs);

nn::Checkpoint to_checkpoint(const RewardModel& rm);
RewardModel rm_from_checkpoint(const nn::Checkpoint& ckpt);

enum class Label : std::uint8_t { Positive, Negative, Uncertain };
std::string_view to_string(Label l);

struct LabeledTactic {
  env::ProofState state;
  env::Tactic tactic;
  Label label = Label::Negative;
};

struct MiningConfig {
  int explore_budget = 36;
  int n_samples = 8;
  int max_depth = 3;
  double temperature = 1.0;
  policy::EncodingMode encoding = policy::EncodingMode::HistoryLess;
};

// Samples n_samples trajectories from `net`. Tactics of proved trajectories
// are positive. In failed trajectories every valid tactic is labelled by a
// best-first search (all 36 actions per expansion, explore_budget
// expansions) from the state it produced: no proof -> negative; a proof
// whose first tactic leads straight back to the tactic's source state ->
// uncertain; any other proof -> positive. Invalid tactics are dropped.
std::vector<LabeledTactic> mine_hard_negatives(const policy::PolicyNet& net,
                                               const data::Theorem& thm,
                                               const MiningConfig& cfg, Rng& rng);

// {"state": ..., "tactic": ..., "label": ...} per line.
std::string to_jsonl(const std::vector<LabeledTactic>& rows);

}  // namespace flowprover::rm
