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

#include "flowprover/baselines/sft.hpp"

#include <algorithm>
#include <numeric>

namespace flowprover::baselines {

double sft_loss(const policy::PolicyNet& net, const data::Theorem& thm,
                nn::ParamStore* grads) {
  const std::size_t n = thm.gt_proof.size();
  if (n == 0) return 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  env::ProofState s = thm.initial_state;
  for (std::size_t i = 0; i < n; ++i) {
    const env::Tactic& t = thm.gt_proof[i];
    const int a = env::action_index(t);
    const std::span<const env::Tactic> history(thm.gt_proof.data(), i);
    const auto ev = policy::evaluate(
        net, policy::encode_state(thm, history, s, policy::EncodingMode::History));
    loss -= inv_n * ev.log_probs[static_cast<std::size_t>(a)];
    if (grads) policy::accumulate_log_prob_grad(net, ev, a, -inv_n, *grads);
    env::StepResult r = env::apply_tactic(s, t);
    if (!r.is_ok()) break;
    s = std::move(r).take_state();
  }
  return loss;
}

double gt_top1_accuracy(const policy::PolicyNet& net,
                        const std::vector<data::Theorem>& theorems,
                        policy::EncodingMode mode) {
  std::size_t hits = 0;
  std::size_t total = 0;
  for (const auto& thm : theorems) {
    env::ProofState s = thm.initial_state;
    for (std::size_t i = 0; i < thm.gt_proof.size(); ++i) {
      const std::span<const env::Tactic> history(thm.gt_proof.data(), i);
      const auto logits =
          policy::action_logits(net, policy::encode_state(thm, history, s, mode));
      const auto best = std::max_element(logits.begin(), logits.end()) - logits.begin();
      hits += best == env::action_index(thm.gt_proof[i]) ? 1 : 0;
      ++total;
      env::StepResult r = env::apply_tactic(s, thm.gt_proof[i]);
      if (!r.is_ok()) break;
      s = std::move(r).take_state();
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

SftTrainer::SftTrainer(policy::PolicyNet& net, const SftConfig& cfg,
                       std::vector<data::Theorem> train)
    : net_(net),
      train_(std::move(train)),
      opt_(net.params(), cfg.optim),
      grads_(net.params().zeros_like()),
      rng_(derive_seed(cfg.seed, 0x5f7)),
      order_(train_.size()) {
  std::iota(order_.begin(), order_.end(), 0);
  cursor_ = order_.size();
}

gfn::StepMetrics SftTrainer::sft_step(const data::Theorem& thm) {
  gfn::StepMetrics m;
  m.step = ++step_;
  m.mode = "sft";
  m.theorem = thm.name;
  grads_.set_zero();
  m.loss = sft_loss(net_, thm, &grads_);
  m.mean_log_pf = -m.loss;
  try {
    opt_.step(net_.params(), grads_);
  } catch (const nn::NonFiniteGradient&) {
    m.skipped = true;
  }
  return m;
}

gfn::StepMetrics SftTrainer::step() {
  if (train_.empty()) throw std::logic_error("no training theorems");
  if (cursor_ >= order_.size()) {
    shuffle(order_, rng_);
    cursor_ = 0;
  }
  return sft_step(train_[order_[cursor_++]]);
}

}  // namespace flowprover::baselines
