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

#include "flowprover/rm/reward_model.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace flowprover::rm {

RewardModel RewardModel::uniform() { return RewardModel(policy::PolicyNet::zeros(false)); }

RewardModel RewardModel::random(std::uint64_t seed) {
  return RewardModel(policy::PolicyNet::random(seed, false));
}

RewardModel::RewardModel(policy::PolicyNet net) : net_(std::move(net)) {
  if (net_.has_log_z()) throw std::invalid_argument("reward model must not carry a log Z head");
  if (!(net_.mask() == policy::ActionMask::full())) {
    throw std::invalid_argument("reward model scores the full action space");
  }
}

std::vector<double> rm_log_probs(const RewardModel& rm, const env::ProofState& s) {
  return policy::evaluate(rm.net(), policy::encode_history_less(s)).log_probs;
}

double rm_score(const RewardModel& rm, const env::ProofState& s, const env::Tactic& t) {
  return rm_log_probs(rm, s)[static_cast<std::size_t>(env::action_index(t))];
}

std::vector<GtPair> gt_pairs(const std::vector<data::Theorem>& theorems) {
  std::vector<GtPair> out;
  for (const auto& thm : theorems) {
    env::ProofState s = thm.initial_state;
    for (std::size_t i = 0; i < thm.gt_proof.size(); ++i) {
      out.push_back(GtPair{&thm, i, s, env::action_index(thm.gt_proof[i])});
      env::StepResult r = env::apply_tactic(s, thm.gt_proof[i]);
      if (r.is_error()) throw std::invalid_argument("ground truth of " + thm.name + " fails");
      s = std::move(r).take_state();
    }
  }
  return out;
}

namespace {

int argmax(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

double top1_accuracy(const RewardModel& rm, const std::vector<GtPair>& pairs) {
  if (pairs.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& p : pairs) {
    const auto ev = policy::evaluate(rm.net(), policy::encode_history_less(p.state));
    hits += argmax(ev.logits) == p.action ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

RewardModel rm_train(const std::vector<data::Theorem>& train,
                     const RmTrainConfig& cfg, RmTrainReport* report) {
  RewardModel rm = RewardModel::random(derive_seed(cfg.seed, 0x3e1));
  nn::ParamStore& params = rm.net().params();
  nn::AdamW opt(params, cfg.optim);
  nn::ParamStore grads = params.zeros_like();

  const std::vector<GtPair> pairs = gt_pairs(train);
  std::vector<policy::EncodedState> inputs;
  inputs.reserve(pairs.size());
  for (const auto& p : pairs) inputs.push_back(policy::encode_history_less(p.state));

  Rng rng(derive_seed(cfg.seed, 0x3e2));
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::max<std::size_t>(cfg.batch_size, 1);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(order, rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const double scale = 1.0 / static_cast<double>(end - start);
      grads.set_zero();
      for (std::size_t j = start; j < end; ++j) {
        const std::size_t idx = order[j];
        const auto ev = policy::evaluate(rm.net(), inputs[idx]);
        loss_sum -= ev.log_probs[static_cast<std::size_t>(pairs[idx].action)];
        policy::accumulate_log_prob_grad(rm.net(), ev, pairs[idx].action, -scale, grads);
      }
      try {
        opt.step(params, grads);
      } catch (const nn::NonFiniteGradient&) {
      }
    }
    if (report) {
      report->epoch_losses.push_back(pairs.empty() ? 0.0
                                                   : loss_sum / static_cast<double>(pairs.size()));
      report->epoch_accuracy.push_back(top1_accuracy(rm, pairs));
    }
  }
  return rm;
}

nn::Checkpoint to_checkpoint(const RewardModel& rm) {
  return policy::to_checkpoint(rm.net(), {{"kind", "reward_model"}});
}

RewardModel rm_from_checkpoint(const nn::Checkpoint& ckpt) {
  if (auto it = ckpt.meta.find("kind"); it == ckpt.meta.end() || it->second != "reward_model") {
    throw nn::CheckpointError("checkpoint is not a reward model");
  }
  return RewardModel(policy::policy_from_checkpoint(ckpt));
}

std::string_view to_string(Label l) {
  switch (l) {
    case Label::Positive: return "positive";
    case Label::Negative: return "negative";
    case Label::Uncertain: return "uncertain";
  }
  return "?";
}

std::vector<LabeledTactic> mine_hard_negatives(const policy::PolicyNet& net,
                                               const data::Theorem& thm,
                                               const MiningConfig& cfg, Rng& rng) {
  if (cfg.explore_budget < 0) throw std::invalid_argument("explore_budget must be >= 0");
  struct Step {
    env::ProofState before;
    env::Tactic tactic;
    env::StepResult result;
  };

  std::vector<LabeledTactic> out;
  for (int n = 0; n < cfg.n_samples; ++n) {
    std::vector<Step> steps;
    std::vector<env::Tactic> history;
    env::ProofState s = thm.initial_state;
    bool proved = false;
    for (int d = 0; d < cfg.max_depth; ++d) {
      const auto es = policy::encode_state(thm, history, s, cfg.encoding);
      const auto pick = policy::sample_action(net, es, cfg.temperature, rng);
      env::StepResult r = env::apply_tactic(s, pick.tactic);
      steps.push_back(Step{s, pick.tactic, r});
      history.push_back(pick.tactic);
      if (!r.is_ok()) {
        proved = r.is_proved();
        break;
      }
      s = std::move(r).take_state();
    }

    std::vector<env::Tactic> prefix;
    for (const Step& st : steps) {
      prefix.push_back(st.tactic);
      if (st.result.is_error()) break;
      if (proved) {
        out.push_back({st.before, st.tactic, Label::Positive});
        continue;
      }
      search::SearchConfig sc;
      sc.branching = env::kNumActions;
      sc.expansion_budget = cfg.explore_budget;
      sc.encoding = cfg.encoding;
      sc.max_depth = static_cast<int>(prefix.size()) + cfg.max_depth;
      const auto found =
          search::search_from(net, thm.initial_state, prefix, st.result.state(), sc);
      Label label = Label::Negative;
      if (found.proved) {
        label = Label::Positive;
        if (!found.proof->empty()) {
          const auto back = env::apply_tactic(st.result.state(), found.proof->front());
          if (back.is_ok() &&
              env::state_fingerprint(back.state()) == env::state_fingerprint(st.before)) {
            label = Label::Uncertain;
          }
        }
      }
      out.push_back({st.before, st.tactic, label});
    }
  }
  return out;
}

std::string to_jsonl(const std::vector<LabeledTactic>& rows) {
  std::string out;
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["state"] = env::print_state(r.state);
    j["tactic"] = env::to_string(r.tactic);
    j["label"] = std::string(to_string(r.label));
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace flowprover::rm
