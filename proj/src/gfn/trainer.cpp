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

#include "flowprover/gfn/trainer.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>

namespace flowprover::gfn {

std::string_view to_string(Source s) {
  switch (s) {
    case Source::Online: return "online";
    case Source::Replay: return "replay";
    case Source::GroundTruth: return "ground_truth";
  }
  return "?";
}

std::string_view to_string(TrainMode m) {
  switch (m) {
    case TrainMode::Gfn: return "gfn";
    case TrainMode::GfnOo: return "gfn-oo";
    case TrainMode::GfnBrOo: return "gfn-br-oo";
  }
  return "?";
}

TrainMode parse_train_mode(std::string_view text) {
  if (text == "gfn") return TrainMode::Gfn;
  if (text == "gfn-oo" || text == "gfn_oo") return TrainMode::GfnOo;
  if (text == "gfn-br-oo" || text == "gfn_br_oo") return TrainMode::GfnBrOo;
  throw std::invalid_argument("unknown gfn mode '" + std::string(text) + "'");
}

TrainConfig TrainConfig::normalized() const {
  TrainConfig c = *this;
  if (c.mode != TrainMode::Gfn) c.replay_p = 0.0;
  if (c.mode == TrainMode::GfnBrOo) c.reward.mode = RewardMode::Binary;
  return c;
}

void ReplayBuffer::insert(const Trajectory& traj) {
  auto& ring = rings_[traj.theorem_name];
  ring.push_back(traj);
  if (ring.size() > capacity_) ring.pop_front();
}

std::size_t ReplayBuffer::size(const std::string& theorem) const {
  auto it = rings_.find(theorem);
  return it == rings_.end() ? 0 : it->second.size();
}

Trajectory ReplayBuffer::sample(const std::string& theorem, Rng& rng) {
  auto it = rings_.find(theorem);
  if (it == rings_.end() || it->second.empty()) {
    throw std::logic_error("replay buffer empty for " + theorem);
  }
  ++reads_;
  Trajectory t = it->second[uniform_index(rng, it->second.size())];
  t.source = Source::Replay;
  t.temperature = 1.0;
  return t;
}

Trajectory sample_trajectory(const data::Theorem& thm, const policy::PolicyNet& net,
                             const TrainConfig& cfg, const rm::RewardModel* rm,
                             Rng& rng) {
  Trajectory traj;
  traj.theorem_name = thm.name;
  traj.source = Source::Online;
  const double u = uniform01(rng);
  traj.temperature = u < cfg.temper_p ? uniform(rng, cfg.temper_lo, cfg.temper_hi) : 1.0;

  env::ProofState s = thm.initial_state;
  traj.states.push_back(s);
  traj.outcome = Outcome::DepthExhausted;
  for (int d = 0; d < cfg.max_depth; ++d) {
    const auto es = policy::encode_state(thm, traj.tactics, s, policy::EncodingMode::History);
    const auto pick = policy::sample_action(net, es, traj.temperature, rng);
    traj.tactics.push_back(pick.tactic);
    traj.log_pf += pick.log_pf;
    env::StepResult r = env::apply_tactic(s, pick.tactic);
    if (r.is_error()) {
      traj.outcome = Outcome::EnvError;
      break;
    }
    s = std::move(r).take_state();
    traj.states.push_back(s);
    if (s.complete()) {
      traj.outcome = Outcome::Proved;
      break;
    }
  }
  traj.log_r = log_reward(thm.initial_state, traj.tactics, traj.outcome, cfg.reward, rm);
  return traj;
}

Trajectory ground_truth_trajectory(const data::Theorem& thm) {
  Trajectory traj;
  traj.theorem_name = thm.name;
  traj.tactics = thm.gt_proof;
  traj.source = Source::GroundTruth;
  traj.outcome = Outcome::Proved;
  traj.states.push_back(thm.initial_state);
  for (const auto& t : thm.gt_proof) {
    env::StepResult r = env::apply_tactic(traj.states.back(), t);
    if (r.is_error()) throw ReplayDiverged("ground truth of " + thm.name + " fails");
    traj.states.push_back(std::move(r).take_state());
  }
  if (!traj.states.back().complete()) {
    throw ReplayDiverged("ground truth of " + thm.name + " does not close the goal");
  }
  return traj;
}

namespace {

void verify_replay(const data::Theorem& thm, const Trajectory& traj) {
  if (traj.states.empty() || !(traj.states.front() == thm.initial_state)) {
    throw ReplayDiverged("trajectory does not start at the theorem's initial state");
  }
  env::ProofState s = thm.initial_state;
  for (std::size_t i = 0; i < traj.tactics.size(); ++i) {
    env::StepResult r = env::apply_tactic(s, traj.tactics[i]);
    const bool last = i + 1 == traj.tactics.size();
    if (r.is_error()) {
      if (last && traj.outcome == Outcome::EnvError && traj.states.size() == traj.tactics.size()) {
        return;
      }
      throw ReplayDiverged("stored tactic " + env::to_string(traj.tactics[i]) + " fails");
    }
    s = std::move(r).take_state();
    if (i + 1 >= traj.states.size() || !(traj.states[i + 1] == s)) {
      throw ReplayDiverged("stored state differs after " + env::to_string(traj.tactics[i]));
    }
  }
  const Outcome expected = s.complete() ? Outcome::Proved : Outcome::DepthExhausted;
  if (traj.outcome != expected) throw ReplayDiverged("stored outcome differs from replay");
}

void check_shape(const Trajectory& traj) {
  if (traj.states.size() < traj.tactics.size()) {
    throw ReplayDiverged("trajectory has fewer states than tactics");
  }
}

}  // namespace

double replay_forward(const policy::PolicyNet& net, const data::Theorem& thm,
                      const Trajectory& traj, bool verify) {
  check_shape(traj);
  if (verify) verify_replay(thm, traj);
  double log_pf = 0.0;
  for (std::size_t i = 0; i < traj.tactics.size(); ++i) {
    const std::span<const env::Tactic> history(traj.tactics.data(), i);
    const auto es =
        policy::encode_state(thm, history, traj.states[i], policy::EncodingMode::History);
    const auto ev = policy::evaluate(net, es);
    log_pf += ev.log_probs[static_cast<std::size_t>(env::action_index(traj.tactics[i]))];
  }
  return log_pf;
}

double tb_loss_value(std::span<const double> residuals) {
  if (residuals.empty()) return 0.0;
  double s = 0.0;
  for (const double d : residuals) s += d * d;
  return s / static_cast<double>(residuals.size());
}

TbResult tb_loss(const policy::PolicyNet& net, std::span<const TbItem> batch,
                 nn::ParamStore* grads) {
  TbResult out;
  const double inv_b = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
  for (const TbItem& item : batch) {
    const Trajectory& traj = *item.trajectory;
    check_shape(traj);
    std::vector<policy::PolicyEval> evals;
    evals.reserve(traj.tactics.size());
    double log_pf = 0.0;
    for (std::size_t i = 0; i < traj.tactics.size(); ++i) {
      const std::span<const env::Tactic> history(traj.tactics.data(), i);
      evals.push_back(policy::evaluate(
          net, policy::encode_state(*item.theorem, history, traj.states[i],
                                    policy::EncodingMode::History)));
      log_pf += evals.back().log_probs[static_cast<std::size_t>(
          env::action_index(traj.tactics[i]))];
    }
    const policy::LogZEval z = policy::evaluate_log_z(net, *item.theorem);
    const double delta = tb_residual(traj.log_r, z.log_z, log_pf);
    out.log_pf.push_back(log_pf);
    out.log_z.push_back(z.log_z);
    out.residual.push_back(delta);

    if (grads) {
      // d(delta^2 / B) = (2 delta / B) * (d log Z + d log_pf)
      const double g = 2.0 * delta * inv_b;
      for (std::size_t i = 0; i < evals.size(); ++i) {
        policy::accumulate_log_prob_grad(net, evals[i], env::action_index(traj.tactics[i]),
                                         g, *grads);
      }
      policy::accumulate_log_z_grad(net, z, g, *grads);
    }
  }
  out.loss = tb_loss_value(out.residual);
  return out;
}

GflowNetTrainer::GflowNetTrainer(policy::PolicyNet& net, const rm::RewardModel* rm,
                                 const TrainConfig& cfg, std::vector<data::Theorem> train)
    : net_(net),
      rm_(rm),
      cfg_(cfg.normalized()),
      train_(std::move(train)),
      buffer_(cfg.buffer_capacity),
      opt_(net.params(), cfg.optim),
      grads_(net.params().zeros_like()),
      rng_(derive_seed(cfg.seed, 0x6f6e)) {
  if (!net_.has_log_z()) throw std::invalid_argument("GFlowNet training needs a log Z head");
  if (cfg_.reward.mode == RewardMode::FullRm && rm_ == nullptr) {
    throw std::invalid_argument("mode " + std::string(to_string(cfg_.mode)) +
                                " needs a reward model");
  }
  for (const auto& thm : train_) ground_truth_.emplace(thm.name, ground_truth_trajectory(thm));
  order_.resize(train_.size());
  std::iota(order_.begin(), order_.end(), 0);
  cursor_ = order_.size();
}

StepMetrics GflowNetTrainer::step() {
  if (train_.empty()) throw std::logic_error("no training theorems");
  if (cursor_ >= order_.size()) {
    shuffle(order_, rng_);
    cursor_ = 0;
  }
  return train_step(train_[order_[cursor_++]]);
}

StepMetrics GflowNetTrainer::train_step(const data::Theorem& thm) {
  StepMetrics m;
  m.step = ++step_;
  m.mode = std::string(to_string(cfg_.mode));
  m.theorem = thm.name;

  std::vector<Trajectory> batch;
  batch.reserve(static_cast<std::size_t>(cfg_.n_sampled) + 1);
  const double u = uniform01(rng_);
  if (cfg_.replay_p > 0.0 && u < cfg_.replay_p && !buffer_.empty_for(thm.name)) {
    m.replayed = true;
    for (int i = 0; i < cfg_.n_sampled; ++i) batch.push_back(buffer_.sample(thm.name, rng_));
    m.buffer_reads = cfg_.n_sampled;
  } else {
    for (int i = 0; i < cfg_.n_sampled; ++i) {
      batch.push_back(sample_trajectory(thm, net_, cfg_, rm_, rng_));
      m.env_calls += static_cast<std::int64_t>(batch.back().tactics.size());
    }
    if (cfg_.mode == TrainMode::Gfn) {
      for (const auto& t : batch) buffer_.insert(t);
    }
  }
  if (cfg_.inject_gt) {
    auto it = ground_truth_.find(thm.name);
    batch.push_back(it != ground_truth_.end() ? it->second : ground_truth_trajectory(thm));
    m.ground_truth_in_batch = 1;
  }
  env_calls_ += m.env_calls;

  std::vector<TbItem> items;
  for (const auto& t : batch) items.push_back(TbItem{&thm, &t});
  grads_.set_zero();
  const TbResult tb = tb_loss(net_, items, &grads_);

  m.loss = tb.loss;
  const double n = static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    m.mean_log_r += batch[i].log_r / n;
    m.mean_log_pf += tb.log_pf[i] / n;
    m.log_z_mean += tb.log_z[i] / n;
  }
  try {
    opt_.step(net_.params(), grads_);
  } catch (const nn::NonFiniteGradient&) {
    m.skipped = true;
  }
  return m;
}

}  // namespace flowprover::gfn
