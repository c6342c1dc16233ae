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

#include "flowprover/baselines/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "flowprover/simd/kernels.hpp"

namespace flowprover::baselines {

ValueHead ValueHead::zeros(std::size_t hidden) {
  ValueHead v;
  v.params.add(kValueW, 1, hidden);
  v.params.add(kValueB, 1, 1);
  return v;
}

double ValueHead::value(std::span<const double> hidden) const {
  const nn::Tensor& w = params.at(kValueW);
  return simd::active().dot(w.data.data(), hidden.data(), w.cols) +
         params.at(kValueB).data[0];
}

double ppo_clip_contribution(double ratio, double advantage, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return std::min(ratio * advantage, clipped * advantage);
}

double ppo_clip_ratio_grad(double ratio, double advantage, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  // Unclipped branch whenever it is the (weak) minimum.
  return ratio * advantage <= clipped * advantage ? advantage : 0.0;
}

PpoLoss ppo_loss(const policy::PolicyNet& net, const ValueHead& value,
                 std::span<const PpoSample> samples, const PpoConfig& cfg,
                 nn::ParamStore* policy_grads, nn::ParamStore* value_grads) {
  PpoLoss out;
  if (samples.empty()) return out;
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  const nn::Tensor& vw = value.params.at(kValueW);

  for (const PpoSample& s : samples) {
    const auto ev = policy::evaluate(
        net, policy::encode_state(*s.theorem, s.history, s.state,
                                  policy::EncodingMode::History));
    const double log_prob = ev.log_probs[static_cast<std::size_t>(s.action)];
    const double ratio = std::exp(log_prob - s.old_log_prob);
    out.surrogate += inv_n * ppo_clip_contribution(ratio, s.advantage, cfg.clip_eps);

    const double v = value.value(ev.mlp.hidden());
    const double err = v - s.ret;
    out.value_mse += inv_n * err * err;

    if (policy_grads) {
      // d(-surr/N)/d log_prob = -(1/N) * d surr/d ratio * ratio
      const double g_logp =
          -inv_n * ppo_clip_ratio_grad(ratio, s.advantage, cfg.clip_eps) * ratio;
      const double g_v = 2.0 * cfg.value_coef * inv_n * err;

      std::vector<double> d_logits(ev.log_probs.size());
      for (std::size_t i = 0; i < d_logits.size(); ++i) {
        d_logits[i] = -g_logp * std::exp(ev.log_probs[i]);
      }
      d_logits[static_cast<std::size_t>(s.action)] += g_logp;
      std::vector<double> d_hidden(vw.cols);
      for (std::size_t i = 0; i < vw.cols; ++i) d_hidden[i] = g_v * vw.data[i];
      nn::mlp_backward(net.params(), ev.mlp.tape, d_logits, d_hidden, *policy_grads);

      if (value_grads) {
        simd::active().axpy(g_v, ev.mlp.hidden().data(),
                            value_grads->at(kValueW).data.data(), vw.cols);
        value_grads->at(kValueB).data[0] += g_v;
      }
    }
  }
  out.loss = -out.surrogate + cfg.value_coef * out.value_mse;
  return out;
}

std::vector<PpoSample> collect_rollouts(const policy::PolicyNet& net,
                                        const ValueHead& value,
                                        std::span<const data::Theorem> thms,
                                        const PpoConfig& cfg,
                                        const rm::RewardModel* rm, Rng& rng,
                                        gfn::StepMetrics* metrics) {
  std::vector<PpoSample> samples;
  double sum_log_r = 0.0;
  double sum_log_pf = 0.0;
  int n_traj = 0;
  for (const data::Theorem& thm : thms) {
    for (int k = 0; k < cfg.rollouts_per_theorem; ++k) {
      std::vector<env::Tactic> history;
      env::ProofState s = thm.initial_state;
      gfn::Outcome outcome = gfn::Outcome::DepthExhausted;
      double log_pf = 0.0;
      const std::size_t first = samples.size();
      for (int d = 0; d < cfg.max_depth; ++d) {
        const auto ev = policy::evaluate(
            net, policy::encode_state(thm, history, s, policy::EncodingMode::History));
        const auto pick = policy::sample_action(ev, 1.0, rng);
        PpoSample smp;
        smp.theorem = &thm;
        smp.history = history;
        smp.state = s;
        smp.action = pick.action;
        smp.old_log_prob = pick.log_pf;
        smp.advantage = -value.value(ev.mlp.hidden());  // G added below
        samples.push_back(std::move(smp));
        log_pf += pick.log_pf;
        history.push_back(pick.tactic);
        env::StepResult r = env::apply_tactic(s, pick.tactic);
        if (metrics) ++metrics->env_calls;
        if (r.is_error()) {
          outcome = gfn::Outcome::EnvError;
          break;
        }
        s = std::move(r).take_state();
        if (s.complete()) {
          outcome = gfn::Outcome::Proved;
          break;
        }
      }
      const double log_r =
          gfn::log_reward(thm.initial_state, history, outcome, cfg.reward, rm);
      for (std::size_t i = first; i < samples.size(); ++i) {
        const double steps_to_go = static_cast<double>(samples.size() - 1 - i);
        samples[i].ret = std::pow(cfg.discount, steps_to_go) * log_r;
        samples[i].advantage += samples[i].ret;
      }
      sum_log_r += log_r;
      sum_log_pf += log_pf;
      ++n_traj;
    }
  }
  if (metrics && n_traj > 0) {
    metrics->mean_log_r = sum_log_r / n_traj;
    metrics->mean_log_pf = sum_log_pf / n_traj;
  }
  return samples;
}

PpoTrainer::PpoTrainer(policy::PolicyNet& net, ValueHead& value,
                       const rm::RewardModel* rm, const PpoConfig& cfg,
                       std::vector<data::Theorem> train)
    : net_(net),
      value_(value),
      rm_(rm),
      cfg_(cfg),
      train_(std::move(train)),
      policy_opt_(net.params(), [&] {
        auto c = cfg.optim;
        c.clip_norm = 0.0;
        return c;
      }()),
      value_opt_(value.params, [&] {
        auto c = cfg.optim;
        c.clip_norm = 0.0;
        return c;
      }()),
      rng_(derive_seed(cfg.seed, 0x7070)),
      order_(train_.size()) {
  if (!(cfg.clip_eps > 0.0 && cfg.clip_eps < 1.0)) {
    throw std::invalid_argument("clip_eps must lie in (0, 1)");
  }
  if (cfg_.reward.mode == gfn::RewardMode::FullRm && rm_ == nullptr) {
    throw std::invalid_argument("ppo with partial reward needs a reward model");
  }
  std::iota(order_.begin(), order_.end(), 0);
  cursor_ = order_.size();
}

gfn::StepMetrics PpoTrainer::ppo_step(std::span<const data::Theorem> thms) {
  gfn::StepMetrics m;
  m.step = ++step_;
  m.mode = "ppo";
  if (!thms.empty()) m.theorem = thms.front().name;
  const std::vector<PpoSample> samples =
      collect_rollouts(net_, value_, thms, cfg_, rm_, rng_, &m);

  nn::ParamStore pg = net_.params().zeros_like();
  nn::ParamStore vg = value_.params.zeros_like();
  for (int epoch = 0; epoch < cfg_.ppo_epochs; ++epoch) {
    pg.set_zero();
    vg.set_zero();
    const PpoLoss l = ppo_loss(net_, value_, samples, cfg_, &pg, &vg);
    if (epoch == 0) m.loss = l.loss;
    if (!pg.all_finite() || !vg.all_finite()) {
      m.skipped = true;
      continue;
    }
    // One global norm over policy and value gradients.
    const double norm = std::sqrt(pg.squared_norm() + vg.squared_norm());
    if (cfg_.optim.clip_norm > 0.0 && norm > cfg_.optim.clip_norm) {
      const double scale = cfg_.optim.clip_norm / norm;
      for (auto* g : {&pg, &vg}) {
        for (auto& [_, t] : g->tensors()) {
          for (double& x : t.data) x *= scale;
        }
      }
    }
    policy_opt_.step(net_.params(), pg);
    value_opt_.step(value_.params, vg);
  }
  return m;
}

gfn::StepMetrics PpoTrainer::step() {
  if (train_.empty()) throw std::logic_error("no training theorems");
  if (cursor_ >= order_.size()) {
    shuffle(order_, rng_);
    cursor_ = 0;
  }
  const data::Theorem& thm = train_[order_[cursor_++]];
  return ppo_step(std::span<const data::Theorem>(&thm, 1));
}

}  // namespace flowprover::baselines
