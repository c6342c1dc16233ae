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

#include "flowprover/policy/policy_net.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "flowprover/nn/ops.hpp"
#include "flowprover/simd/kernels.hpp"

namespace flowprover::policy {

ActionMask ActionMask::full() {
  ActionMask m;
  m.bits_.set();
  return m;
}

ActionMask ActionMask::micro() {
  ActionMask m;
  for (int a = 0; a < 4; ++a) m.bits_.set(static_cast<std::size_t>(a));
  m.bits_.set(static_cast<std::size_t>(env::action_index({env::TacticKind::Exact, 1})));
  m.bits_.set(static_cast<std::size_t>(env::action_index({env::TacticKind::Apply, 1})));
  return m;
}

ActionMask ActionMask::from_bits(std::uint64_t bits) {
  ActionMask m;
  m.bits_ = std::bitset<env::kNumActions>(bits);
  if (m.bits_.none()) throw std::invalid_argument("empty action mask");
  return m;
}

std::vector<int> ActionMask::actions() const {
  std::vector<int> out;
  for (int a = 0; a < env::kNumActions; ++a) {
    if (allows(a)) out.push_back(a);
  }
  return out;
}

namespace {

nn::ParamStore make_store(bool with_log_z) {
  nn::ParamStore ps;
  nn::add_mlp_params(ps, nn::MlpShape{kStateDim, 128,
                                      static_cast<std::size_t>(env::kNumActions)});
  if (with_log_z) {
    ps.add(kLogZW, 1, 128);
    ps.add(kLogZB, 1, 1);
  }
  return ps;
}

}  // namespace

PolicyNet PolicyNet::zeros(bool with_log_z, ActionMask mask) {
  return PolicyNet(make_store(with_log_z), mask);
}

PolicyNet PolicyNet::random(std::uint64_t seed, bool with_log_z, ActionMask mask,
                            double output_scale) {
  nn::ParamStore ps = make_store(with_log_z);
  Rng rng(seed);
  nn::init_mlp_random(ps, rng, output_scale);
  return PolicyNet(std::move(ps), mask);
}

PolicyEval evaluate(const PolicyNet& net, const EncodedState& es) {
  PolicyEval ev;
  ev.mlp = nn::mlp_forward(net.params(), es);
  ev.logits = ev.mlp.logits;
  for (int a = 0; a < env::kNumActions; ++a) {
    if (!net.mask().allows(a)) ev.logits[static_cast<std::size_t>(a)] = nn::kNegInf;
  }
  ev.log_probs = nn::log_softmax(ev.logits);
  return ev;
}

std::vector<double> action_logits(const PolicyNet& net, const EncodedState& es) {
  return evaluate(net, es).logits;
}

SampledAction sample_action(const PolicyEval& eval, double temperature, Rng& rng) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  std::vector<double> scaled(eval.logits.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    scaled[i] = eval.logits[i] == nn::kNegInf ? nn::kNegInf
                                               : eval.logits[i] / temperature;
  }
  const std::vector<double> p = nn::softmax(scaled);

  const double u = uniform01(rng);
  int chosen = -1;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    chosen = static_cast<int>(i);
    acc += p[i];
    if (u < acc) break;
  }
  assert(chosen >= 0);
  SampledAction out;
  out.action = chosen;
  out.tactic = env::tactic_from_action(chosen);
  out.log_pf = eval.log_probs[static_cast<std::size_t>(chosen)];
  return out;
}

SampledAction sample_action(const PolicyNet& net, const EncodedState& es,
                            double temperature, Rng& rng) {
  return sample_action(evaluate(net, es), temperature, rng);
}

LogZEval evaluate_log_z(const PolicyNet& net, const data::Theorem& thm) {
  if (!net.has_log_z()) throw std::logic_error("policy has no log Z head");
  const EncodedState es =
      encode_state(thm, {}, thm.initial_state, EncodingMode::History);
  LogZEval ev;
  ev.mlp = nn::mlp_forward(net.params(), es);
  const nn::Tensor& w = net.params().at(kLogZW);
  ev.log_z = simd::active().dot(w.data.data(), ev.mlp.hidden().data(), w.cols) +
             net.params().at(kLogZB).data[0];
  return ev;
}

double predict_log_z(const PolicyNet& net, const data::Theorem& thm) {
  return evaluate_log_z(net, thm).log_z;
}

void accumulate_logits_grad(const PolicyNet& net, const PolicyEval& eval,
                            std::span<const double> d_logits,
                            nn::ParamStore& grads) {
  nn::mlp_backward(net.params(), eval.mlp.tape, d_logits, {}, grads);
}

void accumulate_log_prob_grad(const PolicyNet& net, const PolicyEval& eval,
                              int action, double scale, nn::ParamStore& grads) {
  // d log softmax(z)[a] / dz = onehot(a) - softmax(z)
  std::vector<double> d(eval.log_probs.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = -scale * std::exp(eval.log_probs[i]);
  }
  d[static_cast<std::size_t>(action)] += scale;
  accumulate_logits_grad(net, eval, d, grads);
}

void accumulate_log_z_grad(const PolicyNet& net, const LogZEval& eval,
                           double scale, nn::ParamStore& grads) {
  const nn::Tensor& w = net.params().at(kLogZW);
  const auto& k = simd::active();
  k.axpy(scale, eval.mlp.hidden().data(), grads.at(kLogZW).data.data(), w.cols);
  grads.at(kLogZB).data[0] += scale;
  std::vector<double> d_hidden(w.cols);
  for (std::size_t i = 0; i < w.cols; ++i) d_hidden[i] = scale * w.data[i];
  nn::mlp_backward(net.params(), eval.mlp.tape, {}, d_hidden, grads);
}

nn::Checkpoint to_checkpoint(const PolicyNet& net,
                             std::map<std::string, std::string> meta) {
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(net.mask().bits()));
  meta["kind"] = meta.count("kind") ? meta["kind"] : "policy";
  meta["mask"] = hex;
  return nn::Checkpoint{std::move(meta), net.params(), std::nullopt};
}

PolicyNet policy_from_checkpoint(const nn::Checkpoint& ckpt) {
  ActionMask mask = ActionMask::full();
  if (auto it = ckpt.meta.find("mask"); it != ckpt.meta.end()) {
    mask = ActionMask::from_bits(std::stoull(it->second, nullptr, 16));
  }
  const nn::ParamStore& ps = ckpt.params;
  const nn::ParamStore expected = make_store(ps.contains(kLogZW));
  bool ok = ps.tensors().size() == expected.tensors().size();
  for (const auto& [name, t] : expected.tensors()) {
    ok = ok && ps.contains(name) && ps.at(name).rows == t.rows && ps.at(name).cols == t.cols;
  }
  if (!ok) throw nn::CheckpointError("checkpoint does not hold a policy network");
  return PolicyNet(ps, mask);
}

}  // namespace flowprover::policy
