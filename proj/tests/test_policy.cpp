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


#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "flowprover/data/theorem.hpp"
#include "flowprover/nn/gradcheck.hpp"
#include "flowprover/nn/ops.hpp"
#include "flowprover/policy/encoding.hpp"
#include "flowprover/policy/policy_net.hpp"

namespace flowprover::policy {
namespace {

const double kLn36 = std::log(36.0);

data::Theorem theorem_of(const char* line) {
  data::Theorem t;
  t.name = line;
  t.initial_state = env::initial_state(env::parse_goal_line(line));
  return t;
}

TEST(Encoding, EmptyHistoryBlockIsZero) {
  const data::Theorem t = theorem_of("a, b |- a & b");
  const EncodedState e = encode_state(t, {}, t.initial_state, EncodingMode::History);
  for (std::size_t i = 2 * kGoalBlock; i < kStateDim; ++i) EXPECT_EQ(e[i], 0.0);
  EXPECT_EQ(e, encode_state(t, {}, t.initial_state, EncodingMode::History));
  EXPECT_EQ(kStateDim, 164u);
}

TEST(Encoding, HistoryWeightsAndHistoryLess) {
  const data::Theorem t = theorem_of("a -> b -> a");
  const std::vector<env::Tactic> h = {env::parse_tactic("intro"), env::parse_tactic("intro")};
  const env::ProofState s = env::replay(t.initial_state, h).state();
  const EncodedState e = encode_state(t, h, s, EncodingMode::History);
  // intro at steps 0 and 1: 1 + (1 + 1/8).
  EXPECT_DOUBLE_EQ(e[2 * kGoalBlock + 0], 2.125);
  const EncodedState hl = encode_state(t, h, s, EncodingMode::HistoryLess);
  for (std::size_t i = kGoalBlock; i < kStateDim; ++i) EXPECT_EQ(hl[i], 0.0);
  EXPECT_EQ(hl, encode_history_less(s));
  for (std::size_t i = 0; i < kGoalBlock; ++i) EXPECT_EQ(hl[i], e[i]);
}

// Every pair of distinct histories (length <= 3) that reach the same state
// must encode differently with history and identically without.
TEST(Encoding, TreePropertyUpToDepthThree) {
  const data::CorpusSplit corpus = data::build_corpus(7);
  std::size_t collisions = 0;
  for (std::size_t n = 0; n < 60; ++n) {
    const data::Theorem& thm = corpus.train[n];
    std::map<std::uint64_t, std::vector<std::vector<env::Tactic>>> by_state;
    std::vector<std::pair<std::vector<env::Tactic>, env::ProofState>> frontier = {{{}, thm.initial_state}};
    for (int depth = 0; depth < 3; ++depth) {
      std::vector<std::pair<std::vector<env::Tactic>, env::ProofState>> next;
      for (const auto& [hist, s] : frontier) {
        for (int a = 0; a < env::kNumActions; ++a) {
          const env::Tactic t = env::tactic_from_action(a);
          env::StepResult r = env::apply_tactic(s, t);
          if (!r.is_ok()) continue;
          auto h = hist;
          h.push_back(t);
          by_state[env::state_fingerprint(r.state())].push_back(h);
          next.emplace_back(h, std::move(r).take_state());
        }
      }
      frontier = std::move(next);
    }
    for (const auto& [fp, hists] : by_state) {
      if (hists.size() < 2) continue;
      const env::ProofState s = env::replay(thm.initial_state, hists[0]).state();
      for (std::size_t i = 1; i < hists.size(); ++i) {
        ++collisions;
        EXPECT_NE(encode_state(thm, hists[0], s, EncodingMode::History),
                  encode_state(thm, hists[i], s, EncodingMode::History));
        EXPECT_EQ(encode_state(thm, hists[0], s, EncodingMode::HistoryLess),
                  encode_state(thm, hists[i], s, EncodingMode::HistoryLess));
      }
    }
  }
  EXPECT_GT(collisions, 0u);
}

TEST(PolicyNet, ZeroNetIsUniform) {
  const PolicyNet net = PolicyNet::zeros();
  const data::Theorem t = theorem_of("a -> a");
  const PolicyEval ev = evaluate(net, encode_state(t, {}, t.initial_state, EncodingMode::History));
  for (double lp : ev.log_probs) EXPECT_NEAR(lp, -kLn36, 1e-15);
  // The default random init starts from the same uniform policy.
  const PolicyNet r = PolicyNet::random(3);
  const PolicyEval er = evaluate(r, encode_state(t, {}, t.initial_state, EncodingMode::History));
  for (double lp : er.log_probs) EXPECT_NEAR(lp, -kLn36, 1e-15);
}

TEST(PolicyNet, MicroMaskZeroesOtherActions) {
  const PolicyNet net = PolicyNet::random(2, true, ActionMask::micro(), 1.0);
  EXPECT_EQ(net.mask().count(), 6u);
  const data::Theorem t = theorem_of("a -> a");
  const PolicyEval ev = evaluate(net, encode_state(t, {}, t.initial_state, EncodingMode::History));
  double sum = 0.0;
  for (int a = 0; a < env::kNumActions; ++a) {
    if (!net.mask().allows(a)) {
      EXPECT_EQ(ev.logits[a], nn::kNegInf);
      EXPECT_EQ(ev.log_probs[a], nn::kNegInf);
    }
    sum += std::exp(ev.log_probs[a]);
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_EQ(ActionMask::from_bits(ActionMask::micro().bits()), ActionMask::micro());
}

TEST(SampleAction, LogPfIsTemperatureFree) {
  const PolicyNet net = PolicyNet::random(5, true, ActionMask::full(), 1.0);
  const data::Theorem t = theorem_of("a, b |- a & b");
  const PolicyEval ev = evaluate(net, encode_state(t, {}, t.initial_state, EncodingMode::History));
  Rng rng(1);
  for (double temp : {0.25, 0.5, 1.0, 3.0}) {
    for (int i = 0; i < 50; ++i) {
      const SampledAction s = sample_action(ev, temp, rng);
      EXPECT_EQ(s.log_pf, ev.log_probs[s.action]);
      EXPECT_EQ(env::action_index(s.tactic), s.action);
    }
  }
}

TEST(SampleAction, ColdTemperatureIsArgmax) {
  const PolicyNet net = PolicyNet::random(6, true, ActionMask::full(), 1.0);
  const data::Theorem t = theorem_of("a -> b | a");
  const PolicyEval ev = evaluate(net, encode_state(t, {}, t.initial_state, EncodingMode::History));
  const int best = static_cast<int>(std::max_element(ev.logits.begin(), ev.logits.end()) - ev.logits.begin());
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_action(ev, 1e-4, rng).action, best);
}

TEST(SampleAction, FrequenciesWithinThreeSigma) {
  const PolicyNet net = PolicyNet::random(7, true, ActionMask::full(), 1.0);
  const data::Theorem t = theorem_of("a & b -> b");
  const PolicyEval ev = evaluate(net, encode_state(t, {}, t.initial_state, EncodingMode::History));
  Rng rng(3);
  const int n = 100000;
  std::vector<int> counts(env::kNumActions, 0);
  for (int i = 0; i < n; ++i) ++counts[sample_action(ev, 1.0, rng).action];
  for (int a = 0; a < env::kNumActions; ++a) {
    const double p = std::exp(ev.log_probs[a]);
    const double sigma = std::sqrt(n * p * (1 - p));
    EXPECT_LE(std::abs(counts[a] - n * p), 3 * sigma) << "action " << a;
  }
}

TEST(LogZ, BiasOnlyHead) {
  PolicyNet net = PolicyNet::random(8);
  net.params().at(kLogZB).data[0] = 3.2;
  EXPECT_DOUBLE_EQ(predict_log_z(net, theorem_of("a -> a")), 3.2);
  EXPECT_DOUBLE_EQ(predict_log_z(net, theorem_of("a, b |- b")), 3.2);
  EXPECT_FALSE(PolicyNet::zeros(false).has_log_z());
}

TEST(PolicyGradients, LogProbAndLogZMatchFiniteDifferences) {
  PolicyNet net = PolicyNet::random(9, true, ActionMask::full(), 1.0);
  Rng rng(4);
  for (auto& [name, t] : net.params().tensors())
    for (double& v : t.data) v += 0.1 * standard_normal(rng);
  const data::Theorem t = theorem_of("a, a -> b |- b | c");
  const std::vector<env::Tactic> h = {env::parse_tactic("left")};
  const env::ProofState s = env::replay(t.initial_state, h).state();
  const EncodedState es = encode_state(t, h, s, EncodingMode::History);
  const int action = 13;  // apply h2

  nn::ParamStore grads = net.params().zeros_like();
  accumulate_log_prob_grad(net, evaluate(net, es), action, 1.0, grads);
  accumulate_log_z_grad(net, evaluate_log_z(net, t), 0.5, grads);
  auto loss = [&] { return evaluate(net, es).log_probs[action] + 0.5 * predict_log_z(net, t); };
  const nn::GradCheckResult r = nn::check_gradients(net.params(), grads, loss, 1e-5, 40);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_param;
}

TEST(PolicyCheckpoint, RoundTrip) {
  const PolicyNet net = PolicyNet::random(10, true, ActionMask::micro(), 1.0);
  const nn::Checkpoint c = to_checkpoint(net, {{"step", "5"}});
  EXPECT_EQ(c.meta.at("kind"), "policy");
  const PolicyNet back = policy_from_checkpoint(nn::deserialize_checkpoint(nn::serialize_checkpoint(c)));
  EXPECT_EQ(back.params(), net.params());
  EXPECT_EQ(back.mask(), net.mask());
  nn::Checkpoint broken = c;
  broken.params.tensors().erase(nn::kW2);
  EXPECT_ANY_THROW(policy_from_checkpoint(broken));
}

}  // namespace
}  // namespace flowprover::policy
