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


#include <cmath>

#include <gtest/gtest.h>

#include "flowprover/gfn/reward.hpp"
#include "flowprover/rm/reward_model.hpp"

namespace flowprover::gfn {
namespace {

const double kLn36 = std::log(36.0);

env::ProofState state_of(const char* line) { return env::initial_state(env::parse_goal_line(line)); }
env::Tactic T(const char* text) { return env::parse_tactic(text); }

TEST(ErrorLogReward, ReferenceValues) {
  const RewardSpec spec;
  EXPECT_NEAR(error_log_reward(44.0, spec), -20.5452, 1e-4);
  EXPECT_NEAR(error_log_reward(8.0, spec), -15.7625, 1e-4);
  EXPECT_DOUBLE_EQ(error_log_reward(0.0, spec), -15.0);
  EXPECT_THROW(error_log_reward(88.0, spec), InvalidLength);
  EXPECT_THROW(error_log_reward(-1.0, spec), InvalidLength);
  EXPECT_THROW(error_log_reward(std::nan(""), spec), InvalidLength);
}

TEST(MeanTacticChars, CanonicalStrings) {
  EXPECT_DOUBLE_EQ(mean_tactic_chars({T("exact h1")}), 8.0);
  EXPECT_DOUBLE_EQ(mean_tactic_chars({T("intro"), T("destruct h2")}), 8.0);
  EXPECT_DOUBLE_EQ(mean_tactic_chars({}), 0.0);
}

TEST(LogReward, Branches) {
  const RewardSpec spec;
  const rm::RewardModel uniform = rm::RewardModel::uniform();
  const env::ProofState s = state_of("a -> a");
  EXPECT_EQ(log_reward(s, {T("intro"), T("exact h1")}, Outcome::Proved, spec, &uniform), 0.0);
  // "exact h1" on a goal without hypotheses: 8 chars.
  EXPECT_NEAR(log_reward(s, {T("exact h1")}, Outcome::EnvError, spec, nullptr), -15.7625, 1e-4);
  // Uniform RM: each tactic contributes -ln 36 / len.
  const double partial = log_reward(state_of("a & b -> a"), {T("intro"), T("destruct h1")},
                                    Outcome::DepthExhausted, spec, &uniform);
  EXPECT_NEAR(partial, -kLn36 / 5.0 - kLn36 / 11.0, 1e-12);
  EXPECT_THROW(log_reward(s, {T("intro")}, Outcome::DepthExhausted, spec, nullptr),
               std::invalid_argument);
}

TEST(LogReward, BinaryModeUsesErrorBranch) {
  RewardSpec spec;
  spec.mode = RewardMode::Binary;
  const env::ProofState s = state_of("a -> a");
  const double err = error_log_reward(5.0, spec);
  EXPECT_EQ(log_reward(s, {T("intro")}, Outcome::DepthExhausted, spec, nullptr), err);
  EXPECT_EQ(log_reward(s, {T("split")}, Outcome::EnvError, spec, nullptr), err);
  EXPECT_EQ(log_reward(s, {T("intro"), T("exact h1")}, Outcome::Proved, spec, nullptr), 0.0);
}

}  // namespace
}  // namespace flowprover::gfn
