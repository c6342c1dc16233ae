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


#include <set>
#include <string>

#include <gtest/gtest.h>

#include "flowprover/env/prover.hpp"
#include "flowprover/util/rng.hpp"

namespace flowprover::env {
namespace {

ProofState state_of(const char* line) { return initial_state(parse_goal_line(line)); }

Tactic T(const char* text) { return parse_tactic(text); }

TEST(Tactic, ActionLayoutIsBijective) {
  std::set<std::string> names;
  for (int a = 0; a < kNumActions; ++a) {
    const Tactic t = tactic_from_action(a);
    EXPECT_EQ(action_index(t), a);
    EXPECT_EQ(parse_tactic(to_string(t)), t);
    names.insert(to_string(t));
  }
  EXPECT_EQ(names.size(), 36u);
  EXPECT_EQ(to_string(tactic_from_action(0)), "intro");
  EXPECT_EQ(to_string(tactic_from_action(4)), "exact h1");
  EXPECT_EQ(to_string(tactic_from_action(12)), "apply h1");
  EXPECT_EQ(to_string(tactic_from_action(35)), "destruct h8");
  EXPECT_THROW(tactic_from_action(36), std::out_of_range);
  EXPECT_THROW(action_index(Tactic{TacticKind::Exact, 0}), std::invalid_argument);
  EXPECT_THROW(action_index(Tactic{TacticKind::Intro, 2}), std::invalid_argument);
}

TEST(Tactic, ParseErrors) {
  EXPECT_THROW(parse_tactic("exact"), SyntaxError);
  EXPECT_THROW(parse_tactic("exact h9"), SyntaxError);
  EXPECT_THROW(parse_tactic("intro h1"), SyntaxError);
  EXPECT_THROW(parse_tactic("simp"), SyntaxError);
  EXPECT_EQ(parse_tactic("  cases h3 "), (Tactic{TacticKind::Cases, 3}));
}

TEST(ApplyTactic, IntroThenExact) {
  const StepResult r = apply_tactic(state_of("a -> a"), T("intro"));
  ASSERT_TRUE(r.is_ok());
  EXPECT_EQ(r.state(), state_of("a |- a"));
  EXPECT_TRUE(apply_tactic(r.state(), T("exact h1")).is_proved());
}

TEST(ApplyTactic, Mismatches) {
  const StepResult r = apply_tactic(state_of("a |- b"), T("exact h1"));
  ASSERT_TRUE(r.is_error());
  EXPECT_EQ(r.error_reason(), EnvError::ShapeMismatch);
  EXPECT_EQ(apply_tactic(state_of("a |- a"), T("exact h2")).error_reason(),
            EnvError::NoSuchHypothesis);
  EXPECT_EQ(apply_tactic(state_of("a"), T("intro")).error_reason(), EnvError::ShapeMismatch);
  EXPECT_EQ(apply_tactic(ProofState{}, T("intro")).error_reason(), EnvError::NoGoals);
}

TEST(ApplyTactic, SplitKeepsOrder) {
  const StepResult r = apply_tactic(state_of("c |- a & b"), T("split"));
  ASSERT_TRUE(r.is_ok());
  ASSERT_EQ(r.state().goals.size(), 2u);
  EXPECT_EQ(r.state().goals[0], parse_goal_line("c |- a"));
  EXPECT_EQ(r.state().goals[1], parse_goal_line("c |- b"));
  // Later goals follow the replacement.
  const StepResult r2 = apply_tactic(r.state(), T("exact h1"));
  EXPECT_TRUE(r2.is_error());
}

TEST(ApplyTactic, LeftRightApply) {
  EXPECT_EQ(apply_tactic(state_of("a | b"), T("left")).state(), state_of("a"));
  EXPECT_EQ(apply_tactic(state_of("a | b"), T("right")).state(), state_of("b"));
  EXPECT_EQ(apply_tactic(state_of("a -> b |- b"), T("apply h1")).state(),
            state_of("a -> b |- a"));
  EXPECT_TRUE(apply_tactic(state_of("a -> c |- b"), T("apply h1")).is_error());
}

TEST(ApplyTactic, CasesReplacesInPlace) {
  const StepResult r = apply_tactic(state_of("x, a | b, y |- c"), T("cases h2"));
  ASSERT_TRUE(r.is_ok());
  ASSERT_EQ(r.state().goals.size(), 2u);
  EXPECT_EQ(r.state().goals[0], parse_goal_line("x, a, y |- c"));
  EXPECT_EQ(r.state().goals[1], parse_goal_line("x, b, y |- c"));
}

TEST(ApplyTactic, DestructAppends) {
  const StepResult r = apply_tactic(state_of("a & b, x |- c"), T("destruct h1"));
  ASSERT_TRUE(r.is_ok());
  EXPECT_EQ(r.state(), state_of("x, a, b |- c"));
}

TEST(Replay, StopsAtFirstTerminal) {
  const ProofState s = state_of("a -> a");
  EXPECT_TRUE(replay(s, {T("intro"), T("exact h1")}).is_proved());
  EXPECT_TRUE(replay(s, {T("split"), T("intro")}).is_error());
  EXPECT_EQ(replay(s, {}).state(), s);
  EXPECT_TRUE(replay(s, {T("intro"), T("exact h1"), T("intro")}).is_proved());
}

TEST(Printing, StateAndGoalLine) {
  const ProofState s = state_of("a, a -> b |- b");
  EXPECT_EQ(print_state(s), "h1 : a\nh2 : a -> b\n|- b");
  EXPECT_EQ(goal_to_line(s.goals[0]), "a, a -> b |- b");
  EXPECT_EQ(goal_to_line(parse_goal_line("a -> a")), "a -> a");
  EXPECT_EQ(print_state(ProofState{}), "no goals");
  EXPECT_THROW(parse_goal_line("a, |- b"), SyntaxError);
}

TEST(Fingerprint, SentinelAndSensitivity) {
  const ProofState s = state_of("a |- a & b");
  EXPECT_EQ(state_fingerprint(s), state_fingerprint(state_of("a |- a & b")));
  EXPECT_EQ(state_fingerprint(ProofState{}), kCompleteStateFingerprint);
  EXPECT_NE(state_fingerprint(s), state_fingerprint(state_of("a |- a & c")));
  EXPECT_NE(state_fingerprint(s), kCompleteStateFingerprint);
}

Formula random_formula(Rng& rng, int depth) {
  static const char* const kAtoms[] = {"a", "b", "c"};
  if (depth == 0 || uniform01(rng) < 0.35) return Formula::atom(kAtoms[uniform_index(rng, 3)]);
  Formula l = random_formula(rng, depth - 1);
  Formula r = random_formula(rng, depth - 1);
  switch (uniform_index(rng, 3)) {
    case 0: return Formula::implies(l, r);
    case 1: return Formula::conj(l, r);
    default: return Formula::disj(l, r);
  }
}

// 10^5 random (state, action) pairs including empty states, >8 hypotheses and
// several goals: never throws, and Ok results are non-complete states.
TEST(ApplyTactic, TotalOnRandomPairs) {
  Rng rng(99);
  int ok = 0, proved = 0, err = 0;
  for (int i = 0; i < 100000; ++i) {
    ProofState s;
    const std::uint64_t goals = uniform_index(rng, 4);
    for (std::uint64_t g = 0; g < goals; ++g) {
      Goal goal{{}, random_formula(rng, 3)};
      const std::uint64_t hyps = uniform_index(rng, 11);
      for (std::uint64_t h = 0; h < hyps; ++h) goal.hyps.push_back(random_formula(rng, 2));
      s.goals.push_back(goal);
    }
    const Tactic t = tactic_from_action(static_cast<int>(uniform_index(rng, kNumActions)));
    StepResult r = StepResult::error(EnvError::NoGoals);
    ASSERT_NO_THROW(r = apply_tactic(s, t));
    if (r.is_ok()) {
      ++ok;
      ASSERT_FALSE(r.state().complete());
    } else if (r.is_proved()) {
      ++proved;
    } else {
      ++err;
    }
  }
  EXPECT_GT(ok, 0);
  EXPECT_GT(proved, 0);
  EXPECT_GT(err, 0);
}

}  // namespace
}  // namespace flowprover::env
