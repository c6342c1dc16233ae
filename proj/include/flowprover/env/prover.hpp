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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flowprover/env/formula.hpp"

namespace flowprover::env {

// Hypotheses are referenced by position; the hypothesis at position k (1-based)
// is always named h<k>.
struct Goal {
  std::vector<Formula> hyps;
  Formula target;

  friend bool operator==(const Goal& a, const Goal& b) {
    return a.target == b.target && a.hyps == b.hyps;
  }
};

struct ProofState {
  std::vector<Goal> goals;

  bool complete() const noexcept { return goals.empty(); }
  friend bool operator==(const ProofState& a, const ProofState& b) {
    return a.goals == b.goals;
  }
};

inline constexpr int kMaxHypArg = 8;
inline constexpr int kNumActions = 4 + 4 * kMaxHypArg;  // 36

enum class TacticKind : std::uint8_t {
  Intro, Split, Left, Right, Exact, Apply, Cases, Destruct
};

struct Tactic {
  TacticKind kind = TacticKind::Intro;
  int arg = 0;  // 1..kMaxHypArg for Exact/Apply/Cases/Destruct, else 0

  friend bool operator==(const Tactic&, const Tactic&) = default;
};

bool takes_argument(TacticKind kind) noexcept;

// Fixed action layout: intro, split, left, right, then exact h1..h8,
// apply h1..h8, cases h1..h8, destruct h1..h8.
int action_index(const Tactic& t);
Tactic tactic_from_action(int action);

// Canonical rendering: `intro`, `exact h3`, ...
std::string to_string(const Tactic& t);
Tactic parse_tactic(std::string_view text);

enum class EnvError : std::uint8_t { NoSuchHypothesis, ShapeMismatch, NoGoals };
std::string_view to_string(EnvError e);

class StepResult {
 public:
  enum class Kind : std::uint8_t { Ok, Proved, Error };

  static StepResult ok(ProofState next) {
    return StepResult(Kind::Ok, std::move(next), EnvError::NoGoals);
  }
  static StepResult proved() { return StepResult(Kind::Proved, {}, EnvError::NoGoals); }
  static StepResult error(EnvError e) { return StepResult(Kind::Error, {}, e); }

  Kind kind() const noexcept { return kind_; }
  bool is_ok() const noexcept { return kind_ == Kind::Ok; }
  bool is_proved() const noexcept { return kind_ == Kind::Proved; }
  bool is_error() const noexcept { return kind_ == Kind::Error; }
  // Valid for Ok; for Proved this is the empty state.
  const ProofState& state() const noexcept { return next_; }
  ProofState&& take_state() && noexcept { return std::move(next_); }
  EnvError error_reason() const noexcept { return error_; }

 private:
  StepResult(Kind k, ProofState s, EnvError e)
      : kind_(k), next_(std::move(s)), error_(e) {}

  Kind kind_;
  ProofState next_;
  EnvError error_;
};

// Applies `t` to the first goal of `s`. Total and deterministic.
StepResult apply_tactic(const ProofState& s, const Tactic& t);

// Replays `tactics` from `s`. Returns the last result; stops early at the first
// Proved or EnvError (remaining tactics are not applied). An empty script
// yields Ok(s).
StepResult replay(const ProofState& s, const std::vector<Tactic>& tactics);

// Multi-line, Lean-like rendering:
//   h1 : a
//   h2 : a -> b
//   |- b
// Goals are separated by a blank line; the complete state prints "no goals".
std::string print_goal(const Goal& g);
std::string print_state(const ProofState& s);

// Single-line goal text used in corpus files: "a, a -> b |- b", or just the
// target formula when there are no hypotheses.
std::string goal_to_line(const Goal& g);
Goal parse_goal_line(std::string_view text);

ProofState initial_state(Goal g);

inline constexpr std::uint64_t kCompleteStateFingerprint = 0;

// Hash of print_state(s); kCompleteStateFingerprint for the complete state and
// never that value for any other state.
std::uint64_t state_fingerprint(const ProofState& s);

}  // namespace flowprover::env
