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

#include "flowprover/env/prover.hpp"

#include <cctype>
#include <stdexcept>

#include "flowprover/util/hash.hpp"

namespace flowprover::env {
namespace {

constexpr std::array<std::string_view, 8> kTacticNames = {
    "intro", "split", "left", "right", "exact", "apply", "cases", "destruct"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

bool takes_argument(TacticKind kind) noexcept {
  return kind >= TacticKind::Exact;
}

int action_index(const Tactic& t) {
  const int k = static_cast<int>(t.kind);
  if (!takes_argument(t.kind)) {
    if (t.arg != 0) throw std::invalid_argument("argless tactic with argument");
    return k;
  }
  if (t.arg < 1 || t.arg > kMaxHypArg) {
    throw std::invalid_argument("hypothesis argument out of range");
  }
  return 4 + (k - 4) * kMaxHypArg + (t.arg - 1);
}

Tactic tactic_from_action(int action) {
  if (action < 0 || action >= kNumActions) {
    throw std::out_of_range("action index out of range");
  }
  if (action < 4) return Tactic{static_cast<TacticKind>(action), 0};
  const int rel = action - 4;
  return Tactic{static_cast<TacticKind>(4 + rel / kMaxHypArg), 1 + rel % kMaxHypArg};
}

std::string to_string(const Tactic& t) {
  std::string out(kTacticNames[static_cast<int>(t.kind)]);
  if (takes_argument(t.kind)) {
    out += " h";
    out += std::to_string(t.arg);
  }
  return out;
}

Tactic parse_tactic(std::string_view text) {
  const std::string_view body = trim(text);
  const std::size_t lead = body.empty() ? 0 : body.data() - text.data();
  const std::size_t space = body.find(' ');
  const std::string_view head = body.substr(0, space);
  for (std::size_t k = 0; k < kTacticNames.size(); ++k) {
    if (head != kTacticNames[k]) continue;
    const auto kind = static_cast<TacticKind>(k);
    if (!takes_argument(kind)) {
      if (space != std::string_view::npos) {
        throw SyntaxError("unexpected argument", lead + space);
      }
      return Tactic{kind, 0};
    }
    if (space == std::string_view::npos) {
      throw SyntaxError("missing hypothesis argument", lead + body.size());
    }
    const std::string_view arg = trim(body.substr(space + 1));
    const std::size_t arg_off = arg.data() - text.data();
    if (arg.size() != 2 || arg[0] != 'h' || arg[1] < '1' ||
        arg[1] > '0' + kMaxHypArg) {
      throw SyntaxError("expected h1..h8", arg_off);
    }
    return Tactic{kind, arg[1] - '0'};
  }
  throw SyntaxError("unknown tactic '" + std::string(head) + "'", lead);
}

std::string_view to_string(EnvError e) {
  switch (e) {
    case EnvError::NoSuchHypothesis: return "NoSuchHypothesis";
    case EnvError::ShapeMismatch: return "ShapeMismatch";
    case EnvError::NoGoals: return "NoGoals";
  }
  return "?";
}

StepResult apply_tactic(const ProofState& s, const Tactic& t) {
  if (s.goals.empty()) return StepResult::error(EnvError::NoGoals);
  const Goal& goal = s.goals.front();

  const Formula* hyp = nullptr;
  if (takes_argument(t.kind)) {
    if (t.arg < 1 || static_cast<std::size_t>(t.arg) > goal.hyps.size()) {
      return StepResult::error(EnvError::NoSuchHypothesis);
    }
    hyp = &goal.hyps[t.arg - 1];
  }

  // The first goal is replaced by `replacement` (possibly nothing).
  std::vector<Goal> replacement;
  switch (t.kind) {
    case TacticKind::Intro: {
      if (!goal.target.is(Connective::Implies)) {
        return StepResult::error(EnvError::ShapeMismatch);
      }
      Goal g{goal.hyps, goal.target.rhs()};
      g.hyps.push_back(goal.target.lhs());
      replacement.push_back(std::move(g));
      break;
    }
    case TacticKind::Split: {
      if (!goal.target.is(Connective::And)) {
        return StepResult::error(EnvError::ShapeMismatch);
      }
      replacement.push_back(Goal{goal.hyps, goal.target.lhs()});
      replacement.push_back(Goal{goal.hyps, goal.target.rhs()});
      break;
    }
    case TacticKind::Left:
    case TacticKind::Right: {
      if (!goal.target.is(Connective::Or)) {
        return StepResult::error(EnvError::ShapeMismatch);
      }
      const Formula& side = t.kind == TacticKind::Left ? goal.target.lhs()
                                                       : goal.target.rhs();
      replacement.push_back(Goal{goal.hyps, side});
      break;
    }
    case TacticKind::Exact: {
      if (*hyp != goal.target) return StepResult::error(EnvError::ShapeMismatch);
      break;
    }
    case TacticKind::Apply: {
      if (!hyp->is(Connective::Implies) || hyp->rhs() != goal.target) {
        return StepResult::error(EnvError::ShapeMismatch);
      }
      replacement.push_back(Goal{goal.hyps, hyp->lhs()});
      break;
    }
    case TacticKind::Cases: {
      if (!hyp->is(Connective::Or)) return StepResult::error(EnvError::ShapeMismatch);
      Goal left = goal;
      Goal right = goal;
      left.hyps[t.arg - 1] = hyp->lhs();
      right.hyps[t.arg - 1] = hyp->rhs();
      replacement.push_back(std::move(left));
      replacement.push_back(std::move(right));
      break;
    }
    case TacticKind::Destruct: {
      if (!hyp->is(Connective::And)) return StepResult::error(EnvError::ShapeMismatch);
      Goal g = goal;
      g.hyps.erase(g.hyps.begin() + (t.arg - 1));
      g.hyps.push_back(hyp->lhs());
      g.hyps.push_back(hyp->rhs());
      replacement.push_back(std::move(g));
      break;
    }
  }

  ProofState next;
  next.goals.reserve(replacement.size() + s.goals.size() - 1);
  for (Goal& g : replacement) next.goals.push_back(std::move(g));
  for (std::size_t i = 1; i < s.goals.size(); ++i) next.goals.push_back(s.goals[i]);
  if (next.goals.empty()) return StepResult::proved();
  return StepResult::ok(std::move(next));
}

StepResult replay(const ProofState& s, const std::vector<Tactic>& tactics) {
  StepResult current = StepResult::ok(s);
  for (const Tactic& t : tactics) {
    StepResult next = apply_tactic(current.state(), t);
    if (!next.is_ok()) return next;
    current = std::move(next);
  }
  return current;
}

std::string print_goal(const Goal& g) {
  std::string out;
  for (std::size_t i = 0; i < g.hyps.size(); ++i) {
    out += 'h';
    out += std::to_string(i + 1);
    out += " : ";
    out += print_formula(g.hyps[i]);
    out += '\n';
  }
  out += "|- ";
  out += print_formula(g.target);
  return out;
}

std::string print_state(const ProofState& s) {
  if (s.goals.empty()) return "no goals";
  std::string out;
  for (std::size_t i = 0; i < s.goals.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += print_goal(s.goals[i]);
  }
  return out;
}

std::string goal_to_line(const Goal& g) {
  std::string out;
  for (std::size_t i = 0; i < g.hyps.size(); ++i) {
    if (i > 0) out += ", ";
    out += print_formula(g.hyps[i]);
  }
  if (!g.hyps.empty()) out += " |- ";
  out += print_formula(g.target);
  return out;
}

Goal parse_goal_line(std::string_view text) {
  const std::size_t turnstile = text.find("|-");
  if (turnstile == std::string_view::npos) {
    return Goal{{}, parse_formula(text)};
  }
  Goal g{{}, Formula::atom("x")};
  std::size_t start = 0;
  const std::string_view hyps = text.substr(0, turnstile);
  if (!trim(hyps).empty()) {
    while (true) {
      const std::size_t comma = hyps.find(',', start);
      const std::string_view piece =
          hyps.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                             : comma - start);
      try {
        g.hyps.push_back(parse_formula(piece));
      } catch (const SyntaxError& e) {
        throw SyntaxError("bad hypothesis", start + e.offset());
      }
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  try {
    g.target = parse_formula(text.substr(turnstile + 2));
  } catch (const SyntaxError& e) {
    throw SyntaxError("bad target", turnstile + 2 + e.offset());
  }
  return g;
}

ProofState initial_state(Goal g) {
  ProofState s;
  s.goals.push_back(std::move(g));
  return s;
}

std::uint64_t state_fingerprint(const ProofState& s) {
  if (s.goals.empty()) return kCompleteStateFingerprint;
  const std::uint64_t h = fnv1a64(print_state(s));
  return h == kCompleteStateFingerprint ? 1 : h;
}

}  // namespace flowprover::env
