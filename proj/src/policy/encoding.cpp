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

#include "flowprover/policy/encoding.hpp"

#include <algorithm>

#include "flowprover/util/hash.hpp"

namespace flowprover::policy {
namespace {

using env::Connective;
using env::Formula;

constexpr std::size_t kBagStart = 42;
constexpr std::size_t kBagSize = kGoalBlock - kBagStart;
constexpr double kBagUnit = 0.25;

enum Role : std::uint64_t { kTargetRole = 1, kHypRole = 2 };

void bag(const Formula& f, Role role, std::array<double, kGoalBlock>& out) {
  std::uint64_t h = hash_combine(kFeatureSeed, role);
  h = hash_combine(h, static_cast<std::uint64_t>(f.kind()));
  if (f.is(Connective::Atom)) {
    h = mix64(fnv1a64(f.name(), h));
    out[kBagStart + h % kBagSize] += kBagUnit;
    return;
  }
  out[kBagStart + h % kBagSize] += kBagUnit;
  bag(f.lhs(), role, out);
  bag(f.rhs(), role, out);
}

}  // namespace

std::array<double, kGoalBlock> goal_features(const env::ProofState& s) {
  std::array<double, kGoalBlock> out{};
  if (s.complete()) {
    out[41] = 1.0;
    return out;
  }
  const env::Goal& g = s.goals.front();
  const Formula& target = g.target;

  out[static_cast<std::size_t>(target.kind())] = 1.0;
  out[4] = static_cast<double>(s.goals.size()) / 4.0;
  out[5] = static_cast<double>(g.hyps.size()) / 8.0;
  out[6] = static_cast<double>(target.depth()) / 8.0;

  const auto has_hyp = [&](const Formula& f) {
    return std::find(g.hyps.begin(), g.hyps.end(), f) != g.hyps.end();
  };
  if (target.is(Connective::Or)) {
    out[7] = has_hyp(target.lhs()) ? 1.0 : 0.0;
    out[8] = has_hyp(target.rhs()) ? 1.0 : 0.0;
  }

  const std::size_t n = std::min<std::size_t>(g.hyps.size(), env::kMaxHypArg);
  for (std::size_t k = 0; k < n; ++k) {
    const Formula& h = g.hyps[k];
    if (h == target) out[9 + k] = 1.0;
    if (h.is(Connective::Implies) && h.rhs() == target) out[17 + k] = 1.0;
    if (h.is(Connective::Or)) out[25 + k] = 1.0;
    if (h.is(Connective::And)) out[33 + k] = 1.0;
  }

  bag(target, kTargetRole, out);
  for (const Formula& h : g.hyps) bag(h, kHypRole, out);
  return out;
}

EncodedState encode_state(const env::ProofState& initial,
                          std::span<const env::Tactic> history,
                          const env::ProofState& s, EncodingMode mode) {
  EncodedState es{};
  const auto current = goal_features(s);
  std::copy(current.begin(), current.end(), es.begin());
  if (mode == EncodingMode::HistoryLess) return es;

  const auto init = goal_features(initial);
  std::copy(init.begin(), init.end(), es.begin() + kGoalBlock);
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto a = static_cast<std::size_t>(env::action_index(history[i]));
    es[2 * kGoalBlock + a] += 1.0 + static_cast<double>(i) / 8.0;
  }
  return es;
}

EncodedState encode_history_less(const env::ProofState& s) {
  return encode_state(s, {}, s, EncodingMode::HistoryLess);
}

}  // namespace flowprover::policy
