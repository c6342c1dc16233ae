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
#include <cstddef>
#include <cstdint>
#include <span>

#include "flowprover/data/theorem.hpp"
#include "flowprover/env/prover.hpp"

namespace flowprover::policy {

inline constexpr std::size_t kGoalBlock = 64;
inline constexpr std::size_t kHistoryBlock = env::kNumActions;
inline constexpr std::size_t kStateDim = 2 * kGoalBlock + kHistoryBlock;  // 164

// Seed of the hashed-bag features. Changing it invalidates every checkpoint.
inline constexpr std::uint64_t kFeatureSeed = 0x9e6f'1c0d'52a7'b4e3ULL;

enum class EncodingMode : std::uint8_t { History, HistoryLess };

using EncodedState = std::array<double, kStateDim>;

// 64 features of the first goal of `s`:
//   [0,4)   target connective one-hot
//   4       goal count / 4
//   5       hypothesis count / 8
//   6       target depth / 8
//   7, 8    target is a disjunction whose left / right side is a hypothesis
//   [9,17)  hypothesis k equals the target
//   [17,25) hypothesis k is X -> target
//   [25,33) hypothesis k is a disjunction
//   [33,41) hypothesis k is a conjunction
//   41      no goals left
//   [42,64) hashed bag of (role, connective, atom name) over all subformulas
std::array<double, kGoalBlock> goal_features(const env::ProofState& s);

// current-goal block | initial-state block | history block. The history block
// holds, per action, the sum over its occurrences at step i (0-based) of
// 1 + i/8: the integer part is the occurrence count and the fractional part
// keeps different orderings apart. HistoryLess zeroes the last 100 entries.
EncodedState encode_state(const env::ProofState& initial,
                          std::span<const env::Tactic> history,
                          const env::ProofState& s, EncodingMode mode);

inline EncodedState encode_state(const data::Theorem& thm,
                                 std::span<const env::Tactic> history,
                                 const env::ProofState& s, EncodingMode mode) {
  return encode_state(thm.initial_state, history, s, mode);
}

EncodedState encode_history_less(const env::ProofState& s);

}  // namespace flowprover::policy
