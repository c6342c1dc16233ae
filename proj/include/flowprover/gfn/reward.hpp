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

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "flowprover/env/prover.hpp"
#include "flowprover/rm/reward_model.hpp"

namespace flowprover::gfn {

enum class RewardMode : std::uint8_t { FullRm, Binary };

struct RewardSpec {
  double alpha = 8.0;
  double c_max_tactic_len = 88.0;
  double error_base = -15.0;
  RewardMode mode = RewardMode::FullRm;
};

enum class Outcome : std::uint8_t { Proved, EnvError, DepthExhausted };
std::string_view to_string(Outcome o);

class InvalidLength : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// error_base + alpha * ln((c - l) / c). Throws InvalidLength unless 0 <= l < c.
double error_log_reward(double mean_tactic_chars, const RewardSpec& spec);

// Mean character length of the canonical tactic strings.
double mean_tactic_chars(const std::vector<env::Tactic>& tactics);

// Terminal log-reward of a complete trajectory:
//   Proved          -> 0
//   EnvError        -> error branch on the mean tactic length
//   DepthExhausted  -> sum_i rm_score(t_i | s_{i-1}) / len(t_i) in FullRm mode,
//                      error branch in Binary mode
// FullRm mode needs `rm` for DepthExhausted trajectories.
double log_reward(const env::ProofState& initial,
                  const std::vector<env::Tactic>& tactics, Outcome outcome,
                  const RewardSpec& spec, const rm::RewardModel* rm);

}  // namespace flowprover::gfn
