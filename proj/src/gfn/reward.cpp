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

#include "flowprover/gfn/reward.hpp"

#include <cmath>
#include <string>

namespace flowprover::gfn {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Proved: return "proved";
    case Outcome::EnvError: return "env_error";
    case Outcome::DepthExhausted: return "depth_exhausted";
  }
  return "?";
}

double error_log_reward(double l, const RewardSpec& spec) {
  const double c = spec.c_max_tactic_len;
  if (!(l >= 0.0) || !(l < c)) {
    throw InvalidLength("mean tactic length " + std::to_string(l) +
                        " outside [0, " + std::to_string(c) + ")");
  }
  return spec.error_base + spec.alpha * std::log((c - l) / c);
}

double mean_tactic_chars(const std::vector<env::Tactic>& tactics) {
  if (tactics.empty()) return 0.0;
  double total = 0.0;
  for (const auto& t : tactics) total += static_cast<double>(env::to_string(t).size());
  return total / static_cast<double>(tactics.size());
}

double log_reward(const env::ProofState& initial,
                  const std::vector<env::Tactic>& tactics, Outcome outcome,
                  const RewardSpec& spec, const rm::RewardModel* rm) {
  if (outcome == Outcome::Proved) return 0.0;
  if (outcome == Outcome::EnvError || spec.mode == RewardMode::Binary) {
    return error_log_reward(mean_tactic_chars(tactics), spec);
  }
  if (rm == nullptr) throw std::invalid_argument("partial reward needs a reward model");

  double total = 0.0;
  env::ProofState s = initial;
  for (const auto& t : tactics) {
    const double len = static_cast<double>(env::to_string(t).size());
    total += rm_score(*rm, s, t) / len;
    env::StepResult r = env::apply_tactic(s, t);
    if (!r.is_ok()) break;
    s = std::move(r).take_state();
  }
  return total;
}

}  // namespace flowprover::gfn
