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

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowprover/data/theorem.hpp"
#include "flowprover/gfn/reward.hpp"
#include "flowprover/policy/policy_net.hpp"
#include "flowprover/rm/reward_model.hpp"

namespace flowprover::oracle {

struct EnumeratedTrajectory {
  std::vector<int> actions;
  gfn::Outcome outcome = gfn::Outcome::DepthExhausted;
  double log_r = 0.0;
};

struct ExactDist {
  std::string theorem;
  std::vector<EnumeratedTrajectory> trajectories;
  double log_z = 0.0;
  std::vector<double> target_probs;  // exp(log_r - log_z)
  std::vector<double> policy_probs;  // filled by policy_trajectory_probs
};

struct EnumerationConfig {
  int max_depth = 3;
  policy::ActionMask mask = policy::ActionMask::full();
  gfn::RewardSpec reward{};
};

// Every trajectory from the initial state over the masked actions, depth
// first in action order, ending on Proved, EnvError or max_depth. Rewards go
// through gfn::log_reward.
ExactDist enumerate_trajectories(const data::Theorem& thm, const EnumerationConfig& cfg,
                                 const rm::RewardModel* rm);

// Fills log_z and target_probs from the trajectories' log_r.
void finalize(ExactDist& dist);

class MassLeak : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact P_F(tau) (T = 1, history encoding) of every enumerated trajectory.
// Throws MassLeak when they sum below 1 - 1e-6, i.e. the policy puts mass
// on trajectories the enumeration did not produce.
std::vector<double> policy_trajectory_probs(const policy::PolicyNet& net,
                                            const data::Theorem& thm,
                                            const ExactDist& dist);

// 1/2 sum |p - q|
double total_variation(std::span<const double> p, std::span<const double> q);

// P(action | node reached by `prefix`)
using EdgeProb = std::function<double(std::span<const int> prefix, int action)>;

struct FlowReport {
  double max_residual = 0.0;  // max over edges |F(s) P(a|s) - F(s')| / Z
  double max_terminal_error = 0.0;  // max over leaves |F(s) - R(s)| / Z
  std::size_t edges = 0;
};

// F(s) = sum of rewards of the terminals below s on the trajectory trie.
// Edges with P(a|s) > 0 that leave the trie count with F(s') = 0.
FlowReport flow_check(const ExactDist& dist, const EdgeProb& prob);
FlowReport flow_check(const ExactDist& dist, const policy::PolicyNet& net,
                      const data::Theorem& thm);

struct OracleReport {
  std::string theorem;
  std::size_t n_trajectories = 0;
  double log_z = 0.0;
  std::optional<double> predicted_log_z;
  double tv_distance = 0.0;
  double max_flow_residual = 0.0;
};

OracleReport run_oracle(const policy::PolicyNet& net, const data::Theorem& thm,
                        const EnumerationConfig& cfg, const rm::RewardModel* rm);

std::string to_json(const std::vector<OracleReport>& reports);

// Five theorems provable within two tactics using only the micro action mask
// (intro, split, left, right, exact h1, apply h1), for exhaustive checks.
std::vector<data::Theorem> micro_suite();
EnumerationConfig micro_enumeration_config();

}  // namespace flowprover::oracle
