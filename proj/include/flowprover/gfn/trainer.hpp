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
#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "flowprover/data/theorem.hpp"
#include "flowprover/gfn/reward.hpp"
#include "flowprover/nn/optim.hpp"
#include "flowprover/policy/policy_net.hpp"
#include "flowprover/rm/reward_model.hpp"
#include "flowprover/util/rng.hpp"

namespace flowprover::gfn {

enum class Source : std::uint8_t { Online, Replay, GroundTruth };
std::string_view to_string(Source s);

struct Trajectory {
  std::string theorem_name;
  std::vector<env::Tactic> tactics;
  // s_0 .. s_n; an EnvError trajectory has no state after its last tactic.
  std::vector<env::ProofState> states;
  Outcome outcome = Outcome::DepthExhausted;
  double log_pf = 0.0;
  double log_r = 0.0;
  Source source = Source::Online;
  double temperature = 1.0;
};

class ReplayDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-theorem FIFO rings of finished trajectories. log_r is frozen at
// insertion; log_pf is never read back.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity_per_theorem = 64)
      : capacity_(capacity_per_theorem) {}

  void insert(const Trajectory& traj);
  std::size_t size(const std::string& theorem) const;
  bool empty_for(const std::string& theorem) const { return size(theorem) == 0; }
  // Uniform with replacement; the copy is tagged Source::Replay.
  Trajectory sample(const std::string& theorem, Rng& rng);

  std::size_t capacity() const noexcept { return capacity_; }
  std::uint64_t reads() const noexcept { return reads_; }

 private:
  std::size_t capacity_;
  std::unordered_map<std::string, std::deque<Trajectory>> rings_;
  std::uint64_t reads_ = 0;
};

enum class TrainMode : std::uint8_t { Gfn, GfnOo, GfnBrOo };
std::string_view to_string(TrainMode m);
TrainMode parse_train_mode(std::string_view text);  // gfn, gfn-oo, gfn-br-oo

struct TrainConfig {
  nn::AdamWConfig optim{};  // lr 1e-4, clip 0.5
  int total_steps = 2000;
  int n_sampled = 5;
  double replay_p = 0.5;
  double temper_p = 0.666;
  double temper_lo = 0.25;
  double temper_hi = 1.0;
  int max_depth = 3;
  TrainMode mode = TrainMode::Gfn;
  bool inject_gt = true;
  std::size_t buffer_capacity = 64;
  std::uint64_t seed = 0;
  RewardSpec reward{};

  // Online-only modes get replay_p = 0; gfn-br-oo also gets binary reward.
  TrainConfig normalized() const;
};

// Rolls out the history-encoded policy for up to cfg.max_depth tactics,
// stopping early on Proved or EnvError. With probability temper_p the
// sampling temperature is drawn from U(temper_lo, temper_hi); log_pf is
// always the T = 1 log-probability.
Trajectory sample_trajectory(const data::Theorem& thm, const policy::PolicyNet& net,
                             const TrainConfig& cfg, const rm::RewardModel* rm,
                             Rng& rng);

// The ground-truth proof as a trajectory: Proved, log_r = 0, log_pf = 0
// until recomputed.
Trajectory ground_truth_trajectory(const data::Theorem& thm);

// Sum of log P_F(t_i | history-encoded s_{i-1}) under `net` at T = 1, from
// the stored states. With verify = true the tactics are first replayed
// through the environment and ReplayDiverged is thrown on any mismatch.
double replay_forward(const policy::PolicyNet& net, const data::Theorem& thm,
                      const Trajectory& traj, bool verify = false);

// log Z + log_pf - log_r; zero for every trajectory iff P_F(tau) = R(tau) / Z.
inline double tb_residual(double log_r, double log_z, double log_pf) {
  return log_z + log_pf - log_r;
}

// Mean of squared residuals.
double tb_loss_value(std::span<const double> residuals);

struct TbItem {
  const data::Theorem* theorem = nullptr;
  const Trajectory* trajectory = nullptr;
};

struct TbResult {
  double loss = 0.0;
  std::vector<double> log_pf;
  std::vector<double> log_z;
  std::vector<double> residual;
};

// Trajectory-balance loss over the batch (backward-policy term is zero on
// the tree). Accumulates gradients into `grads` when non-null.
TbResult tb_loss(const policy::PolicyNet& net, std::span<const TbItem> batch,
                 nn::ParamStore* grads);

struct StepMetrics {
  std::int64_t step = 0;
  std::string mode;
  std::string theorem;
  double loss = 0.0;
  double mean_log_r = 0.0;
  double mean_log_pf = 0.0;
  double log_z_mean = 0.0;
  std::int64_t env_calls = 0;
  std::int64_t buffer_reads = 0;
  bool replayed = false;
  bool skipped = false;  // non-finite gradient, update not applied
  int ground_truth_in_batch = 0;
};

class GflowNetTrainer {
 public:
  // `rm` may be null only for gfn-br-oo. The theorems are visited in a fresh
  // random permutation per epoch.
  GflowNetTrainer(policy::PolicyNet& net, const rm::RewardModel* rm,
                  const TrainConfig& cfg, std::vector<data::Theorem> train);

  StepMetrics train_step(const data::Theorem& thm);
  StepMetrics step();

  const TrainConfig& config() const noexcept { return cfg_; }
  const ReplayBuffer& buffer() const noexcept { return buffer_; }
  std::int64_t steps_done() const noexcept { return step_; }
  std::int64_t total_env_calls() const noexcept { return env_calls_; }
  nn::AdamW& optimizer() noexcept { return opt_; }
  Rng& rng() noexcept { return rng_; }

 private:
  policy::PolicyNet& net_;
  const rm::RewardModel* rm_;
  TrainConfig cfg_;
  std::vector<data::Theorem> train_;
  std::unordered_map<std::string, Trajectory> ground_truth_;
  ReplayBuffer buffer_;
  nn::AdamW opt_;
  nn::ParamStore grads_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::int64_t step_ = 0;
  std::int64_t env_calls_ = 0;
};

}  // namespace flowprover::gfn
