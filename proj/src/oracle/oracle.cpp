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

#include "flowprover/oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"

#include "flowprover/nn/ops.hpp"

namespace flowprover::oracle {
namespace {

void enumerate(const data::Theorem& thm, const EnumerationConfig& cfg,
               const rm::RewardModel* rm, const env::ProofState& s,
               std::vector<env::Tactic>& tactics, std::vector<int>& actions,
               ExactDist& out) {
  for (const int a : cfg.mask.actions()) {
    const env::Tactic t = env::tactic_from_action(a);
    tactics.push_back(t);
    actions.push_back(a);
    env::StepResult r = env::apply_tactic(s, t);
    const int depth = static_cast<int>(tactics.size());
    if (r.is_ok() && depth < cfg.max_depth) {
      enumerate(thm, cfg, rm, r.state(), tactics, actions, out);
    } else {
      const gfn::Outcome o = r.is_proved()  ? gfn::Outcome::Proved
                             : r.is_error() ? gfn::Outcome::EnvError
                                            : gfn::Outcome::DepthExhausted;
      out.trajectories.push_back(EnumeratedTrajectory{
          actions, o, gfn::log_reward(thm.initial_state, tactics, o, cfg.reward, rm)});
    }
    tactics.pop_back();
    actions.pop_back();
  }
}

}  // namespace

void finalize(ExactDist& dist) {
  std::vector<double> log_r;
  log_r.reserve(dist.trajectories.size());
  for (const auto& t : dist.trajectories) log_r.push_back(t.log_r);
  dist.log_z = nn::logsumexp(log_r);
  // Ratios of max-shifted rewards; rounds better than exp(log_r - log_z).
  dist.target_probs.assign(log_r.size(), 0.0);
  if (log_r.empty() || dist.log_z == nn::kNegInf) return;
  const double m = *std::max_element(log_r.begin(), log_r.end());
  double total = 0.0;
  for (std::size_t i = 0; i < log_r.size(); ++i) {
    dist.target_probs[i] = std::exp(log_r[i] - m);
    total += dist.target_probs[i];
  }
  for (double& p : dist.target_probs) p /= total;
}

ExactDist enumerate_trajectories(const data::Theorem& thm, const EnumerationConfig& cfg,
                                 const rm::RewardModel* rm) {
  ExactDist dist;
  dist.theorem = thm.name;
  if (cfg.max_depth >= 1) {
    std::vector<env::Tactic> tactics;
    std::vector<int> actions;
    enumerate(thm, cfg, rm, thm.initial_state, tactics, actions, dist);
  }
  finalize(dist);
  return dist;
}

namespace {

// Per-node T = 1 log-probabilities, keyed by action prefix.
class NodeCache {
 public:
  NodeCache(const policy::PolicyNet& net, const data::Theorem& thm) : net_(net), thm_(thm) {}

  const std::vector<double>& log_probs(std::span<const int> prefix) {
    std::vector<int> key(prefix.begin(), prefix.end());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<env::Tactic> history;
    env::ProofState s = thm_.initial_state;
    for (const int a : prefix) {
      history.push_back(env::tactic_from_action(a));
      env::StepResult r = env::apply_tactic(s, history.back());
      if (!r.is_ok()) throw std::logic_error("prefix leaves the state space");
      s = std::move(r).take_state();
    }
    auto ev = policy::evaluate(
        net_, policy::encode_state(thm_, history, s, policy::EncodingMode::History));
    return cache_.emplace(std::move(key), std::move(ev.log_probs)).first->second;
  }

 private:
  const policy::PolicyNet& net_;
  const data::Theorem& thm_;
  std::map<std::vector<int>, std::vector<double>> cache_;
};

}  // namespace

std::vector<double> policy_trajectory_probs(const policy::PolicyNet& net,
                                            const data::Theorem& thm,
                                            const ExactDist& dist) {
  NodeCache cache(net, thm);
  std::vector<double> out;
  out.reserve(dist.trajectories.size());
  double total = 0.0;
  for (const auto& t : dist.trajectories) {
    double lp = 0.0;
    for (std::size_t i = 0; i < t.actions.size(); ++i) {
      lp += cache.log_probs(std::span<const int>(t.actions.data(), i))
                [static_cast<std::size_t>(t.actions[i])];
    }
    out.push_back(std::exp(lp));
    total += out.back();
  }
  if (total < 1.0 - 1e-6) {
    throw MassLeak("policy mass outside the enumeration: " + std::to_string(1.0 - total));
  }
  return out;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("distribution sizes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

FlowReport flow_check(const ExactDist& dist, const EdgeProb& prob) {
  // Normalised flows F(s)/Z on every prefix of every trajectory.
  std::map<std::vector<int>, double> flow;
  std::map<std::vector<int>, double> terminal;
  for (std::size_t i = 0; i < dist.trajectories.size(); ++i) {
    const auto& acts = dist.trajectories[i].actions;
    const double r = dist.target_probs[i];
    for (std::size_t k = 0; k <= acts.size(); ++k) {
      flow[std::vector<int>(acts.begin(), acts.begin() + static_cast<std::ptrdiff_t>(k))] += r;
    }
    terminal[acts] += r;
  }

  FlowReport rep;
  for (const auto& [leaf, r] : terminal) {
    rep.max_terminal_error = std::max(rep.max_terminal_error, std::abs(flow[leaf] - r));
  }
  for (const auto& [node, f] : flow) {
    if (terminal.count(node)) continue;
    for (int a = 0; a < env::kNumActions; ++a) {
      std::vector<int> child = node;
      child.push_back(a);
      auto it = flow.find(child);
      const double p = prob(node, a);
      if (it == flow.end() && p <= 0.0) continue;
      const double f_child = it == flow.end() ? 0.0 : it->second;
      rep.max_residual = std::max(rep.max_residual, std::abs(f * p - f_child));
      ++rep.edges;
    }
  }
  return rep;
}

FlowReport flow_check(const ExactDist& dist, const policy::PolicyNet& net,
                      const data::Theorem& thm) {
  NodeCache cache(net, thm);
  return flow_check(dist, [&](std::span<const int> prefix, int a) {
    return std::exp(cache.log_probs(prefix)[static_cast<std::size_t>(a)]);
  });
}

OracleReport run_oracle(const policy::PolicyNet& net, const data::Theorem& thm,
                        const EnumerationConfig& cfg, const rm::RewardModel* rm) {
  ExactDist dist = enumerate_trajectories(thm, cfg, rm);
  dist.policy_probs = policy_trajectory_probs(net, thm, dist);
  OracleReport rep;
  rep.theorem = thm.name;
  rep.n_trajectories = dist.trajectories.size();
  rep.log_z = dist.log_z;
  if (net.has_log_z()) rep.predicted_log_z = policy::predict_log_z(net, thm);
  rep.tv_distance = total_variation(dist.policy_probs, dist.target_probs);
  rep.max_flow_residual = flow_check(dist, net, thm).max_residual;
  return rep;
}

std::string to_json(const std::vector<OracleReport>& reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["theorem"] = r.theorem;
    j["n_trajectories"] = r.n_trajectories;
    j["log_Z"] = r.log_z;
    j["predicted_log_Z"] = r.predicted_log_z ? nlohmann::ordered_json(*r.predicted_log_z)
                                             : nlohmann::ordered_json(nullptr);
    j["tv_distance"] = r.tv_distance;
    j["max_flow_residual"] = r.max_flow_residual;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<data::Theorem> micro_suite() {
  const char* goals[] = {"a -> a", "a |- a | a", "a |- a | (b -> a)", "a |- a",
                         "a |- (b -> a) | a"};
  std::vector<data::Theorem> out;
  int i = 0;
  for (const char* g : goals) {
    data::Theorem thm;
    thm.name = "micro_" + std::to_string(++i);
    thm.initial_state = env::initial_state(env::parse_goal_line(g));
    auto proof = data::shortest_proof(thm.initial_state, 2);
    if (!proof) throw std::logic_error("micro theorem without a short proof");
    thm.gt_proof = std::move(*proof);
    out.push_back(std::move(thm));
  }
  return out;
}

EnumerationConfig micro_enumeration_config() {
  EnumerationConfig cfg;
  cfg.max_depth = 2;
  cfg.mask = policy::ActionMask::micro();
  return cfg;
}

}  // namespace flowprover::oracle
