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

#include "flowprover/search/best_first.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <queue>
#include <unordered_set>

#include "json.hpp"

#include "flowprover/nn/ops.hpp"

#include "flowprover/util/parallel.hpp"

namespace flowprover::search {
namespace {

struct Node {
  env::ProofState state;
  std::vector<env::Tactic> history;  // includes the prefix
  double log_prob = 0.0;
  std::uint64_t seq = 0;
};

struct Lower {
  bool operator()(const Node& a, const Node& b) const {
    if (a.log_prob != b.log_prob) return a.log_prob < b.log_prob;
    return a.seq > b.seq;
  }
};

std::vector<int> top_actions(const std::vector<double>& logits, int branching) {
  std::vector<int> order(logits.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return logits[static_cast<std::size_t>(a)] > logits[static_cast<std::size_t>(b)];
  });
  std::vector<int> out;
  for (const int a : order) {
    if (static_cast<int>(out.size()) >= branching) break;
    if (logits[static_cast<std::size_t>(a)] == nn::kNegInf) break;
    out.push_back(a);
  }
  return out;
}

}  // namespace

SearchOutcome search_from(const policy::PolicyNet& net,
                          const env::ProofState& initial,
                          const std::vector<env::Tactic>& prefix,
                          const env::ProofState& s, const SearchConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const bool timed = cfg.wall_clock_ms.has_value();
  const bool unlimited = timed && cfg.expansion_budget < 0;

  SearchOutcome out;
  if (s.complete()) {
    out.proved = true;
    out.proof.emplace();
    return out;
  }
  if (static_cast<int>(prefix.size()) >= cfg.max_depth) return out;

  std::priority_queue<Node, std::vector<Node>, Lower> open;
  std::unordered_set<std::uint64_t> seen;
  std::uint64_t seq = 0;
  open.push(Node{s, prefix, 0.0, seq++});
  seen.insert(env::state_fingerprint(s));

  while (!open.empty()) {
    if (!unlimited && out.expansions >= cfg.expansion_budget) break;
    if (timed && std::chrono::duration_cast<std::chrono::milliseconds>(
                     Clock::now() - start)
                         .count() >= *cfg.wall_clock_ms) {
      break;
    }
    Node node = open.top();
    open.pop();
    ++out.expansions;

    const policy::PolicyEval ev = policy::evaluate(
        net, policy::encode_state(initial, node.history, node.state, cfg.encoding));
    for (const int a : top_actions(ev.logits, cfg.branching)) {
      const env::Tactic t = env::tactic_from_action(a);
      env::StepResult r = env::apply_tactic(node.state, t);
      if (r.is_error()) continue;
      std::vector<env::Tactic> history = node.history;
      history.push_back(t);
      if (r.is_proved()) {
        out.proved = true;
        out.proof.emplace(history.begin() + static_cast<std::ptrdiff_t>(prefix.size()),
                          history.end());
        return out;
      }
      if (static_cast<int>(history.size()) >= cfg.max_depth) continue;
      if (cfg.dedupe && !seen.insert(env::state_fingerprint(r.state())).second) continue;
      open.push(Node{std::move(r).take_state(), std::move(history),
                     node.log_prob + ev.log_probs[static_cast<std::size_t>(a)],
                     seq++});
    }
  }
  return out;
}

SearchOutcome best_first_search(const policy::PolicyNet& net,
                                const data::Theorem& thm,
                                const SearchConfig& cfg) {
  return search_from(net, thm.initial_state, {}, thm.initial_state, cfg);
}

SolveReport evaluate_split(const policy::PolicyNet& net,
                           const std::vector<data::Theorem>& split,
                           const SearchConfig& cfg, unsigned workers) {
  SolveReport report;
  report.total = static_cast<int>(split.size());
  report.per_theorem.resize(split.size());
  parallel_for(split.size(), workers, [&](std::size_t i) {
    const data::Theorem& thm = split[i];
    const SearchOutcome o = best_first_search(net, thm, cfg);
    TheoremResult& row = report.per_theorem[i];
    row.name = thm.name;
    row.length = static_cast<int>(thm.gt_proof.size());
    row.solved = o.proved;
    row.expansions = o.expansions;
    if (o.proof) {
      for (const auto& t : *o.proof) row.proof.push_back(env::to_string(t));
    }
  });
  for (const auto& row : report.per_theorem) report.solved += row.solved ? 1 : 0;
  return report;
}

std::string to_json(const SolveReport& report) {
  nlohmann::ordered_json j;
  j["solved"] = report.solved;
  j["total"] = report.total;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.per_theorem) {
    nlohmann::ordered_json row;
    row["name"] = r.name;
    row["length"] = r.length;
    row["solved"] = r.solved;
    row["expansions"] = r.expansions;
    row["proof"] = r.proof;
    rows.push_back(std::move(row));
  }
  j["per_theorem"] = std::move(rows);
  return j.dump(2) + "\n";
}

}  // namespace flowprover::search
