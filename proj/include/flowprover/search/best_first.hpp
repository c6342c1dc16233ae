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
#include <optional>
#include <string>
#include <vector>

#include "flowprover/data/theorem.hpp"
#include "flowprover/env/prover.hpp"
#include "flowprover/policy/policy_net.hpp"

namespace flowprover::search {

struct SearchConfig {
  int branching = 8;
  // Policy queries allowed per search. Ignored when wall_clock_ms is set and
  // the budget is negative.
  std::int64_t expansion_budget = 100;
  std::optional<std::int64_t> wall_clock_ms;
  policy::EncodingMode encoding = policy::EncodingMode::History;
  bool dedupe = true;
  int max_depth = 3;
};

struct SearchOutcome {
  bool proved = false;
  std::optional<std::vector<env::Tactic>> proof;
  std::int64_t expansions = 0;
};

// Best-first search on cumulative log P_F. Ties go to the earlier-enqueued
// node. Expanding a node queries the policy once and tries its top
// `branching` actions by logit (lower action index first on equal logits).
SearchOutcome best_first_search(const policy::PolicyNet& net,
                                const data::Theorem& thm,
                                const SearchConfig& cfg);

// Same search rooted at `s`, reached from `initial` by `prefix`. The prefix
// counts toward max_depth and is part of the history encoding; the returned
// proof excludes it.
SearchOutcome search_from(const policy::PolicyNet& net,
                          const env::ProofState& initial,
                          const std::vector<env::Tactic>& prefix,
                          const env::ProofState& s, const SearchConfig& cfg);

struct TheoremResult {
  std::string name;
  int length = 0;  // ground-truth proof length
  bool solved = false;
  std::int64_t expansions = 0;
  std::vector<std::string> proof;
};

struct SolveReport {
  int solved = 0;
  int total = 0;
  std::vector<TheoremResult> per_theorem;
};

// Runs searches on up to `workers` threads; the report does not depend on it.
SolveReport evaluate_split(const policy::PolicyNet& net,
                           const std::vector<data::Theorem>& split,
                           const SearchConfig& cfg, unsigned workers = 1);

std::string to_json(const SolveReport& report);

}  // namespace flowprover::search
