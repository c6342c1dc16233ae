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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowprover/env/prover.hpp"
#include "flowprover/util/rng.hpp"

namespace flowprover::data {

struct Theorem {
  std::string name;
  env::ProofState initial_state;  // exactly one goal
  std::vector<env::Tactic> gt_proof;
};

struct CorpusSplit {
  std::vector<Theorem> train;
  std::vector<Theorem> valid;
};

struct FilterCaps {
  int max_proof_len = 3;
  std::size_t max_state_chars = 900;
  std::size_t max_tactic_chars = 90;
};

class GenerationExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kGenerationAttempts = 100;

// Samples a theorem whose shortest proof has exactly `target_len` tactics
// (1..3). The returned gt_proof is the canonical shortest proof (first in
// action order) and is verified by replay. Throws GenerationExhausted after
// kGenerationAttempts rejected candidates.
Theorem generate_theorem(Rng& rng, int target_len);

// Caps on proof length, every intermediate printed state, and every tactic
// string. A proof that fails to replay never passes.
bool filter_theorem(const Theorem& thm, const FilterCaps& caps = {});

// Shortest proof from `s` with at most `max_len` tactics, first in action
// order among equal lengths.
std::optional<std::vector<env::Tactic>> shortest_proof(const env::ProofState& s,
                                                       int max_len);

struct CorpusOptions {
  std::size_t train_size = 1000;
  std::size_t valid_size = 20;
};

// Deterministic in `seed`. Splits are disjoint by name and initial-state
// fingerprint and balanced over proof lengths 1/2/3.
CorpusSplit build_corpus(std::uint64_t seed, const CorpusOptions& options = {});

// JSON-lines: {"name": ..., "goal": ..., "gt_proof": [...]}, sorted by name.
std::string to_jsonl(const std::vector<Theorem>& theorems);
std::vector<Theorem> parse_jsonl(const std::string& text);

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<Theorem>& theorems);
std::vector<Theorem> read_jsonl(const std::filesystem::path& path);

// Hex digest over the train then valid JSON-lines renderings.
std::string corpus_hash(const CorpusSplit& split);

}  // namespace flowprover::data
