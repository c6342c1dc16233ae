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

#include "flowprover/data/theorem.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "flowprover/util/hash.hpp"

namespace flowprover::data {

using env::Formula;
using env::ProofState;
using env::Tactic;

namespace {

constexpr std::array<const char*, 16> kAtomPool = {
    "p", "q", "r", "s", "t", "u", "v", "w",
    "a", "b", "c", "d", "x1", "x2", "y1", "y2"};

struct Statement {
  std::vector<Formula> premises;
  Formula target;
};

std::vector<std::string> sample_alphabet(Rng& rng) {
  std::vector<std::string> pool(kAtomPool.begin(), kAtomPool.end());
  // Partial Fisher-Yates for the first four names.
  for (std::size_t i = 0; i < 4; ++i) {
    const std::size_t j = i + uniform_index(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(4);
  return pool;
}

Formula random_atom(Rng& rng, const std::vector<std::string>& alphabet) {
  return Formula::atom(alphabet[uniform_index(rng, alphabet.size())]);
}

Formula random_subformula(Rng& rng, const std::vector<std::string>& alphabet) {
  if (uniform01(rng) < 0.55) return random_atom(rng, alphabet);
  Formula l = random_atom(rng, alphabet);
  Formula r = random_atom(rng, alphabet);
  switch (uniform_index(rng, 3)) {
    case 0: return Formula::conj(std::move(l), std::move(r));
    case 1: return Formula::disj(std::move(l), std::move(r));
    default: return Formula::implies(std::move(l), std::move(r));
  }
}

// `count` pairwise-distinct sub-formulas.
std::vector<Formula> distinct_subformulas(Rng& rng,
                                          const std::vector<std::string>& alphabet,
                                          std::size_t count) {
  std::vector<Formula> out;
  while (out.size() < count) {
    Formula f = random_subformula(rng, alphabet);
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(std::move(f));
  }
  return out;
}

Statement instantiate(Rng& rng, int target_len,
                      const std::vector<std::string>& alphabet) {
  const auto f = distinct_subformulas(rng, alphabet, 3);
  const Formula& A = f[0];
  const Formula& B = f[1];
  const Formula& C = f[2];
  const auto imp = &Formula::implies;
  const auto conj = &Formula::conj;
  const auto disj = &Formula::disj;

  switch (target_len) {
    case 1:
      // exact
      return {{A}, A};
    case 2:
      switch (uniform_index(rng, 6)) {
        case 0: return {{}, imp(A, A)};                   // intro; exact
        case 1: return {{A}, imp(B, A)};                  // intro; exact
        case 2: return {{A}, disj(A, B)};                 // left; exact
        case 3: return {{B}, disj(A, B)};                 // right; exact
        case 4: return {{imp(A, B), A}, B};               // apply; exact
        default:                                          // destruct; exact
          return {{conj(A, B)}, uniform01(rng) < 0.5 ? A : B};
      }
    default:
      switch (uniform_index(rng, 8)) {
        case 0: return {{}, imp(A, imp(B, A))};           // intro; intro; exact
        case 1: return {{}, imp(A, imp(B, B))};
        case 2:                                           // intro; destruct; exact
          return {{}, imp(conj(A, B), uniform01(rng) < 0.5 ? A : B)};
        case 3: return {{}, imp(A, disj(A, B))};          // intro; left; exact
        case 4: return {{}, imp(B, disj(A, B))};          // intro; right; exact
        case 5: return {{A, B}, conj(A, B)};              // split; exact; exact
        case 6: return {{disj(A, A)}, A};                 // cases; exact; exact
        default: return {{imp(A, B), imp(B, C), A}, C};   // apply; apply; exact
      }
  }
}

void add_distractors(Rng& rng, const std::vector<std::string>& alphabet,
                     std::vector<Formula>& premises) {
  const std::size_t n = uniform_index(rng, 3);
  for (std::size_t i = 0; i < n; ++i) {
    Formula d = uniform01(rng) < 0.5
                    ? random_atom(rng, alphabet)
                    : Formula::implies(random_atom(rng, alphabet),
                                       random_atom(rng, alphabet));
    const std::size_t pos = uniform_index(rng, premises.size() + 1);
    premises.insert(premises.begin() + static_cast<std::ptrdiff_t>(pos), std::move(d));
  }
}

bool dfs_proof(const ProofState& s, int remaining, std::vector<Tactic>& path) {
  for (int a = 0; a < env::kNumActions; ++a) {
    const Tactic t = env::tactic_from_action(a);
    env::StepResult r = env::apply_tactic(s, t);
    if (r.is_error()) continue;
    path.push_back(t);
    if (r.is_proved()) {
      if (remaining == 1) return true;
    } else if (remaining > 1 && dfs_proof(r.state(), remaining - 1, path)) {
      return true;
    }
    path.pop_back();
  }
  return false;
}

}  // namespace

std::optional<std::vector<Tactic>> shortest_proof(const ProofState& s, int max_len) {
  if (s.complete()) return std::vector<Tactic>{};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Tactic> path;
    if (dfs_proof(s, len, path)) return path;
  }
  return std::nullopt;
}

Theorem generate_theorem(Rng& rng, int target_len) {
  if (target_len < 1 || target_len > 3) {
    throw std::invalid_argument("target_len must be in 1..3");
  }
  for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
    const auto alphabet = sample_alphabet(rng);
    Statement st = instantiate(rng, target_len, alphabet);
    add_distractors(rng, alphabet, st.premises);
    if (st.premises.size() > static_cast<std::size_t>(env::kMaxHypArg)) continue;

    Theorem thm;
    thm.initial_state = env::initial_state(env::Goal{st.premises, st.target});
    auto proof = shortest_proof(thm.initial_state, target_len);
    if (!proof || static_cast<int>(proof->size()) != target_len) continue;
    thm.gt_proof = std::move(*proof);
    if (!env::replay(thm.initial_state, thm.gt_proof).is_proved()) continue;
    if (!filter_theorem(thm)) continue;

    char buf[32];
    std::snprintf(buf, sizeof buf, "thm_%016llx",
                  static_cast<unsigned long long>(
                      env::state_fingerprint(thm.initial_state)));
    thm.name = buf;
    return thm;
  }
  throw GenerationExhausted("no theorem of length " + std::to_string(target_len) +
                            " after " + std::to_string(kGenerationAttempts) +
                            " attempts");
}

bool filter_theorem(const Theorem& thm, const FilterCaps& caps) {
  if (thm.gt_proof.empty() ||
      static_cast<int>(thm.gt_proof.size()) > caps.max_proof_len) {
    return false;
  }
  ProofState s = thm.initial_state;
  if (env::print_state(s).size() > caps.max_state_chars) return false;
  for (const Tactic& t : thm.gt_proof) {
    if (env::to_string(t).size() > caps.max_tactic_chars) return false;
    env::StepResult r = env::apply_tactic(s, t);
    if (r.is_error()) return false;
    s = std::move(r).take_state();
    if (env::print_state(s).size() > caps.max_state_chars) return false;
  }
  return s.complete();
}

namespace {

std::vector<int> length_schedule(std::size_t n, const std::array<std::size_t, 3>& base,
                                 Rng& rng) {
  std::vector<int> lengths;
  for (int len = 1; len <= 3; ++len) {
    lengths.insert(lengths.end(), base[len - 1], len);
  }
  lengths.resize(n, 3);
  shuffle(lengths, rng);
  return lengths;
}

std::array<std::size_t, 3> balanced_counts(std::size_t n) {
  // Remainder goes to the longest proofs, e.g. 20 -> 6/7/7, 1000 -> 333/333/334.
  std::array<std::size_t, 3> c{n / 3, n / 3, n / 3};
  std::size_t rem = n % 3;
  for (std::size_t i = 3; rem > 0; --i, --rem) c[i - 1] += 1;
  return c;
}

}  // namespace

CorpusSplit build_corpus(std::uint64_t seed, const CorpusOptions& options) {
  CorpusSplit split;
  std::unordered_set<std::uint64_t> seen;
  std::uint64_t stream = 0;

  auto fill = [&](std::vector<Theorem>& out, std::size_t n, const char* prefix,
                  int width, std::uint64_t schedule_stream) {
    Rng schedule_rng(derive_seed(seed, schedule_stream));
    const auto lengths = length_schedule(n, balanced_counts(n), schedule_rng);
    for (std::size_t i = 0; i < n; ++i) {
      Rng rng(derive_seed(seed, ++stream));
      bool accepted = false;
      for (int attempt = 0; attempt < kGenerationAttempts && !accepted; ++attempt) {
        Theorem thm = generate_theorem(rng, lengths[i]);
        if (!seen.insert(env::state_fingerprint(thm.initial_state)).second) continue;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s_%0*zu", prefix, width, i);
        thm.name = buf;
        out.push_back(std::move(thm));
        accepted = true;
      }
      if (!accepted) {
        throw GenerationExhausted("could not find a fresh theorem for " +
                                  std::string(prefix) + " #" + std::to_string(i));
      }
    }
  };

  // Validation first so its fingerprints are reserved before train sampling.
  fill(split.valid, options.valid_size, "valid", 2, 0xa11d);
  fill(split.train, options.train_size, "train", 4, 0x7a19);
  return split;
}

std::string to_jsonl(const std::vector<Theorem>& theorems) {
  std::vector<const Theorem*> sorted;
  sorted.reserve(theorems.size());
  for (const Theorem& t : theorems) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(),
            [](const Theorem* a, const Theorem* b) { return a->name < b->name; });

  std::string out;
  for (const Theorem* t : sorted) {
    nlohmann::ordered_json j;
    j["name"] = t->name;
    j["goal"] = env::goal_to_line(t->initial_state.goals.at(0));
    auto proof = nlohmann::ordered_json::array();
    for (const Tactic& tac : t->gt_proof) proof.push_back(env::to_string(tac));
    j["gt_proof"] = std::move(proof);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Theorem> parse_jsonl(const std::string& text) {
  std::vector<Theorem> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Theorem t;
      t.name = j.at("name").get<std::string>();
      t.initial_state =
          env::initial_state(env::parse_goal_line(j.at("goal").get<std::string>()));
      for (const auto& s : j.at("gt_proof")) {
        t.gt_proof.push_back(env::parse_tactic(s.get<std::string>()));
      }
      out.push_back(std::move(t));
    } catch (const std::exception& e) {
      throw std::runtime_error("corpus line " + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<Theorem>& theorems) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << to_jsonl(theorems);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<Theorem> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_jsonl(ss.str());
}

std::string corpus_hash(const CorpusSplit& split) {
  std::uint64_t h = fnv1a64(to_jsonl(split.train));
  h = fnv1a64(to_jsonl(split.valid), h);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace flowprover::data
