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


#include <array>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "flowprover/data/theorem.hpp"
#include "flowprover/util/rng.hpp"

namespace flowprover::data {
namespace {

const CorpusSplit& corpus7() {
  static const CorpusSplit c = build_corpus(7);
  return c;
}

TEST(GenerateTheorem, SeededAndExactLength) {
  for (int len = 1; len <= 3; ++len) {
    Rng a(42), b(42);
    const Theorem t1 = generate_theorem(a, len);
    const Theorem t2 = generate_theorem(b, len);
    EXPECT_EQ(t1.name, t2.name);
    EXPECT_EQ(t1.initial_state, t2.initial_state);
    EXPECT_EQ(t1.gt_proof, t2.gt_proof);
    EXPECT_EQ(static_cast<int>(t1.gt_proof.size()), len);
    EXPECT_TRUE(env::replay(t1.initial_state, t1.gt_proof).is_proved());
    const auto shortest = shortest_proof(t1.initial_state, 3);
    ASSERT_TRUE(shortest.has_value());
    EXPECT_EQ(*shortest, t1.gt_proof);
  }
}

TEST(GenerateTheorem, RejectsBadLength) {
  Rng rng(1);
  EXPECT_THROW(generate_theorem(rng, 0), std::invalid_argument);
  EXPECT_THROW(generate_theorem(rng, 4), std::invalid_argument);
}

TEST(ShortestProof, SmallCases) {
  const auto s = env::initial_state(env::parse_goal_line("a -> a"));
  const auto p = shortest_proof(s, 3);
  ASSERT_TRUE(p.has_value());
  ASSERT_EQ(p->size(), 2u);
  EXPECT_EQ(env::to_string((*p)[0]), "intro");
  EXPECT_EQ(env::to_string((*p)[1]), "exact h1");
  EXPECT_FALSE(shortest_proof(s, 1).has_value());
  EXPECT_FALSE(shortest_proof(env::initial_state(env::parse_goal_line("a -> b")), 3));
}

TEST(FilterTheorem, Caps) {
  Rng rng(5);
  const Theorem ok = generate_theorem(rng, 2);
  EXPECT_TRUE(filter_theorem(ok));

  // Four tactics.
  Theorem long_proof;
  long_proof.name = "long";
  long_proof.initial_state = env::initial_state(env::parse_goal_line("a |- a & a & a & a"));
  long_proof.gt_proof = {env::parse_tactic("split"), env::parse_tactic("split"),
                         env::parse_tactic("split"), env::parse_tactic("exact h1")};
  EXPECT_FALSE(filter_theorem(long_proof));

  // Printed state far beyond 900 characters.
  std::string big = "a";
  for (int i = 0; i < 200; ++i) big = "(" + big + ") | b" + std::to_string(i);
  Theorem wide;
  wide.name = "wide";
  wide.initial_state = env::initial_state(env::parse_goal_line(big + " |- " + big));
  wide.gt_proof = {env::parse_tactic("exact h1")};
  ASSERT_GT(env::print_state(wide.initial_state).size(), 1200u);
  EXPECT_TRUE(env::replay(wide.initial_state, wide.gt_proof).is_proved());
  EXPECT_FALSE(filter_theorem(wide));

  Theorem broken = ok;
  broken.gt_proof.pop_back();
  EXPECT_FALSE(filter_theorem(broken));
}

TEST(Corpus, SizesBalanceAndSoundness) {
  const CorpusSplit& c = corpus7();
  ASSERT_EQ(c.train.size(), 1000u);
  ASSERT_EQ(c.valid.size(), 20u);
  std::array<int, 4> valid_len{};
  for (const Theorem& t : c.valid) ++valid_len[t.gt_proof.size()];
  EXPECT_EQ(valid_len[0], 0);
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) EXPECT_LE(std::abs(valid_len[a] - valid_len[b]), 1);

  std::set<std::string> names;
  std::set<std::uint64_t> prints;
  for (const auto* split : {&c.train, &c.valid}) {
    for (const Theorem& t : *split) {
      EXPECT_TRUE(env::replay(t.initial_state, t.gt_proof).is_proved()) << t.name;
      EXPECT_TRUE(filter_theorem(t)) << t.name;
      EXPECT_EQ(t.initial_state.goals.size(), 1u);
      names.insert(t.name);
      prints.insert(env::state_fingerprint(t.initial_state));
    }
  }
  EXPECT_EQ(names.size(), 1020u);
  // Distinct initial states never collide on the fingerprint.
  EXPECT_EQ(prints.size(), 1020u);
}

TEST(Corpus, DeterministicAndRoundTrips) {
  const CorpusSplit again = build_corpus(7);
  EXPECT_EQ(to_jsonl(again.train), to_jsonl(corpus7().train));
  EXPECT_EQ(corpus_hash(again), corpus_hash(corpus7()));
  EXPECT_NE(corpus_hash(build_corpus(8)), corpus_hash(corpus7()));

  const std::vector<Theorem> back = parse_jsonl(to_jsonl(corpus7().valid));
  ASSERT_EQ(back.size(), 20u);
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].name, corpus7().valid[i].name);
    EXPECT_EQ(back[i].initial_state, corpus7().valid[i].initial_state);
    EXPECT_EQ(back[i].gt_proof, corpus7().valid[i].gt_proof);
  }
}

}  // namespace
}  // namespace flowprover::data
