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
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flowprover::env {

enum class Connective : std::uint8_t { Atom, Implies, And, Or };

// Malformed formula, goal or tactic text. `offset` is the byte offset of the
// first offending character.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

bool is_valid_atom_name(std::string_view name);

// Immutable propositional formula. Copies share structure; equality is
// syntactic.
class Formula {
 public:
  static Formula atom(std::string name);
  static Formula implies(Formula lhs, Formula rhs);
  static Formula conj(Formula lhs, Formula rhs);
  static Formula disj(Formula lhs, Formula rhs);

  Connective kind() const noexcept;
  bool is(Connective c) const noexcept { return kind() == c; }

  // Atom only.
  const std::string& name() const;
  // Binary connectives only.
  const Formula& lhs() const;
  const Formula& rhs() const;

  // Atoms have depth 0.
  int depth() const noexcept;
  std::size_t node_count() const noexcept;
  // Structural hash; equal formulas hash equally.
  std::uint64_t hash() const noexcept;

  friend bool operator==(const Formula& a, const Formula& b) noexcept;
  friend bool operator!=(const Formula& a, const Formula& b) noexcept {
    return !(a == b);
  }

 private:
  struct Node;
  friend struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula binary(Connective c, Formula lhs, Formula rhs);

  std::shared_ptr<const Node> node_;
};

// `&` binds tighter than `|`, which binds tighter than `->`. `->` is
// right-associative, `&` and `|` left-associative.
Formula parse_formula(std::string_view text);

// Minimal-parenthesis canonical rendering; parse_formula inverts it exactly.
std::string print_formula(const Formula& f);

}  // namespace flowprover::env
