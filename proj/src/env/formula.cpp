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

#include "flowprover/env/formula.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include "flowprover/util/hash.hpp"

namespace flowprover::env {

struct Formula::Node {
  Connective kind;
  std::string name;
  Formula lhs;  // null node for atoms
  Formula rhs;
  int depth;
  std::size_t count;
  std::uint64_t hash;
};

bool is_valid_atom_name(std::string_view name) {
  if (name.empty() || !(name[0] >= 'a' && name[0] <= 'z')) return false;
  for (const char c : name) {
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return false;
  }
  return true;
}

Formula Formula::atom(std::string name) {
  if (!is_valid_atom_name(name)) {
    throw std::invalid_argument("invalid atom name '" + name + "'");
  }
  const std::uint64_t h = fnv1a64(name, mix64(0x41));
  return Formula(std::make_shared<const Node>(
      Node{Connective::Atom, std::move(name), Formula(nullptr), Formula(nullptr),
           0, 1, h}));
}

Formula Formula::binary(Connective c, Formula lhs, Formula rhs) {
  const std::uint64_t h = hash_combine(
      hash_combine(static_cast<std::uint64_t>(c) + 1, lhs.node_->hash),
      rhs.node_->hash);
  const int d = 1 + std::max(lhs.node_->depth, rhs.node_->depth);
  const std::size_t n = 1 + lhs.node_->count + rhs.node_->count;
  return Formula(std::make_shared<const Node>(
      Node{c, {}, std::move(lhs), std::move(rhs), d, n, h}));
}

Formula Formula::implies(Formula lhs, Formula rhs) {
  return binary(Connective::Implies, std::move(lhs), std::move(rhs));
}
Formula Formula::conj(Formula lhs, Formula rhs) {
  return binary(Connective::And, std::move(lhs), std::move(rhs));
}
Formula Formula::disj(Formula lhs, Formula rhs) {
  return binary(Connective::Or, std::move(lhs), std::move(rhs));
}

Connective Formula::kind() const noexcept { return node_->kind; }

const std::string& Formula::name() const {
  if (node_->kind != Connective::Atom) throw std::logic_error("not an atom");
  return node_->name;
}

const Formula& Formula::lhs() const {
  if (node_->kind == Connective::Atom) throw std::logic_error("atom has no lhs");
  return node_->lhs;
}

const Formula& Formula::rhs() const {
  if (node_->kind == Connective::Atom) throw std::logic_error("atom has no rhs");
  return node_->rhs;
}

int Formula::depth() const noexcept { return node_->depth; }
std::size_t Formula::node_count() const noexcept { return node_->count; }
std::uint64_t Formula::hash() const noexcept { return node_->hash; }

bool operator==(const Formula& a, const Formula& b) noexcept {
  const Formula::Node* x = a.node_.get();
  const Formula::Node* y = b.node_.get();
  if (x == y) return true;
  if (x->hash != y->hash || x->kind != y->kind || x->count != y->count) {
    return false;
  }
  if (x->kind == Connective::Atom) return x->name == y->name;
  return x->lhs == y->lhs && x->rhs == y->rhs;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Formula parse_all() {
    Formula f = parse_implication();
    skip_ws();
    if (pos_ != text_.size()) {
      throw SyntaxError("unexpected character '" + std::string(1, text_[pos_]) + "'",
                        pos_);
    }
    return f;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  Formula parse_implication() {
    Formula lhs = parse_disjunction();
    if (accept("->")) return Formula::implies(std::move(lhs), parse_implication());
    return lhs;
  }

  Formula parse_disjunction() {
    Formula f = parse_conjunction();
    while (accept("|")) f = Formula::disj(std::move(f), parse_conjunction());
    return f;
  }

  Formula parse_conjunction() {
    Formula f = parse_primary();
    while (accept("&")) f = Formula::conj(std::move(f), parse_primary());
    return f;
  }

  Formula parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
    if (text_[pos_] == '(') {
      ++pos_;
      Formula inner = parse_implication();
      if (!accept(")")) throw SyntaxError("expected ')'", pos_);
      return inner;
    }
    const std::size_t start = pos_;
    if (!(text_[pos_] >= 'a' && text_[pos_] <= 'z')) {
      throw SyntaxError("expected atom or '('", pos_);
    }
    while (pos_ < text_.size() &&
           ((text_[pos_] >= 'a' && text_[pos_] <= 'z') ||
            (text_[pos_] >= '0' && text_[pos_] <= '9'))) {
      ++pos_;
    }
    return Formula::atom(std::string(text_.substr(start, pos_ - start)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int precedence(Connective c) {
  switch (c) {
    case Connective::Implies: return 1;
    case Connective::Or: return 2;
    case Connective::And: return 3;
    case Connective::Atom: return 4;
  }
  return 4;
}

void print_into(const Formula& f, std::string& out) {
  if (f.is(Connective::Atom)) {
    out += f.name();
    return;
  }
  const int p = precedence(f.kind());
  const int lp = precedence(f.lhs().kind());
  const int rp = precedence(f.rhs().kind());
  // -> is right-associative; & and | are left-associative.
  const bool right_assoc = f.is(Connective::Implies);
  const bool paren_l = right_assoc ? lp <= p : lp < p;
  const bool paren_r = right_assoc ? rp < p : rp <= p;

  if (paren_l) out += '(';
  print_into(f.lhs(), out);
  if (paren_l) out += ')';
  switch (f.kind()) {
    case Connective::Implies: out += " -> "; break;
    case Connective::And: out += " & "; break;
    case Connective::Or: out += " | "; break;
    case Connective::Atom: break;
  }
  if (paren_r) out += '(';
  print_into(f.rhs(), out);
  if (paren_r) out += ')';
}

}  // namespace

Formula parse_formula(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (static_cast<unsigned char>(text[i]) > 0x7f) {
      throw SyntaxError("non-ASCII byte", i);
    }
  }
  return Parser(text).parse_all();
}

std::string print_formula(const Formula& f) {
  std::string out;
  print_into(f, out);
  return out;
}

}  // namespace flowprover::env
