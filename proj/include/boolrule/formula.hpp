// Copyright 2026 The boolrule Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BOOLRULE_FORMULA_HPP_
#define BOOLRULE_FORMULA_HPP_

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "boolrule/bits.hpp"
#include "json.hpp"

namespace boolrule {

enum class OpKind { And, Or, AtLeast, AtMost, Choose };

inline constexpr OpKind kAllOpKinds[] = {OpKind::And, OpKind::Or,
                                         OpKind::AtLeast, OpKind::AtMost,
                                         OpKind::Choose};

constexpr bool is_parameterized(OpKind kind) {
  return kind == OpKind::AtLeast || kind == OpKind::AtMost ||
         kind == OpKind::Choose;
}

std::string_view op_name(OpKind kind);
// Accepts "And", "or", "AtLeast", "at-least", ... Throws UsageError.
OpKind parse_op_kind(std::string_view name);

struct Literal {
  std::size_t feature = 0;
  bool negated = false;

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

class Node;

struct OperatorNode {
  OpKind kind = OpKind::And;
  int k = 0;  // only meaningful for parameterized kinds
  bool negated = false;
  std::vector<Node> children;
};

struct TrivialNode {
  bool value = false;
};

// One node of a formula tree. Literals and operators may carry a negation;
// there is no separate Not operator.
class Node {
 public:
  using Variant = std::variant<Literal, OperatorNode, TrivialNode>;

  Node(Literal l) : v_(l) {}                   // NOLINT
  Node(OperatorNode op) : v_(std::move(op)) {}  // NOLINT
  Node(TrivialNode t) : v_(t) {}               // NOLINT

  bool is_literal() const { return std::holds_alternative<Literal>(v_); }
  bool is_operator() const { return std::holds_alternative<OperatorNode>(v_); }
  bool is_trivial() const { return std::holds_alternative<TrivialNode>(v_); }

  const Literal& literal() const { return std::get<Literal>(v_); }
  Literal& literal() { return std::get<Literal>(v_); }
  const OperatorNode& op() const { return std::get<OperatorNode>(v_); }
  OperatorNode& op() { return std::get<OperatorNode>(v_); }
  const TrivialNode& trivial() const { return std::get<TrivialNode>(v_); }

  const Variant& variant() const { return v_; }

 private:
  Variant v_;
};

// Child-index path from the root; the empty path is the root itself.
using NodePath = std::vector<std::size_t>;

// Feature names used when printing/parsing. Empty means "f<index>".
using FeatureNames = std::vector<std::string>;

// A rule: an immutable-by-convention rooted tree. Moves build new formulas.
class Formula {
 public:
  explicit Formula(Node root) : root_(std::move(root)) {}

  static Formula literal(std::size_t feature, bool negated = false) {
    return Formula(Literal{feature, negated});
  }
  static Formula one() { return Formula(TrivialNode{true}); }
  static Formula zero() { return Formula(TrivialNode{false}); }
  static Formula op(OpKind kind, std::vector<Node> children, int k = 0,
                    bool negated = false);

  const Node& root() const { return root_; }

  const Node& at(const NodePath& path) const;
  // Copy of this formula with the node at `path` replaced.
  Formula replaced(const NodePath& path, Node replacement) const;

  // Preorder list of paths to every node.
  std::vector<NodePath> paths() const;

  // Structural equality; child order is ignored.
  friend bool operator==(const Formula& a, const Formula& b);

 private:
  Node root_;
};

std::size_t complexity(const Node& node);
inline std::size_t complexity(const Formula& f) { return complexity(f.root()); }
std::size_t depth(const Node& node);
inline std::size_t depth(const Formula& f) { return depth(f.root()); }

// One output bit per row of X. Throws DataError on an out-of-range feature.
BitVector evaluate(const Node& node, const BitMatrix& X);
inline BitVector evaluate(const Formula& f, const BitMatrix& X) {
  return evaluate(f.root(), X);
}

// Applies an operator to already-evaluated children.
BitVector apply_operator(OpKind kind, int k,
                         const std::vector<BitVector>& children,
                         std::size_t rows);

Formula negate(const Formula& f);
Node negate(Node n);

// Largest feature index referenced, if any.
std::optional<std::size_t> max_feature(const Node& node);

// Features used by the literal children of an operator node.
std::vector<std::size_t> literal_child_features(const OperatorNode& op);

// Invariant checks; returns a human readable list of violations (empty when
// the formula is feasible). `max_complexity` of nullopt means unbounded.
std::vector<std::string> validate(const Formula& f, std::size_t num_features,
                                  std::optional<std::size_t> max_complexity);

// Text form: Name | ~Name | Op[k](args...) | One() | Zero(). Children are
// printed in tree order.
std::string to_text(const Formula& f, const FeatureNames& names = {});
std::string to_text(const Node& n, const FeatureNames& names = {});
// Text with children sorted (literals by feature first, then operators), so
// formulas that differ only in child order print the same.
std::string canonical_form(const Formula& f);
// Throws ParseError (syntax, with position) or UsageError.
Formula parse(std::string_view text, const FeatureNames& names = {});

nlohmann::json to_json(const Formula& f, const FeatureNames& names = {});
Formula from_json(const nlohmann::json& j);

}  // namespace boolrule

#endif  // BOOLRULE_FORMULA_HPP_
