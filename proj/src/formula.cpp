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

#include "boolrule/formula.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "boolrule/error.hpp"

namespace boolrule {

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::And:
      return "And";
    case OpKind::Or:
      return "Or";
    case OpKind::AtLeast:
      return "AtLeast";
    case OpKind::AtMost:
      return "AtMost";
    case OpKind::Choose:
      return "Choose";
  }
  return "?";
}

OpKind parse_op_kind(std::string_view name) {
  std::string lowered;
  for (char c : name) {
    if (c == '-' || c == '_') continue;
    lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (OpKind kind : kAllOpKinds) {
    std::string candidate;
    for (char c : op_name(kind)) {
      candidate.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (candidate == lowered) return kind;
  }
  throw UsageError("unknown operator '" + std::string(name) + "'");
}

Formula Formula::op(OpKind kind, std::vector<Node> children, int k,
                    bool negated) {
  OperatorNode node;
  node.kind = kind;
  node.k = is_parameterized(kind) ? k : 0;
  node.negated = negated;
  node.children = std::move(children);
  return Formula(Node(std::move(node)));
}

const Node& Formula::at(const NodePath& path) const {
  const Node* cur = &root_;
  for (std::size_t idx : path) {
    if (!cur->is_operator() || idx >= cur->op().children.size()) {
      throw UsageError("node path does not exist in formula");
    }
    cur = &cur->op().children[idx];
  }
  return *cur;
}

Formula Formula::replaced(const NodePath& path, Node replacement) const {
  Formula out = *this;
  Node* cur = &out.root_;
  for (std::size_t idx : path) {
    if (!cur->is_operator() || idx >= cur->op().children.size()) {
      throw UsageError("node path does not exist in formula");
    }
    cur = &cur->op().children[idx];
  }
  *cur = std::move(replacement);
  return out;
}

namespace {

void collect_paths(const Node& node, NodePath& prefix,
                   std::vector<NodePath>& out) {
  out.push_back(prefix);
  if (!node.is_operator()) return;
  const auto& children = node.op().children;
  for (std::size_t i = 0; i < children.size(); ++i) {
    prefix.push_back(i);
    collect_paths(children[i], prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<NodePath> Formula::paths() const {
  std::vector<NodePath> out;
  NodePath prefix;
  collect_paths(root_, prefix, out);
  return out;
}

std::size_t complexity(const Node& node) {
  if (!node.is_operator()) return 1;
  std::size_t total = 1;
  for (const Node& c : node.op().children) total += complexity(c);
  return total;
}

std::size_t depth(const Node& node) {
  if (!node.is_operator()) return 0;
  std::size_t deepest = 0;
  for (const Node& c : node.op().children) deepest = std::max(deepest, depth(c));
  return deepest + 1;
}

BitVector apply_operator(OpKind kind, int k,
                         const std::vector<BitVector>& children,
                         std::size_t rows) {
  switch (kind) {
    case OpKind::And: {
      BitVector out(rows, true);
      for (const auto& c : children) out &= c;
      return out;
    }
    case OpKind::Or: {
      BitVector out(rows);
      for (const auto& c : children) out |= c;
      return out;
    }
    case OpKind::AtLeast:
    case OpKind::AtMost:
    case OpKind::Choose: {
      RowCounter counter(rows, std::max<std::size_t>(children.size(), 1));
      for (const auto& c : children) counter.add(c);
      const auto kk = static_cast<std::size_t>(std::max(k, 0));
      if (kind == OpKind::AtMost) {
        // count <= k  <=>  !(count >= k + 1)
        BitVector ge, eq;
        counter.compare(kk + 1, ge, eq);
        return ~ge;
      }
      BitVector ge, eq;
      counter.compare(kk, ge, eq);
      return kind == OpKind::AtLeast ? ge : eq;
    }
  }
  return BitVector(rows);
}

BitVector evaluate(const Node& node, const BitMatrix& X) {
  return std::visit(
      [&](const auto& n) -> BitVector {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Literal>) {
          if (n.feature >= X.cols()) {
            throw DataError("feature index " + std::to_string(n.feature) +
                            " out of range for matrix with " +
                            std::to_string(X.cols()) + " columns");
          }
          BitVector out = X.column(n.feature);
          if (n.negated) out.flip();
          return out;
        } else if constexpr (std::is_same_v<T, TrivialNode>) {
          return BitVector(X.rows(), n.value);
        } else {
          std::vector<BitVector> results;
          results.reserve(n.children.size());
          for (const Node& c : n.children) results.push_back(evaluate(c, X));
          BitVector out = apply_operator(n.kind, n.k, results, X.rows());
          if (n.negated) out.flip();
          return out;
        }
      },
      node.variant());
}

Node negate(Node n) {
  if (n.is_literal()) {
    n.literal().negated = !n.literal().negated;
  } else if (n.is_operator()) {
    n.op().negated = !n.op().negated;
  } else {
    n = TrivialNode{!n.trivial().value};
  }
  return n;
}

Formula negate(const Formula& f) { return Formula(negate(f.root())); }

std::optional<std::size_t> max_feature(const Node& node) {
  if (node.is_literal()) return node.literal().feature;
  if (!node.is_operator()) return std::nullopt;
  std::optional<std::size_t> best;
  for (const Node& c : node.op().children) {
    auto m = max_feature(c);
    if (m && (!best || *m > *best)) best = m;
  }
  return best;
}

std::vector<std::size_t> literal_child_features(const OperatorNode& op) {
  std::vector<std::size_t> out;
  for (const Node& c : op.children) {
    if (c.is_literal()) out.push_back(c.literal().feature);
  }
  return out;
}

namespace {

void validate_node(const Node& node, std::size_t num_features,
                   const std::string& where, std::vector<std::string>& out) {
  if (node.is_literal()) {
    if (node.literal().feature >= num_features) {
      out.push_back(where + ": feature index " +
                    std::to_string(node.literal().feature) + " out of range");
    }
    return;
  }
  if (!node.is_operator()) return;
  const auto& op = node.op();
  if (op.children.size() < 2) {
    out.push_back(where + ": operator has fewer than two children");
  }
  if (is_parameterized(op.kind) &&
      (op.k < 0 || static_cast<std::size_t>(op.k) > op.children.size())) {
    out.push_back(where + ": parameter " + std::to_string(op.k) +
                  " outside [0, " + std::to_string(op.children.size()) + "]");
  }
  std::set<std::size_t> seen;
  for (std::size_t f : literal_child_features(op)) {
    if (!seen.insert(f).second) {
      out.push_back(where + ": feature " + std::to_string(f) +
                    " appears twice under one operator");
    }
  }
  for (std::size_t i = 0; i < op.children.size(); ++i) {
    validate_node(op.children[i], num_features, where + "/" + std::to_string(i),
                  out);
  }
}

}  // namespace

std::vector<std::string> validate(const Formula& f, std::size_t num_features,
                                  std::optional<std::size_t> max_complexity) {
  std::vector<std::string> out;
  validate_node(f.root(), num_features, "root", out);
  const std::size_t c = complexity(f);
  if (max_complexity && c > *max_complexity) {
    out.push_back("complexity " + std::to_string(c) + " exceeds limit " +
                  std::to_string(*max_complexity));
  }
  return out;
}

bool operator==(const Formula& a, const Formula& b) {
  return canonical_form(a) == canonical_form(b);
}

}  // namespace boolrule
