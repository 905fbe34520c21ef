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

// Text and JSON serialization of formulas.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <tuple>
#include <unordered_map>

#include "boolrule/error.hpp"
#include "boolrule/formula.hpp"

namespace boolrule {

namespace {

std::string feature_name(std::size_t feature, const FeatureNames& names) {
  if (names.empty()) return "f" + std::to_string(feature);
  if (feature >= names.size()) {
    throw DataError("feature index " + std::to_string(feature) +
                    " has no name (only " + std::to_string(names.size()) +
                    " names)");
  }
  return names[feature];
}

using SortKey = std::tuple<int, std::size_t, bool, std::string>;

std::string canonical_text(const Node& n);

SortKey sort_key(const Node& n) {
  if (n.is_literal()) {
    return {0, n.literal().feature, n.literal().negated, std::string()};
  }
  return {1, 0, false, canonical_text(n)};
}

std::vector<const Node*> sorted_children(const OperatorNode& op) {
  std::vector<std::pair<SortKey, const Node*>> keyed;
  keyed.reserve(op.children.size());
  for (const Node& c : op.children) keyed.emplace_back(sort_key(c), &c);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<const Node*> out;
  out.reserve(keyed.size());
  for (auto& [key, ptr] : keyed) out.push_back(ptr);
  return out;
}

std::string render(const Node& n, const FeatureNames& names, bool canonical) {
  if (n.is_literal()) {
    return (n.literal().negated ? "~" : "") +
           feature_name(n.literal().feature, names);
  }
  if (n.is_trivial()) return n.trivial().value ? "One()" : "Zero()";
  const auto& op = n.op();
  std::string out = op.negated ? "~" : "";
  out += op_name(op.kind);
  if (is_parameterized(op.kind)) out += std::to_string(op.k);
  out += '(';
  bool first = true;
  std::vector<const Node*> children;
  if (canonical) {
    children = sorted_children(op);
  } else {
    for (const Node& c : op.children) children.push_back(&c);
  }
  for (const Node* c : children) {
    if (!first) out += ',';
    first = false;
    out += render(*c, names, canonical);
  }
  out += ')';
  return out;
}

std::string canonical_text(const Node& n) { return render(n, {}, true); }

class Parser {
 public:
  Parser(std::string_view text, const FeatureNames& names)
      : text_(text), names_(names) {
    for (std::size_t i = 0; i < names.size(); ++i) index_.emplace(names[i], i);
  }

  Formula parse() {
    Node root = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return Formula(std::move(root));
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  // Reads up to one of ",()" and trims surrounding whitespace.
  std::string_view token() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    std::size_t end = pos_;
    while (end > start &&
           std::isspace(static_cast<unsigned char>(text_[end - 1]))) {
      --end;
    }
    return text_.substr(start, end - start);
  }

  Node expr() {
    skip_space();
    bool negated = false;
    if (pos_ < text_.size() && text_[pos_] == '~') {
      negated = true;
      ++pos_;
    }
    const std::size_t token_start = pos_;
    const std::string_view tok = token();
    if (tok.empty()) fail("expected a literal or operator");
    if (pos_ < text_.size() && text_[pos_] == '(') {
      return call(tok, negated, token_start);
    }
    return Literal{resolve(tok, token_start), negated};
  }

  Node call(std::string_view head, bool negated, std::size_t head_pos) {
    ++pos_;  // '('
    if (head == "One" || head == "Zero") {
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != ')') {
        fail("constant rule takes no arguments");
      }
      ++pos_;
      return TrivialNode{(head == "One") != negated};
    }
    std::size_t digits = head.size();
    while (digits > 0 && std::isdigit(static_cast<unsigned char>(head[digits - 1]))) {
      --digits;
    }
    const std::string_view name = head.substr(0, digits);
    const std::string_view param = head.substr(digits);
    OpKind kind;
    if (name == "And") {
      kind = OpKind::And;
    } else if (name == "Or") {
      kind = OpKind::Or;
    } else if (name == "AtLeast") {
      kind = OpKind::AtLeast;
    } else if (name == "AtMost") {
      kind = OpKind::AtMost;
    } else if (name == "Choose") {
      kind = OpKind::Choose;
    } else {
      pos_ = head_pos;
      fail("unknown operator '" + std::string(head) + "'");
    }
    int k = 0;
    if (is_parameterized(kind)) {
      if (param.empty()) {
        pos_ = head_pos;
        fail("operator " + std::string(name) + " requires an integer parameter");
      }
      std::from_chars(param.data(), param.data() + param.size(), k);
    } else if (!param.empty()) {
      pos_ = head_pos;
      fail("operator " + std::string(name) + " takes no parameter");
    }

    OperatorNode op;
    op.kind = kind;
    op.k = k;
    op.negated = negated;
    while (true) {
      op.children.push_back(expr());
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated argument list");
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      fail("expected ',' or ')'");
    }
    if (op.children.size() < 2) {
      pos_ = head_pos;
      fail("operator " + std::string(name) + " needs at least two arguments");
    }
    if (is_parameterized(kind) &&
        static_cast<std::size_t>(k) > op.children.size()) {
      throw UsageError("parameter out of range: " + std::string(head) +
                       " has only " + std::to_string(op.children.size()) +
                       " arguments");
    }
    std::set<std::size_t> seen;
    for (std::size_t f : literal_child_features(op)) {
      if (!seen.insert(f).second) {
        pos_ = head_pos;
        fail("feature repeated under one operator");
      }
    }
    return Node(std::move(op));
  }

  std::size_t resolve(std::string_view tok, std::size_t at) {
    if (!names_.empty()) {
      auto it = index_.find(std::string(tok));
      if (it == index_.end()) {
        pos_ = at;
        fail("unknown feature name '" + std::string(tok) + "'");
      }
      return it->second;
    }
    std::size_t value = 0;
    if (tok.size() < 2 || tok[0] != 'f') {
      pos_ = at;
      fail("expected feature of the form f<index>, got '" + std::string(tok) + "'");
    }
    auto [ptr, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      pos_ = at;
      fail("expected feature of the form f<index>, got '" + std::string(tok) + "'");
    }
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  const FeatureNames& names_;
  std::unordered_map<std::string, std::size_t> index_;
};

nlohmann::json node_json(const Node& n, const FeatureNames& names) {
  nlohmann::json j;
  if (n.is_literal()) {
    j["type"] = "literal";
    j["feature"] = n.literal().feature;
    j["name"] = feature_name(n.literal().feature, names);
    j["negated"] = n.literal().negated;
  } else if (n.is_trivial()) {
    j["type"] = "trivial";
    j["value"] = n.trivial().value ? 1 : 0;
  } else {
    const auto& op = n.op();
    j["type"] = "operator";
    j["kind"] = std::string(op_name(op.kind));
    if (is_parameterized(op.kind)) j["k"] = op.k;
    j["negated"] = op.negated;
    auto children = nlohmann::json::array();
    for (const Node& c : op.children) children.push_back(node_json(c, names));
    j["children"] = std::move(children);
  }
  return j;
}

Node node_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "literal") {
    return Literal{j.at("feature").get<std::size_t>(),
                   j.value("negated", false)};
  }
  if (type == "trivial") return TrivialNode{j.at("value").get<int>() != 0};
  if (type != "operator") throw DataError("unknown node type '" + type + "'");
  OperatorNode op;
  op.kind = parse_op_kind(j.at("kind").get<std::string>());
  op.k = j.value("k", 0);
  op.negated = j.value("negated", false);
  for (const auto& c : j.at("children")) op.children.push_back(node_from_json(c));
  return Node(std::move(op));
}

}  // namespace

std::string to_text(const Node& n, const FeatureNames& names) {
  return render(n, names, false);
}

std::string canonical_form(const Formula& f) { return render(f.root(), {}, true); }

std::string to_text(const Formula& f, const FeatureNames& names) {
  return render(f.root(), names, false);
}

Formula parse(std::string_view text, const FeatureNames& names) {
  return Parser(text, names).parse();
}

nlohmann::json to_json(const Formula& f, const FeatureNames& names) {
  return node_json(f.root(), names);
}

Formula from_json(const nlohmann::json& j) {
  try {
    return Formula(node_from_json(j));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed formula JSON: ") + e.what());
  }
}

}  // namespace boolrule
