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

#include "boolrule/local_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "boolrule/error.hpp"

namespace boolrule {

void SolverConfig::check() const {
  if (num_starts < 1) throw UsageError("num_starts must be at least 1");
  if (num_iterations < 2) throw UsageError("num_iterations must be at least 2");
  if (!(t_low > 0.0 && t_high > t_low)) {
    throw UsageError("temperatures must satisfy t_high > t_low > 0");
  }
  if (max_complexity && *max_complexity < 3) {
    throw UsageError("max complexity must be at least 3");
  }
  if (lambda < 0.0) throw UsageError("lambda must be non-negative");
  if (workers < 1) throw UsageError("workers must be at least 1");
}

std::string_view move_name(MoveKind kind) {
  switch (kind) {
    case MoveKind::RemoveLiteral:
      return "remove_literal";
    case MoveKind::ExpandLiteral:
      return "expand_literal";
    case MoveKind::SwapLiteral:
      return "swap_literal";
    case MoveKind::RemoveOperator:
      return "remove_operator";
    case MoveKind::AddLiteral:
      return "add_literal";
    case MoveKind::SwapOperator:
      return "swap_operator";
    case MoveKind::SpliceSubtree:
      return "splice_subtree";
  }
  return "?";
}

namespace {

int random_k(OpKind kind, std::size_t children, Rng& rng) {
  if (!is_parameterized(kind)) return 0;
  return rng.between(0, static_cast<int>(children));
}

OpKind random_kind(Rng& rng) {
  return kAllOpKinds[rng.index(std::size(kAllOpKinds))];
}

// Features not already used by a literal child of `op`.
std::vector<std::size_t> free_features(const OperatorNode& op,
                                       std::size_t num_features,
                                       std::optional<std::size_t> keep = {}) {
  std::vector<bool> used(num_features, false);
  for (std::size_t f : literal_child_features(op)) {
    if (f < num_features && f != keep) used[f] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < num_features; ++f) {
    if (!used[f]) out.push_back(f);
  }
  return out;
}

NodePath parent_of(const NodePath& p) { return {p.begin(), p.end() - 1}; }

void clamp_k(OperatorNode& op) {
  if (is_parameterized(op.kind)) {
    op.k = std::min(op.k, static_cast<int>(op.children.size()));
  }
}

constexpr MoveKind kLiteralMoves[] = {MoveKind::RemoveLiteral,
                                      MoveKind::ExpandLiteral,
                                      MoveKind::SwapLiteral};
constexpr MoveKind kOperatorMoves[] = {MoveKind::RemoveOperator,
                                       MoveKind::AddLiteral,
                                       MoveKind::SwapOperator};

}  // namespace

Formula generate_initial_rule(std::size_t num_features,
                              std::optional<std::size_t> max_complexity,
                              Rng& rng) {
  if (num_features < 2) throw DataError("need at least two features");
  std::size_t upper = std::min<std::size_t>(num_features, 10);
  if (max_complexity) upper = std::min(*max_complexity - 1, num_features);
  const auto count = static_cast<std::size_t>(rng.between(2, static_cast<int>(upper)));

  std::vector<std::size_t> features(num_features);
  for (std::size_t i = 0; i < num_features; ++i) features[i] = i;
  // Partial Fisher-Yates: the first `count` entries become the sample.
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(features[i], features[i + rng.index(num_features - i)]);
  }
  std::vector<Node> children;
  for (std::size_t i = 0; i < count; ++i) {
    children.emplace_back(Literal{features[i], rng.coin()});
  }
  const OpKind kind = random_kind(rng);
  const int k = random_k(kind, count, rng);
  return Formula::op(kind, std::move(children), k);
}

std::optional<Move> LocalMoveProposer::draw(const Formula& rule,
                                            const NodePath& target,
                                            MoveKind kind, Rng& rng) const {
  const Node& node = rule.at(target);
  const bool has_room =
      !max_complexity_ || complexity(rule) + 1 <= *max_complexity_;
  const OperatorNode* parent =
      target.empty() ? nullptr : &rule.at(parent_of(target)).op();
  Move move;
  move.kind = kind;
  move.target = target;

  switch (kind) {
    case MoveKind::RemoveLiteral:
    case MoveKind::RemoveOperator:
      if (parent == nullptr || parent->children.size() < 3) return std::nullopt;
      return move;

    case MoveKind::ExpandLiteral: {
      // Two children of the parent fold into one, so the parent needs three.
      if (parent == nullptr || parent->children.size() < 3 || !has_room) {
        return std::nullopt;
      }
      std::vector<std::size_t> siblings;
      for (std::size_t i = 0; i < parent->children.size(); ++i) {
        if (i != target.back() && parent->children[i].is_literal()) {
          siblings.push_back(i);
        }
      }
      if (siblings.empty()) return std::nullopt;
      move.sibling = siblings[rng.index(siblings.size())];
      move.op_kind = random_kind(rng);
      move.k = random_k(move.op_kind, 2, rng);
      return move;
    }

    case MoveKind::SwapLiteral: {
      const Literal current = node.literal();
      std::vector<std::size_t> available;
      if (parent != nullptr) {
        available = free_features(*parent, num_features_, current.feature);
      } else {
        for (std::size_t f = 0; f < num_features_; ++f) available.push_back(f);
      }
      std::erase(available, current.feature);
      // Option 0 is the negation; the rest are (feature, polarity) pairs.
      const std::size_t pick = rng.index(1 + 2 * available.size());
      if (pick == 0) {
        move.literal = {current.feature, !current.negated};
      } else {
        move.literal = {available[(pick - 1) / 2], (pick - 1) % 2 == 1};
      }
      return move;
    }

    case MoveKind::AddLiteral: {
      if (!has_room) return std::nullopt;
      const auto available = free_features(node.op(), num_features_);
      if (available.empty()) return std::nullopt;
      move.literal = {available[rng.index(available.size())], rng.coin()};
      return move;
    }

    case MoveKind::SwapOperator: {
      const auto& op = node.op();
      const int c = static_cast<int>(op.children.size());
      std::vector<std::pair<OpKind, int>> options;
      for (OpKind kind2 : kAllOpKinds) {
        if (!is_parameterized(kind2)) {
          if (kind2 != op.kind) options.emplace_back(kind2, 0);
          continue;
        }
        for (int k = 0; k <= c; ++k) {
          if (kind2 != op.kind || k != op.k) options.emplace_back(kind2, k);
        }
      }
      const auto& [new_kind, new_k] = options[rng.index(options.size())];
      move.op_kind = new_kind;
      move.k = new_k;
      return move;
    }

    case MoveKind::SpliceSubtree:
      return std::nullopt;
  }
  return std::nullopt;
}

Move LocalMoveProposer::propose(const Formula& rule, Rng& rng) {
  const std::vector<NodePath> paths = rule.paths();
  while (true) {
    const NodePath& target = paths[rng.index(paths.size())];
    const Node& node = rule.at(target);
    MoveKind kind;
    if (node.is_literal()) {
      kind = kLiteralMoves[literal_counter_++ % 3];
    } else if (node.is_operator()) {
      kind = kOperatorMoves[operator_counter_++ % 3];
    } else {
      continue;
    }
    if (auto move = draw(rule, target, kind, rng)) return *std::move(move);
  }
}

Formula apply_move(const Formula& rule, const Move& move) {
  const Node& node = rule.at(move.target);
  const auto need_parent = [&]() -> OperatorNode {
    if (move.target.empty()) throw UsageError("move needs a parent operator");
    return rule.at(parent_of(move.target)).op();
  };

  switch (move.kind) {
    case MoveKind::RemoveLiteral:
    case MoveKind::RemoveOperator: {
      if ((move.kind == MoveKind::RemoveLiteral) != node.is_literal()) {
        throw UsageError("remove move does not match the target node type");
      }
      OperatorNode parent = need_parent();
      if (parent.children.size() < 3) {
        throw UsageError("removal would leave an operator with one child");
      }
      parent.children.erase(parent.children.begin() +
                            static_cast<std::ptrdiff_t>(move.target.back()));
      clamp_k(parent);
      return rule.replaced(parent_of(move.target), std::move(parent));
    }

    case MoveKind::ExpandLiteral: {
      OperatorNode parent = need_parent();
      const std::size_t t = move.target.back();
      if (!node.is_literal() || move.sibling == t ||
          move.sibling >= parent.children.size() ||
          !parent.children[move.sibling].is_literal() ||
          parent.children.size() < 3) {
        throw UsageError("invalid expand-literal move");
      }
      OperatorNode created;
      created.kind = move.op_kind;
      created.k = is_parameterized(move.op_kind) ? move.k : 0;
      created.children = {parent.children[t], parent.children[move.sibling]};
      parent.children[t] = Node(std::move(created));
      parent.children.erase(parent.children.begin() +
                            static_cast<std::ptrdiff_t>(move.sibling));
      clamp_k(parent);
      return rule.replaced(parent_of(move.target), std::move(parent));
    }

    case MoveKind::SwapLiteral:
      if (!node.is_literal()) throw UsageError("swap-literal target is not a literal");
      return rule.replaced(move.target, move.literal);

    case MoveKind::AddLiteral: {
      if (!node.is_operator()) throw UsageError("add-literal target is not an operator");
      OperatorNode op = node.op();
      op.children.emplace_back(move.literal);
      return rule.replaced(move.target, std::move(op));
    }

    case MoveKind::SwapOperator: {
      if (!node.is_operator()) throw UsageError("swap-operator target is not an operator");
      OperatorNode op = node.op();
      op.kind = move.op_kind;
      op.k = is_parameterized(move.op_kind) ? move.k : 0;
      return rule.replaced(move.target, std::move(op));
    }

    case MoveKind::SpliceSubtree:
      if (!move.subtree) throw UsageError("splice move carries no subtree");
      return rule.replaced(move.target, *move.subtree);
  }
  throw UsageError("unknown move kind");
}

bool metropolis_accept(double dE, double T, Rng& rng) {
  return dE >= 0.0 || rng.uniform() < std::exp(dE / T);
}

double temperature(int iteration, const SolverConfig& config) {
  const double frac = static_cast<double>(iteration) /
                      static_cast<double>(config.num_iterations - 1);
  return config.t_high * std::pow(config.t_low / config.t_high, frac);
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "iteration,start,temperature,objective,proposed,accepted,kind,"
         "subproblem_size,solve_seconds\n";
  char buf[256];
  for (const TraceRow& r : trace.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.6e,%.6f,%.6f,%d,%s,%zu,%.6f\n",
                  r.iteration, r.start, r.temperature, r.objective, r.proposed,
                  r.accepted ? 1 : 0, r.nonlocal ? "nonlocal" : "local",
                  r.subproblem_size, r.solve_seconds);
    out << buf;
  }
}

namespace {

struct StartResult {
  Formula best = Formula::zero();
  double best_objective = 0.0;
  std::vector<TraceRow> rows;
};

StartResult run_start(const BitMatrix& X, const BitVector& y,
                      const SolverConfig& config, const NonLocalHook* hook,
                      int start) {
  Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(start)));
  LocalMoveProposer proposer(X.cols(), config.max_complexity);
  const auto evaluate_objective = [&](const Formula& f) {
    return objective(score(f, X, y, config.metric), complexity(f), config.lambda);
  };

  Formula current = generate_initial_rule(X.cols(), config.max_complexity, rng);
  double current_objective = evaluate_objective(current);
  StartResult result{current, current_objective, {}};
  result.rows.reserve(static_cast<std::size_t>(config.num_iterations));
  int stagnant = 0;

  for (int it = 0; it < config.num_iterations; ++it) {
    TraceRow row;
    row.start = start;
    row.iteration = it;
    row.temperature = temperature(it, config);

    std::optional<Move> move;
    if (hook != nullptr && it > hook->burn_in && stagnant >= hook->patience) {
      NonLocalHook::Proposal p = hook->propose(current, rng);
      row.subproblem_size = p.subproblem_size;
      row.solve_seconds = p.seconds;
      if (p.move) {
        move = std::move(p.move);
        row.nonlocal = true;
      }
    }
    if (!move) move = proposer.propose(current, rng);

    Formula candidate = apply_move(current, *move);
    const double proposed = evaluate_objective(candidate);
    row.proposed = proposed;
    row.accepted =
        metropolis_accept(proposed - current_objective, row.temperature, rng);
    bool improved = false;
    if (row.accepted) {
      current = std::move(candidate);
      current_objective = proposed;
      if (current_objective > result.best_objective) {
        result.best_objective = current_objective;
        result.best = current;
        improved = true;
      }
    }
    stagnant = improved ? 0 : stagnant + 1;
    row.objective = current_objective;
    row.best = result.best_objective;
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace

SolveResult anneal_rules(const BitMatrix& X, const BitVector& y,
                         const SolverConfig& config, const NonLocalHook* hook) {
  config.check();
  if (X.rows() == 0) throw DataError("cannot train on an empty dataset");
  if (X.rows() != y.size()) {
    throw DataError("matrix has " + std::to_string(X.rows()) + " rows but " +
                    std::to_string(y.size()) + " labels");
  }

  std::vector<StartResult> starts(static_cast<std::size_t>(config.num_starts));
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int s = next++; s < config.num_starts; s = next++) {
      starts[static_cast<std::size_t>(s)] = run_start(X, y, config, hook, s);
    }
  };
  const int threads = std::min(config.workers, config.num_starts);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SolveResult out;
  bool have = false;
  for (auto& s : starts) {
    if (!have || s.best_objective > out.objective) {
      out.best = s.best;
      out.objective = s.best_objective;
      have = true;
    }
    out.trace.start_best.push_back(s.best_objective);
    out.trace.start_best_rule.push_back(to_text(s.best));
    out.trace.rows.insert(out.trace.rows.end(), s.rows.begin(), s.rows.end());
  }
  return out;
}

}  // namespace boolrule
