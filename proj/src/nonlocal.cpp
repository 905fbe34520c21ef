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

#include "boolrule/nonlocal.hpp"

#include <algorithm>
#include <chrono>

#include "boolrule/error.hpp"

namespace boolrule {

void NonLocalConfig::check() const {
  if (patience < 1) throw UsageError("patience must be at least 1");
  if (max_samples < 1) throw UsageError("max_samples must be at least 1");
  if (operators.empty()) throw UsageError("non-local operator set is empty");
  if (burn_in && *burn_in < 0) throw UsageError("burn-in must be non-negative");
}

EffectiveSubproblem effective_subproblem(const Formula& rule, const NodePath& target,
                                         const BitMatrix& X, const BitVector& y,
                                         std::size_t max_samples, Rng& rng) {
  const BitVector when0 = evaluate(rule.replaced(target, TrivialNode{false}), X);
  const BitVector when1 = evaluate(rule.replaced(target, TrivialNode{true}), X);
  const BitVector retained = when0 ^ when1;
  // Where the two differ, R follows T, so T must equal y exactly when R(T=1)
  // does.
  const BitVector wanted = ~(when1 ^ y);

  EffectiveSubproblem sub;
  sub.rows = retained.ones();
  sub.predetermined = X.rows() - sub.rows.size();
  if (sub.rows.size() > max_samples) {
    rng.shuffle(sub.rows);
    sub.rows.resize(max_samples);
    std::sort(sub.rows.begin(), sub.rows.end());
  }
  sub.X = X.select_rows(sub.rows);
  sub.y = wanted.select(sub.rows);
  return sub;
}

SubtreeBudget subtree_budget(const Formula& rule, const NodePath& target,
                             std::size_t max_complexity) {
  const long outside = static_cast<long>(complexity(rule)) -
                       static_cast<long>(complexity(rule.at(target)));
  const long budget = static_cast<long>(max_complexity) - outside;
  SubtreeBudget out;
  out.min_literals = target.empty() ? 2 : 1;
  out.proposable = budget >= static_cast<long>(out.min_literals) + 1;
  out.max_literals = budget > 1 ? static_cast<std::size_t>(budget - 1) : 0;
  return out;
}

NonLocalHook::Proposal propose_non_local_move(const Formula& rule, const BitMatrix& X,
                                              const BitVector& y,
                                              const SolverConfig& solver,
                                              const NonLocalConfig& config, Rng& rng,
                                              const NonLocalObserver& observer) {
  NonLocalHook::Proposal proposal;
  if (!solver.max_complexity) {
    throw UsageError("non-local moves need a maximum complexity");
  }
  const auto began = std::chrono::steady_clock::now();
  const auto finish = [&] {
    const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - began;
    proposal.seconds = spent.count();
    return proposal;
  };

  const std::vector<NodePath> paths = rule.paths();
  NonLocalRecord record;
  record.target = paths[rng.index(paths.size())];
  record.budget = subtree_budget(rule, record.target, *solver.max_complexity);
  if (!record.budget.proposable) return finish();
  record.kind = config.operators[rng.index(config.operators.size())];

  record.subproblem =
      effective_subproblem(rule, record.target, X, y, config.max_samples, rng);
  const EffectiveSubproblem& sub = record.subproblem;
  proposal.subproblem_size = sub.rows.size();
  if (sub.rows.empty()) return finish();

  for (std::size_t c = 0; c < sub.X.cols(); ++c) {
    const std::size_t ones = sub.X.column(c).count();
    if (ones != 0 && ones != sub.X.rows()) record.candidates.push_back(c);
  }
  if (record.candidates.size() < record.budget.min_literals) return finish();
  const BitMatrix cand_x = sub.X.select_cols(record.candidates);

  const std::size_t positives = sub.y.count();
  DepthOneOptions& opt = record.options;
  opt.kind = record.kind;
  opt.max_literals = std::min(record.budget.max_literals, record.candidates.size());
  opt.min_literals = record.budget.min_literals;
  opt.lambda = solver.lambda * static_cast<double>(sub.rows.size());
  opt.weights = positives == 0 || positives == sub.y.size() ? ClassWeights{1.0, 1.0}
                                                            : class_weights(sub.y);
  opt.exclude_constant = true;
  opt.max_evaluations = config.oracle_cap;

  record.used_oracle = config.backend == DepthOneBackend::Oracle &&
                       oracle_evaluations(cand_x.cols(), opt) <= config.oracle_cap;
  if (record.used_oracle) {
    record.solution = brute_force_depth_one(cand_x, sub.y, opt);
  } else {
    if (positives == 0 || positives == sub.y.size()) return finish();
    QuboBackendOptions qubo = config.qubo;
    qubo.anneal.seed = rng.next();
    qubo.anneal.timeout_seconds = config.timeout_seconds;
    record.solution = solve_depth_one_qubo(cand_x, sub.y, opt, qubo);
  }
  if (observer) observer(record);
  if (!record.solution.feasible || record.solution.conflict) return finish();

  DepthOneSolution mapped = record.solution;
  for (auto& lit : mapped.literals) lit.feature = record.candidates[lit.feature];
  Node subtree = mapped.formula().root();

  // A lone literal must not repeat a feature its new siblings already use.
  if (subtree.is_literal() && !record.target.empty()) {
    const NodePath parent(record.target.begin(), record.target.end() - 1);
    const auto& siblings = rule.at(parent).op().children;
    for (std::size_t i = 0; i < siblings.size(); ++i) {
      if (i != record.target.back() && siblings[i].is_literal() &&
          siblings[i].literal().feature == subtree.literal().feature) {
        return finish();
      }
    }
  }
  Move move;
  move.kind = MoveKind::SpliceSubtree;
  move.target = record.target;
  move.subtree = std::move(subtree);
  proposal.move = std::move(move);
  return finish();
}

SolveResult solve_with_nonlocal(const BitMatrix& X, const BitVector& y,
                                const SolverConfig& solver,
                                const NonLocalConfig& config,
                                const NonLocalObserver& observer) {
  solver.check();
  config.check();
  if (!solver.max_complexity) {
    throw UsageError("the non-local solver needs a maximum complexity");
  }
  NonLocalHook hook;
  hook.burn_in = config.burn_in.value_or(solver.num_iterations / 3);
  hook.patience = config.patience;
  hook.propose = [&](const Formula& rule, Rng& rng) {
    return propose_non_local_move(rule, X, y, solver, config, rng, observer);
  };
  return anneal_rules(X, y, solver, &hook);
}

}  // namespace boolrule
