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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <optional>

#include "boolrule/error.hpp"
#include "boolrule/nonlocal.hpp"
#include "oracles.hpp"

using namespace boolrule;

namespace {

const FeatureNames kAf = {"a", "b", "c", "d", "e", "f"};

struct Planted {
  oracle::Rows rows;
  std::vector<int> labels;
  BitMatrix X;
  BitVector y;
};

Planted planted(const std::string& rule, std::size_t m) {
  Planted p;
  p.rows = oracle::all_rows(m);
  p.labels = oracle::eval_rows(parse(rule), p.rows);
  p.X = oracle::to_matrix(p.rows);
  p.y = oracle::to_bits(p.labels);
  return p;
}

// Solution objective on the candidate columns, recomputed independently.
void check_optimal(const NonLocalRecord& r) {
  oracle::Rows rows;
  for (std::size_t i = 0; i < r.subproblem.X.rows(); ++i) {
    oracle::Row row;
    for (std::size_t c : r.candidates) row.push_back(r.subproblem.X.get(i, c));
    rows.push_back(row);
  }
  std::vector<int> labels;
  for (std::size_t i = 0; i < r.subproblem.y.size(); ++i) labels.push_back(r.subproblem.y.get(i));
  const oracle::Weights w{r.options.weights->positive, r.options.weights->negative};
  const auto best = oracle::depth_one_optimum(rows, labels, r.kind, r.options.max_literals,
                                              r.options.min_literals, r.options.lambda, w,
                                              r.options.exclude_constant);
  REQUIRE(best.found == r.solution.feasible);
  if (best.found) CHECK(r.solution.objective == doctest::Approx(best.objective).epsilon(1e-12));
}

}  // namespace

TEST_CASE("predetermined rows") {
  // Columns a..f; row 0 has f = 0, row 1 has f = 1.
  const BitMatrix X = BitMatrix::from_rows({{1, 0, 0, 0, 0, 0}, {1, 0, 0, 0, 0, 1}});
  Rng rng(1);
  const Formula conj = parse("And(Or(a,b),f)", kAf);
  const auto s = effective_subproblem(conj, {0}, X, BitVector::from_string("01"), 100, rng);
  CHECK(s.predetermined == 1);
  CHECK(s.rows == std::vector<std::size_t>{1});

  const Formula disj = parse("Or(And(a,b),f)", kAf);
  const auto t = effective_subproblem(disj, {0}, X, BitVector::from_string("11"), 100, rng);
  CHECK(t.rows == std::vector<std::size_t>{0});
  CHECK(t.y.get(0));
}

TEST_CASE("retained rows agree with double evaluation") {
  Rng rng(3);
  const auto rows = oracle::all_rows(5);
  const BitMatrix X = oracle::to_matrix(rows);
  for (int trial = 0; trial < 300; ++trial) {
    const Formula rule(oracle::random_node(5, 3, rng));
    std::vector<int> labels(rows.size());
    for (auto& v : labels) v = rng.coin();
    const auto paths = rule.paths();
    const NodePath target = paths[rng.index(paths.size())];
    const auto sub = effective_subproblem(rule, target, X, oracle::to_bits(labels), 1000, rng);
    const Formula r0 = rule.replaced(target, TrivialNode{false});
    const Formula r1 = rule.replaced(target, TrivialNode{true});
    std::vector<std::size_t> want;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (oracle::eval(r0.root(), rows[i]) != oracle::eval(r1.root(), rows[i])) want.push_back(i);
    }
    REQUIRE(sub.rows == want);
    CHECK(sub.predetermined == rows.size() - want.size());
    for (std::size_t j = 0; j < sub.rows.size(); ++j) {
      const std::size_t i = sub.rows[j];
      const Formula fixed = rule.replaced(target, TrivialNode{sub.y.get(j)});
      CHECK(oracle::eval(fixed.root(), rows[i]) == (labels[i] == 1));
    }
  }
}

TEST_CASE("subsampling keeps at most max_samples rows") {
  Rng rng(4);
  const auto rows = oracle::all_rows(6);
  const BitMatrix X = oracle::to_matrix(rows);
  const BitVector y(rows.size(), true);
  const auto sub = effective_subproblem(parse("Or(f0,f1)"), {}, X, y, 10, rng);
  CHECK(sub.rows.size() == 10);
  CHECK(std::is_sorted(sub.rows.begin(), sub.rows.end()));
  CHECK(sub.X.rows() == 10);
}

TEST_CASE("subtree budgets") {
  const Formula rule = parse("And(Choose2(a,b,c,d),~e,f)", kAf);
  SubtreeBudget b = subtree_budget(rule, {0}, 10);
  CHECK(b.max_literals == 6);
  CHECK(b.min_literals == 1);
  CHECK(b.proposable);
  b = subtree_budget(rule, {}, 10);
  CHECK(b.max_literals == 9);
  CHECK(b.min_literals == 2);
  b = subtree_budget(rule, {1}, 8);
  CHECK_FALSE(b.proposable);
}

TEST_CASE("a duplicated column is matched exactly") {
  // f3 duplicates f2 and the labels are f2, so every operator kind has a
  // zero-error two-literal subtree.
  oracle::Rows rows = oracle::all_rows(3);
  for (auto& r : rows) r.push_back(r[2]);
  std::vector<int> labels;
  for (const auto& r : rows) labels.push_back(r[2]);
  const BitMatrix X = oracle::to_matrix(rows);
  const BitVector y = oracle::to_bits(labels);
  SolverConfig solver;
  solver.max_complexity = 3;
  NonLocalConfig config;
  Rng rng(5);
  // With C' = 3 only the root has room for a new operator.
  int solved = 0;
  for (int i = 0; i < 60; ++i) {
    std::optional<NonLocalRecord> seen;
    const auto p = propose_non_local_move(parse("Or(f0,f1)"), X, y, solver, config, rng,
                                          [&](const NonLocalRecord& r) { seen = r; });
    if (!seen) {
      CHECK_FALSE(p.move);
      continue;
    }
    ++solved;
    CHECK(seen->target.empty());
    CHECK(seen->solution.weighted_error == 0.0);
    REQUIRE(p.move);
    const Formula out = apply_move(parse("Or(f0,f1)"), *p.move);
    CHECK(score(out, X, y, MetricKind::BalancedAccuracy) == 1.0);
  }
  CHECK(solved > 5);
}

TEST_CASE("proposals respect the budget and are optimal on their subsample") {
  const Planted p = planted("Or(And(f0,f1),And(f2,f3))", 5);
  Rng rng(6);
  NonLocalConfig config;
  int seen = 0;
  for (int trial = 0; trial < 200; ++trial) {
    SolverConfig solver;
    solver.max_complexity = 3 + rng.index(6);
    const Formula rule = generate_initial_rule(5, solver.max_complexity, rng);
    const auto prop = propose_non_local_move(rule, p.X, p.y, solver, config, rng,
                                             [&](const NonLocalRecord& r) {
                                               ++seen;
                                               CHECK(r.used_oracle);
                                               CHECK(r.solution.literals.size() <=
                                                     r.budget.max_literals);
                                               check_optimal(r);
                                             });
    if (prop.subproblem_size == 0) CHECK_FALSE(prop.move);
    if (prop.move) {
      const Formula out = apply_move(rule, *prop.move);
      CHECK(validate(out, 5, solver.max_complexity).empty());
    }
  }
  CHECK(seen > 50);
}

TEST_CASE("a burn-in covering the whole run reproduces the local solver") {
  const Planted p = planted("Or(And(f0,f1),And(f2,f3))", 4);
  SolverConfig solver;
  solver.max_complexity = 7;
  solver.num_starts = 4;
  solver.num_iterations = 150;
  solver.seed = 12;
  NonLocalConfig config;
  config.burn_in = solver.num_iterations;
  const SolveResult a = solve(p.X, p.y, solver);
  const SolveResult b = solve_with_nonlocal(p.X, p.y, solver, config);
  CHECK(to_text(a.best) == to_text(b.best));
  REQUIRE(a.trace.rows.size() == b.trace.rows.size());
  for (std::size_t i = 0; i < a.trace.rows.size(); ++i) {
    CHECK(a.trace.rows[i].objective == b.trace.rows[i].objective);
    CHECK(a.trace.rows[i].accepted == b.trace.rows[i].accepted);
    CHECK_FALSE(b.trace.rows[i].nonlocal);
  }
}

TEST_CASE("non-local proposals only follow burn-in and stagnation") {
  const Planted p = planted("Or(And(f0,f1),And(f2,f3))", 5);
  SolverConfig solver;
  solver.max_complexity = 7;
  solver.num_starts = 3;
  solver.num_iterations = 120;
  NonLocalConfig config;
  config.burn_in = 20;
  config.patience = 1;
  const SolveResult r = solve_with_nonlocal(p.X, p.y, solver, config);
  int nonlocal = 0;
  for (std::size_t i = 0; i < r.trace.rows.size(); ++i) {
    const TraceRow& row = r.trace.rows[i];
    if (!row.nonlocal) continue;
    ++nonlocal;
    CHECK(row.iteration > 20);
    // The previous iteration of this start did not raise the best.
    const TraceRow& prev = r.trace.rows[i - 1];
    const TraceRow& before = r.trace.rows[i - 2];
    CHECK(prev.best == before.best);
  }
  CHECK(nonlocal > 0);
  for (const auto& text : r.trace.start_best_rule) {
    CHECK(validate(parse(text), 5, 7).empty());
  }
}

TEST_CASE("configuration errors") {
  NonLocalConfig c;
  c.patience = 0;
  CHECK_THROWS_AS(c.check(), UsageError);
  c = NonLocalConfig{};
  c.max_samples = 0;
  CHECK_THROWS_AS(c.check(), UsageError);
  const Planted p = planted("Or(f0,f1)", 3);
  SolverConfig solver;
  CHECK_THROWS_AS(solve_with_nonlocal(p.X, p.y, solver, NonLocalConfig{}), UsageError);
}
