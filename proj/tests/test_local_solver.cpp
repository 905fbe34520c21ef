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

#include <cmath>
#include <sstream>

#include "boolrule/error.hpp"
#include "boolrule/local_solver.hpp"
#include "oracles.hpp"

using namespace boolrule;

namespace {

const FeatureNames kAf = {"a", "b", "c", "d", "e", "f"};

Formula fig_rule() { return parse("And(Choose2(a,b,c,d),~e,f)", kAf); }

std::size_t literal_count(const Node& n) {
  if (n.is_literal()) return 1;
  if (!n.is_operator()) return 0;
  std::size_t c = 0;
  for (const auto& ch : n.op().children) c += literal_count(ch);
  return c;
}

struct Planted {
  BitMatrix X;
  BitVector y;
};

Planted planted(const std::string& rule, std::size_t m) {
  const auto rows = oracle::all_rows(m);
  const auto labels = oracle::eval_rows(parse(rule), rows);
  return {oracle::to_matrix(rows), oracle::to_bits(labels)};
}

}  // namespace

TEST_CASE("initial rules") {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Formula three = generate_initial_rule(8, 3, rng);
    REQUIRE(three.root().is_operator());
    CHECK(three.root().op().children.size() == 2);
    CHECK(depth(three) == 1);
    const Formula wide = generate_initial_rule(5, 20, rng);
    CHECK(literal_count(wide.root()) <= 5);
    CHECK(validate(wide, 5, 20).empty());
    const std::size_t cap = 3 + rng.index(10);
    CHECK(complexity(generate_initial_rule(30, cap, rng)) <= cap);
  }
}

TEST_CASE("move validity on a two-literal rule") {
  const Formula rule = parse("Or(f0,f1)");
  LocalMoveProposer proposer(4, 6);
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    CHECK_FALSE(proposer.draw(rule, {0}, MoveKind::RemoveLiteral, rng));
    CHECK_FALSE(proposer.draw(rule, {}, MoveKind::RemoveOperator, rng));
    const auto swap = proposer.draw(rule, {0}, MoveKind::SwapLiteral, rng);
    REQUIRE(swap);
    const Formula out = apply_move(rule, *swap);
    CHECK(validate(out, 4, 6).empty());
    CHECK_FALSE(out == rule);
  }
  Move flip;
  flip.kind = MoveKind::SwapLiteral;
  flip.target = {0};
  flip.literal = {0, true};
  CHECK(apply_move(rule, flip) == parse("Or(~f0,f1)"));
}

TEST_CASE("concrete moves on the example rule") {
  const Formula rule = fig_rule();
  Move m;
  m.kind = MoveKind::RemoveLiteral;
  m.target = {0, 3};
  CHECK(apply_move(rule, m) == parse("And(Choose2(a,b,c),~e,f)", kAf));

  m = Move{};
  m.kind = MoveKind::RemoveOperator;
  m.target = {0};
  CHECK(apply_move(rule, m) == parse("And(~e,f)", kAf));

  m = Move{};
  m.kind = MoveKind::ExpandLiteral;
  m.target = {0, 0};
  m.op_kind = OpKind::And;
  m.sibling = 1;
  const Formula expanded = apply_move(rule, m);
  CHECK(expanded == parse("And(Choose2(And(a,b),c,d),~e,f)", kAf));
  CHECK(expanded.at({0}).op().k == 2);

  m = Move{};
  m.kind = MoveKind::AddLiteral;
  m.target = {0};
  m.literal = {4, false};
  CHECK(apply_move(rule, m) == parse("And(Choose2(a,b,c,d,e),~e,f)", kAf));

  m = Move{};
  m.kind = MoveKind::SwapOperator;
  m.target = {0};
  m.op_kind = OpKind::Or;
  CHECK(apply_move(rule, m) == parse("And(Or(a,b,c,d),~e,f)", kAf));

  // Removing a literal lowers k when it would exceed the child count.
  m = Move{};
  m.kind = MoveKind::RemoveLiteral;
  m.target = {2};
  CHECK(apply_move(parse("AtLeast3(f0,f1,f2)"), m) == parse("AtLeast2(f0,f1)"));
}

TEST_CASE("metropolis rule") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    CHECK(metropolis_accept(0.0, 0.1, rng));
    CHECK(metropolis_accept(0.3, 1e-6, rng));
  }
  const double T = 0.05;
  int accepted = 0;
  const int trials = 40000;
  for (int i = 0; i < trials; ++i) accepted += metropolis_accept(-T * std::log(2.0), T, rng);
  CHECK(std::abs(accepted / static_cast<double>(trials) - 0.5) < 0.01);
}

TEST_CASE("geometric temperature") {
  SolverConfig c;
  CHECK(temperature(0, c) == doctest::Approx(0.2));
  CHECK(temperature(c.num_iterations - 1, c) == doctest::Approx(1e-6));
  c.num_iterations = 3;
  c.t_high = 1.0;
  c.t_low = 0.01;
  CHECK(temperature(1, c) == doctest::Approx(0.1));
}

TEST_CASE("config checks") {
  SolverConfig c;
  c.max_complexity = 2;
  CHECK_THROWS_AS(c.check(), UsageError);
  c = SolverConfig{};
  c.num_starts = 0;
  CHECK_THROWS_AS(c.check(), UsageError);
  c = SolverConfig{};
  c.t_low = 0.5;
  CHECK_THROWS_AS(c.check(), UsageError);
}

TEST_CASE("search reaches a planted threshold rule") {
  // A single start reaches the optimum only occasionally on this problem, so
  // this check uses a wide start budget; the default budget is measured by
  // the acceptance run.
  const Planted p = planted("AtLeast3(f0,f1,f2,f3,f4)", 5);
  SolverConfig c;
  c.max_complexity = 6;
  c.num_starts = 150;
  c.seed = 4;
  const SolveResult r = solve(p.X, p.y, c);
  CHECK(score(r.best, p.X, p.y, MetricKind::BalancedAccuracy) == 1.0);
  CHECK(complexity(r.best) <= 6);
}

TEST_CASE("with room for two literals the solver finds the best two-literal rule") {
  Rng rng(8);
  const auto rows = oracle::random_rows(64, 6, rng);
  std::vector<int> labels;
  for (const auto& r : rows) labels.push_back(r[0]);
  SolverConfig c;
  c.max_complexity = 3;
  c.num_starts = 10;
  c.num_iterations = 600;
  const SolveResult r = solve(oracle::to_matrix(rows), oracle::to_bits(labels), c);
  // Balanced accuracy is 1 - weighted error / n under balanced weights.
  double best = 0.0;
  for (OpKind kind : kAllOpKinds) {
    const auto opt = oracle::depth_one_optimum(rows, labels, kind, 2, 2, 0.0,
                                               oracle::balanced_weights(labels));
    best = std::max(best, 1.0 - opt.objective / static_cast<double>(rows.size()));
  }
  CHECK(r.objective == doctest::Approx(best));
  CHECK(complexity(r.best) == 3);
}

TEST_CASE("large lambda picks the simplest start best") {
  const Planted p = planted("Or(And(f0,f1),f2)", 4);
  SolverConfig c;
  c.max_complexity = 8;
  c.lambda = 1.0;
  c.num_starts = 6;
  c.num_iterations = 300;
  const SolveResult r = solve(p.X, p.y, c);
  for (const auto& text : r.trace.start_best_rule) {
    CHECK(complexity(r.best) <= complexity(parse(text)));
  }
}

TEST_CASE("results are reproducible and independent of worker count") {
  const Planted p = planted("Or(And(f0,f1),And(f2,f3))", 5);
  SolverConfig c;
  c.max_complexity = 7;
  c.num_starts = 6;
  c.num_iterations = 200;
  c.seed = 21;
  const SolveResult a = solve(p.X, p.y, c);
  const SolveResult b = solve(p.X, p.y, c);
  c.workers = 3;
  const SolveResult t = solve(p.X, p.y, c);
  CHECK(to_text(a.best) == to_text(b.best));
  CHECK(to_text(a.best) == to_text(t.best));
  CHECK(a.objective == t.objective);
  CHECK(a.trace.rows.size() == t.trace.rows.size());
  CHECK(a.trace.rows.size() == 6u * 200u);
}

TEST_CASE("every traced rule stays feasible") {
  const Planted p = planted("Choose2(f0,f1,f2)", 6);
  LocalMoveProposer proposer(6, 7);
  Rng rng(9);
  Formula rule = generate_initial_rule(6, 7, rng);
  for (int i = 0; i < 5000; ++i) {
    const Move m = proposer.propose(rule, rng);
    const Formula next = apply_move(rule, m);
    REQUIRE(validate(next, 6, 7).empty());
    if (rng.coin()) rule = next;
  }
}

TEST_CASE("trace csv") {
  const Planted p = planted("Or(f0,f1)", 3);
  SolverConfig c;
  c.max_complexity = 4;
  c.num_starts = 2;
  c.num_iterations = 5;
  const SolveResult r = solve(p.X, p.y, c);
  std::ostringstream out;
  write_trace_csv(out, r.trace);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "iteration,start,temperature,objective,proposed,accepted,kind,subproblem_size,"
        "solve_seconds");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 10);
}
