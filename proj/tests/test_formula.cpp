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

#include "boolrule/error.hpp"
#include "boolrule/formula.hpp"
#include "boolrule/metrics.hpp"
#include "oracles.hpp"

using namespace boolrule;

namespace {

const FeatureNames kAf = {"a", "b", "c", "d", "e", "f"};

Formula fig_rule() { return parse("And(Choose2(a,b,c,d),~e,f)", kAf); }

}  // namespace

TEST_CASE("operators evaluate per row") {
  const auto X = BitMatrix::from_rows({{1, 0, 1}});
  CHECK(evaluate(parse("AtLeast2(f0,f1,f2)"), X).get(0));
  CHECK_FALSE(evaluate(parse("AtLeast3(f0,f1,f2)"), X).get(0));
  const auto row = BitMatrix::from_rows({{1, 1, 0, 0, 0, 1}});
  CHECK(evaluate(fig_rule(), row).get(0));
  const auto five = BitMatrix::from_rows({{0}, {1}, {0}, {1}, {1}});
  CHECK(evaluate(Formula::one(), five).to_string() == "11111");
  CHECK(evaluate(Formula::zero(), five).to_string() == "00000");
}

TEST_CASE("complexity and depth") {
  CHECK(complexity(fig_rule()) == 8);
  CHECK(depth(fig_rule()) == 2);
  CHECK(complexity(Formula::literal(3)) == 1);
  CHECK(depth(Formula::literal(3)) == 0);
  CHECK(depth(parse("Or(f0,f1)")) == 1);
  CHECK(complexity(parse("AtLeast3(f0,f1,f2,f3,f4)")) == 6);
}

TEST_CASE("bit-packed evaluation matches the recursive evaluator") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 2 + rng.index(7);
    const std::size_t n = 1 + rng.index(200);
    const auto rows = oracle::random_rows(n, m, rng);
    const Formula f(oracle::random_node(m, 3, rng));
    const BitVector got = evaluate(f, oracle::to_matrix(rows));
    const auto want = oracle::eval_rows(f, rows);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(got.get(i) == (want[i] == 1));
    CHECK(complexity(f) == oracle::complexity(f.root()));
    CHECK(depth(f) == oracle::depth(f.root()));
  }
}

TEST_CASE("scores") {
  const auto y = BitVector::from_string("1100");
  CHECK(score(BitVector::from_string("1100"), y, MetricKind::BalancedAccuracy) == 1.0);
  CHECK(score(BitVector::from_string("1010"), y, MetricKind::BalancedAccuracy) == 0.5);
  CHECK(score(BitVector::from_string("1111"), y, MetricKind::BalancedAccuracy) == 0.5);
  CHECK(score(BitVector::from_string("1110"), y, MetricKind::Accuracy) == 0.75);
  CHECK(objective(0.9, 8, 0.0) == doctest::Approx(0.9));
  CHECK(objective(0.9, 8, 0.01) == doctest::Approx(0.82));
  CHECK(objective(0.9, 3, 0.01) > objective(0.9, 4, 0.01));
  CHECK_THROWS_AS(score(BitVector(), BitVector(), MetricKind::Accuracy), DataError);
}

TEST_CASE("class weights") {
  const auto w = class_weights(BitVector::from_string("11000000"));
  CHECK(w.positive == doctest::Approx(2.0));
  CHECK(w.negative == doctest::Approx(8.0 / 12.0));
  const auto even = class_weights(BitVector::from_string("1100"));
  CHECK(even.positive == 1.0);
  CHECK(even.negative == 1.0);
  CHECK_THROWS_AS(class_weights(BitVector::from_string("0000")), DataError);
}

TEST_CASE("negation complements the output and the score") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng.index(5);
    const auto rows = oracle::random_rows(40, m, rng);
    const auto X = oracle::to_matrix(rows);
    std::vector<int> labels(rows.size());
    for (auto& v : labels) v = rng.coin();
    const auto y = oracle::to_bits(labels);
    const Formula f(oracle::random_node(m, 2, rng));
    CHECK(evaluate(negate(f), X) == ~evaluate(f, X));
    const double s = score(f, X, y, MetricKind::BalancedAccuracy);
    const double sn = score(negate(f), X, y, MetricKind::BalancedAccuracy);
    CHECK(std::abs(s + sn - 1.0) < 1e-12);
  }
}

TEST_CASE("text round trip and errors") {
  const Formula f = parse("AtLeast2(f0,f1,f2)");
  REQUIRE(f.root().is_operator());
  CHECK(f.root().op().k == 2);
  CHECK(f.root().op().children.size() == 3);
  CHECK(to_text(fig_rule(), kAf) == "And(Choose2(a,b,c,d),~e,f)");
  CHECK(parse(to_text(fig_rule(), kAf), kAf) == fig_rule());
  CHECK_THROWS_AS(parse("Choose5(f0,f1)"), UsageError);
  CHECK_THROWS_AS(parse("And(f0,"), ParseError);
  CHECK_THROWS_AS(parse("Xor(f0,f1)"), ParseError);
  CHECK(parse("~Or(f0,f1)").root().op().negated);
  CHECK(parse("One()").root().is_trivial());
}

TEST_CASE("json round trip") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Formula f(oracle::random_node(6, 3, rng));
    CHECK(from_json(to_json(f)) == f);
    CHECK(parse(to_text(f)) == f);
  }
}

TEST_CASE("validate flags broken invariants") {
  CHECK(validate(fig_rule(), 6, 8).empty());
  CHECK_FALSE(validate(fig_rule(), 6, 7).empty());
  CHECK_FALSE(validate(fig_rule(), 5, std::nullopt).empty());
  OperatorNode op;
  op.kind = OpKind::Or;
  op.children = {Literal{0, false}, Literal{0, true}};
  CHECK_FALSE(validate(Formula(op), 2, std::nullopt).empty());
  op.children = {Literal{0, false}};
  CHECK_FALSE(validate(Formula(op), 2, std::nullopt).empty());
}
