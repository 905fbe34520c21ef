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
#include <cmath>
#include <set>
#include <sstream>

#include "boolrule/data.hpp"
#include "boolrule/depth_one.hpp"
#include "boolrule/error.hpp"
#include "boolrule/ilp.hpp"
#include "boolrule/qubo.hpp"
#include "oracles.hpp"

using namespace boolrule;
using boost::multiprecision::cpp_int;

namespace {

struct Instance {
  oracle::Rows rows;
  std::vector<int> labels;
  BitMatrix X;
  BitVector y;
};

Instance random_instance(Rng& rng, std::size_t m, std::size_t n) {
  Instance in;
  for (;;) {
    in.rows = oracle::random_rows(n, m, rng);
    in.labels.assign(n, 0);
    for (auto& v : in.labels) v = rng.coin();
    const int p = std::count(in.labels.begin(), in.labels.end(), 1);
    if (p > 0 && p < static_cast<int>(n)) break;
  }
  in.X = oracle::to_matrix(in.rows);
  in.y = oracle::to_bits(in.labels);
  return in;
}

cpp_int binom(unsigned n, unsigned k) {
  cpp_int num = 1, den = 1;
  for (unsigned i = 0; i < k; ++i) {
    num *= n - i;
    den *= i + 1;
  }
  return num / den;
}

}  // namespace

TEST_CASE("oracle matches direct enumeration") {
  Rng rng(17);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t m = 1 + rng.index(5);
    const Instance in = random_instance(rng, m, 4 + rng.index(40));
    for (OpKind kind : kAllOpKinds) {
      DepthOneOptions o;
      o.kind = kind;
      o.max_literals = 1 + rng.index(3);
      o.min_literals = rng.index(std::min<std::size_t>(o.max_literals, m) + 1);
      o.lambda = rng.coin() ? 0.0 : 0.05 * static_cast<double>(rng.index(10));
      o.exclude_constant = rng.index(4) == 0;
      const auto want = oracle::depth_one_optimum(in.rows, in.labels, kind, o.max_literals,
                                                  o.min_literals, o.lambda,
                                                  oracle::balanced_weights(in.labels),
                                                  o.exclude_constant);
      const DepthOneSolution got = brute_force_depth_one(in.X, in.y, o);
      REQUIRE(got.feasible == want.found);
      if (!want.found) continue;
      CHECK(got.objective == doctest::Approx(want.objective).epsilon(1e-12));
      CHECK(got.literals.size() == want.literals);
      // The reported rule really scores what the oracle claims.
      const auto pred = oracle::eval_rows(got.formula(), in.rows);
      const auto w = oracle::balanced_weights(in.labels);
      double err = 0;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        if (in.labels[i] && !pred[i]) err += w.positive;
        if (!in.labels[i] && pred[i]) err += w.negative;
      }
      CHECK(err == doctest::Approx(got.weighted_error).epsilon(1e-12));
    }
  }
}

TEST_CASE("oracle enforces its evaluation cap") {
  Rng rng(2);
  const Instance in = random_instance(rng, 40, 20);
  DepthOneOptions o;
  o.max_literals = 4;
  o.max_evaluations = 1e4;
  CHECK_THROWS_AS(brute_force_depth_one(in.X, in.y, o), SolverLimitError);
}

TEST_CASE("breast cancer single-feature and pair anchors") {
  CsvOptions opts;
  opts.label_column = "diagnosis";
  opts.positive_label = "B";
  const RawTable raw = load_csv(BOOLRULE_TEST_DATA "/breast_cancer.csv", opts);
  const Dataset d = make_dataset(raw, binarize(raw, 10));
  DepthOneOptions o;
  o.weights = ClassWeights{1.0, 1.0};
  o.min_literals = 1;
  o.max_evaluations = 1e9;
  const DepthOneSolution single = brute_force_depth_one(d.X, d.y, o);
  REQUIRE(single.literals.size() == 1);
  CHECK(single.literals[0].negated);
  const double acc1 = score(single.formula(), d.X, d.y, MetricKind::Accuracy);
  CHECK(std::abs(acc1 - 0.914) <= 0.02);
  o.kind = OpKind::And;
  o.max_literals = 2;
  const DepthOneSolution pair = brute_force_depth_one(d.X, d.y, o);
  const double acc2 = score(pair.formula(), d.X, d.y, MetricKind::Accuracy);
  CHECK(std::abs(acc2 - 0.944) <= 0.02);
}

TEST_CASE("feasible-space and variable counts") {
  CHECK(count_feasible(1, 1) == 3);
  CHECK(count_feasible(2, 2) == 11);
  CHECK(count_feasible(300, 2) == 180301);
  for (unsigned m : {1u, 7u, 50u, 300u}) {
    for (unsigned mp = 0; mp <= 10; ++mp) {
      cpp_int want = 0;
      for (unsigned l = 0; l <= mp; ++l) want += binom(2 * m, l);
      CHECK(count_feasible(m, mp) == want);
    }
  }
  CHECK(count_qubo_variables(300, 569, 212, 4, OpKind::Or, QuboMode::WithEta) == 2879);
  CHECK(count_qubo_variables(300, 569, 212, 4, OpKind::Or, QuboMode::WithoutEta) == 1027);
  CHECK(count_qubo_variables(300, 569, 212, 4, OpKind::And, QuboMode::WithEta) == 2879);
  CHECK(count_qubo_variables(300, 569, 212, 4, OpKind::And, QuboMode::WithoutEta) == 1317);
  CHECK(count_qubo_variables(10, 30, 12, 1, OpKind::Or, QuboMode::WithEta) ==
        2 * 10 + 30 + 31);
}

TEST_CASE("compiled models have the counted number of variables") {
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 2 + rng.index(6);
    const Instance in = random_instance(rng, m, 6 + rng.index(30));
    const std::size_t mp = 1 + rng.index(m);
    for (OpKind kind : {OpKind::Or, OpKind::And}) {
      IlpOptions io;
      io.kind = kind;
      io.max_literals = mp;
      const IlpModel model = build_ilp(in.X, in.y, io);
      for (QuboMode mode : {QuboMode::WithEta, QuboMode::WithoutEta}) {
        const QuboModel q = ilp_to_qubo(model, mode);
        CHECK(q.num_vars == count_qubo_variables(m, in.y.size(), in.y.count(), mp, kind, mode));
      }
    }
  }
}

TEST_CASE("ilp sample constraints by substitution") {
  // One positive row [1,0], one negative row [0,1]; Or with m' = 2.
  const BitMatrix X = BitMatrix::from_rows({{1, 0}, {0, 1}});
  const BitVector y = BitVector::from_string("10");
  IlpOptions io;
  io.kind = OpKind::Or;
  io.max_literals = 2;
  const IlpModel model = build_ilp(X, y, io);
  std::vector<int> x(model.vars.size(), 0);
  x[model.b(0)] = 1;
  CHECK(model.violations(x).empty());
  CHECK(model.objective_value(x) == 0.0);
  x[model.b(0)] = 0;
  const auto v = model.violations(x);
  CHECK(std::find(v.begin(), v.end(), "pos_0") != v.end());
  x[model.eta_p(0)] = 1;
  CHECK(model.violations(x).empty());
  CHECK(model.objective_value(x) == doctest::Approx(model.weights.positive));
}

TEST_CASE("And is Or with literal polarities and classes swapped") {
  Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 2 + rng.index(3);
    const Instance in = random_instance(rng, m, 5 + rng.index(10));
    IlpOptions io;
    io.max_literals = 1 + rng.index(m);
    io.kind = OpKind::And;
    const IlpModel a = build_ilp(in.X, in.y, io);
    io.kind = OpKind::Or;
    const ClassWeights w = class_weights(in.y);
    io.weights = ClassWeights{w.negative, w.positive};
    const IlpModel o = build_ilp(in.X, ~in.y, io);
    REQUIRE(a.vars.size() == o.vars.size());
    for (int s = 0; s < 300; ++s) {
      std::vector<int> xa(a.vars.size());
      for (auto& v : xa) v = rng.coin();
      std::vector<int> xo(o.vars.size());
      for (std::size_t i = 0; i < m; ++i) {
        xo[o.nb(i)] = xa[a.b(i)];
        xo[o.b(i)] = xa[a.nb(i)];
      }
      for (std::size_t r = 0; r < a.num_positive; ++r) xo[o.eta_n(r)] = xa[a.eta_p(r)];
      for (std::size_t r = 0; r < a.num_negative; ++r) xo[o.eta_p(r)] = xa[a.eta_n(r)];
      CHECK(a.violations(xa).empty() == o.violations(xo).empty());
      CHECK(a.objective_value(xa) == doctest::Approx(o.objective_value(xo)));
    }
  }
}

TEST_CASE("Choose negative rows split on q") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 3;
    const Instance in = random_instance(rng, m, 8);
    IlpOptions io;
    io.max_literals = 3;
    io.kind = OpKind::Choose;
    const IlpModel c = build_ilp(in.X, in.y, io);
    io.kind = OpKind::AtLeast;
    const IlpModel lo = build_ilp(in.X, in.y, io);
    io.kind = OpKind::AtMost;
    const IlpModel hi = build_ilp(in.X, in.y, io);
    for (int s = 0; s < 200; ++s) {
      std::vector<int> x(lo.vars.size());
      for (std::size_t i = 0; i + 1 < x.size(); ++i) x[i] = rng.coin();
      x.back() = static_cast<int>(rng.index(4));
      for (int qv = 0; qv < 2; ++qv) {
        std::vector<int> xc(x.begin(), x.end() - 1);
        for (std::size_t r = 0; r < c.num_negative; ++r) xc.push_back(qv);
        xc.push_back(x.back());
        const auto vc = c.violations(xc);
        const auto vref = (qv == 1 ? lo : hi).violations(x);
        for (std::size_t r = 0; r < c.num_negative; ++r) {
          const std::string base = "neg_" + std::to_string(r);
          const bool cv = std::count(vc.begin(), vc.end(), base + "_a") +
                              std::count(vc.begin(), vc.end(), base + "_b") > 0;
          const bool rv = std::count(vref.begin(), vref.end(), base) > 0;
          CHECK(cv == rv);
        }
      }
    }
  }
}

TEST_CASE("exhaustive ILP optimum equals the oracle") {
  Rng rng(10);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t m = 2 + rng.index(3);
    const Instance in = random_instance(rng, m, 5 + rng.index(20));
    for (OpKind kind : kAllOpKinds) {
      IlpOptions io;
      io.kind = kind;
      io.max_literals = 1 + rng.index(std::min<std::size_t>(m, 3));
      const IlpModel model = build_ilp(in.X, in.y, io);
      const IlpCheckResult ilp = exhaustive_ilp_optimum(model);
      DepthOneOptions o;
      o.kind = kind;
      o.max_literals = io.max_literals;
      const DepthOneSolution best = brute_force_depth_one(in.X, in.y, o);
      REQUIRE(ilp.feasible);
      CHECK(ilp.objective == doctest::Approx(best.objective).epsilon(1e-12));
      CHECK(model.violations(ilp.assignment).empty());
    }
  }
}

TEST_CASE("lp export") {
  Rng rng(12);
  const Instance in = random_instance(rng, 3, 6);
  for (OpKind kind : kAllOpKinds) {
    IlpOptions io;
    io.kind = kind;
    io.max_literals = 2;
    io.min_literals = 1;
    const IlpModel model = build_ilp(in.X, in.y, io);
    const std::string text = export_lp(model);
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("End") != std::string::npos);
    // Zero lambda: no literal variable appears in the objective.
    const std::string obj = text.substr(text.find("obj:"), text.find("Subject To") - text.find("obj:"));
    CHECK(obj.find("b_") == std::string::npos);
    CHECK(obj.find("etaP_0") != std::string::npos);
    const IlpModel back = parse_lp(text);
    CHECK(back.kind == model.kind);
    CHECK(back.vars.size() == model.vars.size());
    CHECK(back.constraints == model.constraints);
    CHECK(back.objective == model.objective);
    CHECK(export_lp(back) == text);
  }
  IlpOptions io;
  io.lambda = 0.25;
  io.max_literals = 2;
  const std::string with_lambda = export_lp(build_ilp(in.X, in.y, io));
  CHECK(with_lambda.find("0.25 b_0") != std::string::npos);
}

TEST_CASE("qubo energy and penalties") {
  Rng rng(14);
  const Instance in = random_instance(rng, 3, 10);
  for (OpKind kind : kAllOpKinds) {
    IlpOptions io;
    io.kind = kind;
    io.max_literals = 2;
    const IlpModel model = build_ilp(in.X, in.y, io);
    for (QuboMode mode : {QuboMode::WithEta, QuboMode::WithoutEta}) {
      const QuboModel q = ilp_to_qubo(model, mode);
      const std::vector<std::uint8_t> zeros(q.num_vars, 0);
      CHECK(q.energy(zeros) == doctest::Approx(q.offset));
      for (int s = 0; s < 50; ++s) {
        std::vector<std::uint8_t> x(q.num_vars);
        for (auto& v : x) v = rng.coin();
        CHECK(q.energy(x) == doctest::Approx(q.penalized_value(x)).epsilon(1e-9));
      }
      std::set<std::string> names;
      for (const auto& v : q.vars) names.insert(v.name);
      CHECK(names.size() == q.vars.size());
    }
  }
}

TEST_CASE("annealer on separable and xor-like models") {
  std::vector<QuboEntry> diag;
  for (std::size_t i = 0; i < 12; ++i) diag.push_back({i, i, -1.0});
  const QuboModel q = make_qubo(12, diag);
  AnnealConfig cfg;
  cfg.num_reads = 10;
  cfg.num_sweeps = 200;
  const AnnealResult r = qubo_anneal(q, cfg);
  CHECK(r.best_energy() == -12.0);
  for (auto v : r.best_read()) CHECK(v == 1);

  // (x0 + x1 - 1)^2 = 1 - x0 - x1 + 2 x0 x1
  const QuboModel x = make_qubo(2, {{0, 0, -1.0}, {1, 1, -1.0}, {0, 1, 2.0}}, 1.0);
  const AnnealResult rx = qubo_anneal(x, cfg);
  CHECK(rx.best_energy() == 0.0);
  CHECK(rx.best_read()[0] + rx.best_read()[1] == 1);

  std::ostringstream out;
  write_qubo(out, x);
  CHECK(out.str().rfind("2 1", 0) == 0);
}

TEST_CASE("decode") {
  const BitMatrix X = BitMatrix::from_rows({{1, 0}, {0, 1}, {1, 1}});
  const BitVector y = BitVector::from_string("100");
  IlpOptions io;
  io.max_literals = 2;
  io.kind = OpKind::Or;
  const IlpModel orm = build_ilp(X, y, io);
  std::vector<int> x(orm.vars.size(), 0);
  x[orm.b(0)] = 1;
  DepthOneSolution s = decode(x, orm);
  CHECK(s.literals.size() == 1);
  CHECK(s.formula() == Formula::literal(0));
  CHECK_FALSE(s.conflict);

  io.kind = OpKind::And;
  const IlpModel andm = build_ilp(X, y, io);
  std::vector<int> xa(andm.vars.size(), 0);
  xa[andm.nb(1)] = 1;
  s = decode(xa, andm);
  REQUIRE(s.literals.size() == 1);
  CHECK(s.literals[0].feature == 1);
  CHECK(s.literals[0].negated);

  xa[andm.b(1)] = 1;
  CHECK(decode(xa, andm).conflict);
}

TEST_CASE("qubo backend on tiny Or models reaches the oracle optimum") {
  Rng rng(16);
  int hits = 0, total = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Instance in = random_instance(rng, 2 + rng.index(3), 8 + rng.index(12));
    DepthOneOptions o;
    o.kind = OpKind::Or;
    o.max_literals = 2;
    const DepthOneSolution best = brute_force_depth_one(in.X, in.y, o);
    for (QuboMode mode : {QuboMode::WithEta, QuboMode::WithoutEta}) {
      QuboBackendOptions qb;
      qb.mode = mode;
      qb.anneal.seed = static_cast<std::uint64_t>(trial);
      const DepthOneSolution got = solve_depth_one_qubo(in.X, in.y, o, qb);
      ++total;
      if (got.feasible && !got.conflict) {
        CHECK(got.objective >= best.objective - 1e-9);
        if (std::abs(got.objective - best.objective) < 1e-9) ++hits;
      }
    }
  }
  CHECK(hits >= total - 1);
}

TEST_CASE("model option errors") {
  const BitMatrix X = BitMatrix::from_rows({{1, 0}, {0, 1}});
  IlpOptions io;
  CHECK_THROWS_AS(build_ilp(X, BitVector::from_string("11"), io), DataError);
  io.max_literals = 1;
  io.min_literals = 2;
  CHECK_THROWS_AS(build_ilp(X, BitVector::from_string("10"), io), UsageError);
  CHECK_THROWS_AS(parse_qubo_mode("sideways"), UsageError);
  CHECK_THROWS_AS(parse_backend("cloud"), UsageError);
}
