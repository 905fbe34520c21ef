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

#include "boolrule/depth_one.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "boolrule/data.hpp"
#include "boolrule/error.hpp"

namespace boolrule {

Formula DepthOneSolution::formula() const {
  const std::size_t l = literals.size();
  if (l == 0) {
    return kind == OpKind::Or ? Formula::zero() : Formula::one();
  }
  if (l == 1) {
    const Literal lit = literals.front();
    const Literal flipped{lit.feature, !lit.negated};
    switch (kind) {
      case OpKind::Or:
      case OpKind::And:
        return Formula(lit);
      case OpKind::AtLeast:
        return k == 0 ? Formula::one() : Formula(lit);
      case OpKind::AtMost:
        return k == 0 ? Formula(flipped) : Formula::one();
      case OpKind::Choose:
        return k == 0 ? Formula(flipped) : Formula(lit);
    }
  }
  std::vector<Node> children(literals.begin(), literals.end());
  return Formula::op(kind, std::move(children), k);
}

namespace {

bool reduces_to_constant(OpKind kind, std::size_t l, int k) {
  if (l == 0) return true;
  if (l == 1) {
    return (kind == OpKind::AtLeast && k == 0) || (kind == OpKind::AtMost && k == 1);
  }
  return false;
}

}  // namespace

double oracle_evaluations(std::size_t num_features, const DepthOneOptions& options) {
  double total = 0.0;
  double binom = 1.0;  // C(m, l)
  for (std::size_t l = 0; l <= options.max_literals && l <= num_features; ++l) {
    if (l > 0) {
      binom = binom * static_cast<double>(num_features - l + 1) / static_cast<double>(l);
    }
    if (l < options.min_literals) continue;
    const double ks = is_parameterized(options.kind) ? static_cast<double>(l + 1) : 1.0;
    total += binom * std::ldexp(1.0, static_cast<int>(l)) * ks;
  }
  return total;
}

DepthOneSolution brute_force_depth_one(const BitMatrix& X, const BitVector& y,
                                       const DepthOneOptions& options) {
  if (X.rows() != y.size()) {
    throw DataError("matrix has " + std::to_string(X.rows()) + " rows but " +
                    std::to_string(y.size()) + " labels");
  }
  if (X.rows() == 0) throw DataError("cannot solve on an empty dataset");
  if (options.max_literals < options.min_literals) {
    throw UsageError("max_literals is below min_literals");
  }
  const double evals = oracle_evaluations(X.cols(), options);
  if (evals > options.max_evaluations) {
    throw SolverLimitError(
        "exhaustive search needs " + std::to_string(static_cast<long double>(evals)) +
        " evaluations, above the cap of " +
        std::to_string(static_cast<long double>(options.max_evaluations)) +
        "; subsample features or lower the literal limit");
  }
  const ClassWeights w = options.weights ? *options.weights : class_weights(y);
  const std::size_t m = X.cols();
  const std::size_t nwords = words_for(X.rows());
  const std::size_t positives = y.count();
  const std::size_t max_l = std::min(options.max_literals, m);
  const std::size_t planes = static_cast<std::size_t>(std::bit_width(std::max<std::size_t>(max_l, 1)));
  const Word last_mask = y.tail_mask();
  const auto valid = [&](std::size_t word) {
    return word + 1 == nwords ? last_mask : ~Word{0};
  };

  std::vector<BitVector> lits;
  lits.reserve(2 * m);
  for (std::size_t f = 0; f < m; ++f) {
    lits.push_back(X.column(f));
    lits.push_back(~X.column(f));
  }
  // state[d] holds the counter planes after d literals, plane-major.
  std::vector<std::vector<Word>> state(max_l + 1, std::vector<Word>(planes * nwords, 0));
  std::vector<Literal> chosen;

  DepthOneSolution best;
  best.kind = options.kind;
  best.feasible = false;
  double best_obj = std::numeric_limits<double>::infinity();
  std::size_t best_len = 0;

  std::vector<Word> ge(max_l + 3);
  std::vector<std::size_t> tp(max_l + 2), pp(max_l + 2);

  const auto consider = [&](std::size_t l) {
    const auto& s = state[l];
    std::fill(tp.begin(), tp.end(), 0);
    std::fill(pp.begin(), pp.end(), 0);
    const bool param = is_parameterized(options.kind);
    const std::size_t kmax = param ? l : 0;
    for (std::size_t w = 0; w < nwords; ++w) {
      const Word mask = valid(w);
      for (std::size_t t = 0; t <= l + 1; ++t) {
        if (t >= (std::size_t{1} << planes)) {
          ge[t] = 0;
          continue;
        }
        Word gt = 0, same = ~Word{0};
        for (std::size_t b = planes; b-- > 0;) {
          const Word p = s[b * nwords + w];
          if ((t >> b) & 1U) {
            same &= p;
          } else {
            gt |= same & p;
            same &= ~p;
          }
        }
        ge[t] = (gt | same) & mask;
      }
      const Word yw = y.words()[w];
      for (std::size_t k = 0; k <= kmax; ++k) {
        Word pred = 0;
        switch (options.kind) {
          case OpKind::Or:
            pred = ge[1];
            break;
          case OpKind::And:
            pred = ge[l];
            break;
          case OpKind::AtLeast:
            pred = ge[k];
            break;
          case OpKind::AtMost:
            pred = mask & ~ge[k + 1];
            break;
          case OpKind::Choose:
            pred = ge[k] & ~ge[k + 1];
            break;
        }
        tp[k] += static_cast<std::size_t>(std::popcount(pred & yw));
        pp[k] += static_cast<std::size_t>(std::popcount(pred));
      }
    }
    for (std::size_t k = 0; k <= kmax; ++k) {
      if (options.exclude_constant && reduces_to_constant(options.kind, l, static_cast<int>(k))) {
        continue;
      }
      const double err = w.positive * static_cast<double>(positives - tp[k]) +
                         w.negative * static_cast<double>(pp[k] - tp[k]);
      const double obj = err + options.lambda * static_cast<double>(l);
      // Enumeration is already lexicographic within a size, so an equal
      // objective only wins with fewer literals.
      const bool first = !best.feasible;
      const double tol = first ? 0.0 : 1e-9 * std::max(1.0, std::abs(best_obj));
      if (first || obj < best_obj - tol ||
          (std::abs(obj - best_obj) <= tol && l < best_len)) {
        best_obj = obj;
        best_len = l;
        best.k = static_cast<int>(k);
        best.literals = chosen;
        best.objective = obj;
        best.weighted_error = err;
        best.feasible = true;
      }
    }
  };

  const auto dfs = [&](auto&& self, std::size_t first, std::size_t depth) -> void {
    if (depth >= options.min_literals) consider(depth);
    if (depth == max_l) return;
    for (std::size_t f = first; f < m; ++f) {
      for (int neg = 0; neg < 2; ++neg) {
        const BitVector& lit = lits[2 * f + static_cast<std::size_t>(neg)];
        const auto& from = state[depth];
        auto& to = state[depth + 1];
        for (std::size_t wi = 0; wi < nwords; ++wi) {
          Word carry = lit.words()[wi];
          for (std::size_t b = 0; b < planes; ++b) {
            const Word p = from[b * nwords + wi];
            to[b * nwords + wi] = p ^ carry;
            carry &= p;
          }
        }
        chosen.push_back({f, neg == 1});
        self(self, f + 1, depth + 1);
        chosen.pop_back();
      }
    }
  };
  dfs(dfs, 0, 0);
  return best;
}

DepthOneSolution decode(const std::vector<int>& assignment, const IlpModel& model) {
  if (assignment.size() != model.vars.size()) {
    throw UsageError("assignment length does not match the model");
  }
  DepthOneSolution s;
  s.kind = model.kind;
  for (std::size_t i = 0; i < model.num_features; ++i) {
    const bool pos = assignment[model.b(i)] != 0;
    const bool neg = assignment[model.nb(i)] != 0;
    if (pos) s.literals.push_back({i, false});
    if (neg) s.literals.push_back({i, true});
    if (pos && neg) s.conflict = true;
  }
  const std::size_t l = s.literals.size();
  s.k = is_parameterized(model.kind) ? assignment[model.k()] : 0;
  s.feasible = l <= model.max_literals && l >= model.min_literals &&
               (!is_parameterized(model.kind) ||
                (s.k >= 0 && static_cast<std::size_t>(s.k) <= l &&
                 static_cast<std::size_t>(s.k) <= model.max_literals));
  return s;
}

void score_solution(DepthOneSolution& solution, const BitMatrix& X,
                    const BitVector& y, const ClassWeights& weights, double lambda) {
  const Confusion c = confusion(evaluate(solution.formula(), X), y);
  solution.weighted_error = weighted_error(c, weights);
  solution.objective =
      solution.weighted_error + lambda * static_cast<double>(solution.literals.size());
}

DepthOneSolution solve_depth_one_qubo(const BitMatrix& X, const BitVector& y,
                                      const DepthOneOptions& options,
                                      const QuboBackendOptions& qubo) {
  const ClassWeights w = options.weights ? *options.weights : class_weights(y);
  IlpOptions ilp_options;
  ilp_options.kind = options.kind;
  ilp_options.max_literals = options.max_literals;
  ilp_options.min_literals = options.min_literals;
  ilp_options.lambda = options.lambda;
  ilp_options.weights = w;
  const IlpModel model = build_ilp(X, y, ilp_options);
  const QuboModel q = ilp_to_qubo(model, qubo.mode, qubo.penalties);
  const AnnealResult result = qubo_anneal(q, qubo.anneal);

  std::optional<DepthOneSolution> best;
  for (const auto& read : result.reads) {
    DepthOneSolution s = decode(ilp_assignment(q, model, read), model);
    if (!s.feasible || s.conflict) continue;
    if (options.exclude_constant &&
        reduces_to_constant(s.kind, s.literals.size(), s.k)) {
      continue;
    }
    score_solution(s, X, y, w, options.lambda);
    if (!best || s.objective < best->objective) best = std::move(s);
  }
  if (best) return *best;
  DepthOneSolution fallback = decode(ilp_assignment(q, model, result.best_read()), model);
  score_solution(fallback, X, y, w, options.lambda);
  fallback.feasible = false;
  return fallback;
}

DepthOneBackend parse_backend(std::string_view name) {
  if (name == "oracle") return DepthOneBackend::Oracle;
  if (name == "qubo") return DepthOneBackend::Qubo;
  throw UsageError("unknown backend '" + std::string(name) + "' (expected oracle or qubo)");
}

DepthOneSolution fit_depth_one(const BitMatrix& X, const BitVector& y,
                               const DepthOneFit& fit) {
  const BitMatrix* data = &X;
  const BitVector* labels = &y;
  BitMatrix sub_x;
  BitVector sub_y;
  if (X.rows() > fit.max_rows) {
    std::vector<std::size_t> all(X.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto rows = stratified_subsample(y, all, fit.max_rows, fit.seed);
    sub_x = X.select_rows(rows);
    sub_y = y.select(rows);
    data = &sub_x;
    labels = &sub_y;
  }
  if (fit.backend == DepthOneBackend::Oracle) {
    return brute_force_depth_one(*data, *labels, fit.problem);
  }
  QuboBackendOptions qubo = fit.qubo;
  qubo.anneal.seed = fit.seed;
  return solve_depth_one_qubo(*data, *labels, fit.problem, qubo);
}

namespace {

std::size_t bits(long range) {
  if (range <= 0) return 0;
  std::size_t b = 0;
  while ((1L << b) - 1 < range) ++b;
  return b;
}

}  // namespace

std::size_t count_qubo_variables(std::size_t m, std::size_t n,
                                 std::size_t n_positive, std::size_t max_literals,
                                 OpKind kind, QuboMode mode) {
  if (max_literals < 1 || max_literals > m) {
    throw UsageError("count_qubo_variables needs 1 <= max_literals <= m");
  }
  if (n_positive > n) throw UsageError("more positives than samples");
  const long mp = static_cast<long>(max_literals);
  const std::size_t nn = n - n_positive;
  const std::size_t K = bits(mp);
  const bool eta = mode == QuboMode::WithEta;
  switch (kind) {
    case OpKind::Or:
    case OpKind::And: {
      if (eta) return 2 * m + n + K * (n + 1);
      // The one-sided sample rows keep a slack of range m'-1.
      const std::size_t slack_rows = kind == OpKind::Or ? n_positive : nn;
      return 2 * m + bits(mp - 1) * slack_rows + K;
    }
    case OpKind::AtLeast:
    case OpKind::AtMost:
      if (eta) return 2 * m + n + K + n * bits(2 * mp) + 2 * K;
      return 2 * m + K + n_positive * bits(mp) + nn * bits(mp - 1) + 2 * K;
    case OpKind::Choose:
      if (eta) {
        return 2 * m + n + nn + K + 2 * n_positive * bits(2 * mp) +
               2 * nn * bits(3 * mp + 1) + 2 * K;
      }
      return 2 * m + nn + K + nn * bits(mp - 1) + 2 * K;
  }
  return 0;
}

boost::multiprecision::cpp_int count_feasible(std::size_t m, std::size_t max_literals) {
  using boost::multiprecision::cpp_int;
  cpp_int total = 0;
  cpp_int binom = 1;
  const std::size_t top = 2 * m;
  for (std::size_t l = 0; l <= max_literals && l <= top; ++l) {
    if (l > 0) binom = binom * (top - l + 1) / l;
    total += binom;
  }
  return total;
}

}  // namespace boolrule
