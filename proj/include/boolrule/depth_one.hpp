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

#ifndef BOOLRULE_DEPTH_ONE_HPP_
#define BOOLRULE_DEPTH_ONE_HPP_

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "boolrule/bits.hpp"
#include "boolrule/formula.hpp"
#include "boolrule/ilp.hpp"
#include "boolrule/metrics.hpp"
#include "boolrule/qubo.hpp"

namespace boolrule {

// A rule with one operator over literals: the unit every depth-one solver
// returns.
struct DepthOneSolution {
  OpKind kind = OpKind::Or;
  int k = 0;
  std::vector<Literal> literals;  // sorted
  double objective = 0.0;         // weighted error + lambda * literal count
  double weighted_error = 0.0;
  bool feasible = true;   // cardinality and parameter bounds hold
  bool conflict = false;  // some feature chosen in both polarities

  // Zero or one literal reduce to a constant or a literal; otherwise the
  // operator sits at the root.
  Formula formula() const;
};

struct DepthOneOptions {
  OpKind kind = OpKind::Or;
  std::size_t max_literals = 1;
  std::size_t min_literals = 0;
  double lambda = 0.0;
  std::optional<ClassWeights> weights;  // defaults to balanced weights of y
  double max_evaluations = 1e8;
  // Reject solutions that reduce to a constant rule.
  bool exclude_constant = false;
};

// Number of (literal set, k) pairs the oracle visits.
double oracle_evaluations(std::size_t num_features, const DepthOneOptions& options);

// Exact optimum by enumeration over literal sets of distinct features and
// every valid k. Ties go to fewer literals, then the lexicographically
// smallest literal list, then the smallest k. Throws SolverLimitError when
// the enumeration would exceed options.max_evaluations.
DepthOneSolution brute_force_depth_one(const BitMatrix& X, const BitVector& y,
                                       const DepthOneOptions& options);

// Literal set and k read from an ILP assignment, flags set; objective and
// error are left for score_solution.
DepthOneSolution decode(const std::vector<int>& assignment, const IlpModel& model);

// Fills weighted_error and objective from the data.
void score_solution(DepthOneSolution& solution, const BitMatrix& X,
                    const BitVector& y, const ClassWeights& weights, double lambda);

struct QuboBackendOptions {
  QuboMode mode = QuboMode::WithoutEta;
  QuboPenalties penalties;
  AnnealConfig anneal;
};

// Builds the ILP, compiles it, anneals, and decodes every read; returns the
// best feasible conflict-free read by true objective (or the lowest-energy
// read flagged infeasible if none qualifies).
DepthOneSolution solve_depth_one_qubo(const BitMatrix& X, const BitVector& y,
                                      const DepthOneOptions& options,
                                      const QuboBackendOptions& qubo = {});

enum class DepthOneBackend { Oracle, Qubo };

DepthOneBackend parse_backend(std::string_view name);

struct DepthOneFit {
  DepthOneOptions problem;
  DepthOneBackend backend = DepthOneBackend::Oracle;
  QuboBackendOptions qubo;
  std::size_t max_rows = 3000;
  std::uint64_t seed = 0;
};

// Stratified subsample to max_rows, then solve with the chosen backend.
DepthOneSolution fit_depth_one(const BitMatrix& X, const BitVector& y,
                               const DepthOneFit& fit);

// Size of the compiled QUBO for the given problem shape. Requires
// max_literals <= m.
std::size_t count_qubo_variables(std::size_t m, std::size_t n,
                                 std::size_t n_positive, std::size_t max_literals,
                                 OpKind kind, QuboMode mode);

// sum_{l=0}^{m'} C(2m, l).
boost::multiprecision::cpp_int count_feasible(std::size_t m, std::size_t max_literals);

}  // namespace boolrule

#endif  // BOOLRULE_DEPTH_ONE_HPP_
