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

#ifndef BOOLRULE_NONLOCAL_HPP_
#define BOOLRULE_NONLOCAL_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "boolrule/bits.hpp"
#include "boolrule/depth_one.hpp"
#include "boolrule/formula.hpp"
#include "boolrule/local_solver.hpp"
#include "boolrule/rng.hpp"

namespace boolrule {

// Rows whose rule output depends on the target subtree, with the subtree
// value that would classify each of them correctly.
struct EffectiveSubproblem {
  BitMatrix X;
  BitVector y;
  std::size_t predetermined = 0;
  std::vector<std::size_t> rows;  // indices into the full slice, ascending
};

EffectiveSubproblem effective_subproblem(const Formula& rule, const NodePath& target,
                                         const BitMatrix& X, const BitVector& y,
                                         std::size_t max_samples, Rng& rng);

struct SubtreeBudget {
  std::size_t max_literals = 0;
  std::size_t min_literals = 0;
  bool proposable = false;
};

// B = C' - (C(R) - C(T0)); one slot of B goes to the new operator.
SubtreeBudget subtree_budget(const Formula& rule, const NodePath& target,
                             std::size_t max_complexity);

struct NonLocalConfig {
  std::optional<int> burn_in;  // defaults to num_iterations / 3
  int patience = 10;
  std::size_t max_samples = 100;
  std::vector<OpKind> operators = {kAllOpKinds[0], kAllOpKinds[1], kAllOpKinds[2],
                                   kAllOpKinds[3], kAllOpKinds[4]};
  DepthOneBackend backend = DepthOneBackend::Oracle;
  double oracle_cap = 1e6;  // above this the QUBO backend takes over
  QuboBackendOptions qubo;
  double timeout_seconds = 1.0;

  void check() const;
};

// Everything a test needs to re-check one proposal.
struct NonLocalRecord {
  NodePath target;
  OpKind kind = OpKind::Or;
  SubtreeBudget budget;
  EffectiveSubproblem subproblem;
  std::vector<std::size_t> candidates;  // columns offered to the solver
  DepthOneOptions options;
  DepthOneSolution solution;            // in candidate-column indices
  bool used_oracle = true;
};

using NonLocalObserver = std::function<void(const NonLocalRecord&)>;

NonLocalHook::Proposal propose_non_local_move(const Formula& rule, const BitMatrix& X,
                                              const BitVector& y,
                                              const SolverConfig& solver,
                                              const NonLocalConfig& config, Rng& rng,
                                              const NonLocalObserver& observer = {});

// Requires solver.max_complexity.
SolveResult solve_with_nonlocal(const BitMatrix& X, const BitVector& y,
                                const SolverConfig& solver,
                                const NonLocalConfig& config,
                                const NonLocalObserver& observer = {});

}  // namespace boolrule

#endif  // BOOLRULE_NONLOCAL_HPP_
