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

#ifndef BOOLRULE_LOCAL_SOLVER_HPP_
#define BOOLRULE_LOCAL_SOLVER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "boolrule/bits.hpp"
#include "boolrule/formula.hpp"
#include "boolrule/metrics.hpp"
#include "boolrule/rng.hpp"

namespace boolrule {

struct SolverConfig {
  int num_starts = 20;
  int num_iterations = 2000;
  double t_high = 0.2;
  double t_low = 1e-6;
  std::optional<std::size_t> max_complexity;
  double lambda = 0.0;
  MetricKind metric = MetricKind::BalancedAccuracy;
  std::uint64_t seed = 0;
  int workers = 1;

  // Throws UsageError when a field is out of range.
  void check() const;
};

enum class MoveKind {
  RemoveLiteral,
  ExpandLiteral,
  SwapLiteral,
  RemoveOperator,
  AddLiteral,
  SwapOperator,
  SpliceSubtree,  // non-local replacement of a whole subtree
};

std::string_view move_name(MoveKind kind);

struct Move {
  MoveKind kind = MoveKind::SwapLiteral;
  NodePath target;
  Literal literal;              // SwapLiteral replacement, AddLiteral addition
  OpKind op_kind = OpKind::And;  // ExpandLiteral new operator, SwapOperator
  int k = 0;
  std::size_t sibling = 0;      // ExpandLiteral: child index of the sibling
  std::optional<Node> subtree;  // SpliceSubtree
};

// Depth-one rule with a uniform number of literals in
// [2, min(C'-1, num_features)] (capped at 10 when C' is unset).
Formula generate_initial_rule(std::size_t num_features,
                              std::optional<std::size_t> max_complexity,
                              Rng& rng);

// Rejection sampler over the six local move types. The two move-type
// counters (one for literals, one for operators) advance on every attempt.
class LocalMoveProposer {
 public:
  LocalMoveProposer(std::size_t num_features,
                    std::optional<std::size_t> max_complexity)
      : num_features_(num_features), max_complexity_(max_complexity) {}

  Move propose(const Formula& rule, Rng& rng);

  // Draws one concrete move of `kind` at `target`, or nothing if that move
  // type is not applicable there.
  std::optional<Move> draw(const Formula& rule, const NodePath& target,
                           MoveKind kind, Rng& rng) const;

 private:
  std::size_t num_features_;
  std::optional<std::size_t> max_complexity_;
  std::size_t literal_counter_ = 0;
  std::size_t operator_counter_ = 0;
};

// Returns the rule with `move` applied. Throws UsageError if the move does
// not fit the rule.
Formula apply_move(const Formula& rule, const Move& move);

bool metropolis_accept(double dE, double T, Rng& rng);

double temperature(int iteration, const SolverConfig& config);

struct TraceRow {
  int start = 0;
  int iteration = 0;
  double temperature = 0.0;
  double objective = 0.0;  // current objective after the accept decision
  double proposed = 0.0;
  double best = 0.0;       // running best of this start
  bool accepted = false;
  bool nonlocal = false;
  std::size_t subproblem_size = 0;
  double solve_seconds = 0.0;
};

struct Trace {
  std::vector<TraceRow> rows;
  std::vector<double> start_best;
  std::vector<std::string> start_best_rule;
};

void write_trace_csv(std::ostream& out, const Trace& trace);

struct SolveResult {
  Formula best = Formula::zero();
  double objective = 0.0;
  Trace trace;
};

// Hooks that turn the plain annealer into the non-local variant.
struct NonLocalHook {
  int burn_in = 0;
  int patience = 10;
  struct Proposal {
    std::optional<Move> move;
    std::size_t subproblem_size = 0;
    double seconds = 0.0;
  };
  std::function<Proposal(const Formula& rule, Rng& rng)> propose;
};

// Shared multi-start annealing loop. With no hook every proposal is local.
SolveResult anneal_rules(const BitMatrix& X, const BitVector& y,
                         const SolverConfig& config,
                         const NonLocalHook* hook = nullptr);

inline SolveResult solve(const BitMatrix& X, const BitVector& y,
                         const SolverConfig& config) {
  return anneal_rules(X, y, config, nullptr);
}

}  // namespace boolrule

#endif  // BOOLRULE_LOCAL_SOLVER_HPP_
