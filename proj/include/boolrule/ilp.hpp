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

#ifndef BOOLRULE_ILP_HPP_
#define BOOLRULE_ILP_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boolrule/bits.hpp"
#include "boolrule/formula.hpp"
#include "boolrule/metrics.hpp"

namespace boolrule {

enum class VarRole { B, NB, EtaP, EtaN, Q, K };

struct IlpVar {
  std::string name;
  VarRole role = VarRole::B;
  std::size_t index = 0;  // feature for B/NB, sample row for Eta/Q
  int lower = 0;
  int upper = 1;

  bool is_integer() const { return role == VarRole::K; }
};

struct LinearTerm {
  std::size_t var = 0;
  double coef = 0.0;

  friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

enum class Sense { LessEqual, GreaterEqual, Equal };

enum class ConstraintRole {
  PositiveSample,
  NegativeSample,
  Cardinality,   // sum of literals <= m'
  KLink,         // k <= sum of literals
  MinLiterals,   // sum of literals >= min
};

struct IlpConstraint {
  std::string name;
  ConstraintRole role = ConstraintRole::Cardinality;
  std::size_t sample = 0;  // row within its class, for sample constraints
  std::vector<LinearTerm> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;

  friend bool operator==(const IlpConstraint&, const IlpConstraint&) = default;
};

// Minimize objective . x subject to the constraints, over integer variables
// within their bounds. Sample order is the row order within each class.
struct IlpModel {
  OpKind kind = OpKind::Or;
  std::size_t num_features = 0;
  std::size_t num_positive = 0;
  std::size_t num_negative = 0;
  std::size_t max_literals = 0;
  std::size_t min_literals = 0;
  double lambda = 0.0;
  ClassWeights weights;

  std::vector<IlpVar> vars;
  std::vector<LinearTerm> objective;
  std::vector<IlpConstraint> constraints;

  std::size_t b(std::size_t i) const { return i; }
  std::size_t nb(std::size_t i) const { return num_features + i; }
  std::size_t eta_p(std::size_t r) const { return 2 * num_features + r; }
  std::size_t eta_n(std::size_t r) const {
    return 2 * num_features + num_positive + r;
  }
  // Only for Choose.
  std::size_t q(std::size_t r) const {
    return 2 * num_features + num_positive + num_negative + r;
  }
  // Only for parameterized kinds; always the last variable.
  std::size_t k() const { return vars.size() - 1; }

  double objective_value(const std::vector<int>& x) const;
  // Returns the names of violated constraints (empty when feasible).
  std::vector<std::string> violations(const std::vector<int>& x) const;
};

struct IlpOptions {
  OpKind kind = OpKind::Or;
  std::size_t max_literals = 1;
  std::size_t min_literals = 0;  // no lower-bound row when 0
  double lambda = 0.0;
  std::optional<ClassWeights> weights;  // defaults to balanced weights of y
};

// Throws DataError on single-class labels and UsageError when
// max_literals < max(1, min_literals).
IlpModel build_ilp(const BitMatrix& X, const BitVector& y,
                   const IlpOptions& options);

// LP-format text with variables b_i, nb_i, etaP_r, etaN_r, q_r and k.
std::string export_lp(const IlpModel& model);

// Reads what export_lp writes back into variables, objective and constraint
// rows. The model-level metadata (kind, sizes, weights) is recovered from
// variable names and the header comment.
IlpModel parse_lp(std::string_view text);

struct IlpCheckResult {
  double objective = 0.0;
  std::vector<int> assignment;
  bool feasible = false;
};

// Exact optimum by enumerating every literal-variable and k assignment and,
// per sample, the cheapest feasible setting of that sample's own variables.
// Meant for tiny models only (4^m * (m'+1) outer combinations).
IlpCheckResult exhaustive_ilp_optimum(const IlpModel& model);

}  // namespace boolrule

#endif  // BOOLRULE_ILP_HPP_
