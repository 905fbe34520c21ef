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

#ifndef BOOLRULE_QUBO_HPP_
#define BOOLRULE_QUBO_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boolrule/ilp.hpp"

namespace boolrule {

enum class QuboMode { WithEta, WithoutEta };

QuboMode parse_qubo_mode(std::string_view name);
std::string_view qubo_mode_name(QuboMode mode);

enum class QuboRole { B, NB, EtaP, EtaN, Q, KBit, SlackBit };

struct QuboVar {
  std::string name;
  QuboRole role = QuboRole::B;
  std::size_t index = 0;   // feature, sample row, or bit position
  double value = 1.0;      // weight of the bit inside k or a slack integer
  std::optional<std::size_t> constraint;  // owning penalty, for slack bits
};

// One constraint l <= a.x <= u turned into P * (a.x - l - s)^2 (side = +1)
// or P * (a.x - u + s)^2 (side = -1), or P * (a.x - l)^2 when l == u.
struct Penalty {
  std::string name;
  ConstraintRole role = ConstraintRole::Cardinality;
  std::vector<LinearTerm> terms;  // over QUBO variables, slack excluded
  std::vector<std::size_t> slack;
  double lower = 0.0;
  double upper = 0.0;
  int side = 0;
  double weight = 1.0;

  double bound() const { return side < 0 ? upper : lower; }
};

struct QuboEntry {
  std::size_t i = 0;
  std::size_t j = 0;  // i <= j
  double value = 0.0;
};

// Energy(x) = offset + sum over entries of value * x_i * x_j.
struct QuboModel {
  std::size_t num_vars = 0;
  double offset = 0.0;
  std::vector<QuboEntry> entries;  // sorted by (i, j), no duplicates

  // Present only for models compiled from an ILP.
  QuboMode mode = QuboMode::WithEta;
  std::vector<QuboVar> vars;
  std::vector<LinearTerm> objective;
  std::vector<Penalty> penalties;
  double l1 = 1.0;
  double l2 = 1.0;

  double energy(std::span<const std::uint8_t> x) const;
  // Objective plus every penalty, evaluated term by term.
  double penalized_value(std::span<const std::uint8_t> x) const;
};

struct QuboPenalties {
  double l1 = 1.0;
  std::optional<double> l2;  // default 100 * l1 * max(w_P, w_N) * n
};

// Throws UsageError when a constraint cannot be satisfied within the
// analytic range of its left-hand side.
QuboModel ilp_to_qubo(const IlpModel& model, QuboMode mode,
                      const QuboPenalties& penalties = {});

// Builds a model from raw coefficients, summing duplicates; (i, j) and
// (j, i) refer to the same entry.
QuboModel make_qubo(std::size_t num_vars, std::vector<QuboEntry> entries,
                    double offset = 0.0);

// Header line "N offset" then one "i j value" line per entry.
void write_qubo(std::ostream& out, const QuboModel& q);

struct AnnealConfig {
  std::size_t num_reads = 100;
  std::size_t num_sweeps = 2000;
  std::uint64_t seed = 0;
  std::optional<std::pair<double, double>> beta_range;
  std::optional<double> timeout_seconds;
};

struct AnnealResult {
  std::vector<std::vector<std::uint8_t>> reads;
  std::vector<double> energies;
  std::size_t best = 0;
  bool timed_out = false;

  const std::vector<std::uint8_t>& best_read() const { return reads[best]; }
  double best_energy() const { return energies[best]; }
};

// Single-flip Metropolis sweeps over a geometric inverse-temperature ladder.
// Each read starts from a random state with its own RNG stream. On timeout
// the reads finished so far are returned (at least one).
AnnealResult qubo_anneal(const QuboModel& q, const AnnealConfig& config = {});

// Default (hot, cold) inverse temperatures: hot flips the largest possible
// energy change with probability 1/2, cold flips the smallest nonzero
// coefficient with probability 1/100.
std::pair<double, double> default_beta_range(const QuboModel& q);

// Values of the ILP variables encoded by a QUBO assignment.
std::vector<int> ilp_assignment(const QuboModel& q, const IlpModel& model,
                                std::span<const std::uint8_t> x);

}  // namespace boolrule

#endif  // BOOLRULE_QUBO_HPP_
