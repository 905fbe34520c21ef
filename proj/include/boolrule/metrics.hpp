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

#ifndef BOOLRULE_METRICS_HPP_
#define BOOLRULE_METRICS_HPP_

#include <cstddef>
#include <string_view>

#include "boolrule/bits.hpp"
#include "boolrule/formula.hpp"

namespace boolrule {

enum class MetricKind { BalancedAccuracy, Accuracy };

MetricKind parse_metric(std::string_view name);
std::string_view metric_name(MetricKind metric);

struct Confusion {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;

  std::size_t positives() const { return tp + fn; }
  std::size_t negatives() const { return tn + fp; }
  std::size_t total() const { return tp + fn + tn + fp; }
};

Confusion confusion(const BitVector& predictions, const BitVector& labels);

// Mean of the per-class recalls. A class with no samples contributes a
// recall of 1.
double balanced_accuracy(const Confusion& c);
double accuracy(const Confusion& c);
double score(const Confusion& c, MetricKind metric);

// Throws DataError on an empty dataset or mismatched lengths.
double score(const BitVector& predictions, const BitVector& labels,
             MetricKind metric);
double score(const Formula& f, const BitMatrix& X, const BitVector& labels,
             MetricKind metric);

// S - lambda * C, the quantity every solver maximizes.
inline double objective(double score_value, std::size_t complexity_value,
                        double lambda) {
  return score_value - lambda * static_cast<double>(complexity_value);
}

struct ClassWeights {
  double positive = 1.0;
  double negative = 1.0;
};

// w_P = n / (2 n_P), w_N = n / (2 n_N). Throws DataError if a class is empty.
ClassWeights class_weights(const BitVector& labels);

// w_P * FN + w_N * FP.
double weighted_error(const Confusion& c, const ClassWeights& w);

}  // namespace boolrule

#endif  // BOOLRULE_METRICS_HPP_
