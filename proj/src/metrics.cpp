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

#include "boolrule/metrics.hpp"

#include <string>

#include "boolrule/error.hpp"

namespace boolrule {

MetricKind parse_metric(std::string_view name) {
  if (name == "balanced-accuracy" || name == "balanced_accuracy") {
    return MetricKind::BalancedAccuracy;
  }
  if (name == "accuracy") return MetricKind::Accuracy;
  throw UsageError("unknown metric '" + std::string(name) + "'");
}

std::string_view metric_name(MetricKind metric) {
  return metric == MetricKind::Accuracy ? "accuracy" : "balanced-accuracy";
}

Confusion confusion(const BitVector& predictions, const BitVector& labels) {
  if (predictions.size() != labels.size()) {
    throw DataError("prediction and label lengths differ");
  }
  Confusion c;
  const std::size_t positives = labels.count();
  c.tp = count_and(predictions, labels);
  c.fn = positives - c.tp;
  const std::size_t predicted_positive = predictions.count();
  c.fp = predicted_positive - c.tp;
  c.tn = labels.size() - positives - c.fp;
  return c;
}

double balanced_accuracy(const Confusion& c) {
  const double recall_p =
      c.positives() == 0 ? 1.0
                         : static_cast<double>(c.tp) / static_cast<double>(c.positives());
  const double recall_n =
      c.negatives() == 0 ? 1.0
                         : static_cast<double>(c.tn) / static_cast<double>(c.negatives());
  return 0.5 * (recall_p + recall_n);
}

double accuracy(const Confusion& c) {
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double score(const Confusion& c, MetricKind metric) {
  if (c.total() == 0) throw DataError("cannot score an empty dataset");
  return metric == MetricKind::Accuracy ? accuracy(c) : balanced_accuracy(c);
}

double score(const BitVector& predictions, const BitVector& labels,
             MetricKind metric) {
  return score(confusion(predictions, labels), metric);
}

double score(const Formula& f, const BitMatrix& X, const BitVector& labels,
             MetricKind metric) {
  if (X.rows() != labels.size()) {
    throw DataError("matrix has " + std::to_string(X.rows()) + " rows but " +
                    std::to_string(labels.size()) + " labels");
  }
  return score(evaluate(f, X), labels, metric);
}

ClassWeights class_weights(const BitVector& labels) {
  const std::size_t n = labels.size();
  const std::size_t n_p = labels.count();
  const std::size_t n_n = n - n_p;
  if (n_p == 0 || n_n == 0) {
    throw DataError("class weights need both classes present");
  }
  return {static_cast<double>(n) / (2.0 * static_cast<double>(n_p)),
          static_cast<double>(n) / (2.0 * static_cast<double>(n_n))};
}

double weighted_error(const Confusion& c, const ClassWeights& w) {
  return w.positive * static_cast<double>(c.fn) +
         w.negative * static_cast<double>(c.fp);
}

}  // namespace boolrule
