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

#ifndef BOOLRULE_HARNESS_HPP_
#define BOOLRULE_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boolrule/data.hpp"
#include "boolrule/depth_one.hpp"
#include "boolrule/local_solver.hpp"
#include "boolrule/nonlocal.hpp"
#include "json.hpp"

namespace boolrule {

enum class ClassifierKind { MostFrequent, SingleFeature, DepthOne, Local, NonLocal };

ClassifierKind parse_classifier(std::string_view name);
std::string_view classifier_name(ClassifierKind kind);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::Local;
  SolverConfig solver;       // local and nonlocal
  NonLocalConfig nonlocal;   // nonlocal only
  DepthOneFit depth_one;     // depth-one only
};

// Fits one classifier on (X, y). The seed replaces every seed in the spec.
Formula fit_classifier(const ClassifierSpec& spec, const BitMatrix& X,
                       const BitVector& y, MetricKind metric, std::uint64_t seed);

struct RunConfig {
  std::string dataset;  // .csv (binarized on load) or .xbf
  std::optional<std::string> descriptor;
  std::string label_column;
  std::optional<std::string> positive_label;
  int num_bins = 10;

  double outer_test_fraction = 0.2;
  int inner_splits = 32;
  double inner_test_fraction = 0.3;

  ClassifierSpec classifier;
  std::uint64_t seed = 0;
  int workers = 1;
  MetricKind metric = MetricKind::BalancedAccuracy;

  // Sweep knob: max_complexity, max_literals, lambda or train_fraction.
  std::string sweep_knob = "max_complexity";
  std::vector<double> sweep_values;
};

nlohmann::json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

Dataset load_run_dataset(const RunConfig& config);

struct SplitRecord {
  int split = 0;  // -1 for the holdout fit
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  double train_score = 0.0;
  double test_score = 0.0;
  std::size_t complexity = 0;
  std::string rule;
  double seconds = 0.0;
};

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

Summary summarize(const std::vector<double>& values);

struct CrossvalResult {
  std::vector<SplitRecord> splits;
  SplitRecord holdout;
  std::vector<std::size_t> holdout_rows;
  Summary train;
  Summary test;
  Summary complexity;
};

// Outer stratified holdout, then inner stratified splits of the remainder.
// Split and fit seeds derive from config.seed; splits run on config.workers
// threads and are gathered by index.
CrossvalResult crossval(const Dataset& data, const RunConfig& config);

// Schema-versioned JSON with floats at 6 decimals. Wall-clock time is left
// out so reruns are byte-identical.
nlohmann::json crossval_json(const CrossvalResult& result, const RunConfig& config,
                             const Dataset& data);

struct SweepRow {
  std::string classifier;
  std::string knob;
  double value = 0.0;
  int splits = 0;
  Summary train;
  Summary test;
  Summary complexity;
  double seconds = 0.0;
};

std::vector<SweepRow> sweep(const Dataset& data, const RunConfig& config);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     bool timing = true);
nlohmann::json sweep_json(const std::vector<SweepRow>& rows, const RunConfig& config,
                          bool timing = true);

// Rounds to 6 decimals for serialization.
double round6(double v);

}  // namespace boolrule

#endif  // BOOLRULE_HARNESS_HPP_
