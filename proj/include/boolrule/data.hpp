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

#ifndef BOOLRULE_DATA_HPP_
#define BOOLRULE_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boolrule/bits.hpp"
#include "boolrule/formula.hpp"
#include "json.hpp"

namespace boolrule {

enum class ColumnKind { Numeric, Categorical, Binary };

struct RawColumn {
  std::string name;
  ColumnKind kind = ColumnKind::Categorical;
  std::vector<std::string> text;  // original cells
  std::vector<double> numbers;    // filled for Numeric and Binary columns
};

// A rectangular table of feature columns plus a binary label, after rows
// with missing cells have been dropped.
struct RawTable {
  std::vector<RawColumn> columns;
  BitVector labels;
  std::string label_column;
  std::string positive_label;
  std::size_t dropped_rows = 0;

  std::size_t rows() const { return labels.size(); }
};

struct CsvOptions {
  std::string label_column;
  // When unset the label column must already be 0/1 (1 is positive).
  std::optional<std::string> positive_label;
  std::vector<std::string> missing_markers = {"", "?", "NA", "NaN", "nan",
                                              "null", "NULL"};
};

RawTable read_csv(std::istream& in, const CsvOptions& options);
RawTable load_csv(const std::filesystem::path& path, const CsvOptions& options);

enum class FeatureKind { UpBin, OneHot, Passthrough };

// Provenance of one binarized column.
struct FeatureDescriptor {
  std::string name;
  std::string source;
  FeatureKind kind = FeatureKind::Passthrough;
  double threshold = 0.0;  // UpBin: bit is 1 where value > threshold
  std::string category;    // OneHot: bit is 1 where cell == category
};

struct BinarizeWarning {
  std::string column;
  std::string message;
};

struct BinarizedMatrix {
  BitMatrix bits;
  std::vector<FeatureDescriptor> features;
  std::vector<BinarizeWarning> warnings;

  FeatureNames names() const;
};

// Numeric columns with more than num_bins distinct values get one up-bin per
// empirical quantile at levels i/(num_bins+1); other numeric and categorical
// columns are one-hot encoded; 0/1 columns pass through; constant columns
// are dropped with a warning.
BinarizedMatrix binarize(const RawTable& raw, int num_bins = 10);

// Empirical quantile with linear interpolation between order statistics.
double quantile(std::span<const double> sorted, double level);

// Binarized features plus labels, the unit persisted by the CLI.
struct Dataset {
  BitMatrix X;
  BitVector y;
  std::vector<FeatureDescriptor> features;
  nlohmann::json provenance = nlohmann::json::object();

  FeatureNames names() const;
};

Dataset make_dataset(const RawTable& raw, const BinarizedMatrix& binarized);

// "XBF1" | rows (u64 LE) | cols (u64 LE) | row-major packed u64 LE words,
// ceil(cols/64) words per row.
void write_xbf(std::ostream& out, const BitMatrix& m);
BitMatrix read_xbf(std::istream& in);

nlohmann::json descriptor_json(const Dataset& d);
// Writes <prefix>.xbf and <prefix>.json.
void save_dataset(const Dataset& d, const std::filesystem::path& prefix);
// Reads a matrix file and its JSON sidecar (defaults to the .json next to it).
Dataset load_dataset(const std::filesystem::path& matrix_path,
                     std::optional<std::filesystem::path> descriptor = {});

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Stratified shuffle split of `rows` (all rows when empty). Each class sends
// round(n_c * test_fraction) samples to the test side, clamped so both sides
// keep at least one. Both index lists come back sorted.
Split stratified_split(const BitVector& y, double test_fraction,
                       std::uint64_t seed,
                       std::span<const std::size_t> rows = {});

// Stratified random subset of at most max_rows of `rows`, sorted.
std::vector<std::size_t> stratified_subsample(const BitVector& y,
                                              std::span<const std::size_t> rows,
                                              std::size_t max_rows,
                                              std::uint64_t seed);

}  // namespace boolrule

#endif  // BOOLRULE_DATA_HPP_
