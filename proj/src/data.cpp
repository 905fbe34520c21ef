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

#include "boolrule/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "boolrule/error.hpp"
#include "boolrule/rng.hpp"

namespace boolrule {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  if (quoted) throw DataError("unterminated quote in CSV line");
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::optional<double> to_number(const std::string& s) {
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::string format_threshold(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

RawTable read_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("CSV input is empty");
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  const auto label_it =
      std::find(header.begin(), header.end(), options.label_column);
  if (label_it == header.end()) {
    throw DataError("label column '" + options.label_column + "' not found");
  }
  const std::size_t label_idx =
      static_cast<std::size_t>(label_it - header.begin());
  const std::set<std::string> missing(options.missing_markers.begin(),
                                      options.missing_markers.end());

  std::vector<std::vector<std::string>> rows;
  std::size_t dropped = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError("CSV line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    }
    bool has_missing = false;
    for (auto& c : cells) {
      c = trim(c);
      if (missing.count(c)) has_missing = true;
    }
    if (has_missing) {
      ++dropped;
      continue;
    }
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw DataError("no complete rows in CSV input");

  std::set<std::string> label_values;
  for (const auto& r : rows) label_values.insert(r[label_idx]);
  if (label_values.size() > 2) {
    throw DataError("label column '" + options.label_column + "' has " +
                    std::to_string(label_values.size()) +
                    " distinct values; expected a binary label");
  }
  std::string positive;
  if (options.positive_label) {
    positive = *options.positive_label;
    if (!label_values.count(positive)) {
      throw DataError("positive label '" + positive +
                      "' does not occur in column '" + options.label_column + "'");
    }
  } else {
    for (const auto& v : label_values) {
      if (v != "0" && v != "1") {
        throw DataError("label values are not 0/1; pass a positive label");
      }
    }
    positive = "1";
  }

  RawTable table;
  table.label_column = options.label_column;
  table.positive_label = positive;
  table.dropped_rows = dropped;
  table.labels = BitVector(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r][label_idx] == positive) table.labels.set(r);
  }

  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == label_idx) continue;
    RawColumn col;
    col.name = header[c];
    col.text.reserve(rows.size());
    bool numeric = true;
    for (const auto& r : rows) {
      col.text.push_back(r[c]);
      if (numeric) {
        if (auto v = to_number(r[c])) {
          col.numbers.push_back(*v);
        } else {
          numeric = false;
        }
      }
    }
    if (numeric) {
      const bool binary = std::all_of(col.numbers.begin(), col.numbers.end(),
                                      [](double v) { return v == 0.0 || v == 1.0; });
      col.kind = binary ? ColumnKind::Binary : ColumnKind::Numeric;
    } else {
      col.numbers.clear();
      col.kind = ColumnKind::Categorical;
    }
    table.columns.push_back(std::move(col));
  }
  return table;
}

RawTable load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  return read_csv(in, options);
}

double quantile(std::span<const double> sorted, double level) {
  if (sorted.empty()) throw DataError("quantile of an empty column");
  const double h = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

FeatureNames BinarizedMatrix::names() const {
  FeatureNames out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.name);
  return out;
}

BinarizedMatrix binarize(const RawTable& raw, int num_bins) {
  if (num_bins < 2) throw UsageError("num_bins must be at least 2");
  const std::size_t n = raw.rows();
  BinarizedMatrix out;
  std::vector<BitVector> columns;

  for (const RawColumn& col : raw.columns) {
    const std::set<std::string> distinct_text(col.text.begin(), col.text.end());
    std::set<double> distinct_numbers(col.numbers.begin(), col.numbers.end());
    const std::size_t distinct = col.kind == ColumnKind::Categorical
                                     ? distinct_text.size()
                                     : distinct_numbers.size();
    if (distinct <= 1) {
      out.warnings.push_back({col.name, "constant column; no features emitted"});
      continue;
    }

    if (col.kind == ColumnKind::Binary) {
      BitVector bits(n);
      for (std::size_t r = 0; r < n; ++r) bits.set(r, col.numbers[r] == 1.0);
      columns.push_back(std::move(bits));
      out.features.push_back({col.name, col.name, FeatureKind::Passthrough, 0.0, ""});
      continue;
    }

    if (col.kind == ColumnKind::Numeric &&
        distinct > static_cast<std::size_t>(num_bins)) {
      std::vector<double> sorted = col.numbers;
      std::sort(sorted.begin(), sorted.end());
      std::vector<double> thresholds;
      for (int i = 1; i <= num_bins; ++i) {
        const double t = quantile(sorted, static_cast<double>(i) / (num_bins + 1));
        if (thresholds.empty() || t != thresholds.back()) thresholds.push_back(t);
      }
      for (double t : thresholds) {
        BitVector bits(n);
        for (std::size_t r = 0; r < n; ++r) bits.set(r, col.numbers[r] > t);
        columns.push_back(std::move(bits));
        out.features.push_back(
            {col.name + " > " + format_threshold(t), col.name, FeatureKind::UpBin, t, ""});
      }
      continue;
    }

    // One-hot: categorical, or numeric with few distinct values (ordered
    // numerically in that case).
    std::vector<std::string> categories;
    if (col.kind == ColumnKind::Numeric) {
      std::map<double, std::string> by_value;
      for (std::size_t r = 0; r < n; ++r) by_value.emplace(col.numbers[r], col.text[r]);
      for (auto& [v, t] : by_value) categories.push_back(t);
    } else {
      categories.assign(distinct_text.begin(), distinct_text.end());
    }
    for (const auto& cat : categories) {
      BitVector bits(n);
      if (col.kind == ColumnKind::Numeric) {
        const double v = *to_number(cat);
        for (std::size_t r = 0; r < n; ++r) bits.set(r, col.numbers[r] == v);
      } else {
        for (std::size_t r = 0; r < n; ++r) bits.set(r, col.text[r] == cat);
      }
      columns.push_back(std::move(bits));
      out.features.push_back(
          {col.name + " == " + cat, col.name, FeatureKind::OneHot, 0.0, cat});
    }
  }

  out.bits = BitMatrix(n, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) out.bits.column(c) = std::move(columns[c]);
  return out;
}

FeatureNames Dataset::names() const {
  FeatureNames out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.name);
  return out;
}

Dataset make_dataset(const RawTable& raw, const BinarizedMatrix& binarized) {
  Dataset d;
  d.X = binarized.bits;
  d.y = raw.labels;
  d.features = binarized.features;
  d.provenance = {{"label_column", raw.label_column},
                  {"positive_label", raw.positive_label},
                  {"dropped_rows", raw.dropped_rows}};
  auto warnings = nlohmann::json::array();
  for (const auto& w : binarized.warnings) {
    warnings.push_back({{"column", w.column}, {"message", w.message}});
  }
  d.provenance["warnings"] = std::move(warnings);
  return d;
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw DataError("truncated XBF1 file");
  }
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

const char* kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::UpBin:
      return "up-bin";
    case FeatureKind::OneHot:
      return "one-hot";
    case FeatureKind::Passthrough:
      return "passthrough";
  }
  return "?";
}

FeatureKind kind_from_name(const std::string& s) {
  if (s == "up-bin") return FeatureKind::UpBin;
  if (s == "one-hot") return FeatureKind::OneHot;
  if (s == "passthrough") return FeatureKind::Passthrough;
  throw DataError("unknown feature kind '" + s + "'");
}

}  // namespace

void write_xbf(std::ostream& out, const BitMatrix& m) {
  out.write("XBF1", 4);
  put_u64(out, m.rows());
  put_u64(out, m.cols());
  const std::size_t row_words = words_for(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t w = 0; w < row_words; ++w) {
      Word word = 0;
      for (std::size_t b = 0; b < kWordBits; ++b) {
        const std::size_t c = w * kWordBits + b;
        if (c < m.cols() && m.get(r, c)) word |= Word{1} << b;
      }
      put_u64(out, word);
    }
  }
}

BitMatrix read_xbf(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "XBF1") {
    throw DataError("not an XBF1 matrix file");
  }
  const std::uint64_t rows = get_u64(in);
  const std::uint64_t cols = get_u64(in);
  BitMatrix m(rows, cols);
  const std::size_t row_words = words_for(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t w = 0; w < row_words; ++w) {
      const Word word = get_u64(in);
      for (std::size_t b = 0; b < kWordBits; ++b) {
        const std::size_t c = w * kWordBits + b;
        if (c < cols && ((word >> b) & 1U)) m.set(r, c);
      }
    }
  }
  return m;
}

nlohmann::json descriptor_json(const Dataset& d) {
  nlohmann::json j;
  j["schema"] = 1;
  j["rows"] = d.X.rows();
  j["cols"] = d.X.cols();
  auto feats = nlohmann::json::array();
  for (const auto& f : d.features) {
    nlohmann::json fj = {{"name", f.name}, {"source", f.source}, {"kind", kind_name(f.kind)}};
    if (f.kind == FeatureKind::UpBin) fj["threshold"] = f.threshold;
    if (f.kind == FeatureKind::OneHot) fj["category"] = f.category;
    feats.push_back(std::move(fj));
  }
  j["features"] = std::move(feats);
  j["labels"] = d.y.to_string();
  j["provenance"] = d.provenance;
  return j;
}

void save_dataset(const Dataset& d, const std::filesystem::path& prefix) {
  auto matrix_path = prefix;
  matrix_path += ".xbf";
  auto json_path = prefix;
  json_path += ".json";
  std::ofstream out(matrix_path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + matrix_path.string() + "'");
  write_xbf(out, d.X);
  std::ofstream js(json_path);
  if (!js) throw DataError("cannot write '" + json_path.string() + "'");
  js << descriptor_json(d).dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& matrix_path,
                     std::optional<std::filesystem::path> descriptor) {
  std::ifstream in(matrix_path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + matrix_path.string() + "'");
  Dataset d;
  d.X = read_xbf(in);
  auto json_path = descriptor.value_or(std::filesystem::path(matrix_path).replace_extension(".json"));
  std::ifstream js(json_path);
  if (!js) throw DataError("cannot read descriptor '" + json_path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(js);
    for (const auto& fj : j.at("features")) {
      FeatureDescriptor f;
      f.name = fj.at("name").get<std::string>();
      f.source = fj.value("source", f.name);
      f.kind = kind_from_name(fj.at("kind").get<std::string>());
      f.threshold = fj.value("threshold", 0.0);
      f.category = fj.value("category", std::string());
      d.features.push_back(std::move(f));
    }
    d.y = BitVector::from_string(j.at("labels").get<std::string>());
    d.provenance = j.value("provenance", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed descriptor: ") + e.what());
  }
  if (d.features.size() != d.X.cols() || d.y.size() != d.X.rows()) {
    throw DataError("descriptor does not match matrix dimensions");
  }
  return d;
}

Split stratified_split(const BitVector& y, double test_fraction,
                       std::uint64_t seed, std::span<const std::size_t> rows) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw UsageError("test fraction must lie strictly between 0 and 1");
  }
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) all[i] = i;
    rows = all;
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t r : rows) by_class[y.get(r) ? 1 : 0].push_back(r);

  Rng rng(seed);
  Split split;
  for (int cls : {0, 1}) {
    auto& members = by_class[cls];
    if (members.size() < 2) {
      throw DataError("stratified split needs at least two samples of class " +
                      std::to_string(cls) + " (found " +
                      std::to_string(members.size()) + ")");
    }
    rng.shuffle(members);
    auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(members.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    split.test.insert(split.test.end(), members.begin(), members.begin() + n_test);
    split.train.insert(split.train.end(), members.begin() + n_test, members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<std::size_t> stratified_subsample(const BitVector& y,
                                              std::span<const std::size_t> rows,
                                              std::size_t max_rows,
                                              std::uint64_t seed) {
  std::vector<std::size_t> out(rows.begin(), rows.end());
  if (out.size() <= max_rows) {
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t r : rows) by_class[y.get(r) ? 1 : 0].push_back(r);
  Rng rng(seed);
  out.clear();
  const double fraction = static_cast<double>(max_rows) / static_cast<double>(rows.size());
  std::size_t keep_pos = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(by_class[1].size())));
  if (!by_class[1].empty()) keep_pos = std::clamp<std::size_t>(keep_pos, 1, max_rows - 1);
  const std::size_t keep_neg = std::min(max_rows - keep_pos, by_class[0].size());
  keep_pos = std::min(keep_pos, by_class[1].size());
  rng.shuffle(by_class[0]);
  rng.shuffle(by_class[1]);
  out.insert(out.end(), by_class[0].begin(), by_class[0].begin() + keep_neg);
  out.insert(out.end(), by_class[1].begin(), by_class[1].begin() + keep_pos);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace boolrule
