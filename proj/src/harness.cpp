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

#include "boolrule/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <algorithm>
#include <ostream>
#include <thread>

#include "boolrule/error.hpp"
#include "boolrule/rng.hpp"

namespace boolrule {

ClassifierKind parse_classifier(std::string_view name) {
  if (name == "most-frequent") return ClassifierKind::MostFrequent;
  if (name == "single-feature") return ClassifierKind::SingleFeature;
  if (name == "depth-one") return ClassifierKind::DepthOne;
  if (name == "local") return ClassifierKind::Local;
  if (name == "nonlocal") return ClassifierKind::NonLocal;
  throw UsageError("unknown classifier '" + std::string(name) +
                   "' (expected most-frequent, single-feature, depth-one, local "
                   "or nonlocal)");
}

std::string_view classifier_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::MostFrequent:
      return "most-frequent";
    case ClassifierKind::SingleFeature:
      return "single-feature";
    case ClassifierKind::DepthOne:
      return "depth-one";
    case ClassifierKind::Local:
      return "local";
    case ClassifierKind::NonLocal:
      return "nonlocal";
  }
  return "?";
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

Formula fit_classifier(const ClassifierSpec& spec, const BitMatrix& X,
                       const BitVector& y, MetricKind metric, std::uint64_t seed) {
  switch (spec.kind) {
    case ClassifierKind::MostFrequent: {
      const std::size_t positives = y.count();
      return positives * 2 >= y.size() ? Formula::one() : Formula::zero();
    }
    case ClassifierKind::SingleFeature:
    case ClassifierKind::DepthOne: {
      DepthOneFit fit = spec.depth_one;
      fit.seed = seed;
      if (spec.kind == ClassifierKind::SingleFeature) {
        fit.problem.kind = OpKind::Or;
        fit.problem.max_literals = 1;
        fit.problem.min_literals = 1;
        fit.backend = DepthOneBackend::Oracle;
      }
      if (metric == MetricKind::Accuracy) fit.problem.weights = ClassWeights{1.0, 1.0};
      const DepthOneSolution s = fit_depth_one(X, y, fit);
      if (!s.feasible) throw SolverLimitError("depth-one solver found no feasible rule");
      return s.formula();
    }
    case ClassifierKind::Local:
    case ClassifierKind::NonLocal: {
      SolverConfig solver = spec.solver;
      solver.seed = seed;
      solver.metric = metric;
      if (spec.kind == ClassifierKind::Local) return solve(X, y, solver).best;
      return solve_with_nonlocal(X, y, solver, spec.nonlocal).best;
    }
  }
  throw UsageError("unknown classifier");
}

namespace {

nlohmann::json classifier_to_json(const ClassifierSpec& s) {
  nlohmann::json j;
  j["kind"] = std::string(classifier_name(s.kind));
  j["num_starts"] = s.solver.num_starts;
  j["num_iterations"] = s.solver.num_iterations;
  j["t_high"] = s.solver.t_high;
  j["t_low"] = s.solver.t_low;
  if (s.solver.max_complexity) j["max_complexity"] = *s.solver.max_complexity;
  j["lambda"] = s.solver.lambda;
  if (s.nonlocal.burn_in) j["burn_in"] = *s.nonlocal.burn_in;
  j["patience"] = s.nonlocal.patience;
  j["max_samples"] = s.nonlocal.max_samples;
  j["operator"] = std::string(op_name(s.depth_one.problem.kind));
  j["max_literals"] = s.depth_one.problem.max_literals;
  j["min_literals"] = s.depth_one.problem.min_literals;
  j["backend"] = s.depth_one.backend == DepthOneBackend::Oracle ? "oracle" : "qubo";
  j["qubo_mode"] = std::string(qubo_mode_name(s.depth_one.qubo.mode));
  j["num_reads"] = s.depth_one.qubo.anneal.num_reads;
  j["num_sweeps"] = s.depth_one.qubo.anneal.num_sweeps;
  j["max_rows"] = s.depth_one.max_rows;
  return j;
}

ClassifierSpec classifier_from_json(const nlohmann::json& j) {
  ClassifierSpec s;
  s.kind = parse_classifier(j.value("kind", std::string("local")));
  s.solver.num_starts = j.value("num_starts", s.solver.num_starts);
  s.solver.num_iterations = j.value("num_iterations", s.solver.num_iterations);
  s.solver.t_high = j.value("t_high", s.solver.t_high);
  s.solver.t_low = j.value("t_low", s.solver.t_low);
  if (j.contains("max_complexity") && !j["max_complexity"].is_null()) {
    s.solver.max_complexity = j["max_complexity"].get<std::size_t>();
  }
  s.solver.lambda = j.value("lambda", 0.0);
  if (j.contains("burn_in") && !j["burn_in"].is_null()) s.nonlocal.burn_in = j["burn_in"].get<int>();
  s.nonlocal.patience = j.value("patience", s.nonlocal.patience);
  s.nonlocal.max_samples = j.value("max_samples", s.nonlocal.max_samples);
  s.depth_one.problem.kind = parse_op_kind(j.value("operator", std::string("Or")));
  s.depth_one.problem.max_literals = j.value("max_literals", std::size_t{1});
  s.depth_one.problem.min_literals = j.value("min_literals", std::size_t{0});
  s.depth_one.problem.lambda = s.solver.lambda;
  s.depth_one.backend = parse_backend(j.value("backend", std::string("oracle")));
  s.depth_one.qubo.mode = parse_qubo_mode(j.value("qubo_mode", std::string("without-eta")));
  s.depth_one.qubo.anneal.num_reads = j.value("num_reads", std::size_t{100});
  s.depth_one.qubo.anneal.num_sweeps = j.value("num_sweeps", std::size_t{2000});
  s.depth_one.max_rows = j.value("max_rows", std::size_t{3000});
  return s;
}

}  // namespace

nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["schema"] = 1;
  j["dataset"] = c.dataset;
  if (c.descriptor) j["descriptor"] = *c.descriptor;
  j["label_column"] = c.label_column;
  if (c.positive_label) j["positive_label"] = *c.positive_label;
  j["num_bins"] = c.num_bins;
  j["outer_test_fraction"] = c.outer_test_fraction;
  j["inner_splits"] = c.inner_splits;
  j["inner_test_fraction"] = c.inner_test_fraction;
  j["classifier"] = classifier_to_json(c.classifier);
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["metric"] = std::string(metric_name(c.metric));
  j["sweep_knob"] = c.sweep_knob;
  j["sweep_values"] = c.sweep_values;
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.dataset = j.value("dataset", std::string());
    if (j.contains("descriptor")) c.descriptor = j["descriptor"].get<std::string>();
    c.label_column = j.value("label_column", std::string());
    if (j.contains("positive_label")) c.positive_label = j["positive_label"].get<std::string>();
    c.num_bins = j.value("num_bins", c.num_bins);
    c.outer_test_fraction = j.value("outer_test_fraction", c.outer_test_fraction);
    c.inner_splits = j.value("inner_splits", c.inner_splits);
    c.inner_test_fraction = j.value("inner_test_fraction", c.inner_test_fraction);
    if (j.contains("classifier")) c.classifier = classifier_from_json(j["classifier"]);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.metric = parse_metric(j.value("metric", std::string("balanced-accuracy")));
    c.sweep_knob = j.value("sweep_knob", c.sweep_knob);
    if (j.contains("sweep_values")) c.sweep_values = j["sweep_values"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed run config: ") + e.what());
  }
  if (c.inner_splits < 1) throw UsageError("inner_splits must be at least 1");
  if (c.workers < 1) throw UsageError("workers must be at least 1");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config '" + path.string() + "'");
  try {
    return run_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
}

Dataset load_run_dataset(const RunConfig& config) {
  if (config.dataset.empty()) throw UsageError("run config names no dataset");
  const std::filesystem::path path(config.dataset);
  if (path.extension() == ".csv") {
    if (config.label_column.empty()) throw UsageError("CSV datasets need a label column");
    CsvOptions opts;
    opts.label_column = config.label_column;
    opts.positive_label = config.positive_label;
    const RawTable raw = load_csv(path, opts);
    return make_dataset(raw, binarize(raw, config.num_bins));
  }
  std::optional<std::filesystem::path> descriptor;
  if (config.descriptor) descriptor = *config.descriptor;
  return load_dataset(path, descriptor);
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

namespace {

// Runs job(i) for i in [0, count) on up to `workers` threads.
void parallel_for(int count, int workers, const std::function<void(int)>& job) {
  const int threads = std::max(1, std::min(workers, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

SplitRecord run_split(const Dataset& data, const ClassifierSpec& spec, MetricKind metric,
                      const std::vector<std::size_t>& train,
                      const std::vector<std::size_t>& test, std::uint64_t seed, int index) {
  SplitRecord r;
  r.split = index;
  r.train_rows = train.size();
  r.test_rows = test.size();
  const BitMatrix xtr = data.X.select_rows(train);
  const BitVector ytr = data.y.select(train);
  const auto began = std::chrono::steady_clock::now();
  const Formula rule = fit_classifier(spec, xtr, ytr, metric, seed);
  const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - began;
  r.seconds = spent.count();
  r.train_score = score(rule, xtr, ytr, metric);
  r.test_score = score(rule, data.X.select_rows(test), data.y.select(test), metric);
  r.complexity = complexity(rule);
  r.rule = to_text(rule, data.names());
  return r;
}

// One worker per split; solvers inside a split stay single-threaded.
ClassifierSpec single_threaded(ClassifierSpec spec) {
  spec.solver.workers = 1;
  return spec;
}

constexpr std::uint64_t kOuterStream = 0;
constexpr std::uint64_t kHoldoutFitStream = 1;
constexpr std::uint64_t kInnerSplitStream = 1000;
constexpr std::uint64_t kInnerFitStream = 2000000;

}  // namespace

CrossvalResult crossval(const Dataset& data, const RunConfig& config) {
  const Split outer = stratified_split(data.y, config.outer_test_fraction,
                                       mix_seed(config.seed, kOuterStream));
  const ClassifierSpec spec = single_threaded(config.classifier);
  CrossvalResult result;
  result.holdout_rows = outer.test;
  result.splits.resize(static_cast<std::size_t>(config.inner_splits));
  parallel_for(config.inner_splits, config.workers, [&](int s) {
    const auto su = static_cast<std::uint64_t>(s);
    const Split inner = stratified_split(data.y, config.inner_test_fraction,
                                         mix_seed(config.seed, kInnerSplitStream + su),
                                         outer.train);
    result.splits[static_cast<std::size_t>(s)] =
        run_split(data, spec, config.metric, inner.train, inner.test,
                  mix_seed(config.seed, kInnerFitStream + su), s);
  });
  result.holdout = run_split(data, spec, config.metric, outer.train, outer.test,
                             mix_seed(config.seed, kHoldoutFitStream), -1);
  std::vector<double> tr, te, cx;
  for (const auto& r : result.splits) {
    tr.push_back(r.train_score);
    te.push_back(r.test_score);
    cx.push_back(static_cast<double>(r.complexity));
  }
  result.train = summarize(tr);
  result.test = summarize(te);
  result.complexity = summarize(cx);
  return result;
}

namespace {

nlohmann::json summary_json(const Summary& s) {
  return {{"mean", round6(s.mean)}, {"std", round6(s.stddev)}};
}

nlohmann::json record_json(const SplitRecord& r) {
  return {{"split", r.split},
          {"train_rows", r.train_rows},
          {"test_rows", r.test_rows},
          {"train_score", round6(r.train_score)},
          {"test_score", round6(r.test_score)},
          {"complexity", r.complexity},
          {"rule", r.rule}};
}

}  // namespace

nlohmann::json crossval_json(const CrossvalResult& result, const RunConfig& config,
                             const Dataset& data) {
  nlohmann::json j;
  j["schema"] = 1;
  j["classifier"] = std::string(classifier_name(config.classifier.kind));
  j["metric"] = std::string(metric_name(config.metric));
  j["seed"] = config.seed;
  j["rows"] = data.X.rows();
  j["features"] = data.X.cols();
  j["inner_splits"] = config.inner_splits;
  auto splits = nlohmann::json::array();
  for (const auto& r : result.splits) splits.push_back(record_json(r));
  j["splits"] = std::move(splits);
  j["holdout"] = record_json(result.holdout);
  j["summary"] = {{"train", summary_json(result.train)},
                  {"test", summary_json(result.test)},
                  {"complexity", summary_json(result.complexity)}};
  return j;
}

std::vector<SweepRow> sweep(const Dataset& data, const RunConfig& config) {
  if (config.sweep_values.empty()) throw UsageError("sweep needs at least one knob value");
  const std::string& knob = config.sweep_knob;
  if (knob != "max_complexity" && knob != "max_literals" && knob != "lambda" &&
      knob != "train_fraction") {
    throw UsageError("unknown sweep knob '" + knob + "'");
  }
  const Split outer = stratified_split(data.y, config.outer_test_fraction,
                                       mix_seed(config.seed, kOuterStream));
  std::vector<Split> inner;
  for (int s = 0; s < config.inner_splits; ++s) {
    inner.push_back(stratified_split(
        data.y, config.inner_test_fraction,
        mix_seed(config.seed, kInnerSplitStream + static_cast<std::uint64_t>(s)), outer.train));
  }

  std::vector<SweepRow> rows;
  for (double value : config.sweep_values) {
    ClassifierSpec spec = single_threaded(config.classifier);
    if (knob == "max_complexity") {
      if (value < 3) throw UsageError("max_complexity values must be at least 3");
      spec.solver.max_complexity = static_cast<std::size_t>(value);
    } else if (knob == "max_literals") {
      if (value < 1) throw UsageError("max_literals values must be at least 1");
      spec.depth_one.problem.max_literals = static_cast<std::size_t>(value);
    } else if (knob == "lambda") {
      spec.solver.lambda = value;
      spec.depth_one.problem.lambda = value;
    } else if (!(value > 0.0 && value <= 1.0)) {
      throw UsageError("train_fraction values must lie in (0, 1]");
    }
    std::vector<SplitRecord> records(inner.size());
    const auto began = std::chrono::steady_clock::now();
    parallel_for(config.inner_splits, config.workers, [&](int s) {
      const auto su = static_cast<std::uint64_t>(s);
      std::vector<std::size_t> train = inner[static_cast<std::size_t>(s)].train;
      if (knob == "train_fraction") {
        const auto keep = static_cast<std::size_t>(
            std::max(2.0, std::round(value * static_cast<double>(train.size()))));
        train = stratified_subsample(data.y, train, keep,
                                     mix_seed(config.seed, kInnerFitStream + 7919 * su));
      }
      records[static_cast<std::size_t>(s)] =
          run_split(data, spec, config.metric, train, inner[static_cast<std::size_t>(s)].test,
                    mix_seed(config.seed, kInnerFitStream + su), s);
    });
    const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - began;
    std::vector<double> tr, te, cx;
    for (const auto& r : records) {
      tr.push_back(r.train_score);
      te.push_back(r.test_score);
      cx.push_back(static_cast<double>(r.complexity));
    }
    SweepRow row;
    row.classifier = std::string(classifier_name(config.classifier.kind));
    row.knob = knob;
    row.value = value;
    row.splits = static_cast<int>(records.size());
    row.train = summarize(tr);
    row.test = summarize(te);
    row.complexity = summarize(cx);
    row.seconds = spent.count();
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, bool timing) {
  out << "classifier,knob,value,splits,train_mean,train_std,test_mean,test_std,"
         "complexity_mean,complexity_std";
  out << (timing ? ",seconds\n" : "\n");
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6g,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f",
                  r.classifier.c_str(), r.knob.c_str(), r.value, r.splits, r.train.mean,
                  r.train.stddev, r.test.mean, r.test.stddev, r.complexity.mean,
                  r.complexity.stddev);
    out << buf;
    if (timing) {
      std::snprintf(buf, sizeof(buf), ",%.6f", r.seconds);
      out << buf;
    }
    out << '\n';
  }
}

nlohmann::json sweep_json(const std::vector<SweepRow>& rows, const RunConfig& config,
                          bool timing) {
  nlohmann::json j;
  j["schema"] = 1;
  j["metric"] = std::string(metric_name(config.metric));
  j["seed"] = config.seed;
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json o = {{"classifier", r.classifier},
                        {"knob", r.knob},
                        {"value", round6(r.value)},
                        {"splits", r.splits},
                        {"train", summary_json(r.train)},
                        {"test", summary_json(r.test)},
                        {"complexity", summary_json(r.complexity)}};
    if (timing) o["seconds"] = round6(r.seconds);
    arr.push_back(std::move(o));
  }
  j["rows"] = std::move(arr);
  return j;
}

}  // namespace boolrule
