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

// boolrule: binarize data, fit Boolean rule classifiers, run cross-validation
// and sweeps, and export depth-one ILP/QUBO models.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "boolrule/data.hpp"
#include "boolrule/depth_one.hpp"
#include "boolrule/error.hpp"
#include "boolrule/harness.hpp"
#include "boolrule/ilp.hpp"
#include "boolrule/qubo.hpp"
#include "boolrule/rng.hpp"
#include "json.hpp"

namespace br = boolrule;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitSolver = 4;

struct Globals {
  std::uint64_t seed = 0;
  int workers = 1;
  std::string metric = "balanced-accuracy";
};

struct DataFlags {
  std::string path;
  std::string label;
  std::string positive;
  std::string descriptor;
  int num_bins = 10;

  void add(CLI::App* cmd) {
    cmd->add_option("--data", path, ".csv (binarized on load) or .xbf matrix")->required();
    cmd->add_option("--label", label, "label column (CSV input)");
    cmd->add_option("--positive", positive, "label value treated as positive (CSV input)");
    cmd->add_option("--descriptor", descriptor, "descriptor JSON for an .xbf matrix");
    cmd->add_option("--num-bins", num_bins, "quantile bins per numeric column")
        ->check(CLI::PositiveNumber);
  }

  br::Dataset load() const {
    br::RunConfig c;
    c.dataset = path;
    c.label_column = label;
    if (!positive.empty()) c.positive_label = positive;
    if (!descriptor.empty()) c.descriptor = descriptor;
    c.num_bins = num_bins;
    return br::load_run_dataset(c);
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw br::UsageError("cannot write '" + path + "'");
  out << text;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Rows used to build a depth-one model: all of them, or a stratified subset.
void maybe_subsample(br::Dataset& d, std::size_t max_rows, std::uint64_t seed) {
  if (d.X.rows() <= max_rows) return;
  std::vector<std::size_t> all(d.X.rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto keep = br::stratified_subsample(d.y, all, max_rows, seed);
  d.X = d.X.select_rows(keep);
  d.y = d.y.select(keep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn Boolean rule classifiers"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "master seed");
  auto* workers_opt =
      app.add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber);
  auto* metric_opt = app.add_option("--metric", g.metric, "scoring metric")
                         ->check(CLI::IsMember({"balanced-accuracy", "accuracy"}));

  // binarize
  auto* bin = app.add_subcommand("binarize", "binarize a CSV into <out>.xbf and <out>.json");
  std::string bin_input, bin_out, bin_label, bin_positive;
  int bin_bins = 10;
  bin->add_option("input", bin_input, "input CSV")->required();
  bin->add_option("--label", bin_label, "label column")->required();
  bin->add_option("--positive", bin_positive, "label value treated as positive");
  bin->add_option("--num-bins", bin_bins, "quantile bins per numeric column")
      ->check(CLI::PositiveNumber);
  bin->add_option("-o,--out", bin_out, "output prefix")->required();

  // train
  auto* train = app.add_subcommand("train", "fit one classifier");
  DataFlags train_data;
  train_data.add(train);
  std::string classifier = "local";
  train->add_option("--classifier", classifier)
      ->check(CLI::IsMember({"most-frequent", "single-feature", "depth-one", "local",
                             "nonlocal"}));
  double test_fraction = 0.0;
  train->add_option("--test-fraction", test_fraction,
                    "stratified holdout fraction; 0 trains on every row")
      ->check(CLI::Range(0.0, 0.95));
  br::ClassifierSpec spec;
  std::size_t max_complexity = 0;
  double lambda = 0.0;
  auto* mc_opt = train->add_option("--max-complexity", max_complexity)->check(CLI::Range(3, 1000000));
  train->add_option("--lambda", lambda)->check(CLI::NonNegativeNumber);
  auto* starts_opt = train->add_option("--num-starts", spec.solver.num_starts);
  auto* iters_opt = train->add_option("--num-iterations", spec.solver.num_iterations);
  auto* burn_opt = train->add_option("--burn-in", spec.nonlocal.burn_in.emplace());
  auto* patience_opt = train->add_option("--patience", spec.nonlocal.patience);
  auto* samples_opt = train->add_option("--max-samples", spec.nonlocal.max_samples);
  std::string op = "Or", backend = "oracle", qubo_mode = "without-eta";
  std::size_t max_literals = 1, min_literals = 0;
  auto* op_opt = train->add_option("--operator", op);
  auto* ml_opt = train->add_option("--max-literals", max_literals)->check(CLI::PositiveNumber);
  auto* minl_opt = train->add_option("--min-literals", min_literals);
  auto* backend_opt = train->add_option("--backend", backend)
                          ->check(CLI::IsMember({"oracle", "qubo"}));
  auto* mode_opt = train->add_option("--qubo-mode", qubo_mode)
                       ->check(CLI::IsMember({"with-eta", "without-eta"}));
  std::string rule_out, metrics_out;
  train->add_option("--rule-out", rule_out, "write the rule as JSON");
  train->add_option("--metrics-out", metrics_out, "write scores as JSON");

  // sweep / crossval
  auto* sw = app.add_subcommand("sweep", "sweep a knob over inner splits");
  std::string sw_config, sw_csv, sw_json, sw_knob;
  std::vector<double> sw_values;
  bool sw_no_timing = false;
  sw->add_option("--config", sw_config, "run config JSON")->required()->check(CLI::ExistingFile);
  sw->add_option("--knob", sw_knob, "max_complexity, max_literals, lambda or train_fraction");
  sw->add_option("--values", sw_values, "knob values")->delimiter(',');
  sw->add_option("--csv", sw_csv, "CSV output (stdout when omitted)");
  sw->add_option("--json", sw_json, "JSON output");
  sw->add_flag("--no-timing", sw_no_timing, "leave wall-clock seconds out of the output");

  auto* cv = app.add_subcommand("crossval", "holdout plus inner stratified splits");
  std::string cv_config, cv_out;
  cv->add_option("--config", cv_config, "run config JSON")->required()->check(CLI::ExistingFile);
  cv->add_option("-o,--out", cv_out, "JSON output (stdout when omitted)");

  // export-ilp / qubo
  struct ModelFlags {
    DataFlags data;
    std::string op = "Or";
    std::size_t max_literals = 1;
    std::size_t min_literals = 0;
    double lambda = 0.0;
    std::size_t max_rows = 3000;
    std::string out;
  };
  const auto add_model_flags = [](CLI::App* cmd, ModelFlags& f) {
    f.data.add(cmd);
    cmd->add_option("--operator", f.op, "And, Or, AtLeast, AtMost or Choose");
    cmd->add_option("--max-literals", f.max_literals)->check(CLI::PositiveNumber);
    cmd->add_option("--min-literals", f.min_literals);
    cmd->add_option("--lambda", f.lambda)->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-rows", f.max_rows, "stratified row subsample cap")
        ->check(CLI::PositiveNumber);
  };
  auto* ilp = app.add_subcommand("export-ilp", "write the depth-one ILP in LP format");
  ModelFlags ilp_flags;
  add_model_flags(ilp, ilp_flags);
  ilp->add_option("-o,--out", ilp_flags.out, "LP file")->required();

  auto* qb = app.add_subcommand("qubo", "write or anneal the depth-one QUBO");
  ModelFlags qb_flags;
  add_model_flags(qb, qb_flags);
  std::string qb_mode = "without-eta";
  double l1 = 1.0, l2 = 0.0, timeout = 0.0;
  bool anneal = false;
  br::AnnealConfig anneal_cfg;
  qb->add_option("--mode", qb_mode)->check(CLI::IsMember({"with-eta", "without-eta"}));
  qb->add_option("--l1", l1, "sample penalty weight")->check(CLI::PositiveNumber);
  auto* l2_opt = qb->add_option("--l2", l2, "cardinality penalty weight")
                     ->check(CLI::PositiveNumber);
  qb->add_option("-o,--out", qb_flags.out, "coordinate file");
  qb->add_flag("--anneal", anneal, "anneal the model and print the decoded rule");
  qb->add_option("--num-reads", anneal_cfg.num_reads)->check(CLI::PositiveNumber);
  qb->add_option("--num-sweeps", anneal_cfg.num_sweeps)->check(CLI::PositiveNumber);
  auto* timeout_opt =
      qb->add_option("--timeout", timeout, "seconds")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const br::MetricKind metric = br::parse_metric(g.metric);

    if (*bin) {
      br::CsvOptions opts;
      opts.label_column = bin_label;
      if (!bin_positive.empty()) opts.positive_label = bin_positive;
      const br::RawTable raw = br::load_csv(bin_input, opts);
      const br::BinarizedMatrix bits = br::binarize(raw, bin_bins);
      for (const auto& w : bits.warnings) {
        std::cerr << "warning: " << w.column << ": " << w.message << "\n";
      }
      if (raw.dropped_rows > 0) {
        std::cerr << "warning: dropped " << raw.dropped_rows << " rows with missing cells\n";
      }
      br::save_dataset(br::make_dataset(raw, bits), bin_out);
      std::cout << raw.rows() << " rows, " << bits.features.size() << " features\n";
      return 0;
    }

    if (*train) {
      spec.kind = br::parse_classifier(classifier);
      const bool native = spec.kind == br::ClassifierKind::Local ||
                          spec.kind == br::ClassifierKind::NonLocal;
      const bool depth_one = spec.kind == br::ClassifierKind::DepthOne;
      for (const CLI::Option* o : {mc_opt, starts_opt, iters_opt}) {
        if (o->count() && !native) {
          throw br::UsageError(o->get_name() + " applies to the local and nonlocal classifiers");
        }
      }
      for (const CLI::Option* o : {burn_opt, patience_opt, samples_opt}) {
        if (o->count() && spec.kind != br::ClassifierKind::NonLocal) {
          throw br::UsageError(o->get_name() + " applies to the nonlocal classifier");
        }
      }
      for (const CLI::Option* o : {op_opt, ml_opt, minl_opt, backend_opt, mode_opt}) {
        if (o->count() && !depth_one) {
          throw br::UsageError(o->get_name() + " applies to the depth-one classifier");
        }
      }
      if (!burn_opt->count()) spec.nonlocal.burn_in.reset();
      if (mc_opt->count()) spec.solver.max_complexity = max_complexity;
      spec.solver.lambda = lambda;
      spec.solver.workers = g.workers;
      spec.depth_one.problem.kind = br::parse_op_kind(op);
      spec.depth_one.problem.max_literals = max_literals;
      spec.depth_one.problem.min_literals = min_literals;
      spec.depth_one.problem.lambda = lambda;
      spec.depth_one.backend = br::parse_backend(backend);
      spec.depth_one.qubo.mode = br::parse_qubo_mode(qubo_mode);

      const br::Dataset data = train_data.load();
      br::Split split;
      if (test_fraction > 0.0) {
        split = br::stratified_split(data.y, test_fraction, br::mix_seed(g.seed, 0));
      } else {
        split.train.resize(data.X.rows());
        for (std::size_t i = 0; i < split.train.size(); ++i) split.train[i] = i;
      }
      const br::BitMatrix xtr = data.X.select_rows(split.train);
      const br::BitVector ytr = data.y.select(split.train);
      const auto began = std::chrono::steady_clock::now();
      const br::Formula rule = br::fit_classifier(spec, xtr, ytr, metric, g.seed);
      const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - began;

      const auto names = data.names();
      nlohmann::json m;
      m["schema"] = 1;
      m["classifier"] = classifier;
      m["metric"] = g.metric;
      m["rule"] = br::to_text(rule, names);
      m["complexity"] = br::complexity(rule);
      m["depth"] = br::depth(rule);
      m["train_rows"] = split.train.size();
      m["train_score"] = br::round6(br::score(rule, xtr, ytr, metric));
      if (!split.test.empty()) {
        m["test_rows"] = split.test.size();
        m["test_score"] = br::round6(br::score(rule, data.X.select_rows(split.test),
                                               data.y.select(split.test), metric));
      }
      m["seconds"] = br::round6(spent.count());
      std::cout << m["rule"].get<std::string>() << "\n"
                << "train " << g.metric << " " << fmt6(m["train_score"].get<double>());
      if (m.contains("test_score")) {
        std::cout << ", test " << fmt6(m["test_score"].get<double>());
      }
      std::cout << ", complexity " << br::complexity(rule) << "\n";
      if (!rule_out.empty()) {
        write_json(rule_out, {{"schema", 1},
                              {"text", br::to_text(rule, names)},
                              {"formula", br::to_json(rule, names)}});
      }
      if (!metrics_out.empty()) write_json(metrics_out, m);
      return 0;
    }

    if (*sw || *cv) {
      br::RunConfig config = br::load_run_config(*sw ? sw_config : cv_config);
      if (seed_opt->count()) config.seed = g.seed;
      if (workers_opt->count()) config.workers = g.workers;
      if (metric_opt->count()) config.metric = metric;
      const br::Dataset data = br::load_run_dataset(config);
      if (*cv) {
        const br::CrossvalResult r = br::crossval(data, config);
        const std::string text = br::crossval_json(r, config, data).dump(2) + "\n";
        if (cv_out.empty()) {
          std::cout << text;
        } else {
          write_text(cv_out, text);
        }
        return 0;
      }
      if (!sw_knob.empty()) config.sweep_knob = sw_knob;
      if (!sw_values.empty()) config.sweep_values = sw_values;
      const auto rows = br::sweep(data, config);
      if (sw_csv.empty()) {
        br::write_sweep_csv(std::cout, rows, !sw_no_timing);
      } else {
        std::ofstream out(sw_csv, std::ios::binary);
        if (!out) throw br::UsageError("cannot write '" + sw_csv + "'");
        br::write_sweep_csv(out, rows, !sw_no_timing);
      }
      if (!sw_json.empty()) write_json(sw_json, br::sweep_json(rows, config, !sw_no_timing));
      return 0;
    }

    // export-ilp and qubo share the model build.
    ModelFlags& f = *ilp ? ilp_flags : qb_flags;
    br::Dataset data = f.data.load();
    maybe_subsample(data, f.max_rows, br::mix_seed(g.seed, 0));
    br::IlpOptions io;
    io.kind = br::parse_op_kind(f.op);
    io.max_literals = f.max_literals;
    io.min_literals = f.min_literals;
    io.lambda = f.lambda;
    if (metric == br::MetricKind::Accuracy) io.weights = br::ClassWeights{1.0, 1.0};
    const br::IlpModel model = br::build_ilp(data.X, data.y, io);

    if (*ilp) {
      write_text(f.out, br::export_lp(model));
      std::cout << model.vars.size() << " variables, " << model.constraints.size()
                << " constraints\n";
      return 0;
    }

    br::QuboPenalties pen;
    pen.l1 = l1;
    if (l2_opt->count()) pen.l2 = l2;
    const br::QuboModel q = br::ilp_to_qubo(model, br::parse_qubo_mode(qb_mode), pen);
    if (!f.out.empty()) {
      std::ofstream out(f.out, std::ios::binary);
      if (!out) throw br::UsageError("cannot write '" + f.out + "'");
      br::write_qubo(out, q);
    }
    std::cout << q.num_vars << " variables, " << q.entries.size() << " entries\n";
    if (!anneal) return 0;

    br::DepthOneOptions opts;
    opts.kind = io.kind;
    opts.max_literals = io.max_literals;
    opts.min_literals = io.min_literals;
    opts.lambda = io.lambda;
    opts.weights = io.weights;
    br::QuboBackendOptions backend_opts;
    backend_opts.mode = br::parse_qubo_mode(qb_mode);
    backend_opts.penalties = pen;
    backend_opts.anneal = anneal_cfg;
    backend_opts.anneal.seed = g.seed;
    if (timeout_opt->count()) backend_opts.anneal.timeout_seconds = timeout;
    const br::DepthOneSolution s = br::solve_depth_one_qubo(data.X, data.y, opts, backend_opts);
    if (!s.feasible || s.conflict) {
      throw br::SolverLimitError("annealer returned no feasible assignment");
    }
    std::cout << br::to_text(s.formula(), data.names()) << "\n"
              << "weighted error " << fmt6(s.weighted_error) << ", objective "
              << fmt6(s.objective) << "\n";
    return 0;
  } catch (const br::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const br::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const br::SolverLimitError& e) {
    std::cerr << "solver limit: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
