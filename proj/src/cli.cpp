#include "ztree/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "ztree/benchmark.hpp"
#include "ztree/cart.hpp"
#include "ztree/csv.hpp"
#include "ztree/error.hpp"
#include "ztree/model_selection.hpp"
#include "ztree/parallel.hpp"
#include "ztree/synth.hpp"
#include "ztree/tree.hpp"

namespace ztree {

std::string recorded_command(const std::vector<std::string>& args) {
  std::string command = "ztree";
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a == "--threads") {
      ++i;
      continue;
    }
    if (a.rfind("--threads=", 0) == 0) continue;
    command += ' ';
    if (!a.empty() && a.find_first_of(" \t\"'<>|&;$`*?()[]{}!#~\\") == std::string::npos) {
      command += a;
      continue;
    }
    command += '\'';
    for (char c : a) command += c == '\'' ? std::string("'\\''") : std::string(1, c);
    command += '\'';
  }
  return command;
}

namespace {

struct DataFlags {
  std::string data;
  std::string schema;
  std::string target;
  std::string target_kind;
  std::string event;
  std::string treatment;
  std::string positive;
  std::string na_policy = "error";
};

struct LearnFlags {
  double threshold = 2.0;
  int depth = 1;
  std::size_t min_side = 10;
  int folds = 5;
  int repeats = 10;
  std::string test;
};

struct Common {
  std::uint64_t seed = 42;
  int threads = 0;
};

const std::vector<std::string> kTestNames = {"two-proportion-z", "welch-t", "mann-whitney-u",
                                             "log-rank", "diff-effect-binary", "diff-effect-continuous"};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--data", f.data, "Input CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--schema", f.schema, "Schema file with `column = spec` lines")->check(CLI::ExistingFile);
  cmd->add_option("--target", f.target, "Target column (default: last column)");
  cmd->add_option("--target-kind", f.target_kind, "Target kind")
      ->check(CLI::IsMember({"binary", "continuous", "time-to-event"}));
  cmd->add_option("--event", f.event, "Event indicator column for time-to-event targets");
  cmd->add_option("--treatment", f.treatment, "Treatment column (0/1)");
  cmd->add_option("--positive", f.positive, "Label mapped to 1 for a binary target");
  cmd->add_option("--na-policy", f.na_policy, "Missing-value policy")
      ->check(CLI::IsMember({"error", "drop-rows", "na-level"}));
}

void add_learn_flags(CLI::App* cmd, LearnFlags& f, bool with_threshold) {
  if (with_threshold) {
    cmd->add_option("--threshold", f.threshold, "Minimum cross-validated |z| to split")
        ->check(CLI::Range(0.0, 1e6));
  }
  cmd->add_option("--depth", f.depth, "Atoms per subgroup criterion")->check(CLI::Range(1, 3));
  cmd->add_option("--min-side", f.min_side, "Minimum rows on each side of a split")->check(CLI::Range(1, 1 << 30));
  cmd->add_option("--folds", f.folds, "Internal CV folds")->check(CLI::Range(2, 1000));
  cmd->add_option("--repeats", f.repeats, "Internal CV repeats")->check(CLI::Range(1, 1000));
  cmd->add_option("--test", f.test, "Statistical test")->check(CLI::IsMember(kTestNames));
}

void add_common_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Seed for every random stream");
  cmd->add_option("--threads", c.threads, "Worker threads (default: ZTREE_THREADS or 1)")->check(CLI::Range(0, 4096));
}

IngestOptions ingest_options(const DataFlags& f) {
  IngestOptions options;
  if (!f.schema.empty()) options.overrides = SchemaOverrides::read_file(f.schema);
  if (!f.target.empty()) options.target = f.target;
  if (!f.target_kind.empty()) options.target_kind = parse_target_kind(f.target_kind);
  if (!f.event.empty()) options.event_column = f.event;
  if (!f.treatment.empty()) options.treatment = f.treatment;
  if (!f.positive.empty()) options.positive_label = f.positive;
  options.na_policy = parse_na_policy(f.na_policy);
  return options;
}

Dataset load(const DataFlags& f) {
  try {
    return ingest_csv(f.data, ingest_options(f));
  } catch (const Error& e) {
    throw DataError("--data " + f.data + ": " + e.what());
  }
}

LearnConfig learn_config(const LearnFlags& f, std::uint64_t seed) {
  LearnConfig config;
  config.threshold = f.threshold;
  config.search_depth = f.depth;
  config.min_side = f.min_side;
  config.cv = CvConfig{f.folds, f.repeats, seed};
  if (!f.test.empty()) config.test = parse_test_kind(f.test);
  return config;
}

void write_file(const std::string& path, const std::string& flag, const std::function<void(std::ostream&)>& body) {
  std::ostringstream buffer;
  body(buffer);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError(flag + " " + path + ": cannot open for writing");
  file << buffer.str();
  if (!file.flush()) throw DataError(flag + " " + path + ": write failed");
}

TreeModel read_model(const std::string& path) {
  try {
    return deserialize(csv::read_text(path));
  } catch (const Error& e) {
    throw DataError("--model " + path + ": " + e.what());
  }
}

std::vector<std::string> header_lines(const std::string& command, std::uint64_t seed) {
  return {"tool: " + std::string(kToolVersion), "command: " + command, "seed: " + std::to_string(seed)};
}

void stamp(TreeModel& model, const std::string& command, std::uint64_t seed) {
  model.provenance = Provenance{std::string(kToolVersion), command, seed};
}

/// Rows of `data` that carry an observed target.
std::vector<std::size_t> labelled_rows(const Dataset& data) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (!std::isnan(data.target()[i])) rows.push_back(i);
  }
  return rows;
}

std::string metric_line(MetricKind kind, double value) {
  return std::string(to_string(kind)) + "=" + csv::format_number(value);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subgroup trees gated by cross-validated z-scores", "ztree"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  const std::string command = recorded_command(args);

  DataFlags data_flags;
  LearnFlags learn_flags;
  Common common;
  std::string out_path, report_path, model_path, predictions_path, schema_out, figures_path;
  std::string algorithm = "ztree";
  CartParams cart_params;
  std::vector<double> grid = default_threshold_grid();
  int ext_folds = 10;

  auto* train = app.add_subcommand("train", "Grow a tree and write the model file");
  add_data_flags(train, data_flags);
  add_learn_flags(train, learn_flags, true);
  add_common_flags(train, common);
  train->add_option("--algorithm", algorithm, "ztree or cart")->check(CLI::IsMember({"ztree", "cart"}));
  train->add_option("--max-depth", cart_params.max_depth, "CART depth limit")->check(CLI::Range(0, 1000));
  train->add_option("--min-samples-split", cart_params.min_samples_split, "CART node-size limit")
      ->check(CLI::Range(2, 1 << 30));
  train->add_option("--out", out_path, "Model file")->required();

  auto* tune = app.add_subcommand("tune", "Pick the threshold by external CV and write model and report");
  add_data_flags(tune, data_flags);
  add_learn_flags(tune, learn_flags, false);
  add_common_flags(tune, common);
  tune->add_option("--grid", grid, "Threshold grid (comma separated)")->delimiter(',')->check(CLI::Range(0.0, 1e6));
  tune->add_option("--ext-folds", ext_folds, "External CV folds")->check(CLI::Range(2, 1000));
  tune->add_option("--out", out_path, "Model file")->required();
  tune->add_option("--report", report_path, "Tuning report CSV")->required();

  double prune_threshold = 0.0;
  auto* prune = app.add_subcommand("prune", "Derive the tree for a larger threshold without retraining");
  prune->add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  prune->add_option("--threshold", prune_threshold, "New threshold")->required()->check(CLI::Range(0.0, 1e6));
  prune->add_option("--out", out_path, "Model file")->required();

  auto* predict_cmd = app.add_subcommand("predict", "Write per-row predictions");
  predict_cmd->add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--data", data_flags.data, "Input CSV")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", out_path, "Predictions CSV")->required();

  auto* eval = app.add_subcommand("eval", "Print AUROC (binary) or RMSE (continuous)");
  auto* eval_predictions =
      eval->add_option("--predictions", predictions_path, "Output of predict")->check(CLI::ExistingFile);
  auto* eval_model = eval->add_option("--model", model_path, "Model file")->check(CLI::ExistingFile);
  auto* eval_data = eval->add_option("--data", data_flags.data, "Labelled CSV")->check(CLI::ExistingFile);
  eval_predictions->excludes(eval_model)->excludes(eval_data);
  eval_model->needs(eval_data);
  eval_data->needs(eval_model);

  std::size_t synth_n = 1000;
  std::size_t synth_continuous = 5;
  std::vector<std::size_t> synth_nominal;
  std::string synth_kind = "continuous", synth_mode = "outcome-shift", planted;
  double effect = 1.0, base_rate = 0.3;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--n", synth_n, "Rows")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 32));
  synth->add_option("--continuous", synth_continuous, "Continuous features x0, x1, ...");
  synth->add_option("--nominal", synth_nominal, "Level counts of nominal features c0, c1, ...")
      ->delimiter(',')
      ->check(CLI::Range(2, 26));
  synth->add_option("--target-kind", synth_kind, "binary or continuous")
      ->check(CLI::IsMember({"binary", "continuous"}));
  synth->add_option("--mode", synth_mode, "Generator mode")
      ->check(CLI::IsMember({"outcome-shift", "treatment-interaction", "null"}));
  synth->add_option("--planted", planted, "Planted criterion, e.g. \"x0>0.5 & c0==a\"");
  synth->add_option("--effect", effect, "Effect size (SD units or probability delta)");
  synth->add_option("--base-rate", base_rate, "Positive rate outside the subgroup (binary)")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", common.seed, "Seed");
  synth->add_option("--out", out_path, "Output CSV")->required();
  synth->add_option("--schema-out", schema_out, "Schema file that reproduces the column kinds");

  std::vector<std::size_t> sizes{100, 300, 1000, 3000};
  int resamples = 10;
  std::vector<std::string> method_names{"ztree", "cart"};
  bool timing = false;
  auto* bench = app.add_subcommand("bench", "Resampling benchmark of ZTree and tuned CART");
  add_data_flags(bench, data_flags);
  add_learn_flags(bench, learn_flags, false);
  add_common_flags(bench, common);
  bench->add_option("--sizes", sizes, "Training sizes")->delimiter(',')->check(CLI::Range(std::size_t{1}, std::size_t{1} << 32));
  bench->add_option("--resamples", resamples, "Resamples per size")->check(CLI::Range(1, 100000));
  bench->add_option("--methods", method_names, "Methods")->delimiter(',')->check(CLI::IsMember({"ztree", "cart"}));
  bench->add_option("--grid", grid, "Threshold grid")->delimiter(',')->check(CLI::Range(0.0, 1e6));
  bench->add_option("--ext-folds", ext_folds, "External CV folds")->check(CLI::Range(2, 1000));
  bench->add_option("--out", out_path, "Report CSV")->required();
  bench->add_option("--figures", figures_path, "Per-figure summary tables");
  bench->add_flag("--timing", timing, "Record wall time (makes the report run-dependent)");

  std::vector<std::string> argv_storage{"ztree"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const int threads = resolve_threads(common.threads);
    const auto headers = header_lines(command, common.seed);

    if (train->parsed()) {
      const auto data = load(data_flags);
      TreeModel model;
      if (algorithm == "cart") {
        model = learn_cart(data, cart_params);
      } else {
        model = learn_tree(data, learn_config(learn_flags, common.seed), threads);
      }
      stamp(model, command, common.seed);
      write_file(out_path, "--out", [&](std::ostream& o) { o << serialize(model); });
    } else if (tune->parsed()) {
      const auto data = load(data_flags);
      auto result = tune_threshold(data, learn_config(learn_flags, common.seed), grid, TuneOptions{ext_folds, threads});
      stamp(result.model, command, common.seed);
      write_file(out_path, "--out", [&](std::ostream& o) { o << serialize(result.model); });
      write_file(report_path, "--report", [&](std::ostream& o) { write_report_csv(result.report, o, headers); });
    } else if (prune->parsed()) {
      auto model = derive_pruned(read_model(model_path), prune_threshold);
      model.provenance.command = command;
      write_file(out_path, "--out", [&](std::ostream& o) { o << serialize(model); });
    } else if (predict_cmd->parsed()) {
      const auto model = read_model(model_path);
      Dataset data;
      try {
        data = ingest_for_schema(csv::read_text(data_flags.data), model.schema);
      } catch (const Error& e) {
        throw DataError("--data " + data_flags.data + ": " + e.what());
      }
      const auto predictions = predict(model, data);
      const auto leaves = route(model, data);
      const bool effects = data.has_treatment() || model.schema.treatment.has_value();
      write_file(out_path, "--out", [&](std::ostream& o) {
        for (const auto& line : header_lines(command, model.provenance.seed)) o << "# " << line << '\n';
        o << "# target_kind: " << to_string(model.schema.target.kind) << '\n';
        o << "row,leaf,prediction" << (effects ? ",effect" : "") << ",actual\n";
        for (std::size_t i = 0; i < data.n(); ++i) {
          const auto& leaf = model.nodes[leaves[i]];
          o << i << ',' << leaf.path << ',' << csv::format_number(predictions[i]);
          if (effects) {
            const auto e = leaf.stats.effect();
            o << ',' << (e ? csv::format_number(*e) : std::string());
          }
          const double y = data.target()[i];
          o << ',' << (std::isnan(y) ? std::string() : csv::format_number(y)) << '\n';
        }
      });
    } else if (eval->parsed()) {
      if (predictions_path.empty() && model_path.empty()) {
        err << "eval: give --predictions or --model with --data\n";
        return 2;
      }
      MetricKind kind;
      std::vector<double> predicted, actual;
      if (!predictions_path.empty()) {
        const auto table = csv::read_file(predictions_path);
        std::optional<TargetKind> target_kind;
        for (const auto& c : table.comments) {
          if (c.rfind("target_kind: ", 0) == 0) target_kind = parse_target_kind(c.substr(13));
        }
        if (!target_kind) throw DataError("--predictions " + predictions_path + ": no target_kind header line");
        kind = metric_for(*target_kind);
        const auto column = [&](std::string_view name) {
          const auto it = std::find(table.header.begin(), table.header.end(), name);
          if (it == table.header.end()) {
            throw DataError("--predictions " + predictions_path + ": missing column '" + std::string(name) + "'");
          }
          return static_cast<std::size_t>(it - table.header.begin());
        };
        const auto p_col = column("prediction");
        const auto a_col = column("actual");
        for (const auto& row : table.rows) {
          if (row[a_col].empty()) continue;
          const auto p = csv::parse_number(row[p_col]);
          const auto a = csv::parse_number(row[a_col]);
          if (!p || !a) throw DataError("--predictions " + predictions_path + ": non-numeric prediction or actual");
          predicted.push_back(*p);
          actual.push_back(*a);
        }
      } else {
        const auto model = read_model(model_path);
        const auto data = ingest_for_schema(csv::read_text(data_flags.data), model.schema);
        kind = metric_for(model.schema.target.kind);
        const auto all = predict(model, data);
        for (std::size_t i : labelled_rows(data)) {
          predicted.push_back(all[i]);
          actual.push_back(data.target()[i]);
        }
      }
      if (actual.empty()) throw DataError("eval: no rows with an observed target");
      out << metric_line(kind, evaluate(kind, predicted, actual)) << '\n';
    } else if (synth->parsed()) {
      GeneratorSpec spec;
      spec.n = synth_n;
      spec.features = make_features(synth_continuous, synth_nominal);
      spec.target_kind = parse_target_kind(synth_kind);
      spec.mode = parse_generator_mode(synth_mode);
      spec.effect_size = effect;
      spec.base_rate = base_rate;
      spec.noise_seed = common.seed;
      if (!planted.empty()) {
        Schema schema;
        schema.features = spec.features;
        spec.planted = SubgroupCriterion::parse(planted, schema);
      }
      const auto data = generate(spec);
      auto lines = headers;
      lines.push_back("mode: " + std::string(to_string(spec.mode)));
      if (spec.planted) lines.push_back("planted: " + spec.planted->to_string());
      write_file(out_path, "--out", [&](std::ostream& o) { write_csv(data, o, lines); });
      if (!schema_out.empty()) {
        write_file(schema_out, "--schema-out", [&](std::ostream& o) {
          for (const auto& line : headers) o << "# " << line << '\n';
          o << schema_file_text(data);
        });
      }
    } else if (bench->parsed()) {
      const auto data = load(data_flags);
      BenchmarkSpec spec;
      spec.sizes = sizes;
      spec.resamples = resamples;
      spec.methods.clear();
      for (const auto& m : method_names) spec.methods.push_back(parse_method(m));
      spec.seed = common.seed;
      spec.ztree = learn_config(learn_flags, common.seed);
      spec.threshold_grid = grid;
      spec.tune_folds = ext_folds;
      spec.threads = threads;
      spec.timing = timing;
      const auto report = run_benchmark(data, spec);
      write_file(out_path, "--out", [&](std::ostream& o) { write_benchmark_csv(report, o, headers); });
      if (!figures_path.empty()) {
        write_file(figures_path, "--figures", [&](std::ostream& o) { write_figure_tables(report, o, headers); });
      }
    }
  } catch (const Error& e) {
    err << "ztree: error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "ztree: usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "ztree: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace ztree
