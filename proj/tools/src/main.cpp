// tritree command-line driver: censoring sweeps, single-tree training,
// prediction, the bias simulation and the bundled synthetic data.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include "tritree/bench.hpp"
#include "tritree/biasdemo.hpp"
#include "tritree/csv.hpp"
#include "tritree/data.hpp"
#include "tritree/errors.hpp"
#include "tritree/synthetic.hpp"
#include "tritree/tree.hpp"

namespace fs = std::filesystem;
using namespace tritree;

namespace {

struct DataOptions {
  std::vector<std::string> paths;
  std::string schema;
  std::string target;
  std::string task;
};

void add_data_options(CLI::App* cmd, DataOptions& opt, bool many) {
  if (many) {
    cmd->add_option("--data", opt.paths, "CSV file (repeatable)")->required()->check(CLI::ExistingFile);
  } else {
    cmd->add_option("--data", opt.paths, "CSV file")->required()->expected(1)->check(CLI::ExistingFile);
  }
  cmd->add_option("--schema", opt.schema,
                  "JSON schema sidecar; defaults to <data>.schema.json when that file exists")
      ->check(CLI::ExistingFile);
  cmd->add_option("--target", opt.target, "response column (overrides the schema)");
  cmd->add_option("--task", opt.task, "regression or classification (overrides the schema)")
      ->check(CLI::IsMember({"regression", "classification"}));
}

CsvSchema schema_for(const std::string& data_path, const DataOptions& opt) {
  CsvSchema schema;
  if (!opt.schema.empty()) {
    schema = load_schema(opt.schema);
  } else {
    fs::path sidecar = fs::path(data_path).replace_extension(".schema.json");
    if (fs::exists(sidecar)) schema = load_schema(sidecar.string());
  }
  if (!opt.target.empty()) schema.target = opt.target;
  if (!opt.task.empty()) schema.task = parse_task_kind(opt.task);
  return schema;
}

Dataset load_labeled(const std::string& path, const DataOptions& opt) {
  CsvSchema schema = schema_for(path, opt);
  if (!schema.target) throw SchemaError(path + ": no target column (use --target or a schema)");
  return load_csv(path, schema);
}

std::vector<Strategy> parse_strategies(const std::string& text) {
  if (text.empty() || text == "all") return {all_strategies().begin(), all_strategies().end()};
  std::vector<Strategy> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_strategy(item));
  }
  if (out.empty()) throw ValidationError("empty strategy list");
  return out;
}

std::string predictions_csv(const Tree& tree, const std::vector<LeafValue>& preds) {
  std::string out = "prediction";
  const auto& classes = tree.class_names();
  for (const auto& c : classes) out += ",p_" + csv::escape(c, false);
  out += '\n';
  for (const auto& p : preds) {
    if (classes.empty()) {
      out += csv::format_double(p.value());
    } else {
      out += csv::escape(classes[static_cast<std::size_t>(p.predicted_class())], false);
      for (double v : p.probs()) out += ',' + csv::format_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision trees with missing-data strategies and censoring benchmarks"};
  app.require_subcommand(1);

  // run
  DataOptions run_data;
  std::string run_strategies = "all";
  std::string run_scenario = "mcar";
  std::string run_grid = "0:0.9:0.1";
  std::string run_out;
  ExperimentConfig run_cfg;
  auto* run = app.add_subcommand("run", "k-fold censoring sweep over strategies and missingness levels");
  add_data_options(run, run_data, true);
  run->add_option("--strategies", run_strategies, "comma list or 'all'");
  run->add_option("--scenario", run_scenario, "mcar, mcar-test or im")
      ->check(CLI::IsMember({"mcar", "mcar-test", "im"}));
  run->add_option("--q-grid", run_grid, "start:stop:step or comma list");
  run->add_option("--folds", run_cfg.folds, "number of folds")->check(CLI::Range(2, 1000));
  run->add_option("--max-depth", run_cfg.max_depth, "upper end of the depth search")->check(CLI::Range(1, 64));
  run->add_option("--min-samples", run_cfg.min_samples, "minimum rows per child");
  run->add_option("--seed", run_cfg.seed, "master seed");
  run->add_option("--threads", run_cfg.threads, "worker threads")->check(CLI::Range(1u, 1024u));
  run->add_option("--out", run_out, "result CSV")->required();

  // train
  DataOptions train_data;
  TrainConfig train_cfg;
  std::string train_strategy = "trinary";
  std::string train_dump;
  auto* trn = app.add_subcommand("train", "train one tree and print it");
  add_data_options(trn, train_data, false);
  trn->add_option("--strategy", train_strategy, "majority, mia, fc, trinary or trinary-mia");
  trn->add_option("--depth", train_cfg.max_depth, "maximum depth")->check(CLI::Range(0, 64));
  trn->add_option("--min-samples", train_cfg.min_samples, "minimum rows per child");
  trn->add_option("--dump-tree", train_dump, "write the tree document (JSON) here");

  // predict
  std::string pred_tree, pred_data, pred_out;
  auto* prd = app.add_subcommand("predict", "apply a saved tree to a CSV");
  prd->add_option("--tree", pred_tree, "tree document from train --dump-tree")->required()->check(CLI::ExistingFile);
  prd->add_option("--data", pred_data, "CSV with the tree's feature columns")->required()->check(CLI::ExistingFile);
  prd->add_option("--out", pred_out, "prediction CSV")->required();

  // bias
  BiasScenario bias_sc;
  std::string bias_out;
  auto* bias = app.add_subcommand("bias", "Monte Carlo bias of leaf estimates at a fixed split");
  bias->add_option("--a", bias_sc.a, "mean response left of the split");
  bias->add_option("--b", bias_sc.b, "mean response right of the split");
  bias->add_option("--p", bias_sc.p, "probability of the right region");
  bias->add_option("--q", bias_sc.q, "censoring probability");
  bias->add_option("--sigma", bias_sc.sigma, "noise standard deviation");
  bias->add_option("--n", bias_sc.n, "rows per replication");
  bias->add_option("--reps", bias_sc.reps, "replications");
  bias->add_option("--seed", bias_sc.seed, "seed");
  bias->add_option("--out", bias_out, "result CSV (stdout when omitted)");

  // synth
  SyntheticConfig synth_cfg;
  std::string synth_out;
  auto* syn = app.add_subcommand("synth", "write the synthetic regression dataset and its schema");
  syn->add_option("--rows", synth_cfg.n_rows, "rows");
  syn->add_option("--seed", synth_cfg.seed, "seed");
  syn->add_option("--out", synth_out, "CSV path; the schema goes next to it")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      for (const auto& path : run_data.paths) {
        run_cfg.datasets.push_back({fs::path(path).stem().string(), load_labeled(path, run_data)});
      }
      run_cfg.strategies = parse_strategies(run_strategies);
      run_cfg.scenario = parse_scenario(run_scenario);
      run_cfg.q_grid = parse_q_grid(run_grid);
      const auto records = run_experiment(run_cfg);
      emit_csv(records, run_out);
      std::cout << summary_table(records);
    } else if (*trn) {
      const Dataset ds = load_labeled(train_data.paths.front(), train_data);
      train_cfg.strategy = parse_strategy(train_strategy);
      const Tree tree = train(ds, train_cfg);
      std::cout << render(tree);
      if (!train_dump.empty()) csv::write_file(train_dump, serialize(tree));
    } else if (*prd) {
      const Tree tree = deserialize(csv::read_file(pred_tree));
      CsvSchema schema;
      for (const auto& f : tree.features()) {
        schema.kinds[f.name] = f.kind == FeatureKind::Categorical ? ColumnKind::Categorical : ColumnKind::Numeric;
      }
      schema.default_kind = ColumnKind::Ignore;
      const Dataset ds = load_csv(pred_data, schema);
      csv::write_file(pred_out, predictions_csv(tree, tree.predict(ds)));
    } else if (*bias) {
      const std::string text = bias_to_csv(simulate_all(bias_sc));
      if (bias_out.empty()) {
        std::cout << text;
      } else {
        csv::write_file(bias_out, text);
      }
    } else if (*syn) {
      const Dataset ds = make_synthetic(synth_cfg);
      write_csv(ds, synth_out);
      fs::path schema_path = fs::path(synth_out).replace_extension(".schema.json");
      csv::write_file(schema_path.string(),
                 "{\n  \"target\": \"y\",\n  \"task\": \"regression\",\n  \"columns\": {\"x5\": \"categorical\"}\n}\n");
    }
  } catch (const std::exception& e) {
    std::cerr << "tritree: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
