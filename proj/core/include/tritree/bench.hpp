#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tritree/censor.hpp"
#include "tritree/data.hpp"
#include "tritree/split.hpp"
#include "tritree/tree.hpp"

namespace tritree {

struct NamedDataset {
  std::string name;
  Dataset data;
};

struct ExperimentConfig {
  std::vector<NamedDataset> datasets;
  std::vector<Strategy> strategies{all_strategies().begin(), all_strategies().end()};
  Scenario scenario = Scenario::Mcar;
  std::vector<double> q_grid = default_q_grid();
  int folds = 10;
  int max_depth = 5;
  std::size_t min_samples = 5;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  static std::vector<double> default_q_grid();
  void validate() const;
};

struct ExperimentRecord {
  std::string dataset;
  Strategy strategy = Strategy::Majority;
  Scenario scenario = Scenario::Mcar;
  double q = 0.0;
  int fold = -1;  // -1 marks the aggregate over folds
  double loss = 0.0;
  double excess_loss = 0.0;
  int depth = 0;
  double wall_ms = 0.0;
  // Misclassification rate on the test rows (classification only; NaN for
  // regression). Diagnostic, not part of the CSV.
  double error_rate = 0.0;
};

// "start:stop:step" (inclusive stop) or a comma list. Values are rounded to
// 9 decimals so 0.1 steps print as 0.3 rather than 0.30000000000000004.
std::vector<double> parse_q_grid(const std::string& text);

// Fold assignment used for both depth tuning and the censoring sweep.
FoldAssignment experiment_folds(const Dataset& ds, const ExperimentConfig& cfg, const std::string& dataset_name);

// Sum of per-row test losses (squared error, or clamped negative
// log-likelihood) of `tree` on the labeled dataset `test`.
double test_loss(const Tree& tree, const Dataset& test);
double error_rate(const Tree& tree, const Dataset& test);

// Depth in 1..max_depth minimizing the k-fold test loss of Majority trees on
// the uncensored data; ties go to the smaller depth.
int tune_depth(const Dataset& ds, const ExperimentConfig& cfg, const std::string& dataset_name = "");

// Full censoring sweep. Emits, per dataset and strategy, for each q one
// aggregate record (fold -1) followed by per-fold records.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg);

inline constexpr const char* kRecordHeader = "dataset,strategy,scenario,q,fold,loss,excess_loss,depth,wall_ms";

std::string records_to_csv(const std::vector<ExperimentRecord>& records);
void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path);
std::vector<ExperimentRecord> parse_records_csv(const std::string& text);

// Unweighted mean of aggregate excess loss across datasets, keyed by
// (scenario, strategy, q).
std::map<std::tuple<Scenario, Strategy, double>, double> mean_excess_across_datasets(
    const std::vector<ExperimentRecord>& records);

// Plain-text table of mean_excess_across_datasets: one row per q, one
// column per strategy.
std::string summary_table(const std::vector<ExperimentRecord>& records);

}  // namespace tritree
