#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace tritree {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double cell) { return std::isnan(cell); }

enum class FeatureKind { Numeric, Categorical };

// One covariate. Cells are stored as doubles: numeric values directly,
// categorical values as integral codes into `categories`. NaN marks a
// missing cell in both cases.
class FeatureColumn {
 public:
  static FeatureColumn numeric(std::string name, std::vector<double> values);
  static FeatureColumn categorical(std::string name, std::vector<std::string> categories,
                                   std::vector<double> codes);

  const std::string& name() const { return name_; }
  FeatureKind kind() const { return kind_; }
  bool is_categorical() const { return kind_ == FeatureKind::Categorical; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t row) const { return values_[row]; }
  bool missing(std::size_t row) const { return is_missing(values_[row]); }
  std::size_t missing_count() const;

  const std::vector<std::string>& categories() const { return categories_; }
  // Code of a category name, or nullopt when it is not in the dictionary.
  std::optional<int> category_code(const std::string& label) const;

  // Copy of this column with replaced cells; re-validates.
  FeatureColumn with_values(std::vector<double> values) const;

  bool operator==(const FeatureColumn& other) const;

 private:
  FeatureColumn(std::string name, FeatureKind kind, std::vector<std::string> categories,
                std::vector<double> values);
  void validate() const;

  std::string name_;
  FeatureKind kind_ = FeatureKind::Numeric;
  std::vector<std::string> categories_;
  std::vector<double> values_;
};

enum class TaskKind { Regression, Classification };

// Observed response. Class labels are stored as integral doubles in
// 0..K-1 with names in `class_names`.
class ResponseColumn {
 public:
  static ResponseColumn real(std::string name, std::vector<double> values);
  static ResponseColumn classes(std::string name, std::vector<std::string> class_names,
                                std::vector<double> labels);

  const std::string& name() const { return name_; }
  TaskKind task() const { return task_; }
  bool is_classification() const { return task_ == TaskKind::Classification; }
  int n_classes() const { return static_cast<int>(class_names_.size()); }
  const std::vector<std::string>& class_names() const { return class_names_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t row) const { return values_[row]; }
  int label(std::size_t row) const { return static_cast<int>(values_[row]); }

  bool operator==(const ResponseColumn&) const = default;

 private:
  ResponseColumn() = default;
  void validate() const;

  std::string name_;
  TaskKind task_ = TaskKind::Regression;
  std::vector<std::string> class_names_;
  std::vector<double> values_;
};

// Columnar table of features plus an optional response. Immutable once
// built; censoring and row selection return new datasets.
class Dataset {
 public:
  Dataset(std::vector<FeatureColumn> columns, std::optional<ResponseColumn> response,
          std::size_t n_rows);
  Dataset(std::vector<FeatureColumn> columns, ResponseColumn response);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_features() const { return columns_.size(); }
  const std::vector<FeatureColumn>& columns() const { return columns_; }
  const FeatureColumn& column(std::size_t j) const { return columns_.at(j); }
  std::optional<std::size_t> column_index(const std::string& name) const;

  bool has_response() const { return response_.has_value(); }
  // Throws ValidationError when the dataset is unlabeled.
  const ResponseColumn& response() const;

  // Cells of row `i` across all features, in column order.
  std::vector<double> row(std::size_t i) const;

  Dataset subset(std::span<const std::size_t> rows) const;
  Dataset with_columns(std::vector<FeatureColumn> columns) const;
  std::size_t missing_count() const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<FeatureColumn> columns_;
  std::optional<ResponseColumn> response_;
  std::size_t n_rows_ = 0;
};

enum class ColumnKind { Numeric, Categorical, Ignore };

struct CsvSchema {
  // Per-column kinds; columns not listed get `default_kind`.
  std::map<std::string, ColumnKind> kinds;
  ColumnKind default_kind = ColumnKind::Numeric;
  // Response column. When unset the dataset is unlabeled.
  std::optional<std::string> target;
  TaskKind task = TaskKind::Regression;
  std::set<std::string> missing_tokens = {"", "NA", "nan"};
};

// Reads a schema sidecar (JSON object with optional "target", "task",
// "default", "missing_tokens" and a "columns" map of name -> kind).
CsvSchema load_schema(const std::string& path);
ColumnKind parse_column_kind(const std::string& text);
TaskKind parse_task_kind(const std::string& text);

Dataset load_csv(const std::string& path, const CsvSchema& schema);
Dataset parse_csv(const std::string& text, const CsvSchema& schema);

// Writes features then the response (if any). Missing cells are written as
// an empty unquoted field; a categorical value that collides with a missing
// token is quoted so it reloads as present.
std::string to_csv(const Dataset& ds);
void write_csv(const Dataset& ds, const std::string& path);

// Schema that reloads `ds` from its own to_csv output.
CsvSchema schema_of(const Dataset& ds);

struct FoldAssignment {
  std::vector<int> fold_of_row;
  int k = 0;

  std::vector<std::size_t> train_rows(int fold) const;
  std::vector<std::size_t> test_rows(int fold) const;
};

// Classification: shuffle each class and deal round-robin, continuing the
// dealer position across classes. Regression: one shuffle, dealt
// round-robin.
FoldAssignment stratified_kfold(const Dataset& ds, int k, std::uint64_t seed);

}  // namespace tritree
