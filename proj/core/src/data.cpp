#include "tritree/data.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include <nlohmann/json.hpp>

#include "tritree/csv.hpp"
#include "tritree/errors.hpp"
#include "tritree/rng.hpp"

namespace tritree {

namespace {

bool same_cell(double a, double b) { return (is_missing(a) && is_missing(b)) || a == b; }

std::optional<long long> parse_integer(const std::string& s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Integer-looking labels sort numerically ("2" before "10"); anything else
// sorts lexicographically.
std::vector<std::string> sorted_labels(const std::set<std::string>& labels) {
  std::vector<std::string> out(labels.begin(), labels.end());
  const bool all_int = std::all_of(out.begin(), out.end(),
                                   [](const std::string& s) { return parse_integer(s).has_value(); });
  if (all_int) {
    std::stable_sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
      return *parse_integer(a) < *parse_integer(b);
    });
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- columns

FeatureColumn::FeatureColumn(std::string name, FeatureKind kind, std::vector<std::string> categories,
                             std::vector<double> values)
    : name_(std::move(name)), kind_(kind), categories_(std::move(categories)), values_(std::move(values)) {
  validate();
}

FeatureColumn FeatureColumn::numeric(std::string name, std::vector<double> values) {
  return FeatureColumn(std::move(name), FeatureKind::Numeric, {}, std::move(values));
}

FeatureColumn FeatureColumn::categorical(std::string name, std::vector<std::string> categories,
                                         std::vector<double> codes) {
  return FeatureColumn(std::move(name), FeatureKind::Categorical, std::move(categories), std::move(codes));
}

void FeatureColumn::validate() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (is_missing(v)) continue;
    if (!std::isfinite(v)) {
      throw ValidationError("column '" + name_ + "' row " + std::to_string(i) + ": non-finite value");
    }
    if (kind_ == FeatureKind::Categorical &&
        (v < 0 || v != std::floor(v) || v >= static_cast<double>(categories_.size()))) {
      throw ValidationError("column '" + name_ + "' row " + std::to_string(i) +
                            ": category code outside dictionary");
    }
  }
}

std::size_t FeatureColumn::missing_count() const {
  return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), is_missing));
}

std::optional<int> FeatureColumn::category_code(const std::string& label) const {
  auto it = std::find(categories_.begin(), categories_.end(), label);
  if (it == categories_.end()) return std::nullopt;
  return static_cast<int>(it - categories_.begin());
}

FeatureColumn FeatureColumn::with_values(std::vector<double> values) const {
  if (values.size() != values_.size()) throw ValidationError("column '" + name_ + "': row count changed");
  return FeatureColumn(name_, kind_, categories_, std::move(values));
}

bool FeatureColumn::operator==(const FeatureColumn& other) const {
  return name_ == other.name_ && kind_ == other.kind_ && categories_ == other.categories_ &&
         std::equal(values_.begin(), values_.end(), other.values_.begin(), other.values_.end(), same_cell);
}

ResponseColumn ResponseColumn::real(std::string name, std::vector<double> values) {
  ResponseColumn r;
  r.name_ = std::move(name);
  r.task_ = TaskKind::Regression;
  r.values_ = std::move(values);
  r.validate();
  return r;
}

ResponseColumn ResponseColumn::classes(std::string name, std::vector<std::string> class_names,
                                       std::vector<double> labels) {
  ResponseColumn r;
  r.name_ = std::move(name);
  r.task_ = TaskKind::Classification;
  r.class_names_ = std::move(class_names);
  r.values_ = std::move(labels);
  r.validate();
  return r;
}

void ResponseColumn::validate() const {
  if (task_ == TaskKind::Classification && class_names_.size() < 2) {
    throw ValidationError("response '" + name_ + "': classification needs at least 2 classes");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v)) {
      throw ValidationError("response '" + name_ + "' row " + std::to_string(i) + ": missing or non-finite");
    }
    if (task_ == TaskKind::Classification &&
        (v < 0 || v != std::floor(v) || v >= static_cast<double>(class_names_.size()))) {
      throw ValidationError("response '" + name_ + "' row " + std::to_string(i) + ": label outside 0..K-1");
    }
  }
}

// ---------------------------------------------------------------- dataset

Dataset::Dataset(std::vector<FeatureColumn> columns, std::optional<ResponseColumn> response, std::size_t n_rows)
    : columns_(std::move(columns)), response_(std::move(response)), n_rows_(n_rows) {
  std::set<std::string> names;
  for (const auto& c : columns_) {
    if (c.size() != n_rows_) {
      throw ValidationError("column '" + c.name() + "' has " + std::to_string(c.size()) + " rows, expected " +
                            std::to_string(n_rows_));
    }
    if (!names.insert(c.name()).second) throw SchemaError("duplicate column name '" + c.name() + "'");
  }
  if (response_ && response_->size() != n_rows_) {
    throw ValidationError("response has " + std::to_string(response_->size()) + " rows, expected " +
                          std::to_string(n_rows_));
  }
}

Dataset::Dataset(std::vector<FeatureColumn> columns, ResponseColumn response)
    : Dataset(std::move(columns), std::optional<ResponseColumn>(response), response.size()) {}

std::optional<std::size_t> Dataset::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].name() == name) return j;
  }
  return std::nullopt;
}

const ResponseColumn& Dataset::response() const {
  if (!response_) throw ValidationError("dataset has no response column");
  return *response_;
}

std::vector<double> Dataset::row(std::size_t i) const {
  std::vector<double> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c[i]);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<FeatureColumn> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (std::size_t r : rows) v.push_back(c.values()[r]);
    cols.push_back(c.is_categorical() ? FeatureColumn::categorical(c.name(), c.categories(), std::move(v))
                                       : FeatureColumn::numeric(c.name(), std::move(v)));
  }
  std::optional<ResponseColumn> resp;
  if (response_) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (std::size_t r : rows) v.push_back((*response_)[r]);
    resp = response_->is_classification()
               ? ResponseColumn::classes(response_->name(), response_->class_names(), std::move(v))
               : ResponseColumn::real(response_->name(), std::move(v));
  }
  return Dataset(std::move(cols), std::move(resp), rows.size());
}

Dataset Dataset::with_columns(std::vector<FeatureColumn> columns) const {
  return Dataset(std::move(columns), response_, n_rows_);
}

std::size_t Dataset::missing_count() const {
  std::size_t n = 0;
  for (const auto& c : columns_) n += c.missing_count();
  return n;
}

// ---------------------------------------------------------------- schema

ColumnKind parse_column_kind(const std::string& text) {
  if (text == "numeric" || text == "num") return ColumnKind::Numeric;
  if (text == "categorical" || text == "cat") return ColumnKind::Categorical;
  if (text == "ignore") return ColumnKind::Ignore;
  throw SchemaError("unknown column kind '" + text + "' (expected numeric, categorical or ignore)");
}

TaskKind parse_task_kind(const std::string& text) {
  if (text == "regression") return TaskKind::Regression;
  if (text == "classification") return TaskKind::Classification;
  throw SchemaError("unknown task '" + text + "' (expected regression or classification)");
}

CsvSchema load_schema(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(csv::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("schema '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw ParseError("schema '" + path + "': expected a JSON object");
  CsvSchema schema;
  try {
    if (doc.contains("target")) schema.target = doc.at("target").get<std::string>();
    if (doc.contains("task")) schema.task = parse_task_kind(doc.at("task").get<std::string>());
    if (doc.contains("default")) schema.default_kind = parse_column_kind(doc.at("default").get<std::string>());
    if (doc.contains("missing_tokens")) {
      schema.missing_tokens = doc.at("missing_tokens").get<std::set<std::string>>();
    }
    if (doc.contains("columns")) {
      for (const auto& [name, kind] : doc.at("columns").items()) {
        schema.kinds[name] = parse_column_kind(kind.get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("schema '" + path + "': " + e.what());
  }
  return schema;
}

CsvSchema schema_of(const Dataset& ds) {
  CsvSchema schema;
  for (const auto& c : ds.columns()) {
    schema.kinds[c.name()] = c.is_categorical() ? ColumnKind::Categorical : ColumnKind::Numeric;
  }
  if (ds.has_response()) {
    schema.target = ds.response().name();
    schema.task = ds.response().task();
  }
  return schema;
}

// ---------------------------------------------------------------- csv io

Dataset parse_csv(const std::string& text, const CsvSchema& schema) {
  const auto records = csv::parse(text);
  if (records.empty()) throw ValidationError("csv: missing header row");
  const auto& header = records.front();
  const std::size_t n_rows = records.size() - 1;
  if (n_rows == 0) throw ValidationError("csv: no data rows");

  std::vector<std::string> names;
  for (const auto& f : header) names.push_back(f.text);

  std::optional<std::size_t> target_col;
  if (schema.target) {
    auto it = std::find(names.begin(), names.end(), *schema.target);
    if (it == names.end()) throw SchemaError("csv: target column '" + *schema.target + "' not in header");
    target_col = static_cast<std::size_t>(it - names.begin());
  }
  for (const auto& [name, kind] : schema.kinds) {
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw SchemaError("csv: schema column '" + name + "' not in header");
    }
  }

  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != header.size()) {
      throw ParseError("csv row " + std::to_string(r) + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(records[r].size()));
    }
  }

  auto is_missing_token = [&](const csv::Field& f) {
    return !f.quoted && schema.missing_tokens.count(f.text) > 0;
  };

  std::vector<FeatureColumn> columns;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (target_col && c == *target_col) continue;
    auto kit = schema.kinds.find(names[c]);
    const ColumnKind kind = kit == schema.kinds.end() ? schema.default_kind : kit->second;
    if (kind == ColumnKind::Ignore) continue;

    std::vector<double> values(n_rows, kMissing);
    if (kind == ColumnKind::Numeric) {
      for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& f = records[r + 1][c];
        if (is_missing_token(f)) continue;
        auto v = csv::parse_double(f.text);
        if (!v || !std::isfinite(*v)) {
          throw ParseError("csv row " + std::to_string(r + 1) + ", column '" + names[c] +
                           "': cannot parse '" + f.text + "' as a finite number");
        }
        values[r] = *v;
      }
      columns.push_back(FeatureColumn::numeric(names[c], std::move(values)));
    } else {
      std::set<std::string> seen;
      for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& f = records[r + 1][c];
        if (!is_missing_token(f)) seen.insert(f.text);
      }
      std::vector<std::string> dict(seen.begin(), seen.end());
      for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& f = records[r + 1][c];
        if (is_missing_token(f)) continue;
        values[r] = static_cast<double>(std::lower_bound(dict.begin(), dict.end(), f.text) - dict.begin());
      }
      columns.push_back(FeatureColumn::categorical(names[c], std::move(dict), std::move(values)));
    }
  }

  std::optional<ResponseColumn> response;
  if (target_col) {
    const std::size_t c = *target_col;
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (is_missing_token(records[r + 1][c])) {
        throw ValidationError("csv row " + std::to_string(r + 1) + ": response '" + names[c] + "' is missing");
      }
    }
    if (schema.task == TaskKind::Regression) {
      std::vector<double> y(n_rows);
      for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& f = records[r + 1][c];
        auto v = csv::parse_double(f.text);
        if (!v || !std::isfinite(*v)) {
          throw ParseError("csv row " + std::to_string(r + 1) + ", column '" + names[c] +
                           "': cannot parse '" + f.text + "' as a finite number");
        }
        y[r] = *v;
      }
      response = ResponseColumn::real(names[c], std::move(y));
    } else {
      std::set<std::string> seen;
      for (std::size_t r = 0; r < n_rows; ++r) seen.insert(records[r + 1][c].text);
      auto labels = sorted_labels(seen);
      std::map<std::string, int> code;
      for (std::size_t k = 0; k < labels.size(); ++k) code[labels[k]] = static_cast<int>(k);
      std::vector<double> y(n_rows);
      for (std::size_t r = 0; r < n_rows; ++r) y[r] = code.at(records[r + 1][c].text);
      response = ResponseColumn::classes(names[c], std::move(labels), std::move(y));
    }
  }
  return Dataset(std::move(columns), std::move(response), n_rows);
}

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  return parse_csv(csv::read_file(path), schema);
}

std::string to_csv(const Dataset& ds) {
  const CsvSchema defaults;
  std::string out;
  bool first = true;
  for (const auto& c : ds.columns()) {
    if (!first) out += ',';
    out += csv::escape(c.name());
    first = false;
  }
  if (ds.has_response()) {
    if (!first) out += ',';
    out += csv::escape(ds.response().name());
  }
  out += '\n';

  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    first = true;
    for (const auto& c : ds.columns()) {
      if (!first) out += ',';
      first = false;
      const double v = c[r];
      if (is_missing(v)) continue;
      if (c.is_categorical()) {
        const auto& label = c.categories()[static_cast<std::size_t>(v)];
        out += csv::escape(label, defaults.missing_tokens.count(label) > 0);
      } else {
        out += csv::format_double(v);
      }
    }
    if (ds.has_response()) {
      if (!first) out += ',';
      const auto& y = ds.response();
      if (y.is_classification()) {
        const auto& label = y.class_names()[static_cast<std::size_t>(y.label(r))];
        out += csv::escape(label, defaults.missing_tokens.count(label) > 0);
      } else {
        out += csv::format_double(y[r]);
      }
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& ds, const std::string& path) { csv::write_file(path, to_csv(ds)); }

// ---------------------------------------------------------------- folds

std::vector<std::size_t> FoldAssignment::train_rows(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i) {
    if (fold_of_row[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::test_rows(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i) {
    if (fold_of_row[i] == fold) out.push_back(i);
  }
  return out;
}

FoldAssignment stratified_kfold(const Dataset& ds, int k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k-fold: k must be at least 2");
  if (static_cast<std::size_t>(k) > ds.n_rows()) {
    throw ValidationError("k-fold: k=" + std::to_string(k) + " exceeds row count " + std::to_string(ds.n_rows()));
  }
  Rng rng(seed);
  FoldAssignment folds;
  folds.k = k;
  folds.fold_of_row.assign(ds.n_rows(), -1);

  std::vector<std::vector<std::size_t>> strata;
  const auto& y = ds.response();
  if (y.is_classification()) {
    strata.resize(static_cast<std::size_t>(y.n_classes()));
    for (std::size_t i = 0; i < ds.n_rows(); ++i) strata[static_cast<std::size_t>(y.label(i))].push_back(i);
  } else {
    strata.emplace_back(ds.n_rows());
    std::iota(strata[0].begin(), strata[0].end(), std::size_t{0});
  }

  std::size_t dealer = 0;
  for (auto& stratum : strata) {
    rng.shuffle(std::span<std::size_t>(stratum));
    for (std::size_t row : stratum) {
      folds.fold_of_row[row] = static_cast<int>(dealer % static_cast<std::size_t>(k));
      ++dealer;
    }
  }
  return folds;
}

}  // namespace tritree
