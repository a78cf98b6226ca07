#include "tritree/censor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tritree/errors.hpp"
#include "tritree/rng.hpp"

namespace tritree {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Mcar: return "mcar";
    case Scenario::McarTest: return "mcar-test";
    case Scenario::Im: return "im";
  }
  return "?";
}

Scenario parse_scenario(const std::string& text) {
  if (text == "mcar") return Scenario::Mcar;
  if (text == "mcar-test" || text == "mcartest") return Scenario::McarTest;
  if (text == "im") return Scenario::Im;
  throw ParseError("unknown scenario '" + text + "' (expected mcar, mcar-test or im)");
}

namespace {

void check_q(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("missingness q must lie in [0, 1]");
}

std::vector<std::size_t> present_rows(const FeatureColumn& col) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (!col.missing(i)) rows.push_back(i);
  }
  return rows;
}

}  // namespace

std::size_t censored_count(double q, std::size_t n_rows) {
  check_q(q);
  return static_cast<std::size_t>(std::llround(q * static_cast<double>(n_rows)));
}

Dataset censor_mcar(const Dataset& ds, double q, std::uint64_t seed) {
  const std::size_t target = censored_count(q, ds.n_rows());
  if (target == 0) return ds;
  std::vector<FeatureColumn> columns;
  columns.reserve(ds.n_features());
  for (std::size_t j = 0; j < ds.n_features(); ++j) {
    const FeatureColumn& col = ds.column(j);
    auto rows = present_rows(col);
    const std::size_t m = std::min(target, rows.size());
    Rng rng(derive_seed(seed, {j}));
    // Partial Fisher-Yates: the first m slots become a uniform sample.
    for (std::size_t i = 0; i < m; ++i) {
      const auto k = i + static_cast<std::size_t>(rng.uniform_index(rows.size() - i));
      std::swap(rows[i], rows[k]);
    }
    std::vector<double> values(col.values().begin(), col.values().end());
    for (std::size_t i = 0; i < m; ++i) values[rows[i]] = kMissing;
    columns.push_back(col.with_values(std::move(values)));
  }
  return ds.with_columns(std::move(columns));
}

Dataset censor_im(const Dataset& ds, double q) {
  const std::size_t target = censored_count(q, ds.n_rows());
  if (target == 0) return ds;
  std::vector<FeatureColumn> columns;
  columns.reserve(ds.n_features());
  for (const FeatureColumn& col : ds.columns()) {
    auto rows = present_rows(col);
    if (col.kind() == FeatureKind::Numeric) {
      std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) { return col[a] > col[b]; });
    } else {
      std::vector<std::size_t> freq(col.categories().size(), 0);
      for (std::size_t r : rows) ++freq[static_cast<std::size_t>(col[r])];
      std::vector<std::size_t> order(freq.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (freq[a] != freq[b]) return freq[a] > freq[b];
        return col.categories()[a] < col.categories()[b];
      });
      std::vector<std::size_t> rank(freq.size());
      for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
      std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
        return rank[static_cast<std::size_t>(col[a])] < rank[static_cast<std::size_t>(col[b])];
      });
    }
    const std::size_t m = std::min(target, rows.size());
    std::vector<double> values(col.values().begin(), col.values().end());
    for (std::size_t i = 0; i < m; ++i) values[rows[i]] = kMissing;
    columns.push_back(col.with_values(std::move(values)));
  }
  return ds.with_columns(std::move(columns));
}

std::pair<Dataset, Dataset> apply_scenario(const Dataset& train, const Dataset& test, const CensorSpec& spec) {
  switch (spec.scenario) {
    case Scenario::Mcar:
      return {censor_mcar(train, spec.q, derive_seed(spec.seed, {1})),
              censor_mcar(test, spec.q, derive_seed(spec.seed, {2}))};
    case Scenario::McarTest:
      check_q(spec.q);
      return {train, censor_mcar(test, spec.q, derive_seed(spec.seed, {2}))};
    case Scenario::Im:
      return {censor_im(train, spec.q), censor_im(test, spec.q)};
  }
  throw ValidationError("unknown scenario");
}

}  // namespace tritree
