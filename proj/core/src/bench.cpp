#include "tritree/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <mutex>
#include <thread>

#include "tritree/csv.hpp"
#include "tritree/errors.hpp"
#include "tritree/rng.hpp"

namespace tritree {

namespace {

double round9(double v) { return std::round(v * 1e9) / 1e9; }

std::uint64_t q_tag(double q) { return static_cast<std::uint64_t>(std::llround(q * 1e6)); }

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
// written to slots owned by i so output does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
}

double excess(double loss, double full) {
  if (full > 0.0) return loss / full - 1.0;
  return loss == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

struct FoldResult {
  double loss = 0.0;
  double wall_ms = 0.0;
  double error_rate = 0.0;
};

FoldResult fit_and_score(const Dataset& train_set, const Dataset& test_set, const TrainConfig& tc) {
  const auto start = std::chrono::steady_clock::now();
  const Tree tree = train(train_set, tc);
  FoldResult r;
  r.loss = test_loss(tree, test_set);
  r.error_rate = error_rate(tree, test_set);
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

std::vector<double> ExperimentConfig::default_q_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 9; ++i) grid.push_back(round9(i * 0.1));
  return grid;
}

void ExperimentConfig::validate() const {
  if (folds < 2) throw ValidationError("folds must be at least 2");
  if (max_depth < 1) throw ValidationError("max depth must be at least 1");
  if (min_samples < 1) throw ValidationError("min samples must be at least 1");
  if (strategies.empty()) throw ValidationError("no strategies selected");
  if (q_grid.empty()) throw ValidationError("empty q grid");
  for (double q : q_grid) {
    if (!(q >= 0.0 && q <= 0.9 + 1e-12)) throw ValidationError("q grid values must lie in [0, 0.9]");
  }
  std::set<std::string> names;
  for (const auto& d : datasets) {
    if (!names.insert(d.name).second) throw ValidationError("duplicate dataset name '" + d.name + "'");
    d.data.response();
  }
}

std::vector<double> parse_q_grid(const std::string& text) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    auto v = csv::parse_double(s);
    if (!v || !std::isfinite(*v)) throw ParseError("q grid: cannot parse '" + s + "'");
    return *v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ParseError("q grid: expected start:stop:step");
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw ParseError("q grid: need step > 0 and stop >= start");
    for (long i = 0;; ++i) {
      const double q = round9(start + static_cast<double>(i) * step);
      if (q > stop + 1e-9) break;
      out.push_back(q);
    }
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(round9(number(p)));
  }
  if (out.empty()) throw ParseError("q grid: no values");
  for (double q : out) {
    if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("q grid: values must lie in [0, 1]");
  }
  return out;
}

FoldAssignment experiment_folds(const Dataset& ds, const ExperimentConfig& cfg, const std::string& dataset_name) {
  return stratified_kfold(ds, cfg.folds, derive_seed(cfg.seed, {hash_string(dataset_name), hash_string("folds")}));
}

double test_loss(const Tree& tree, const Dataset& test) {
  const auto predictions = tree.predict(test);
  const auto& y = test.response();
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) total += point_loss(y[i], predictions[i], tree.loss_kind());
  return total;
}

double error_rate(const Tree& tree, const Dataset& test) {
  if (tree.loss_kind().is_sse() || test.n_rows() == 0) return std::nan("");
  const auto predictions = tree.predict(test);
  const auto& y = test.response();
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) wrong += predictions[i].predicted_class() != y.label(i);
  return static_cast<double>(wrong) / static_cast<double>(test.n_rows());
}

int tune_depth(const Dataset& ds, const ExperimentConfig& cfg, const std::string& dataset_name) {
  const FoldAssignment folds = experiment_folds(ds, cfg, dataset_name);
  std::vector<Dataset> train_sets, test_sets;
  for (int f = 0; f < folds.k; ++f) {
    train_sets.push_back(ds.subset(folds.train_rows(f)));
    test_sets.push_back(ds.subset(folds.test_rows(f)));
  }
  const auto depths = static_cast<std::size_t>(cfg.max_depth);
  std::vector<double> fold_loss(depths * static_cast<std::size_t>(folds.k), 0.0);
  parallel_for(fold_loss.size(), cfg.threads, [&](std::size_t job) {
    const std::size_t d = job / static_cast<std::size_t>(folds.k);
    const std::size_t f = job % static_cast<std::size_t>(folds.k);
    TrainConfig tc;
    tc.strategy = Strategy::Majority;
    tc.max_depth = static_cast<int>(d) + 1;
    tc.min_samples = cfg.min_samples;
    fold_loss[job] = test_loss(train(train_sets[f], tc), test_sets[f]);
  });
  int best = 1;
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < depths; ++d) {
    double total = 0.0;
    for (int f = 0; f < folds.k; ++f) total += fold_loss[d * static_cast<std::size_t>(folds.k) + static_cast<std::size_t>(f)];
    if (total < best_loss) {
      best_loss = total;
      best = static_cast<int>(d) + 1;
    }
  }
  return best;
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ExperimentRecord> records;
  const std::size_t n_strat = cfg.strategies.size();
  const std::size_t n_q = cfg.q_grid.size();

  for (const NamedDataset& named : cfg.datasets) {
    const Dataset& ds = named.data;
    const FoldAssignment folds = experiment_folds(ds, cfg, named.name);
    const auto k = static_cast<std::size_t>(folds.k);
    const int depth = tune_depth(ds, cfg, named.name);

    std::vector<Dataset> train_sets, test_sets;
    for (int f = 0; f < folds.k; ++f) {
      train_sets.push_back(ds.subset(folds.train_rows(f)));
      test_sets.push_back(ds.subset(folds.test_rows(f)));
    }

    auto train_config = [&](Strategy s) {
      TrainConfig tc;
      tc.strategy = s;
      tc.max_depth = depth;
      tc.min_samples = cfg.min_samples;
      return tc;
    };

    // Full loss per (strategy, fold) on uncensored data.
    std::vector<FoldResult> full(n_strat * k);
    parallel_for(full.size(), cfg.threads, [&](std::size_t job) {
      const std::size_t s = job / k;
      const std::size_t f = job % k;
      full[job] = fit_and_score(train_sets[f], test_sets[f], train_config(cfg.strategies[s]));
    });

    // Censored runs, one job per (q, fold); every strategy sees the same
    // censored copies.
    std::vector<FoldResult> runs(n_q * k * n_strat);
    parallel_for(n_q * k, cfg.threads, [&](std::size_t job) {
      const std::size_t qi = job / k;
      const std::size_t f = job % k;
      CensorSpec spec;
      spec.scenario = cfg.scenario;
      spec.q = cfg.q_grid[qi];
      spec.seed = derive_seed(cfg.seed, {hash_string(named.name), static_cast<std::uint64_t>(cfg.scenario),
                                         q_tag(spec.q), static_cast<std::uint64_t>(f)});
      const auto [tr, te] = apply_scenario(train_sets[f], test_sets[f], spec);
      for (std::size_t s = 0; s < n_strat; ++s) {
        runs[(qi * k + f) * n_strat + s] = fit_and_score(tr, te, train_config(cfg.strategies[s]));
      }
    });

    for (std::size_t s = 0; s < n_strat; ++s) {
      double full_total = 0.0;
      for (std::size_t f = 0; f < k; ++f) full_total += full[s * k + f].loss;
      for (std::size_t qi = 0; qi < n_q; ++qi) {
        ExperimentRecord agg;
        agg.dataset = named.name;
        agg.strategy = cfg.strategies[s];
        agg.scenario = cfg.scenario;
        agg.q = cfg.q_grid[qi];
        agg.fold = -1;
        agg.depth = depth;
        std::vector<ExperimentRecord> per_fold;
        double errors = 0.0;
        for (std::size_t f = 0; f < k; ++f) {
          const FoldResult& r = runs[(qi * k + f) * n_strat + s];
          ExperimentRecord rec = agg;
          rec.fold = static_cast<int>(f);
          rec.loss = r.loss;
          rec.excess_loss = excess(r.loss, full[s * k + f].loss);
          rec.wall_ms = r.wall_ms;
          rec.error_rate = r.error_rate;
          agg.loss += r.loss;
          agg.wall_ms += r.wall_ms;
          errors += r.error_rate * static_cast<double>(test_sets[f].n_rows());
          per_fold.push_back(std::move(rec));
        }
        agg.excess_loss = excess(agg.loss, full_total);
        agg.error_rate = errors / static_cast<double>(ds.n_rows());
        records.push_back(std::move(agg));
        for (auto& r : per_fold) records.push_back(std::move(r));
      }
    }
  }
  return records;
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = kRecordHeader;
  out += '\n';
  for (const auto& r : records) {
    std::ostringstream wall;
    wall << std::fixed << std::setprecision(3) << r.wall_ms;
    out += csv::escape(r.dataset) + ',' + to_string(r.strategy) + ',' + to_string(r.scenario) + ',' +
           csv::format_double(r.q) + ',' + std::to_string(r.fold) + ',' + csv::format_double(r.loss) + ',' +
           csv::format_double(r.excess_loss) + ',' + std::to_string(r.depth) + ',' + wall.str() + '\n';
  }
  return out;
}

void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path) {
  csv::write_file(path, records_to_csv(records));
}

std::vector<ExperimentRecord> parse_records_csv(const std::string& text) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw ParseError("results csv: missing header");
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i].text;
  if (header != kRecordHeader) throw ParseError("results csv: unexpected header '" + header + "'");
  auto number = [](const std::string& s) {
    auto v = csv::parse_double(s);
    if (!v) throw ParseError("results csv: bad number '" + s + "'");
    return *v;
  };
  std::vector<ExperimentRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != 9) throw ParseError("results csv row " + std::to_string(i) + ": expected 9 fields");
    ExperimentRecord r;
    r.dataset = f[0].text;
    r.strategy = parse_strategy(f[1].text);
    r.scenario = parse_scenario(f[2].text);
    r.q = number(f[3].text);
    r.fold = static_cast<int>(number(f[4].text));
    r.loss = number(f[5].text);
    r.excess_loss = number(f[6].text);
    r.depth = static_cast<int>(number(f[7].text));
    r.wall_ms = number(f[8].text);
    r.error_rate = std::nan("");
    out.push_back(std::move(r));
  }
  return out;
}

std::map<std::tuple<Scenario, Strategy, double>, double> mean_excess_across_datasets(
    const std::vector<ExperimentRecord>& records) {
  std::map<std::tuple<Scenario, Strategy, double>, std::pair<double, int>> acc;
  for (const auto& r : records) {
    if (r.fold != -1) continue;
    auto& [sum, n] = acc[{r.scenario, r.strategy, r.q}];
    sum += r.excess_loss;
    ++n;
  }
  std::map<std::tuple<Scenario, Strategy, double>, double> out;
  for (const auto& [key, v] : acc) out[key] = v.first / v.second;
  return out;
}

std::string summary_table(const std::vector<ExperimentRecord>& records) {
  const auto means = mean_excess_across_datasets(records);
  std::set<Scenario> scenarios;
  std::set<double> qs;
  std::vector<Strategy> strategies;
  for (const auto& [key, v] : means) {
    scenarios.insert(std::get<0>(key));
    qs.insert(std::get<2>(key));
    if (std::find(strategies.begin(), strategies.end(), std::get<1>(key)) == strategies.end()) {
      strategies.push_back(std::get<1>(key));
    }
  }
  std::sort(strategies.begin(), strategies.end());
  std::ostringstream out;
  for (Scenario sc : scenarios) {
    out << "mean excess loss, scenario " << to_string(sc) << '\n';
    out << std::setw(6) << "q";
    for (Strategy s : strategies) out << std::setw(13) << to_string(s);
    out << '\n';
    for (double q : qs) {
      out << std::setw(6) << std::fixed << std::setprecision(2) << q;
      for (Strategy s : strategies) {
        auto it = means.find({sc, s, q});
        if (it == means.end()) {
          out << std::setw(13) << "-";
        } else {
          out << std::setw(13) << std::setprecision(4) << it->second;
        }
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace tritree
