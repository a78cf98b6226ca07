// Acceptance gate: one [PASS]/[FAIL] line per criterion. `--only N` runs a
// single criterion; exit status is nonzero when any selected check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracle.hpp"
#include "tritree/bench.hpp"
#include "tritree/biasdemo.hpp"
#include "tritree/censor.hpp"
#include "tritree/csv.hpp"
#include "tritree/data.hpp"
#include "tritree/split.hpp"
#include "tritree/synthetic.hpp"
#include "tritree/tree.hpp"

using namespace tritree;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

std::vector<std::size_t> features_of(const Dataset& ds) {
  std::vector<std::size_t> f(ds.n_features());
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = j;
  return f;
}

LossKind kind_of(int n_classes) { return n_classes ? LossKind::cross_entropy(n_classes) : LossKind::sse(); }

int classes_for(int i) { return i % 3 == 0 ? 0 : 1 + i % 3; }

// AC1: best_split against the brute-force enumerator.
Outcome oracle_equivalence() {
  std::mt19937_64 gen(20240601);
  std::size_t compared = 0, feasible = 0, mismatches = 0;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    testkit::RandomDataSpec spec;
    spec.missing_rate = i % 2 ? 0.3 : 0.0;
    spec.n_classes = classes_for(i);
    const Dataset ds = testkit::random_dataset(gen, spec);
    SplitConfig cfg;
    cfg.min_child = 1 + static_cast<std::size_t>(i % 3);
    cfg.min_child_weight = static_cast<double>(cfg.min_child);
    const auto rows = all_rows(ds.n_rows());
    const auto f = features_of(ds);
    for (Strategy s : all_strategies()) {
      const auto got = best_split(ds, rows, f, s, kind_of(spec.n_classes), cfg);
      const auto want = testkit::oracle_best_loss(ds, rows, f, s, kind_of(spec.n_classes), cfg.min_child,
                                                  cfg.min_child_weight);
      ++compared;
      if (got.has_value() != want.has_value()) {
        ++mismatches;
        continue;
      }
      if (!got) continue;
      ++feasible;
      const double diff = std::abs(got->total_loss - *want);
      worst = std::max(worst, diff);
      if (diff > 1e-9) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(compared) + " comparisons (" + std::to_string(feasible) + " feasible), " +
                               std::to_string(mismatches) +
                               " mismatches, max |diff| " + fmt(worst)};
}

// AC2: bias Monte Carlo at the reference scenario.
Outcome bias_monte_carlo() {
  BiasScenario sc;
  sc.a = 0.0;
  sc.b = 1.0;
  sc.p = 0.5;
  sc.q = 0.3;
  sc.sigma = 0.1;
  sc.n = 200;
  sc.reps = 2000;
  sc.seed = 1;
  Outcome out;
  for (const BiasEntry& e : simulate_all(sc)) {
    std::string line = to_string(e.strategy) + ": mean " + fmt(e.mean_a_hat) + " se " + fmt(e.se);
    bool ok = true;
    switch (e.strategy) {
      case Strategy::Trinary:
        ok = std::abs(e.mean_a_hat - sc.a) < 3.0 * e.se;
        line += " (|mean - a| < 3se)";
        break;
      case Strategy::FractionalCase:
        ok = e.mean_a_hat >= 0.15 - 3.0 * e.se;
        line += " (>= 0.15 - 3se)";
        break;
      default:
        ok = e.mean_a_hat >= e.bound - 3.0 * e.se && e.mean_a_hat - sc.a > 3.0 * e.se;
        line += " kappa " + fmt(e.kappa_hat) + " bound " + fmt(e.bound) + " (>= bound - 3se = " +
                fmt(e.bound - 3.0 * e.se) + ", > a + 3se)";
    }
    out.pass = out.pass && ok;
    out.detail += (out.detail.empty() ? "" : "; ") + line + (ok ? " ok" : " VIOLATED");
  }
  return out;
}

// AC3: MIA == Majority and TrinaryMIA == Trinary without training missingness.
Outcome strategy_equivalence() {
  std::mt19937_64 gen(77);
  std::size_t differing = 0;
  for (int i = 0; i < 50; ++i) {
    testkit::RandomDataSpec spec;
    spec.min_rows = 20;
    spec.max_rows = 80;
    spec.n_classes = classes_for(i);
    const Dataset ds = testkit::random_dataset(gen, spec);
    const Dataset rows = testkit::random_rows_like(gen, ds, 500, 0.0);
    for (auto [a, b] : {std::pair{Strategy::Mia, Strategy::Majority}, std::pair{Strategy::TrinaryMia, Strategy::Trinary}}) {
      TrainConfig ca;
      ca.strategy = a;
      ca.max_depth = 4;
      ca.min_samples = 2;
      TrainConfig cb = ca;
      cb.strategy = b;
      if (train(ds, ca).predict(rows) != train(ds, cb).predict(rows)) ++differing;
    }
  }
  return {differing == 0, "100 tree pairs, " + std::to_string(differing) + " with differing predictions"};
}

// AC4: zero excess at q = 0; MCARTest pairs identical per fold.
Outcome harness_exactness() {
  std::mt19937_64 gen(5);
  testkit::RandomDataSpec cls;
  cls.min_rows = cls.max_rows = 150;
  cls.n_classes = 3;
  SyntheticConfig sc;
  sc.n_rows = 300;
  ExperimentConfig cfg;
  cfg.datasets.push_back({"synthetic300", make_synthetic(sc)});
  cfg.datasets.push_back({"random3class", testkit::random_dataset(gen, cls)});
  cfg.q_grid = {0.0, 0.2, 0.5};
  cfg.folds = 5;
  cfg.max_depth = 4;
  cfg.seed = 11;
  std::size_t nonzero = 0, pair_mismatch = 0, checked = 0;
  for (Scenario s : {Scenario::Mcar, Scenario::McarTest, Scenario::Im}) {
    cfg.scenario = s;
    const auto records = run_experiment(cfg);
    for (const auto& r : records) {
      if (r.q == 0.0 && r.excess_loss != 0.0) ++nonzero;
    }
    if (s != Scenario::McarTest) continue;
    for (const auto& r : records) {
      Strategy partner;
      if (r.strategy == Strategy::Mia) {
        partner = Strategy::Majority;
      } else if (r.strategy == Strategy::TrinaryMia) {
        partner = Strategy::Trinary;
      } else {
        continue;
      }
      for (const auto& o : records) {
        if (o.dataset == r.dataset && o.strategy == partner && o.q == r.q && o.fold == r.fold) {
          ++checked;
          if (o.loss != r.loss || o.excess_loss != r.excess_loss) ++pair_mismatch;
        }
      }
    }
  }
  return {nonzero == 0 && pair_mismatch == 0 && checked > 0,
          std::to_string(nonzero) + " nonzero q=0 excess values; " + std::to_string(checked) +
              " MCARTest pairs checked, " + std::to_string(pair_mismatch) + " differ"};
}

Dataset bundled_synthetic() {
  const std::string dir = TRITREE_DATA_DIR;
  return load_csv(dir + "/synthetic.csv", load_schema(dir + "/synthetic.schema.json"));
}

// AC5: directional orderings at q = 0.5 on the bundled synthetic data.
Outcome directional_trends() {
  ExperimentConfig cfg;
  cfg.datasets.push_back({"synthetic", bundled_synthetic()});
  cfg.q_grid = {0.0, 0.5};
  cfg.seed = 1;
  auto excess = [&](Scenario s) {
    cfg.scenario = s;
    std::map<Strategy, double> out;
    for (const auto& r : run_experiment(cfg)) {
      if (r.fold == -1 && r.q == 0.5) out[r.strategy] = r.excess_loss;
    }
    return out;
  };
  const auto mt = excess(Scenario::McarTest);
  const auto im = excess(Scenario::Im);
  const double tri = mt.at(Strategy::Trinary), fc = mt.at(Strategy::FractionalCase), maj = mt.at(Strategy::Majority);
  const bool mt_ok = tri < fc && fc < maj;
  const double mia = im.at(Strategy::Mia), tmia = im.at(Strategy::TrinaryMia);
  const double itri = im.at(Strategy::Trinary), ifc = im.at(Strategy::FractionalCase);
  const bool im_ok = mia < itri && mia < ifc && tmia < itri && tmia < ifc;
  return {mt_ok && im_ok, "MCARTest trinary " + fmt(tri) + " < fc " + fmt(fc) + " < majority " + fmt(maj) +
                              (mt_ok ? " ok" : " VIOLATED") + "; IM mia " + fmt(mia) + ", trinary-mia " + fmt(tmia) +
                              " vs trinary " + fmt(itri) + ", fc " + fmt(ifc) + (im_ok ? " ok" : " VIOLATED")};
}

// AC6: exact censoring counts and the IM threshold property.
Outcome censoring_exactness() {
  std::mt19937_64 gen(9);
  std::size_t columns = 0, bad_counts = 0, bad_threshold = 0;
  for (int i = 0; i < 40; ++i) {
    testkit::RandomDataSpec spec;
    spec.min_rows = 5;
    spec.max_rows = 300;
    spec.value_levels = 40;
    const Dataset ds = testkit::random_dataset(gen, spec);
    for (int step = 1; step <= 9; ++step) {
      const double q = step / 10.0;
      const std::size_t want = censored_count(q, ds.n_rows());
      const Dataset mcar = censor_mcar(ds, q, static_cast<std::uint64_t>(i * 10 + step));
      const Dataset im = censor_im(ds, q);
      for (std::size_t j = 0; j < ds.n_features(); ++j) {
        columns += 2;
        if (mcar.column(j).missing_count() != want) ++bad_counts;
        if (im.column(j).missing_count() != want) ++bad_counts;
        if (im.column(j).is_categorical()) continue;
        double max_present = -INFINITY, min_censored = INFINITY;
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
          if (im.column(j).missing(r)) {
            min_censored = std::min(min_censored, ds.column(j)[r]);
          } else {
            max_present = std::max(max_present, ds.column(j)[r]);
          }
        }
        if (max_present > min_censored) ++bad_threshold;
      }
    }
  }
  return {bad_counts == 0 && bad_threshold == 0, std::to_string(columns) + " censored columns, " +
                                                     std::to_string(bad_counts) + " wrong counts, " +
                                                     std::to_string(bad_threshold) + " IM threshold violations"};
}

std::string without_wall_time(const std::string& csv_text) {
  std::string out;
  for (const auto& rec : csv::parse(csv_text)) {
    for (std::size_t k = 0; k + 1 < rec.size(); ++k) out += rec[k].text + ',';
    out += '\n';
  }
  return out;
}

// AC7: two CLI runs with the same config produce identical CSVs.
Outcome determinism() {
#ifndef TRITREE_CLI
  return {false, "command-line tool not built"};
#else
  const fs::path dir = fs::path(TRITREE_TEST_TMP) / "determinism";
  fs::create_directories(dir);
  const std::string data = std::string(TRITREE_DATA_DIR) + "/synthetic.csv";
  std::string first, second;
  for (int run = 0; run < 2; ++run) {
    const fs::path out = dir / ("run" + std::to_string(run) + ".csv");
    fs::remove(out);
    const std::string cmd = std::string("\"") + TRITREE_CLI + "\" run --data \"" + data +
                            "\" --scenario mcar --q-grid 0:0.6:0.3 --folds 5 --max-depth 4 --seed 42 --out \"" +
                            out.string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "run " + std::to_string(run) + " failed: " + cmd};
    (run == 0 ? first : second) = csv::read_file(out.string());
  }
  const bool same = without_wall_time(first) == without_wall_time(second);
  const auto lines = std::count(first.begin(), first.end(), '\n');
  return {same && lines > 1, std::to_string(lines) + " lines per file, " + (same ? "identical" : "DIFFERENT") +
                                 " apart from wall_ms"};
#endif
}

// AC8: serialize/deserialize round trip on trained trees.
Outcome serialization_round_trip() {
  std::mt19937_64 gen(1234);
  std::size_t differing = 0;
  for (int i = 0; i < 100; ++i) {
    testkit::RandomDataSpec spec;
    spec.min_rows = 30;
    spec.max_rows = 120;
    spec.missing_rate = i % 2 ? 0.25 : 0.0;
    spec.n_classes = classes_for(i);
    const Dataset ds = testkit::random_dataset(gen, spec);
    TrainConfig cfg;
    cfg.strategy = all_strategies()[static_cast<std::size_t>(i) % all_strategies().size()];
    cfg.max_depth = 2 + i % 4;
    cfg.min_samples = 2;
    const Tree tree = train(ds, cfg);
    const Tree back = deserialize(serialize(tree));
    const Dataset rows = testkit::random_rows_like(gen, ds, 1000, 0.2);
    if (tree.predict(rows) != back.predict(rows)) ++differing;
  }
  return {differing == 0, "100 trees x 1000 rows, " + std::to_string(differing) + " trees with differing predictions"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: tritree_acceptance [--only N]\n";
      return 2;
    }
  }
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", 60, oracle_equivalence},
      {2, "bias Monte Carlo", 120, bias_monte_carlo},
      {3, "strategy equivalence", 0, strategy_equivalence},
      {4, "harness exactness", 0, harness_exactness},
      {5, "directional trends", 300, directional_trends},
      {6, "censoring exactness", 0, censoring_exactness},
      {7, "determinism", 0, determinism},
      {8, "serialization round trip", 0, serialization_round_trip},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      o.pass = false;
      o.detail += "; runtime over " + fmt(c.limit_seconds) + " s";
    }
    std::printf("[%s] AC%d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
