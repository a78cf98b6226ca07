#include "tritree/synthetic.hpp"

#include <random>
#include <string>
#include <vector>

#include "tritree/errors.hpp"
#include "tritree/rng.hpp"

namespace tritree {

namespace {

double tree_mean(double z1, double z2, int z3_bin) {
  if (z1 <= 0.0) {
    if (z2 <= -0.5) return z3_bin >= 3 ? 1.0 : -1.0;
    return z3_bin <= 1 ? 0.5 : 2.0;
  }
  if (z2 <= 0.5) return z3_bin >= 2 ? 3.0 : 4.0;
  return z3_bin == 4 ? 7.0 : 5.5;
}

}  // namespace

Dataset make_synthetic(const SyntheticConfig& cfg) {
  if (cfg.n_rows < 10) throw ValidationError("synthetic data needs at least 10 rows");
  Rng rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&] { return normal(rng.engine()); };

  const std::size_t n = cfg.n_rows;
  std::vector<double> x1(n), x2(n), x3(n), x4(n), x5(n), x6(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z1 = draw();
    const double z2 = draw();
    const double z3 = draw();
    const int bin = z3 < -0.85 ? 0 : z3 < -0.25 ? 1 : z3 < 0.25 ? 2 : z3 < 0.85 ? 3 : 4;
    x1[i] = z1 + 0.2 * draw();
    x2[i] = z1 + 0.4 * draw();
    x3[i] = z2 + 0.2 * draw();
    x4[i] = z2 + 0.4 * draw();
    x5[i] = static_cast<double>(bin);
    x6[i] = draw();
    y[i] = tree_mean(z1, z2, bin) + cfg.noise * draw();
  }
  std::vector<FeatureColumn> cols;
  cols.push_back(FeatureColumn::numeric("x1", std::move(x1)));
  cols.push_back(FeatureColumn::numeric("x2", std::move(x2)));
  cols.push_back(FeatureColumn::numeric("x3", std::move(x3)));
  cols.push_back(FeatureColumn::numeric("x4", std::move(x4)));
  cols.push_back(FeatureColumn::categorical("x5", {"c0", "c1", "c2", "c3", "c4"}, std::move(x5)));
  cols.push_back(FeatureColumn::numeric("x6", std::move(x6)));
  return Dataset(std::move(cols), ResponseColumn::real("y", std::move(y)));
}

}  // namespace tritree
