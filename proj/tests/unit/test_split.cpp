#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "generators.hpp"
#include "oracle.hpp"
#include "tritree/split.hpp"

using namespace tritree;

namespace {

Dataset one_numeric(std::vector<double> x, std::vector<double> y) {
  return Dataset(std::vector<FeatureColumn>{FeatureColumn::numeric("x", std::move(x))},
                 ResponseColumn::real("y", std::move(y)));
}

// y = [0,0,10,10,5], x = [1,2,3,4,missing]
Dataset small_example() { return one_numeric({1, 2, 3, 4, kMissing}, {0, 0, 10, 10, 5}); }

Partition at(double threshold) {
  Partition p;
  p.threshold = threshold;
  return p;
}

std::vector<std::size_t> features_of(const Dataset& ds) {
  std::vector<std::size_t> f(ds.n_features());
  for (std::size_t j = 0; j < f.size(); ++j) f[j] = j;
  return f;
}

}  // namespace

TEST(Candidates, NumericMidpoints) {
  const Dataset ds = one_numeric({3, 1, 2}, {0, 0, 0});
  const auto c = enumerate_candidates(ds, 0, all_rows(3), LossKind::sse());
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].threshold, 1.5);
  EXPECT_EQ(c[1].threshold, 2.5);
}

TEST(Candidates, SingleDistinctValueHasNone) {
  const Dataset ds = one_numeric({2, 2, kMissing}, {0, 1, 2});
  EXPECT_TRUE(enumerate_candidates(ds, 0, all_rows(3), LossKind::sse()).empty());
}

TEST(Candidates, OrderingByMeanResponse) {
  // Codes A=0, B=1, C=2 with means 0, 10, 5: ordered A, C, B.
  const Dataset ds(std::vector<FeatureColumn>{FeatureColumn::categorical("c", {"A", "B", "C"}, {0, 0, 1, 1, 2, 2})},
                   ResponseColumn::real("y", {0, 0, 10, 10, 5, 5}));
  const auto c = enumerate_candidates(ds, 0, all_rows(6), LossKind::sse(), /*max_exhaustive=*/0);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].left_categories, (std::vector<int>{0}));
  EXPECT_EQ(c[0].right_categories, (std::vector<int>{1, 2}));
  EXPECT_EQ(c[1].left_categories, (std::vector<int>{0, 2}));
  EXPECT_EQ(c[1].right_categories, (std::vector<int>{1}));
}

TEST(Candidates, ExhaustiveCategoricalCount) {
  const Dataset ds(std::vector<FeatureColumn>{FeatureColumn::categorical("c", {"A", "B", "C", "D"}, {0, 1, 2, 3})},
                   ResponseColumn::real("y", {0, 1, 2, 3}));
  // 2^(4-1) - 1 two-set partitions.
  EXPECT_EQ(enumerate_candidates(ds, 0, all_rows(4), LossKind::sse()).size(), 7u);
}

TEST(ScoreBinary, PerfectSeparation) {
  const Dataset ds = one_numeric({1, 2, 3, 4}, {0, 0, 10, 10});
  const auto s = score_binary(ds, all_rows(4), at(2.5), MissingRoute::Left, LossKind::sse(), 1);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->total_loss, 0.0);
}

TEST(ScoreBinary, MissingRowRoutedLeft) {
  const auto s = score_binary(small_example(), all_rows(5), at(2.5), MissingRoute::Left, LossKind::sse(), 1);
  ASSERT_TRUE(s);
  EXPECT_NEAR(s->total_loss, 150.0 / 9.0, 1e-12);
  EXPECT_EQ(s->left.size(), 3u);
  EXPECT_EQ(s->n_missing, 1u);
}

TEST(ScoreBinary, MinChildMakesInfeasible) {
  EXPECT_FALSE(score_binary(small_example(), all_rows(5), at(2.5), MissingRoute::Right, LossKind::sse(), 3));
}

TEST(ScoreFractional, HalfWeights) {
  const auto s = score_fractional(small_example(), all_rows(5), at(2.5), LossKind::sse(), 0.0);
  ASSERT_TRUE(s);
  EXPECT_DOUBLE_EQ(s->left_fraction, 0.5);
  EXPECT_DOUBLE_EQ(s->right_fraction, 0.5);
  EXPECT_NEAR(s->total_loss, 20.0, 1e-12);
  ASSERT_EQ(s->left.size(), 3u);
  EXPECT_DOUBLE_EQ(s->left.back().weight, 0.5);
}

TEST(ScoreFractional, NoMissingEqualsBinary) {
  const Dataset ds = one_numeric({1, 2, 3, 4, 5}, {0, 1, 10, 9, 7});
  const auto f = score_fractional(ds, all_rows(5), at(2.5), LossKind::sse(), 1.0);
  const auto b = score_binary(ds, all_rows(5), at(2.5), MissingRoute::Right, LossKind::sse(), 1);
  ASSERT_TRUE(f && b);
  EXPECT_EQ(f->total_loss, b->total_loss);
}

TEST(ScoreFractional, WeightScalingDoublesLoss) {
  const Dataset ds = small_example();
  RowSet doubled = all_rows(5);
  for (auto& r : doubled) r.weight = 2.0;
  for (double t : {1.5, 2.5, 3.5}) {
    const auto a = score_fractional(ds, all_rows(5), at(t), LossKind::sse(), 0.0);
    const auto b = score_fractional(ds, doubled, at(t), LossKind::sse(), 0.0);
    ASSERT_TRUE(a && b);
    EXPECT_NEAR(b->total_loss, 2.0 * a->total_loss, 1e-9);
  }
}

TEST(ScoreTrinary, MissingPricedAtMother) {
  const auto s = score_trinary(small_example(), all_rows(5), at(2.5), LossKind::sse(), LeafValue::real(5.0), 1);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->total_loss, 0.0);
  EXPECT_EQ(s->route, MissingRoute::Middle);
  EXPECT_EQ(s->middle.size(), 5u);
}

TEST(ScoreTrinary, NoMissingEqualsBinary) {
  const Dataset ds = one_numeric({1, 2, 3, 4, 5}, {0, 1, 10, 9, 7});
  const auto t = score_trinary(ds, all_rows(5), at(2.5), LossKind::sse(), LeafValue::real(5.4), 1);
  const auto b = score_binary(ds, all_rows(5), at(2.5), MissingRoute::Right, LossKind::sse(), 1);
  ASSERT_TRUE(t && b);
  EXPECT_EQ(t->total_loss, b->total_loss);
}

TEST(ScoreTrinary, AllMissingIsInfeasible) {
  const Dataset ds = one_numeric({kMissing, kMissing}, {1, 2});
  EXPECT_FALSE(score_trinary(ds, all_rows(2), at(0.0), LossKind::sse(), LeafValue::real(1.5), 1));
}

TEST(BestSplit, SmallExampleAcrossStrategies) {
  const Dataset ds = small_example();
  SplitConfig cfg;
  cfg.min_child = 1;
  cfg.min_child_weight = 0.0;
  const std::vector<std::size_t> f{0};
  const auto tri = best_split(ds, all_rows(5), f, Strategy::Trinary, LossKind::sse(), cfg);
  const auto mia = best_split(ds, all_rows(5), f, Strategy::Mia, LossKind::sse(), cfg);
  const auto both = best_split(ds, all_rows(5), f, Strategy::TrinaryMia, LossKind::sse(), cfg);
  ASSERT_TRUE(tri && mia && both);
  EXPECT_EQ(tri->total_loss, 0.0);
  EXPECT_NEAR(mia->total_loss, 150.0 / 9.0, 1e-12);
  EXPECT_EQ(both->route, MissingRoute::Middle);
  EXPECT_EQ(both->total_loss, 0.0);
}

TEST(BestSplit, ConstantResponseTakesFirstCandidate) {
  const Dataset ds(std::vector<FeatureColumn>{FeatureColumn::numeric("a", {1, 2, 3, 4}),
                                              FeatureColumn::numeric("b", {4, 3, 2, 1})},
                   ResponseColumn::real("y", {7, 7, 7, 7}));
  SplitConfig cfg;
  cfg.min_child = 1;
  cfg.min_child_weight = 1.0;
  for (Strategy s : all_strategies()) {
    const auto best = best_split(ds, all_rows(4), features_of(ds), s, LossKind::sse(), cfg);
    ASSERT_TRUE(best);
    EXPECT_EQ(best->partition.feature, 0u);
    EXPECT_EQ(best->partition.threshold, 1.5);
  }
}

TEST(BestSplit, MajorityTiesGoRight) {
  const Dataset ds = one_numeric({1, 2, 3, 4, kMissing}, {0, 0, 10, 10, 5});
  SplitConfig cfg;
  cfg.min_child = 1;
  const std::vector<std::size_t> f{0};
  const auto s = best_split(ds, all_rows(5), f, Strategy::Majority, LossKind::sse(), cfg);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->partition.threshold, 2.5);
  EXPECT_EQ(s->route, MissingRoute::Right);
}

TEST(BestSplit, MiaEqualsMajorityWithoutMissingness) {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 200; ++trial) {
    testkit::RandomDataSpec spec;
    spec.n_classes = trial % 3 == 0 ? 0 : 1 + trial % 3;
    const Dataset ds = testkit::random_dataset(gen, spec);
    const LossKind kind = spec.n_classes ? LossKind::cross_entropy(spec.n_classes) : LossKind::sse();
    SplitConfig cfg;
    cfg.min_child = 1 + static_cast<std::size_t>(trial % 2);
    const auto rows = all_rows(ds.n_rows());
    const auto f = features_of(ds);
    const auto maj = best_split(ds, rows, f, Strategy::Majority, kind, cfg);
    const auto mia = best_split(ds, rows, f, Strategy::Mia, kind, cfg);
    ASSERT_EQ(maj.has_value(), mia.has_value());
    if (!maj) continue;
    EXPECT_EQ(maj->partition, mia->partition);
    EXPECT_EQ(maj->route, mia->route);
    EXPECT_EQ(maj->total_loss, mia->total_loss);
  }
}

TEST(BestSplit, MatchesOracleOnSmallData) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 150; ++trial) {
    testkit::RandomDataSpec spec;
    spec.missing_rate = trial % 2 ? 0.25 : 0.0;
    spec.n_classes = trial % 3 == 0 ? 0 : 1 + trial % 3;
    const Dataset ds = testkit::random_dataset(gen, spec);
    const LossKind kind = spec.n_classes ? LossKind::cross_entropy(spec.n_classes) : LossKind::sse();
    SplitConfig cfg;
    cfg.min_child = 1 + static_cast<std::size_t>(trial % 3);
    cfg.min_child_weight = static_cast<double>(cfg.min_child);
    const auto rows = all_rows(ds.n_rows());
    const auto f = features_of(ds);
    for (Strategy s : all_strategies()) {
      const auto got = best_split(ds, rows, f, s, kind, cfg);
      const auto want = testkit::oracle_best_loss(ds, rows, f, s, kind, cfg.min_child, cfg.min_child_weight);
      ASSERT_EQ(got.has_value(), want.has_value()) << to_string(s) << " trial " << trial;
      if (got) EXPECT_NEAR(got->total_loss, *want, 1e-9) << to_string(s) << " trial " << trial;
    }
  }
}

TEST(BestSplit, OrderingTrickIsExactForRegressionWithoutMissing) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> code(0, 11);
  std::vector<std::string> names;
  for (int c = 0; c < 12; ++c) names.push_back("k" + std::to_string(c));
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(60), y(60);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = code(gen);
      y[i] = x[i] * 0.3 * (static_cast<int>(x[i]) % 3) + normal(gen);
    }
    const Dataset ds(std::vector<FeatureColumn>{FeatureColumn::categorical("c", names, x)},
                     ResponseColumn::real("y", y));
    SplitConfig ordered, exhaustive;
    ordered.min_child = exhaustive.min_child = 1;
    exhaustive.max_exhaustive_categories = 12;
    const std::vector<std::size_t> f{0};
    const auto a = best_split(ds, all_rows(60), f, Strategy::Majority, LossKind::sse(), ordered);
    const auto b = best_split(ds, all_rows(60), f, Strategy::Majority, LossKind::sse(), exhaustive);
    ASSERT_TRUE(a && b);
    EXPECT_NEAR(a->total_loss, b->total_loss, 1e-9);
  }
}

TEST(BestSplit, FractionalWeightScalingPreservesChoice) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    testkit::RandomDataSpec spec;
    spec.missing_rate = 0.3;
    const Dataset ds = testkit::random_dataset(gen, spec);
    SplitConfig cfg;
    cfg.min_child_weight = 1.0;
    cfg.fractions_from_weights = true;
    SplitConfig cfg2 = cfg;
    cfg2.min_child_weight = 2.0;
    RowSet doubled = all_rows(ds.n_rows());
    for (auto& r : doubled) r.weight = 2.0;
    const auto f = features_of(ds);
    const auto a = best_split(ds, all_rows(ds.n_rows()), f, Strategy::FractionalCase, LossKind::sse(), cfg);
    const auto b = best_split(ds, doubled, f, Strategy::FractionalCase, LossKind::sse(), cfg2);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (!a) continue;
    EXPECT_NEAR(b->total_loss, 2.0 * a->total_loss, 1e-9);
  }
}

TEST(BestSplit, OrderingTrickIsExactForBinaryClassificationWithoutMissing) {
  std::mt19937_64 gen(41);
  std::uniform_int_distribution<int> code(0, 11);
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  std::vector<std::string> names;
  for (int c = 0; c < 12; ++c) names.push_back("k" + std::to_string(c));
  const LossKind xe = LossKind::cross_entropy(2);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> rate(12);
    for (auto& r : rate) r = unit01(gen);
    std::vector<double> x(80), y(80);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = code(gen);
      y[i] = unit01(gen) < rate[static_cast<std::size_t>(x[i])] ? 1 : 0;
    }
    const Dataset ds(std::vector<FeatureColumn>{FeatureColumn::categorical("c", names, x)},
                     ResponseColumn::classes("y", {"no", "yes"}, y));
    SplitConfig ordered, exhaustive;
    ordered.min_child = exhaustive.min_child = 1;
    exhaustive.max_exhaustive_categories = 12;
    const std::vector<std::size_t> f{0};
    const auto a = best_split(ds, all_rows(80), f, Strategy::Majority, xe, ordered);
    const auto b = best_split(ds, all_rows(80), f, Strategy::Majority, xe, exhaustive);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) EXPECT_NEAR(a->total_loss, b->total_loss, 1e-9);
  }
}

TEST(BestSplit, ChosenSplitNeverWorseThanTheUnsplitNode) {
  std::mt19937_64 gen(57);
  for (int trial = 0; trial < 200; ++trial) {
    testkit::RandomDataSpec spec;
    spec.missing_rate = 0.3;
    spec.n_classes = trial % 3 == 0 ? 0 : 1 + trial % 3;
    const Dataset ds = testkit::random_dataset(gen, spec);
    const LossKind kind = spec.n_classes ? LossKind::cross_entropy(spec.n_classes) : LossKind::sse();
    NodeStats node(kind);
    for (std::size_t i = 0; i < ds.n_rows(); ++i) node.add(ds.response()[i]);
    SplitConfig cfg;
    cfg.min_child = 1;
    cfg.min_child_weight = 0.5;
    for (Strategy s : all_strategies()) {
      const auto best = best_split(ds, all_rows(ds.n_rows()), features_of(ds), s, kind, cfg);
      if (best) EXPECT_LE(best->total_loss, node.fitted_loss() + 1e-9) << to_string(s);
    }
  }
}
