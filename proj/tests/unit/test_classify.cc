#include <gtest/gtest.h>

#include <numeric>

#include "metric_fixtures.h"
#include "oracles.h"
#include "test_support.h"
#include "ticketscope/classify.h"
#include "ticketscope/error.h"
#include "ticketscope/metrics.h"
#include "ticketscope/util.h"

namespace ticketscope {
namespace {

std::vector<std::string> labels_for(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("L" + std::to_string(i));
  return out;
}

TEST(Metrics, FixturesMatchHandComputedFractions) {
  for (const auto& f : testing::metric_fixtures()) {
    const auto exact = oracle::exact_weighted_scores(f.confusion);
    EXPECT_EQ(exact.precision, f.precision) << f.name;
    EXPECT_EQ(exact.recall, f.recall) << f.name;
    EXPECT_EQ(exact.f1, f.f1) << f.name;
    EXPECT_EQ(exact.accuracy, f.accuracy) << f.name;

    std::vector<std::size_t> y_true, y_pred;
    testing::expand(f, y_true, y_pred);
    const auto s = score_predictions(y_true, y_pred, labels_for(f.confusion.size()));
    EXPECT_NEAR(s.weighted_precision, f.precision.value(), 1e-12) << f.name;
    EXPECT_NEAR(s.weighted_recall, f.recall.value(), 1e-12) << f.name;
    EXPECT_NEAR(s.weighted_f1, f.f1.value(), 1e-12) << f.name;
    EXPECT_NEAR(s.accuracy, f.accuracy.value(), 1e-12) << f.name;

    // Weighted F1 is the support-weighted mean of the per-class F1 values.
    double weighted = 0;
    std::size_t total = 0;
    for (const auto& c : s.per_class) {
      weighted += c.f1 * static_cast<double>(c.support);
      total += c.support;
    }
    EXPECT_NEAR(s.weighted_f1, weighted / static_cast<double>(total), 1e-15) << f.name;
  }
}

TEST(Metrics, AccuracyAtKWithTies) {
  const testing::RankFixture f;
  Matrix proba(f.proba.size(), 3);
  for (std::size_t i = 0; i < f.proba.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) proba(i, j) = f.proba[i][j];
  for (std::size_t k = 1; k <= 3; ++k)
    EXPECT_DOUBLE_EQ(accuracy_at_k(proba, f.y_true, k), f.accuracy_at[k - 1].value()) << k;
  EXPECT_EQ(rank_labels(std::vector<double>{0.2, 0.2, 0.6}), (std::vector<std::size_t>{2, 0, 1}));
}

TEST(Metrics, AccuracyAtKMonotoneAndReachesOne) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 30, c = 2 + rng.below(6);
    Matrix proba(n, c);
    std::vector<std::size_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.below(c);
      for (std::size_t j = 0; j < c; ++j) proba(i, j) = static_cast<double>(rng.below(4));
    }
    double prev = 0;
    for (std::size_t k = 1; k <= c; ++k) {
      const double acc = accuracy_at_k(proba, y, k);
      EXPECT_GE(acc, prev);
      prev = acc;
    }
    EXPECT_DOUBLE_EQ(prev, 1.0);
  }
}

// Two Gaussian blobs per class in a few dimensions.
struct Toy {
  Matrix X;
  std::vector<std::size_t> y;
  std::vector<std::string> ids;
};

Toy toy(std::size_t per_class, std::size_t classes, std::uint64_t seed) {
  Rng rng(seed);
  Toy t;
  t.X = Matrix(per_class * classes, 4);
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t i = 0; i < per_class; ++i) {
      const std::size_t row = c * per_class + i;
      for (std::size_t j = 0; j < 4; ++j) t.X(row, j) = rng.normal() + (j == c % 4 ? 3.0 : 0.0);
      t.y.push_back(c);
      t.ids.push_back("T" + std::to_string(row));
    }
  return t;
}

TEST(RandomForest, IndependentOfTrainingOrder) {
  const Toy t = toy(30, 3, 1);
  ForestConfig config;
  config.n_trees = 8;
  const auto a = RandomForest::fit(t.X, t.y, 3, t.ids, config);

  std::vector<std::size_t> perm(t.y.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(99);
  rng.shuffle(perm);
  Toy s;
  s.X = Matrix(t.X.rows, t.X.cols);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = 0; j < t.X.cols; ++j) s.X(i, j) = t.X(perm[i], j);
    s.y.push_back(t.y[perm[i]]);
    s.ids.push_back(t.ids[perm[i]]);
  }
  const auto b = RandomForest::fit(s.X, s.y, 3, s.ids, config);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.to_json(), b.to_json());
  EXPECT_TRUE(RandomForest::from_json(a.to_json()) == a);

  config.seed = 8;
  EXPECT_FALSE(RandomForest::fit(t.X, t.y, 3, t.ids, config) == a);
}

TEST(RandomForest, ProbabilitiesSumToOne) {
  const Toy t = toy(20, 4, 2);
  ForestConfig config;
  config.max_depth = 3;
  const auto f = RandomForest::fit(t.X, t.y, 4, t.ids, config);
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(4);
    for (double& v : x) v = 4 * rng.normal();
    const auto p = f.predict_proba(x);
    ASSERT_EQ(p.size(), 4u);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
  }
  EXPECT_THROW(f.predict_proba(std::vector<double>(3)), InvalidInput);
  for (const auto& tree : f.trees()) {
    std::function<std::size_t(std::int32_t)> depth = [&](std::int32_t n) -> std::size_t {
      const auto& node = tree[static_cast<std::size_t>(n)];
      return node.feature < 0 ? 0 : 1 + std::max(depth(node.left), depth(node.right));
    };
    EXPECT_LE(depth(0), 3u);
  }
}

TEST(StratifiedSplit, PerClassCountsAndDisjoint) {
  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t i = 0; i < 3 + 7 * c; ++i) labels.push_back(c);
  const auto table = labels_for(4);
  const auto [train, test] = stratified_split(labels, table, 0.2, 3);
  EXPECT_EQ(train.size() + test.size(), labels.size());
  std::vector<std::size_t> all(train);
  all.insert(all.end(), test.begin(), test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i], i);
  std::vector<std::size_t> per(4, 0);
  for (std::size_t i : test) ++per[labels[i]];
  // round(0.2 n) clamped to [1, n - 1] for n = 3, 10, 17, 24.
  EXPECT_EQ(per, (std::vector<std::size_t>{1, 2, 3, 5}));
  EXPECT_EQ(stratified_split(labels, table, 0.2, 3), stratified_split(labels, table, 0.2, 3));
  labels.push_back(4);
  EXPECT_THROW(stratified_split(labels, labels_for(5), 0.2, 3), InvalidInput);
  EXPECT_THROW(stratified_split(labels, labels_for(5), 1.0, 3), InvalidInput);
}

LabeledDataset toy_dataset(const Toy& t, std::size_t classes) {
  LabeledDataset ds;
  ds.label_table = labels_for(classes);
  std::sort(ds.label_table.begin(), ds.label_table.end());
  for (std::size_t i = 0; i < t.y.size(); ++i) ds.items.push_back({"", "L" + std::to_string(t.y[i]), t.ids[i]});
  return ds;
}

TEST(Evaluate, ReportShapeAndOrdering) {
  const Toy t = toy(25, 5, 6);
  const auto ds = toy_dataset(t, 5);
  EvalConfig config;
  config.n_trials = 6;
  const auto report = evaluate(ds, t.X, FeatureSet::Lsa, config);
  EXPECT_EQ(report.n_trials, 6u);
  ASSERT_EQ(report.accuracy_at.size(), 3u);
  EXPECT_DOUBLE_EQ(report.accuracy_at[0].mean, report.accuracy.mean);
  EXPECT_LE(report.accuracy_at[0].mean, report.accuracy_at[1].mean);
  EXPECT_LE(report.accuracy_at[1].mean, report.accuracy_at[2].mean);
  EXPECT_GT(report.accuracy.mean, 0.5);
  EXPECT_EQ(EvalReport::from_json(report.to_json()).to_json(), report.to_json());
  EXPECT_EQ(evaluate(ds, t.X, FeatureSet::Lsa, config).to_json(), report.to_json());
  const std::string table = format_eval_table({report});
  EXPECT_NE(table.find("lsa"), std::string::npos);
  EXPECT_NE(table.find("+-"), std::string::npos);
}

TEST(Suggester, TopKOrderedAndPersisted) {
  const Toy t = toy(20, 4, 7);
  const auto ds = toy_dataset(t, 4);
  const auto s = CategorySuggester::train(ds, t.X, FeatureSet::Lda10, {});
  const auto top = s.suggest(t.X.row(0), 3);
  ASSERT_EQ(top.size(), 3u);
  for (std::size_t i = 1; i < top.size(); ++i) EXPECT_GE(top[i - 1].probability, top[i].probability);
  EXPECT_EQ(s.suggest(t.X.row(0), 10).size(), 4u);

  testing::TempDir dir;
  s.save(dir.path(), {});
  const auto back = CategorySuggester::load(dir.path());
  EXPECT_EQ(back.label_table(), s.label_table());
  EXPECT_EQ(back.predict_proba(t.X.row(5)), s.predict_proba(t.X.row(5)));
  EXPECT_EQ(back.feature_set(), FeatureSet::Lda10);

  LabeledDataset one;
  one.label_table = {"L0"};
  one.items = {{"", "L0", "a"}, {"", "L0", "b"}};
  Matrix x(2, 4, 1.0);
  EXPECT_THROW(CategorySuggester::train(one, x, FeatureSet::Lsa, {}), InvalidInput);
}

}  // namespace
}  // namespace ticketscope
