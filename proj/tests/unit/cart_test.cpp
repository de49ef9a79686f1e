#include <gtest/gtest.h>

#include "test_util.hpp"
#include "ztree/cart.hpp"
#include "ztree/error.hpp"

namespace ztree {
namespace {

TEST(Cart, StumpFindsStep) {
  const auto d = testing::step_dataset(300, 1);
  const auto m = learn_cart(d, {1, 2});
  ASSERT_EQ(m.node_count(), 3u);
  // Brute-force oracle: the best x > v split leaves both sides pure, so v is
  // the largest non-positive x.
  double v = -1.0;
  for (double x : d.column(0)) {
    if (x <= 0.0) v = std::max(v, x);
  }
  EXPECT_EQ(m.root().criterion->atoms[0].cutoff, v);
}

TEST(Cart, ConstantTargetAndLargeMinSplit) {
  const auto d = testing::step_dataset(100, 2);
  Dataset constant(d.schema(), {std::vector<double>(d.column(0).begin(), d.column(0).end())},
                   std::vector<double>(100, 0.0));
  EXPECT_EQ(learn_cart(constant, {5, 2}).node_count(), 1u);
  EXPECT_EQ(learn_cart(d, {5, 101}).node_count(), 1u);
}

TEST(Cart, UnlimitedDepthFitsTieFreeTrainingData) {
  const auto d = testing::planted_dataset(300, TargetKind::binary, 3, GeneratorMode::outcome_shift);
  const auto m = learn_cart(d, {1000, 2});
  const auto p = predict(m, d);
  for (std::size_t i = 0; i < d.n(); ++i) EXPECT_EQ(p[i], d.target()[i]);
}

TEST(Cart, DepthNeverExceedsLimitAndTruncationMatchesTraining) {
  const auto d = testing::planted_dataset(400, TargetKind::continuous, 4, GeneratorMode::outcome_shift);
  const auto full = learn_cart(d, {8, 5});
  for (int depth = 0; depth <= 8; ++depth) {
    const auto direct = learn_cart(d, {depth, 5});
    EXPECT_LE(direct.depth(), depth);
    EXPECT_EQ(serialize(truncate_depth(full, depth)), serialize(direct));
  }
}

TEST(Cart, NominalSplitsUseEqualityAtoms) {
  const auto schema = testing::schema_of({testing::nominal("c", {"a", "b", "d"})}, TargetKind::continuous);
  Dataset d(schema, {{0, 1, 2, 0, 1, 2}}, {0, 5, 0, 0, 5, 0});
  const auto m = learn_cart(d, {1, 2});
  EXPECT_EQ(m.root().criterion->to_string(), "c==b");
}

TEST(TuneCart, SingleCellAndStump) {
  const auto d = testing::step_dataset(300, 5);
  const std::vector<int> one_depth{3}, one_split{10};
  EXPECT_EQ(tune_cart(d, one_depth, one_split, 10, 42).best, (CartParams{3, 10}));
  const auto depths = default_cart_depth_grid();
  const auto splits = default_cart_min_split_grid();
  const auto tuned = tune_cart(d, depths, splits, 10, 42);
  EXPECT_EQ(tuned.best.max_depth, 1);
  EXPECT_EQ(tuned.cv_metric.size(), depths.size() * splits.size());
}

TEST(TuneCart, EqualScoresGoToSmallestCapacity) {
  // A feature-free signal: every cell predicts the fold mean, so all tie.
  Rng rng(6);
  std::vector<double> x(200, 1.0), y(200);
  for (auto& v : y) v = rng.normal();
  Dataset d(testing::schema_of({testing::continuous("x")}, TargetKind::continuous), {x}, y);
  const auto tuned = tune_cart(d, default_cart_depth_grid(), default_cart_min_split_grid(), 10, 42);
  EXPECT_EQ(tuned.best, (CartParams{1, 50}));
}

TEST(TuneCart, NoiseRegressionBaseline) {
  Rng rng(6);
  std::vector<double> x(200), y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    x[i] = rng.uniform();
    y[i] = rng.bernoulli(0.5);
  }
  Dataset d(testing::schema_of({testing::continuous("x")}, TargetKind::binary), {x}, y);
  const auto tuned = tune_cart(d, default_cart_depth_grid(), default_cart_min_split_grid(), 10, 42);
  EXPECT_EQ(tuned.best, (CartParams{9, 20}));
}

TEST(Cart, TimeToEventUnsupported) {
  const auto schema = testing::schema_of({testing::continuous("x")}, TargetKind::time_to_event);
  Dataset d(schema, {{1, 2}}, {1, 2}, {1, 0});
  EXPECT_THROW(learn_cart(d, {}), Unsupported);
}

}  // namespace
}  // namespace ztree
