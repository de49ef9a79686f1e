#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "test_util.hpp"
#include "ztree/error.hpp"
#include "ztree/model_selection.hpp"

namespace ztree {
namespace {

double pair_count_auroc(const std::vector<double>& s, const std::vector<double>& l) {
  double good = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (l[i] != 1.0 || l[j] != 0.0) continue;
      pairs += 1.0;
      good += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return good / pairs;
}

TEST(Auroc, Examples) {
  EXPECT_DOUBLE_EQ(auroc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<double>{0, 0, 1, 1}), 0.75);
  EXPECT_EQ(auroc(std::vector<double>{0.1, 0.2, 0.9}, std::vector<double>{0, 0, 1}), 1.0);
  EXPECT_THROW(auroc(std::vector<double>{0.9, 0.8}, std::vector<double>{1, 1}), Undefined);
}

TEST(Auroc, MatchesPairCountingAndInvariances) {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(49);
    std::vector<double> s(n), l(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial % 2 ? static_cast<double>(rng.below(5)) : rng.normal();
      l[i] = rng.bernoulli(0.4);
    }
    l[0] = 0.0;
    l[1] = 1.0;
    const double a = auroc(s, l);
    EXPECT_NEAR(a, pair_count_auroc(s, l), 1e-12);
    std::vector<double> transformed(n), flipped(n);
    for (std::size_t i = 0; i < n; ++i) {
      transformed[i] = std::exp(s[i]) * 3.0 + 1.0;
      flipped[i] = 1.0 - l[i];
    }
    EXPECT_NEAR(auroc(transformed, l), a, 1e-12);
    if (trial % 2 == 0) EXPECT_NEAR(a + auroc(s, flipped), 1.0, 1e-12);
  }
}

TEST(Rmse, Examples) {
  EXPECT_EQ(rmse(std::vector<double>{1, 2}, std::vector<double>{1, 2}), 0.0);
  EXPECT_NEAR(rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4}), std::sqrt(12.5), 1e-15);
  EXPECT_EQ(rmse(std::vector<double>{3}, std::vector<double>{1}), 2.0);
  const std::vector<double> p{0.5, -1, 2}, a{1, 1, 1};
  EXPECT_EQ(rmse(p, a), rmse(a, p));
}

TEST(Grid, DefaultHasFifteenSteps) {
  const auto g = default_threshold_grid();
  ASSERT_EQ(g.size(), 15u);
  EXPECT_EQ(g.front(), 0.2);
  EXPECT_EQ(g.back(), 3.0);
}

TEST(Tune, ReusesOneBaseTreePerFold) {
  const auto d = testing::planted_dataset(400, TargetKind::continuous, 3, GeneratorMode::outcome_shift);
  const auto before = learn_tree_invocations();
  const auto grid = default_threshold_grid();
  const auto result = tune_threshold(d, LearnConfig{}, grid);
  EXPECT_EQ(learn_tree_invocations() - before, 10u + 1u);
  EXPECT_EQ(result.report.fold_trainings, 10u);
  EXPECT_EQ(result.report.cv_metric.size(), 15u);
  EXPECT_EQ(result.model.config.threshold, result.report.chosen);
  for (std::size_t t = 1; t < grid.size(); ++t) EXPECT_LE(result.report.n_nodes_mean[t], result.report.n_nodes_mean[t - 1]);
}

TEST(Tune, SingleElementGrid) {
  const auto d = testing::planted_dataset(300, TargetKind::binary, 4, GeneratorMode::outcome_shift);
  const std::vector<double> grid{1.4};
  EXPECT_EQ(tune_threshold(d, LearnConfig{}, grid).report.chosen, 1.4);
}

TEST(Tune, PlantedSplitIsRecovered) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto d = testing::planted_dataset(1000, TargetKind::continuous, 50 + seed, GeneratorMode::outcome_shift);
    const auto m = tune_threshold(d, LearnConfig{}, default_threshold_grid()).model;
    if (!m.root().is_leaf() && m.root().criterion->atoms[0].feature == "x0") ++hits;
  }
  EXPECT_EQ(hits, 5);
}

TEST(Tune, ThreadCountDoesNotChangeResult) {
  const auto d = testing::planted_dataset(300, TargetKind::binary, 5, GeneratorMode::outcome_shift);
  const auto grid = default_threshold_grid();
  const auto a = tune_threshold(d, LearnConfig{}, grid, {10, 1});
  const auto b = tune_threshold(d, LearnConfig{}, grid, {10, 3});
  EXPECT_EQ(serialize(a.model), serialize(b.model));
  EXPECT_EQ(a.report.cv_metric, b.report.cv_metric);
}

TEST(Tune, ReportCsvHasOneRowPerThreshold) {
  const auto d = testing::planted_dataset(300, TargetKind::continuous, 6, GeneratorMode::outcome_shift);
  const auto result = tune_threshold(d, LearnConfig{}, default_threshold_grid());
  std::ostringstream out;
  write_report_csv(result.report, out);
  std::size_t data_rows = 0;
  std::istringstream in(out.str());
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') ++data_rows;
  }
  EXPECT_EQ(data_rows, 16u);
}

TEST(Tune, TimeToEventIsUnsupported) {
  const auto schema = testing::schema_of({testing::continuous("x")}, TargetKind::time_to_event);
  Dataset d(schema, {{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10},
            {1, 1, 1, 1, 1, 0, 0, 0, 0, 0});
  EXPECT_THROW(tune_threshold(d, LearnConfig{}, default_threshold_grid()), Unsupported);
}

}  // namespace
}  // namespace ztree
