#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "test_util.hpp"
#include "ztree/error.hpp"
#include "ztree/subgroup.hpp"

namespace ztree {
namespace {

using testing::continuous;
using testing::nominal;
using testing::schema_of;

Dataset hundred_and_nominal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n), c(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<double>(i + 1);
    c[i] = static_cast<double>(rng.below(3));
    y[i] = rng.bernoulli(0.3 + 0.004 * static_cast<double>(i % 100)) ? 1.0 : 0.0;
  }
  return Dataset(schema_of({continuous("x"), nominal("c", {"a", "b", "d"})}, TargetKind::binary), {x, c}, y);
}

/// Independent scoring of one criterion with the public two-proportion test.
std::optional<double> brute_force_z(const Dataset& d, const SubgroupCriterion& crit) {
  const auto m = apply_model(crit, d);
  BinarySample in, out;
  for (std::size_t i = 0; i < d.n(); ++i) {
    auto& s = m[i] ? in : out;
    ++s.n;
    s.successes += d.target()[i] == 1.0;
  }
  try {
    return two_proportion_z(in, out).value;
  } catch (const DegenerateSample&) {
    return std::nullopt;
  }
}

TEST(Enumerate, OneFeatureDepthOne) {
  const auto d = hundred_and_nominal(100, 1);
  Dataset x_only(schema_of({continuous("x")}, TargetKind::binary), {std::vector<double>(d.column(0).begin(), d.column(0).end())},
                 std::vector<double>(d.target().begin(), d.target().end()));
  EXPECT_EQ(enumerate_criteria(x_only, 1, 1).size(), 19u);
}

TEST(Enumerate, CountingOracleDepthTwo) {
  const auto d = hundred_and_nominal(100, 2);
  EXPECT_EQ(count_unfiltered_criteria(d, 2), 19u + 3u + 19u * 3u);
  EXPECT_EQ(count_unfiltered_criteria(d, 1), 22u);
}

TEST(Enumerate, ConstantFeaturesGiveNothing) {
  Dataset d(schema_of({continuous("x")}, TargetKind::binary), {std::vector<double>(20, 1.0)},
            std::vector<double>{0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1});
  EXPECT_TRUE(enumerate_criteria(d, 1, 1).empty());
  EXPECT_FALSE(has_candidates(d, 1, 1));
}

TEST(Enumerate, OrderedByAtomCountThenFeature) {
  const auto d = hundred_and_nominal(100, 3);
  const auto all = enumerate_criteria(d, 2, 1);
  for (std::size_t i = 1; i < all.size(); ++i) EXPECT_LE(all[i - 1].atoms.size(), all[i].atoms.size());
  EXPECT_EQ(all.front().to_string(), "x>5");
  EXPECT_EQ(all[19].to_string(), "c==a");
  for (const auto& c : all) {
    if (c.atoms.size() == 2) EXPECT_NE(c.atoms[0].feature, c.atoms[1].feature);
  }
}

TEST(Enumerate, CandidateCountGrowsWithDepth) {
  Rng rng(4);
  std::vector<std::vector<double>> cols(3, std::vector<double>(200));
  std::vector<double> y(200);
  for (auto& col : cols) {
    for (auto& v : col) v = rng.uniform();
  }
  for (auto& v : y) v = rng.bernoulli(0.5);
  Dataset d(schema_of({continuous("a"), continuous("b"), continuous("c")}, TargetKind::binary), cols, y);
  std::size_t previous = 0;
  for (int depth = 1; depth <= 3; ++depth) {
    const auto count = enumerate_criteria(d, depth, 10).size();
    EXPECT_GE(count, previous);
    previous = count;
  }
}

TEST(TrainBest, StepFunctionPicksCutoffNearestZero) {
  const auto d = testing::step_dataset(500, 12);
  const auto model = train_best_subgroup(d, TestKind::two_proportion_z, 1, 10);
  ASSERT_TRUE(model);
  ASSERT_EQ(model->criterion.atoms.size(), 1u);
  const auto cut = compute_cutoffs(d.column(0));
  const double nearest = *std::min_element(cut.begin(), cut.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  EXPECT_EQ(model->criterion.atoms[0].cutoff, nearest);
}

TEST(TrainBest, MatchesBruteForceRescoring) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = hundred_and_nominal(150, seed);
    const auto model = train_best_subgroup(d, TestKind::two_proportion_z, 2, 10);
    const auto candidates = enumerate_criteria(d, 2, 10);
    ASSERT_LE(candidates.size(), 200u);
    std::optional<SubgroupCriterion> best;
    double best_abs = -1.0;
    for (const auto& c : candidates) {
      const auto z = brute_force_z(d, c);
      if (z && std::abs(*z) > best_abs + 1e-12) {
        best_abs = std::abs(*z);
        best = c;
      }
    }
    ASSERT_TRUE(model && best);
    EXPECT_NEAR(model->train_score.magnitude(), best_abs, 1e-9);
  }
}

TEST(TrainBest, ConstantTargetHasNoSubgroup) {
  auto d = hundred_and_nominal(100, 5);
  Dataset constant(d.schema(), {std::vector<double>(d.column(0).begin(), d.column(0).end()),
                                std::vector<double>(d.column(1).begin(), d.column(1).end())},
                   std::vector<double>(100, 1.0));
  EXPECT_FALSE(train_best_subgroup(constant, TestKind::two_proportion_z, 1, 10));
}

TEST(TrainBest, TiesGoToFirstCandidate) {
  // Two identical columns give bit-identical scores; the first feature wins.
  const auto base = testing::step_dataset(200, 6);
  const std::vector<double> x(base.column(0).begin(), base.column(0).end());
  Dataset d(schema_of({continuous("a"), continuous("b")}, TargetKind::binary), {x, x},
            std::vector<double>(base.target().begin(), base.target().end()));
  const auto model = train_best_subgroup(d, TestKind::two_proportion_z, 1, 10);
  ASSERT_TRUE(model);
  EXPECT_EQ(model->criterion.atoms[0].feature, "a");
}

TEST(TrainBest, DeterministicAcrossCalls) {
  const auto d = hundred_and_nominal(300, 8);
  const auto a = train_best_subgroup(d, TestKind::two_proportion_z, 2, 10);
  const auto b = train_best_subgroup(d, TestKind::two_proportion_z, 2, 10);
  EXPECT_EQ(a->criterion.to_string(), b->criterion.to_string());
  EXPECT_EQ(a->train_score.value, b->train_score.value);
}

TEST(ApplyModel, PredicatesAndConjunctions) {
  const auto schema = schema_of({nominal("sex", {"F", "M"}), continuous("age")}, TargetKind::continuous);
  Dataset d(schema, {{0, 1, 0}, {70, 70, 60}}, {1, 2, 3});
  EXPECT_EQ(apply_model(SubgroupCriterion::parse("age>65", schema), d), (std::vector<std::uint8_t>{1, 1, 0}));
  EXPECT_EQ(apply_model(SubgroupCriterion::parse("sex==M & age>65", schema), d), (std::vector<std::uint8_t>{0, 1, 0}));
}

TEST(ApplyModel, UnseenLevelIsNotAMember) {
  const auto schema = schema_of({nominal("color", {"blue", "red"})}, TargetKind::continuous);
  Dataset d(schema, {{-1, 1}}, {std::nan(""), std::nan("")});
  EXPECT_EQ(apply_model(SubgroupCriterion::parse("color==red", schema), d), (std::vector<std::uint8_t>{0, 1}));
}

TEST(Criterion, ParseRoundTripAndErrors) {
  const auto schema = schema_of({continuous("x"), continuous("x2"), nominal("c", {"a", "b"})}, TargetKind::binary);
  for (std::string text : {"x>0.25", "x2>-3 & c==b", "c==a & x>1e-07"}) {
    EXPECT_EQ(SubgroupCriterion::parse(text, schema).to_string(), SubgroupCriterion::parse(text, schema).to_string());
  }
  EXPECT_EQ(SubgroupCriterion::parse("x2>1.5", schema).atoms[0].feature, "x2");
  EXPECT_THROW(SubgroupCriterion::parse("z>1", schema), FormatError);
  EXPECT_THROW(SubgroupCriterion::parse("c==q", schema), FormatError);
}

TEST(PartitionScorer, AgreesWithPublicTests) {
  Rng rng(10);
  const std::size_t n = 300;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform();
    y[i] = rng.normal() + (x[i] > 0.5 ? 0.4 : 0.0);
  }
  Dataset d(schema_of({continuous("x")}, TargetKind::continuous), {x}, y);
  std::vector<std::uint8_t> m(n);
  std::vector<double> a, b;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = x[i] > 0.5;
    (m[i] ? a : b).push_back(y[i]);
  }
  EXPECT_NEAR(*PartitionScorer(d, TestKind::welch_t).score(m), welch_t_z(a, b).value, 1e-9);
  EXPECT_NEAR(*PartitionScorer(d, TestKind::mann_whitney_u).score(m), mann_whitney_z(a, b).value, 1e-9);
}

}  // namespace
}  // namespace ztree
