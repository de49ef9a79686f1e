#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_util.hpp"
#include "ztree/error.hpp"
#include "ztree/stat_tests.hpp"

namespace ztree {
namespace {

double pairwise_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) u += x > y ? 1.0 : x == y ? 0.5 : 0.0;
  }
  return u;
}

TEST(TwoProportion, Examples) {
  EXPECT_NEAR(two_proportion_z({30, 100}, {10, 100}).value, 3.5355, 1e-4);
  EXPECT_EQ(two_proportion_z({25, 50}, {50, 100}).value, 0.0);
  EXPECT_THROW(two_proportion_z({0, 10}, {0, 10}), DegenerateSample);
}

TEST(TwoProportion, MatchesPlugInFormula) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t na = 1 + rng.below(400), nb = 1 + rng.below(400);
    const std::size_t sa = rng.below(na + 1), sb = rng.below(nb + 1);
    const double p = static_cast<double>(sa + sb) / static_cast<double>(na + nb);
    if (p == 0.0 || p == 1.0) continue;
    const double expected = (static_cast<double>(sa) / na - static_cast<double>(sb) / nb) /
                            std::sqrt(p * (1 - p) * (1.0 / na + 1.0 / nb));
    EXPECT_NEAR(two_proportion_z({sa, na}, {sb, nb}).value, expected, 1e-10);
  }
}

TEST(Welch, Examples) {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 3, 4, 5, 6};
  EXPECT_NEAR(welch_t_z(a, b).value, -1.0, 1e-12);
  EXPECT_EQ(welch_t_z(a, a).value, 0.0);
  EXPECT_THROW(welch_t_z(std::vector<double>{2, 2, 2}, std::vector<double>{5, 5, 5}), DegenerateSample);
}

TEST(Welch, ShiftInvariantAndAntisymmetric) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> a(2 + rng.below(30)), b(2 + rng.below(30));
    for (auto& x : a) x = rng.normal() + 0.3;
    for (auto& x : b) x = rng.normal();
    const double z = welch_t_z(a, b).value;
    EXPECT_EQ(welch_t_z(b, a).value, -z);
    for (auto& x : a) x += 4.0;
    for (auto& x : b) x += 4.0;
    EXPECT_NEAR(welch_t_z(a, b).value, z, 1e-9);
  }
}

TEST(MannWhitney, Examples) {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  EXPECT_EQ(mann_whitney_u(a, b), 0.0);
  EXPECT_NEAR(mann_whitney_z(a, b).value, -4.5 / std::sqrt(5.25), 1e-12);
  EXPECT_NEAR(mann_whitney_z(a, b).value, -1.9640, 1e-4);
  EXPECT_EQ(mann_whitney_z(a, a).value, 0.0);
  const std::vector<double> tied{1, 1, 2, 2};
  EXPECT_EQ(mann_whitney_z(tied, tied).value, 0.0);
}

TEST(MannWhitney, UMatchesPairwiseCountingForSmallSamples) {
  Rng rng(5);
  for (std::size_t na = 1; na <= 11; ++na) {
    for (std::size_t nb = 1; na + nb <= 12; ++nb) {
      for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> a(na), b(nb);
        for (auto& x : a) x = static_cast<double>(rng.below(5));
        for (auto& x : b) x = static_cast<double>(rng.below(5));
        EXPECT_EQ(mann_whitney_u(a, b), pairwise_u(a, b));
      }
    }
  }
}

TEST(MannWhitney, AntisymmetricAndShiftInvariant) {
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> a(1 + rng.below(20)), b(1 + rng.below(20));
    for (auto& x : a) x = std::round(rng.normal() * 3);
    for (auto& x : b) x = std::round(rng.normal() * 3);
    if (a.size() + b.size() < 3) continue;
    try {
      const double z = mann_whitney_z(a, b).value;
      EXPECT_EQ(mann_whitney_z(b, a).value, -z);
      for (auto& x : a) x += 100;
      for (auto& x : b) x += 100;
      EXPECT_EQ(mann_whitney_z(a, b).value, z);
    } catch (const DegenerateSample&) {
    }
  }
}

TEST(LogRank, HandComputedExample) {
  const std::vector<SurvivalObservation> a{{1, true}, {2, true}}, b{{3, true}, {4, true}};
  const auto parts = logrank_parts(a, b);
  EXPECT_EQ(parts.observed, 2.0);
  EXPECT_NEAR(parts.expected, 0.8333333333, 1e-9);
  EXPECT_NEAR(parts.variance, 0.4722222222, 1e-9);
  EXPECT_NEAR(logrank_z(a, b).value, 1.6977, 1e-4);
  EXPECT_EQ(logrank_z(a, a).value, 0.0);
  EXPECT_EQ(logrank_z(b, a).value, -logrank_z(a, b).value);
  const std::vector<SurvivalObservation> censored{{1, false}, {2, false}};
  EXPECT_THROW(logrank_z(censored, censored), DegenerateSample);
}

TEST(DifferentialEffect, ContinuousExample) {
  // Arms with exact mean and s^2 = 1: 25 copies each of mean-1 and mean+1 gives
  // s^2 = 50/49, so scale the spread to sqrt(49/50).
  auto arm = [](double mean) {
    std::vector<double> v;
    const double d = std::sqrt(49.0 / 50.0);
    for (int i = 0; i < 25; ++i) {
      v.push_back(mean - d);
      v.push_back(mean + d);
    }
    return v;
  };
  const auto st = arm(2.0), sc = arm(1.0), ct = arm(1.0), cc = arm(1.0);
  const double z = differential_effect_z(ContinuousTreatmentSample{st, sc}, ContinuousTreatmentSample{ct, cc}).value;
  EXPECT_NEAR(z, 1.0 / std::sqrt(0.08), 1e-9);
  EXPECT_NEAR(z, 3.5355, 1e-4);
}

TEST(DifferentialEffect, BinaryExample) {
  const double z = differential_effect_z(BinaryTreatmentSample{{40, 100}, {20, 100}},
                                         BinaryTreatmentSample{{20, 100}, {20, 100}})
                       .value;
  EXPECT_NEAR(z, 0.2 / std::sqrt(0.0072), 1e-12);
  EXPECT_NEAR(z, 2.3570, 1e-4);
  const BinaryTreatmentSample same{{30, 80}, {10, 90}};
  EXPECT_EQ(differential_effect_z(same, same).value, 0.0);
}

TEST(DifferentialEffect, MatchesPlugInFormula) {
  Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    BinaryTreatmentSample sub{{0, 5 + rng.below(100)}, {0, 5 + rng.below(100)}};
    BinaryTreatmentSample comp{{0, 5 + rng.below(100)}, {0, 5 + rng.below(100)}};
    for (auto* s : {&sub.treated, &sub.control, &comp.treated, &comp.control}) s->successes = 1 + rng.below(s->n - 1);
    auto p = [](BinarySample s) { return static_cast<double>(s.successes) / static_cast<double>(s.n); };
    auto v = [&](BinarySample s) { return p(s) * (1 - p(s)) / static_cast<double>(s.n); };
    const double expected = ((p(sub.treated) - p(sub.control)) - (p(comp.treated) - p(comp.control))) /
                            std::sqrt(v(sub.treated) + v(sub.control) + v(comp.treated) + v(comp.control));
    EXPECT_NEAR(differential_effect_z(sub, comp).value, expected, 1e-10);
    EXPECT_EQ(differential_effect_z(comp, sub).value, -differential_effect_z(sub, comp).value);
  }
}

TEST(SelectTest, DefaultsAndOverrides) {
  TargetSpec binary{"y", TargetKind::binary, "", {"0", "1"}};
  TargetSpec cont{"y", TargetKind::continuous, "", {}};
  TargetSpec tte{"y", TargetKind::time_to_event, "e", {}};
  EXPECT_EQ(select_test(binary, false), TestKind::two_proportion_z);
  EXPECT_EQ(select_test(binary, true), TestKind::diff_effect_binary);
  EXPECT_EQ(select_test(cont, false), TestKind::mann_whitney_u);
  EXPECT_EQ(select_test(cont, false, TestKind::welch_t), TestKind::welch_t);
  EXPECT_EQ(select_test(cont, true), TestKind::diff_effect_continuous);
  EXPECT_EQ(select_test(tte, false), TestKind::log_rank);
  EXPECT_THROW(select_test(tte, true), Unsupported);
  EXPECT_THROW(select_test(binary, false, TestKind::log_rank), Unsupported);
}

TEST(Summary, MidranksAverageTies) {
  const auto r = summary::midranks(std::vector<double>{3, 1, 3, 2});
  EXPECT_EQ(r.midranks, (std::vector<double>{3.5, 1, 3.5, 2}));
  EXPECT_EQ(r.tie_term, 6.0);
}

}  // namespace
}  // namespace ztree
