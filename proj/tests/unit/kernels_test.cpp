#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ztree/kernels.hpp"
#include "ztree/rng.hpp"

namespace ztree::kernels {
namespace {

std::vector<std::uint8_t> random_mask(Rng& rng, std::size_t n, double p) {
  std::vector<std::uint8_t> m(n);
  for (auto& b : m) b = rng.bernoulli(p) ? 1 : 0;
  return m;
}

void expect_close(const Moments& a, const Moments& b, bool exact) {
  EXPECT_EQ(a.count, b.count);
  if (exact) {
    EXPECT_EQ(a.sum, b.sum);
    EXPECT_EQ(a.sum_sq, b.sum_sq);
  } else {
    EXPECT_NEAR(a.sum, b.sum, 1e-9 * (1.0 + std::abs(b.sum)));
    EXPECT_NEAR(a.sum_sq, b.sum_sq, 1e-9 * (1.0 + b.sum_sq));
  }
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    vector_ = avx2_table();
    if (!vector_) GTEST_SKIP() << "no AVX2 variant on this machine";
  }
  const KernelTable& ref_ = scalar_table();
  const KernelTable* vector_ = nullptr;
};

TEST_F(KernelEquivalence, MaskKernelsAreExact) {
  Rng rng(1);
  for (std::size_t n : {0, 1, 3, 4, 5, 31, 32, 33, 100, 1001}) {
    std::vector<double> x(n);
    for (auto& v : x) v = static_cast<double>(rng.below(7)) - 3.0;
    if (!x.empty()) x[0] = std::nan("");
    for (double c : {-1.0, 0.0, 2.5}) {
      std::vector<std::uint8_t> a(n), b(n);
      ref_.greater_than(x, c, a);
      vector_->greater_than(x, c, b);
      EXPECT_EQ(a, b);
      ref_.equal_to(x, c, a);
      vector_->equal_to(x, c, b);
      EXPECT_EQ(a, b);
    }
    const auto m1 = random_mask(rng, n, 0.4), m2 = random_mask(rng, n, 0.6);
    std::vector<std::uint8_t> a(n), b(n);
    ref_.and_masks(m1, m2, a);
    vector_->and_masks(m1, m2, b);
    EXPECT_EQ(a, b);
    EXPECT_EQ(ref_.count(m1), vector_->count(m1));
  }
}

TEST_F(KernelEquivalence, MomentsExactOnIntegerAndHalfIntegerData) {
  Rng rng(2);
  for (std::size_t n : {1, 7, 8, 9, 64, 1000, 4099}) {
    std::vector<double> y(n);
    for (auto& v : y) v = static_cast<double>(rng.below(2 * n + 1)) / 2.0;
    const auto mask = random_mask(rng, n, 0.3), arm = random_mask(rng, n, 0.5);
    const auto r = ref_.split_moments(mask, y), v = vector_->split_moments(mask, y);
    expect_close(r.in, v.in, true);
    expect_close(r.out, v.out, true);
    const auto r4 = ref_.split_moments4(mask, arm, y), v4 = vector_->split_moments4(mask, arm, y);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) expect_close(r4.cell[i][j], v4.cell[i][j], true);
    }
  }
}

TEST_F(KernelEquivalence, MomentsCloseOnContinuousData) {
  Rng rng(3);
  for (std::size_t n : {5, 17, 1000, 10007}) {
    std::vector<double> y(n);
    for (auto& v : y) v = rng.normal() * 10.0;
    const auto mask = random_mask(rng, n, 0.5), arm = random_mask(rng, n, 0.5);
    const auto r = ref_.split_moments(mask, y), v = vector_->split_moments(mask, y);
    expect_close(r.in, v.in, false);
    expect_close(r.out, v.out, false);
    const auto r4 = ref_.split_moments4(mask, arm, y), v4 = vector_->split_moments4(mask, arm, y);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) expect_close(r4.cell[i][j], v4.cell[i][j], false);
    }
  }
}

TEST(KernelDispatch, SelectSwitchesTable) {
  const Isa before = active().isa;
  ASSERT_TRUE(select(Isa::scalar));
  EXPECT_EQ(active().isa, Isa::scalar);
  if (avx2_table()) {
    ASSERT_TRUE(select(Isa::avx2));
    EXPECT_EQ(active().isa, Isa::avx2);
  } else {
    EXPECT_FALSE(select(Isa::avx2));
  }
  select(before);
}

TEST(KernelScalar, ReferenceSemantics) {
  const std::vector<double> x{1, 2, 3, std::nan("")};
  std::vector<std::uint8_t> m(4);
  scalar::greater_than(x, 1.5, m);
  EXPECT_EQ(m, (std::vector<std::uint8_t>{0, 1, 1, 0}));
  scalar::equal_to(x, 2, m);
  EXPECT_EQ(m, (std::vector<std::uint8_t>{0, 1, 0, 0}));
  const std::vector<double> y{1, 2, 3, 4};
  const std::vector<std::uint8_t> in{1, 0, 1, 0};
  const auto s = scalar::split_moments(in, y);
  EXPECT_EQ(s.in, (Moments{2, 4, 10}));
  EXPECT_EQ(s.out, (Moments{2, 6, 20}));
}

}  // namespace
}  // namespace ztree::kernels
