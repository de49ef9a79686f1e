#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Inner loops of subgroup scoring. Membership masks are byte vectors holding
// 0 or 1. Every kernel has a scalar reference version and, where the build
// and CPU allow, an AVX2 version; the dispatcher picks one at first use.
//
// Mask kernels and counts are exact in every variant. Moment sums may differ
// between variants in the last bits (lane-wise accumulation order) unless
// the inputs are integers or half-integers, which the binary and rank-based
// tests rely on.

namespace ztree::kernels {

using Mask = std::span<std::uint8_t>;
using ConstMask = std::span<const std::uint8_t>;

struct Moments {
  double count = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;
  bool operator==(const Moments&) const = default;
};

/// Moments of y over rows where the mask is set (in) and clear (out).
struct SplitMoments {
  Moments in;
  Moments out;
};

/// Moments of y over the four (mask, arm) cells, indexed [mask][arm].
struct SplitMoments4 {
  Moments cell[2][2];
};

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  void (*greater_than)(std::span<const double> x, double cutoff, Mask out);
  void (*equal_to)(std::span<const double> x, double value, Mask out);
  void (*and_masks)(ConstMask a, ConstMask b, Mask out);
  std::size_t (*count)(ConstMask mask);
  SplitMoments (*split_moments)(ConstMask mask, std::span<const double> y);
  SplitMoments4 (*split_moments4)(ConstMask mask, ConstMask arm, std::span<const double> y);
};

const KernelTable& scalar_table();
/// Null when the build has no AVX2 variant or the CPU lacks AVX2.
const KernelTable* avx2_table();

/// Table in use. Chosen on first call from ZTREE_SIMD (scalar|avx2|auto,
/// default auto = best supported).
const KernelTable& active();

/// Forces a variant; returns false if it is unavailable. Not thread-safe
/// with respect to concurrent kernel calls.
bool select(Isa isa);

// Convenience wrappers over active().
inline void greater_than(std::span<const double> x, double cutoff, Mask out) { active().greater_than(x, cutoff, out); }
inline void equal_to(std::span<const double> x, double value, Mask out) { active().equal_to(x, value, out); }
inline void and_masks(ConstMask a, ConstMask b, Mask out) { active().and_masks(a, b, out); }
inline std::size_t count(ConstMask mask) { return active().count(mask); }
inline SplitMoments split_moments(ConstMask mask, std::span<const double> y) { return active().split_moments(mask, y); }
inline SplitMoments4 split_moments4(ConstMask mask, ConstMask arm, std::span<const double> y) {
  return active().split_moments4(mask, arm, y);
}

namespace scalar {
void greater_than(std::span<const double> x, double cutoff, Mask out);
void equal_to(std::span<const double> x, double value, Mask out);
void and_masks(ConstMask a, ConstMask b, Mask out);
std::size_t count(ConstMask mask);
SplitMoments split_moments(ConstMask mask, std::span<const double> y);
SplitMoments4 split_moments4(ConstMask mask, ConstMask arm, std::span<const double> y);
}  // namespace scalar

#if defined(ZTREE_HAVE_AVX2)
namespace avx2 {
void greater_than(std::span<const double> x, double cutoff, Mask out);
void equal_to(std::span<const double> x, double value, Mask out);
void and_masks(ConstMask a, ConstMask b, Mask out);
std::size_t count(ConstMask mask);
SplitMoments split_moments(ConstMask mask, std::span<const double> y);
SplitMoments4 split_moments4(ConstMask mask, ConstMask arm, std::span<const double> y);
}  // namespace avx2
#endif

}  // namespace ztree::kernels
