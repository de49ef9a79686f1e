#include "ztree/kernels.hpp"

namespace ztree::kernels::scalar {

void greater_than(std::span<const double> x, double cutoff, Mask out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > cutoff ? 1 : 0;
}

void equal_to(std::span<const double> x, double value, Mask out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] == value ? 1 : 0;
}

void and_masks(ConstMask a, ConstMask b, Mask out) {
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] & b[i];
}

std::size_t count(ConstMask mask) {
  std::size_t total = 0;
  for (auto m : mask) total += m;
  return total;
}

SplitMoments split_moments(ConstMask mask, std::span<const double> y) {
  SplitMoments r;
  for (std::size_t i = 0; i < y.size(); ++i) {
    Moments& m = mask[i] ? r.in : r.out;
    m.count += 1.0;
    m.sum += y[i];
    m.sum_sq += y[i] * y[i];
  }
  return r;
}

SplitMoments4 split_moments4(ConstMask mask, ConstMask arm, std::span<const double> y) {
  SplitMoments4 r;
  for (std::size_t i = 0; i < y.size(); ++i) {
    Moments& m = r.cell[mask[i]][arm[i]];
    m.count += 1.0;
    m.sum += y[i];
    m.sum_sq += y[i] * y[i];
  }
  return r;
}

}  // namespace ztree::kernels::scalar
