#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ztree/dataset.hpp"
#include "ztree/model_selection.hpp"
#include "ztree/tree.hpp"

namespace ztree {

/// Greedy CART: Gini impurity for binary targets, squared error for
/// continuous ones. Ordered features split at observed values (`x > v`),
/// nominal features one level against the rest (`x == level`). Among equally
/// good splits the first in feature, then cutoff/level order wins.
TreeModel learn_cart(const Dataset& data, const CartParams& params);

/// Copy of `model` with every node at depth `max_depth` turned into a leaf.
/// For CART this equals training with that max_depth.
TreeModel truncate_depth(const TreeModel& model, int max_depth);

std::vector<int> default_cart_depth_grid();  // 1..12
std::vector<int> default_cart_min_split_grid();  // 2, 5, 10, 20, 50

struct CartTuning {
  CartParams best;
  std::vector<CartParams> grid;  // depth-major
  std::vector<double> cv_metric;
  MetricKind metric_kind = MetricKind::auroc;
};

/// External CV over max_depth x min_samples_split. Ties go to the smaller
/// depth, then the larger min_samples_split.
CartTuning tune_cart(const Dataset& data, std::span<const int> depths, std::span<const int> min_splits, int folds,
                     std::uint64_t seed, int threads = 1);

}  // namespace ztree
