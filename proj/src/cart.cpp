#include "ztree/cart.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "ztree/error.hpp"
#include "ztree/parallel.hpp"
#include "ztree/rng.hpp"

namespace ztree {

namespace {

struct Split {
  std::size_t feature = 0;
  double value = 0.0;  // cutoff or level code
  bool greater = true;
  double impurity = 0.0;
};

/// Weighted impurity of one side from its count, sum and sum of squares.
double side_impurity(bool binary, double n, double sum, double sum_sq) {
  if (n == 0.0) return 0.0;
  if (binary) return n - (sum * sum + (n - sum) * (n - sum)) / n;
  return sum_sq - sum * sum / n;
}

class CartGrower {
 public:
  CartGrower(const Dataset& data, const CartParams& params)
      : data_(data), params_(params), binary_(data.schema().target.kind == TargetKind::binary) {}

  std::vector<TreeNode> grow() {
    std::vector<std::size_t> rows(data_.n());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    grow_node(rows, "");
    return std::move(nodes_);
  }

 private:
  int grow_node(const std::vector<std::size_t>& rows, const std::string& path) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{});
    nodes_[index].path = path;
    nodes_[index].stats = compute_leaf_stats(data_.subset(rows));
    auto stop = [&](StopReason reason) {
      nodes_[index].stop = reason;
      return index;
    };
    if (static_cast<int>(path.size()) >= params_.max_depth) return stop(StopReason::max_depth);
    if (rows.size() < static_cast<std::size_t>(params_.min_samples_split)) return stop(StopReason::min_samples_split);
    const auto y = data_.target();
    if (std::all_of(rows.begin(), rows.end(), [&](std::size_t i) { return y[i] == y[rows.front()]; })) {
      return stop(StopReason::pure);
    }
    const auto split = best_split(rows);
    if (!split) return stop(StopReason::no_candidates);

    const auto column = data_.column(split->feature);
    std::vector<std::size_t> in_rows, out_rows;
    for (std::size_t i : rows) {
      const bool member = split->greater ? column[i] > split->value : column[i] == split->value;
      (member ? in_rows : out_rows).push_back(i);
    }
    const auto& spec = data_.feature(split->feature);
    Atom atom{spec.name, split->greater ? AtomForm::greater : AtomForm::equals, 0.0, {}};
    if (split->greater) {
      atom.cutoff = split->value;
    } else {
      atom.level = spec.levels[static_cast<std::size_t>(split->value)];
    }
    nodes_[index].criterion = SubgroupCriterion{{atom}};
    nodes_[index].stop = StopReason::split;
    const int left = grow_node(in_rows, path + "L");
    nodes_[index].left = left;
    const int right = grow_node(out_rows, path + "R");
    nodes_[index].right = right;
    return index;
  }

  std::optional<Split> best_split(const std::vector<std::size_t>& rows) const {
    const auto y = data_.target();
    const double n = static_cast<double>(rows.size());
    double centre = 0.0;
    if (!binary_) {
      for (std::size_t i : rows) centre += y[i];
      centre /= n;
    }
    double total = 0.0, total_sq = 0.0;
    for (std::size_t i : rows) {
      const double v = y[i] - centre;
      total += v;
      total_sq += v * v;
    }

    std::optional<Split> best;
    auto offer = [&](std::size_t j, double value, bool greater, double impurity) {
      if (!best || impurity < best->impurity) best = Split{j, value, greater, impurity};
    };
    std::vector<std::pair<double, double>> pairs(rows.size());
    for (std::size_t j = 0; j < data_.feature_count(); ++j) {
      const auto column = data_.column(j);
      if (data_.feature(j).ordered()) {
        for (std::size_t k = 0; k < rows.size(); ++k) pairs[k] = {column[rows[k]], y[rows[k]] - centre};
        std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        double left_n = 0.0, left_sum = 0.0, left_sq = 0.0;
        for (std::size_t k = 0; k + 1 < pairs.size(); ++k) {
          left_n += 1.0;
          left_sum += pairs[k].second;
          left_sq += pairs[k].second * pairs[k].second;
          if (pairs[k].first == pairs[k + 1].first) continue;
          const double impurity = side_impurity(binary_, left_n, left_sum, left_sq) +
                                  side_impurity(binary_, n - left_n, total - left_sum, total_sq - left_sq);
          offer(j, pairs[k].first, true, impurity);
        }
      } else {
        const std::size_t levels = data_.feature(j).levels.size();
        std::vector<double> count(levels, 0.0), sum(levels, 0.0), sum_sq(levels, 0.0);
        for (std::size_t i : rows) {
          const auto level = static_cast<std::size_t>(column[i]);
          const double v = y[i] - centre;
          count[level] += 1.0;
          sum[level] += v;
          sum_sq[level] += v * v;
        }
        for (std::size_t level = 0; level < levels; ++level) {
          if (count[level] == 0.0 || count[level] == n) continue;
          const double impurity = side_impurity(binary_, count[level], sum[level], sum_sq[level]) +
                                  side_impurity(binary_, n - count[level], total - sum[level], total_sq - sum_sq[level]);
          offer(j, static_cast<double>(level), false, impurity);
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  const CartParams& params_;
  bool binary_;
  std::vector<TreeNode> nodes_;
};

int copy_truncated(const std::vector<TreeNode>& source, std::size_t index, int max_depth, std::vector<TreeNode>& out) {
  const int position = static_cast<int>(out.size());
  out.push_back(source[index]);
  TreeNode& node = out.back();
  if (static_cast<int>(node.path.size()) >= max_depth) {
    node.criterion.reset();
    node.split_z.reset();
    node.left = node.right = -1;
    node.stop = StopReason::max_depth;
    return position;
  }
  if (node.is_leaf()) return position;
  const auto left_src = static_cast<std::size_t>(node.left);
  const auto right_src = static_cast<std::size_t>(node.right);
  const int left = copy_truncated(source, left_src, max_depth, out);
  out[position].left = left;
  const int right = copy_truncated(source, right_src, max_depth, out);
  out[position].right = right;
  return position;
}

}  // namespace

TreeModel learn_cart(const Dataset& data, const CartParams& params) {
  if (data.n() == 0) throw DataError("cannot learn a tree from an empty dataset");
  if (!data.complete()) throw DataError("training data contains missing or unseen values");
  if (data.schema().target.kind == TargetKind::time_to_event) {
    throw Unsupported("CART baseline supports binary and continuous targets only");
  }
  if (params.max_depth < 0) throw std::invalid_argument("max_depth must be >= 0");
  if (params.min_samples_split < 2) throw std::invalid_argument("min_samples_split must be >= 2");
  TreeModel model;
  model.config.algorithm = Algorithm::cart;
  model.config.cart = params;
  model.schema = data.schema();
  model.nodes = CartGrower(data, params).grow();
  return model;
}

TreeModel truncate_depth(const TreeModel& model, int max_depth) {
  TreeModel out = model;
  out.nodes.clear();
  copy_truncated(model.nodes, 0, max_depth, out.nodes);
  if (out.config.algorithm == Algorithm::cart) out.config.cart.max_depth = max_depth;
  return out;
}

std::vector<int> default_cart_depth_grid() {
  std::vector<int> grid(12);
  std::iota(grid.begin(), grid.end(), 1);
  return grid;
}

std::vector<int> default_cart_min_split_grid() { return {2, 5, 10, 20, 50}; }

CartTuning tune_cart(const Dataset& data, std::span<const int> depths, std::span<const int> min_splits, int folds,
                     std::uint64_t seed, int threads) {
  if (depths.empty() || min_splits.empty()) throw std::invalid_argument("CART grid is empty");
  if (folds < 2) throw std::invalid_argument("external CV needs at least 2 folds");
  if (data.n() < static_cast<std::size_t>(folds)) throw TooSmall("dataset has fewer rows than external CV folds");
  const MetricKind kind = metric_for(data.schema().target.kind);
  const int deepest = *std::max_element(depths.begin(), depths.end());
  const std::size_t n = data.n();
  const std::size_t cells = depths.size() * min_splits.size();
  const auto fold_of = assign_folds(data, folds, false, stream_seed(seed, "cart-cv"));

  std::vector<std::vector<double>> pooled(cells, std::vector<double>(n, 0.0));
  parallel_for(static_cast<std::size_t>(folds), threads, [&](std::size_t k) {
    std::vector<std::size_t> train_rows, held_rows;
    for (std::size_t i = 0; i < n; ++i) (fold_of[i] == static_cast<int>(k) ? held_rows : train_rows).push_back(i);
    const auto train = data.subset(train_rows);
    const auto held = data.subset(held_rows);
    for (std::size_t s = 0; s < min_splits.size(); ++s) {
      const auto full = learn_cart(train, CartParams{deepest, min_splits[s]});
      for (std::size_t d = 0; d < depths.size(); ++d) {
        const auto predictions = predict(truncate_depth(full, depths[d]), held);
        auto& cell = pooled[d * min_splits.size() + s];
        for (std::size_t h = 0; h < held_rows.size(); ++h) cell[held_rows[h]] = predictions[h];
      }
    }
  });

  CartTuning result;
  result.metric_kind = kind;
  std::optional<std::size_t> best;
  for (std::size_t d = 0; d < depths.size(); ++d) {
    for (std::size_t s = 0; s < min_splits.size(); ++s) {
      const std::size_t c = d * min_splits.size() + s;
      result.grid.push_back(CartParams{depths[d], min_splits[s]});
      result.cv_metric.push_back(evaluate(kind, pooled[c], data.target()));
    }
  }
  for (std::size_t c = 0; c < cells; ++c) {
    if (!best) {
      best = c;
      continue;
    }
    const auto& a = result.grid[c];
    const auto& b = result.grid[*best];
    const double ma = result.cv_metric[c], mb = result.cv_metric[*best];
    const bool preferred = a.max_depth < b.max_depth ||
                           (a.max_depth == b.max_depth && a.min_samples_split > b.min_samples_split);
    if (better(kind, ma, mb) || (ma == mb && preferred)) best = c;
  }
  result.best = result.grid[*best];
  return result;
}

}  // namespace ztree
