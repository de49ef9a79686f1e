#include "ztree/tree.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "ztree/csv.hpp"
#include "ztree/error.hpp"

namespace ztree {

namespace {

std::atomic<std::size_t> g_learn_calls{0};

constexpr std::pair<StopReason, std::string_view> kStopNames[] = {
    {StopReason::split, "split"},
    {StopReason::gate, "gate"},
    {StopReason::min_size, "min_size"},
    {StopReason::degenerate_target, "degenerate_target"},
    {StopReason::no_candidates, "no_candidates"},
    {StopReason::no_subgroup, "no_subgroup"},
    {StopReason::depth_cap, "depth_cap"},
    {StopReason::max_depth, "max_depth"},
    {StopReason::min_samples_split, "min_samples_split"},
    {StopReason::pure, "pure"},
};

}  // namespace

std::string_view to_string(StopReason reason) {
  for (const auto& [r, name] : kStopNames) {
    if (r == reason) return name;
  }
  return "?";
}

StopReason parse_stop_reason(std::string_view text) {
  for (const auto& [r, name] : kStopNames) {
    if (name == text) return r;
  }
  throw FormatError("unknown stop reason '" + std::string(text) + "'");
}

std::optional<double> LeafStats::effect() const {
  if (!mean_treated || !mean_control) return std::nullopt;
  return *mean_treated - *mean_control;
}

LeafStats compute_leaf_stats(const Dataset& data) {
  LeafStats s;
  s.n = data.n();
  const auto y = data.target();
  if (s.n == 0) return s;
  if (data.schema().target.kind == TargetKind::time_to_event) {
    for (std::size_t i = 0; i < s.n; ++i) {
      s.event_count += data.events()[i];
      s.total_time += y[i];
    }
    s.value = s.event_count / static_cast<double>(s.n);
  } else {
    double total = 0.0;
    for (double v : y) total += v;
    s.value = total / static_cast<double>(s.n);
  }
  if (data.has_treatment() && data.treatment().size() == s.n) {
    double sum_t = 0.0, sum_c = 0.0;
    for (std::size_t i = 0; i < s.n; ++i) {
      if (data.treatment()[i] == 1.0) {
        ++s.n_treated;
        sum_t += y[i];
      } else {
        ++s.n_control;
        sum_c += y[i];
      }
    }
    if (s.n_treated) s.mean_treated = sum_t / static_cast<double>(s.n_treated);
    if (s.n_control) s.mean_control = sum_c / static_cast<double>(s.n_control);
  }
  return s;
}

std::size_t TreeModel::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int TreeModel::depth() const {
  int deepest = 0;
  for (const auto& node : nodes) deepest = std::max(deepest, static_cast<int>(node.path.size()));
  return deepest;
}

std::size_t learn_tree_invocations() { return g_learn_calls.load(); }

namespace {

bool degenerate_target(const Dataset& data, TestKind test) {
  const auto y = data.target();
  if (y.empty()) return true;
  if (test == TestKind::log_rank) {
    return std::none_of(data.events().begin(), data.events().end(), [](double e) { return e == 1.0; });
  }
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) return true;
  if (uses_treatment(test)) {
    const auto t = data.treatment();
    const auto treated = std::count(t.begin(), t.end(), 1.0);
    return treated == 0 || static_cast<std::size_t>(treated) == t.size();
  }
  return false;
}

class Grower {
 public:
  Grower(const ModelConfig& config, int threads) : config_(config), threads_(threads) {}

  std::vector<TreeNode> grow(const Dataset& data) {
    nodes_.clear();
    grow_node(data, "");
    return std::move(nodes_);
  }

 private:
  int grow_node(const Dataset& data, const std::string& path) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{});
    nodes_[index].path = path;
    nodes_[index].stats = compute_leaf_stats(data);

    const std::size_t n = data.n();
    const std::size_t min_rows = std::max(2 * config_.min_side, static_cast<std::size_t>(config_.cv.folds) * config_.min_side);
    auto stop = [&](StopReason reason) {
      nodes_[index].stop = reason;
      return index;
    };
    if (static_cast<int>(path.size()) >= kMaxTreeDepth) return stop(StopReason::depth_cap);
    if (n < min_rows) return stop(StopReason::min_size);
    if (degenerate_target(data, config_.test)) return stop(StopReason::degenerate_target);
    if (!has_candidates(data, config_.search_depth, config_.min_side)) return stop(StopReason::no_candidates);

    auto cv = internal_cv_score(data, config_.test, config_.search_depth, config_.min_side, config_.cv, path, threads_);
    const bool passes = cv.mean_score >= config_.threshold;
    nodes_[index].cv_score = std::move(cv);
    if (!passes) return stop(StopReason::gate);

    const auto model = train_best_subgroup(data, config_.test, config_.search_depth, config_.min_side);
    if (!model) return stop(StopReason::no_subgroup);

    const auto membership = apply_model(*model, data);
    std::vector<std::size_t> in_rows, out_rows;
    for (std::size_t i = 0; i < n; ++i) (membership[i] ? in_rows : out_rows).push_back(i);
    nodes_[index].criterion = model->criterion;
    nodes_[index].split_z = model->train_score.value;
    nodes_[index].stop = StopReason::split;

    const int left = grow_node(data.subset(in_rows), path + "L");
    nodes_[index].left = left;
    const int right = grow_node(data.subset(out_rows), path + "R");
    nodes_[index].right = right;
    return index;
  }

  const ModelConfig& config_;
  int threads_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

TreeModel learn_tree(const Dataset& data, const LearnConfig& config, int threads) {
  if (data.n() == 0) throw DataError("cannot learn a tree from an empty dataset");
  if (!data.complete()) throw DataError("training data contains missing or unseen values");
  if (!(config.threshold >= 0.0) || !std::isfinite(config.threshold)) {
    throw std::invalid_argument("threshold must be a finite value >= 0");
  }
  if (config.search_depth < 1 || config.search_depth > 3) throw std::invalid_argument("search depth must be 1, 2 or 3");
  if (config.min_side < 1) throw std::invalid_argument("min_side must be at least 1");
  if (config.cv.folds < 2 || config.cv.repeats < 1) throw std::invalid_argument("CV needs folds >= 2 and repeats >= 1");
  g_learn_calls.fetch_add(1);

  TreeModel model;
  model.config.algorithm = Algorithm::ztree;
  model.config.threshold = config.threshold;
  model.config.search_depth = config.search_depth;
  model.config.min_side = config.min_side;
  model.config.cv = config.cv;
  model.config.test = select_test(data.schema().target, data.has_treatment(), config.test);
  model.schema = data.schema();
  model.provenance.seed = config.cv.seed;
  model.nodes = Grower(model.config, threads).grow(data);
  return model;
}

// ---------------------------------------------------------------------------

namespace {

/// Criterion atoms resolved against one dataset.
struct ResolvedAtom {
  int feature = -1;  // -1: never satisfied
  bool greater = true;
  double value = 0.0;
};

std::vector<std::vector<ResolvedAtom>> resolve_criteria(const TreeModel& model, const Dataset& data) {
  std::vector<std::vector<ResolvedAtom>> resolved(model.nodes.size());
  for (std::size_t k = 0; k < model.nodes.size(); ++k) {
    const auto& node = model.nodes[k];
    if (node.is_leaf()) continue;
    for (const auto& atom : node.criterion->atoms) {
      ResolvedAtom r;
      const auto j = data.schema().find_feature(atom.feature);
      if (j && data.feature(*j).ordered() == (atom.form == AtomForm::greater)) {
        r.greater = atom.form == AtomForm::greater;
        if (r.greater) {
          r.feature = static_cast<int>(*j);
          r.value = atom.cutoff;
        } else {
          const auto& levels = data.feature(*j).levels;
          const auto it = std::find(levels.begin(), levels.end(), atom.level);
          if (it != levels.end()) {
            r.feature = static_cast<int>(*j);
            r.value = static_cast<double>(it - levels.begin());
          }
        }
      }
      resolved[k].push_back(r);
    }
  }
  return resolved;
}

std::size_t route_resolved(const TreeModel& model, const std::vector<std::vector<ResolvedAtom>>& resolved,
                           const Dataset& data, std::size_t row) {
  std::size_t k = 0;
  while (!model.nodes[k].is_leaf()) {
    bool member = true;
    for (const auto& atom : resolved[k]) {
      if (atom.feature < 0) {
        member = false;
        break;
      }
      const double x = data.column(static_cast<std::size_t>(atom.feature))[row];
      if (!(atom.greater ? x > atom.value : x == atom.value)) {
        member = false;
        break;
      }
    }
    k = static_cast<std::size_t>(member ? model.nodes[k].left : model.nodes[k].right);
  }
  return k;
}

}  // namespace

std::size_t route_row(const TreeModel& model, const Dataset& data, std::size_t row) {
  return route_resolved(model, resolve_criteria(model, data), data, row);
}

std::vector<std::size_t> route(const TreeModel& model, const Dataset& data) {
  const auto resolved = resolve_criteria(model, data);
  std::vector<std::size_t> leaves(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) leaves[i] = route_resolved(model, resolved, data, i);
  return leaves;
}

std::vector<double> predict(const TreeModel& model, const Dataset& data) {
  const auto leaves = route(model, data);
  std::vector<double> out(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) out[i] = model.nodes[leaves[i]].stats.value;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

int copy_pruned(const std::vector<TreeNode>& source, std::size_t index, double threshold, std::vector<TreeNode>& out) {
  const int position = static_cast<int>(out.size());
  out.push_back(source[index]);
  TreeNode& node = out.back();
  if (node.cv_score && node.cv_score->mean_score < threshold) {
    node.criterion.reset();
    node.split_z.reset();
    node.left = node.right = -1;
    node.stop = StopReason::gate;
    return position;
  }
  if (node.is_leaf()) return position;
  const auto left_src = static_cast<std::size_t>(node.left);
  const auto right_src = static_cast<std::size_t>(node.right);
  const int left = copy_pruned(source, left_src, threshold, out);
  out[position].left = left;
  const int right = copy_pruned(source, right_src, threshold, out);
  out[position].right = right;
  return position;
}

}  // namespace

TreeModel derive_pruned(const TreeModel& model, double new_threshold) {
  if (model.config.algorithm != Algorithm::ztree) throw Unsupported("only gated trees can be pruned by threshold");
  if (!(new_threshold >= model.config.threshold)) {
    throw RefusedLowerThreshold("threshold " + csv::format_number(new_threshold) + " is below the trained threshold " +
                                csv::format_number(model.config.threshold) + "; retrain instead");
  }
  TreeModel out;
  out.config = model.config;
  out.config.threshold = new_threshold;
  out.schema = model.schema;
  out.provenance = model.provenance;
  out.nodes.reserve(model.nodes.size());
  copy_pruned(model.nodes, 0, new_threshold, out.nodes);
  return out;
}

}  // namespace ztree
