#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ztree/cv_engine.hpp"
#include "ztree/dataset.hpp"
#include "ztree/stat_tests.hpp"
#include "ztree/subgroup.hpp"

namespace ztree {

enum class Algorithm { ztree, cart };

/// Why a node is a leaf; `split` marks internal nodes.
enum class StopReason {
  split,
  gate,               // CV score below the threshold
  min_size,           // too few rows to cross-validate
  degenerate_target,  // constant outcome, no events, or a missing arm
  no_candidates,      // no criterion leaves min_side rows on both sides
  no_subgroup,        // every candidate degenerates on the full node data
  depth_cap,
  max_depth,          // CART depth limit
  min_samples_split,  // CART node-size limit
  pure,               // CART: constant target
};

std::string_view to_string(StopReason reason);
StopReason parse_stop_reason(std::string_view text);

inline constexpr int kMaxTreeDepth = 30;

struct LeafStats {
  std::size_t n = 0;
  /// Prediction: positive fraction (binary), mean (continuous) or the
  /// fraction of rows with an event (time-to-event).
  double value = 0.0;
  double event_count = 0.0;
  double total_time = 0.0;
  std::size_t n_treated = 0;
  std::size_t n_control = 0;
  std::optional<double> mean_treated;
  std::optional<double> mean_control;

  /// Treated-minus-control mean outcome when both arms are present.
  std::optional<double> effect() const;
  bool operator==(const LeafStats&) const = default;
};

LeafStats compute_leaf_stats(const Dataset& data);

struct TreeNode {
  std::string path;  // root-to-node string over {L, R}; root is ""
  std::optional<CvScore> cv_score;
  std::optional<SubgroupCriterion> criterion;
  std::optional<double> split_z;  // signed training z of the criterion
  StopReason stop = StopReason::split;
  LeafStats stats;
  int left = -1;  // subgroup
  int right = -1;  // complement

  bool is_leaf() const { return !criterion.has_value(); }
  bool operator==(const TreeNode&) const = default;
};

struct CartParams {
  int max_depth = 5;
  int min_samples_split = 2;
  bool operator==(const CartParams&) const = default;
};

struct LearnConfig {
  double threshold = 2.0;
  int search_depth = 1;
  std::size_t min_side = 10;
  CvConfig cv;
  std::optional<TestKind> test;  // default chosen by select_test
};

struct ModelConfig {
  Algorithm algorithm = Algorithm::ztree;
  double threshold = 0.0;
  int search_depth = 1;
  std::size_t min_side = 10;
  CvConfig cv;
  TestKind test = TestKind::two_proportion_z;
  CartParams cart;
  bool operator==(const ModelConfig&) const = default;
};

/// Free-form header recorded in every model file.
struct Provenance {
  std::string tool;
  std::string command;
  std::uint64_t seed = 0;
  bool operator==(const Provenance&) const = default;
};

/// Binary tree stored in preorder; nodes[0] is the root.
struct TreeModel {
  ModelConfig config;
  Schema schema;
  std::vector<TreeNode> nodes;
  Provenance provenance;

  const TreeNode& root() const { return nodes.front(); }
  std::size_t node_count() const { return nodes.size(); }
  std::size_t leaf_count() const;
  /// Edges on the longest root-to-leaf path (a single leaf has depth 0).
  int depth() const;
  bool operator==(const TreeModel&) const = default;
};

/// Grows a tree gated by internal-CV scores. The CV repeats of each node run
/// on up to `threads` threads. Throws DataError for an empty or incomplete
/// dataset and Unsupported for a test that does not fit the target.
TreeModel learn_tree(const Dataset& data, const LearnConfig& config, int threads = 1);

/// Number of learn_tree calls made by this process.
std::size_t learn_tree_invocations();

/// Leaf index reached by every row of `data` (member -> left).
std::vector<std::size_t> route(const TreeModel& model, const Dataset& data);
std::size_t route_row(const TreeModel& model, const Dataset& data, std::size_t row);

/// Leaf prediction (LeafStats::value) per row.
std::vector<double> predict(const TreeModel& model, const Dataset& data);

/// Same tree with every node whose CV score is below `new_threshold` turned
/// into a leaf. Throws RefusedLowerThreshold below the trained threshold.
TreeModel derive_pruned(const TreeModel& model, double new_threshold);

inline constexpr int kModelFormatVersion = 1;

/// Canonical JSON document (fixed key order, shortest round-trip numbers).
std::string serialize(const TreeModel& model);
/// Inverse of serialize; validates version, schema fingerprint and tree invariants.
TreeModel deserialize(std::string_view document);

}  // namespace ztree
