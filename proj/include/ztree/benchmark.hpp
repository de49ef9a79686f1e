#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ztree/dataset.hpp"
#include "ztree/model_selection.hpp"
#include "ztree/tree.hpp"

namespace ztree {

enum class Method { ztree, cart };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct BenchmarkSpec {
  std::vector<std::size_t> sizes{100, 300, 1000, 3000};
  int resamples = 10;
  std::vector<Method> methods{Method::ztree, Method::cart};
  std::uint64_t seed = 42;
  /// Base configuration for ZTree; its threshold is replaced by tuning.
  LearnConfig ztree;
  std::vector<double> threshold_grid = default_threshold_grid();
  std::vector<int> cart_depths = default_cart_depths();
  std::vector<int> cart_min_splits = default_cart_min_splits();
  int tune_folds = 10;
  int threads = 1;
  bool timing = false;

  static std::vector<int> default_cart_depths();
  static std::vector<int> default_cart_min_splits();
};

struct BenchmarkRow {
  Method method = Method::ztree;
  std::size_t size = 0;
  int resample = 0;
  double metric = 0.0;
  std::size_t n_nodes = 0;
  int depth = 0;
  double wall_time = 0.0;  // seconds; only filled when timing is on
  std::string tuned;       // chosen hyperparameters
  std::string split_fingerprint;  // hash of the training index set
};

struct SummaryRow {
  Method method = Method::ztree;
  std::size_t size = 0;
  int resamples = 0;
  double metric_mean = 0.0;
  std::optional<double> metric_ci;  // half-width of the 95% CI of the mean
  double n_nodes_mean = 0.0;
  std::optional<double> n_nodes_ci;
  double depth_mean = 0.0;
  std::optional<double> depth_ci;
};

struct BenchmarkReport {
  MetricKind metric_kind = MetricKind::auroc;
  bool timing = false;
  std::vector<BenchmarkRow> rows;  // ordered by (method, size, resample)
  std::vector<SummaryRow> summary;  // ordered by (method, size)
};

/// Draws `resamples` training sets of every size from `source` without
/// replacement; the remaining rows form the test set. Every method sees the
/// same index sets, tunes on the training set with external CV, refits and
/// is scored on the test set.
BenchmarkReport run_benchmark(const Dataset& source, const BenchmarkSpec& spec);

/// Training rows of one (size, resample) cell, in draw order.
std::vector<std::size_t> benchmark_training_rows(std::size_t source_rows, std::size_t size, int resample,
                                                 std::uint64_t seed);

/// Mean and normal-approximation 95% CI half-width (nullopt below 2 values).
std::pair<double, std::optional<double>> mean_ci95(std::span<const double> values);

void write_benchmark_csv(const BenchmarkReport& report, std::ostream& out,
                         std::span<const std::string> header_lines = {});
/// Plain-text panels, one per size axis: the metric and the tree depth by method.
void write_figure_tables(const BenchmarkReport& report, std::ostream& out,
                         std::span<const std::string> header_lines = {});

}  // namespace ztree
