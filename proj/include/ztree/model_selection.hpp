#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ztree/dataset.hpp"
#include "ztree/tree.hpp"

namespace ztree {

enum class MetricKind { auroc, rmse };

std::string_view to_string(MetricKind kind);

/// Probability that a random positive outscores a random negative, ties
/// counted one half. Throws Undefined when only one class is present.
double auroc(std::span<const double> scores, std::span<const double> labels);

double rmse(std::span<const double> predictions, std::span<const double> actuals);

/// AUROC for binary targets, RMSE for continuous ones.
MetricKind metric_for(TargetKind kind);
double evaluate(MetricKind kind, std::span<const double> predictions, std::span<const double> actuals);
/// True when `a` is strictly better than `b` (larger AUROC, smaller RMSE).
bool better(MetricKind kind, double a, double b);

/// {0.2, 0.4, ..., 3.0}.
std::vector<double> default_threshold_grid();

struct TuningReport {
  std::vector<double> grid;
  std::vector<double> cv_metric;
  std::vector<double> n_nodes_mean;
  std::vector<double> depth_mean;
  double chosen = 0.0;
  MetricKind metric_kind = MetricKind::auroc;
  std::size_t fold_trainings = 0;
  std::size_t single_class_folds = 0;
};

struct TuneOptions {
  int folds = 10;
  int threads = 1;
};

struct TuneResult {
  TreeModel model;
  TuningReport report;
};

/// One external CV over the grid. Each fold trains a single base tree at
/// min(grid) and derives every other threshold by pruning; held-out
/// predictions are pooled per threshold before scoring. The best threshold
/// (ties to the larger one) is applied to a base tree trained on all data.
TuneResult tune_threshold(const Dataset& data, const LearnConfig& config, std::span<const double> grid,
                          const TuneOptions& options = {});

/// CSV: threshold, cv_metric, n_nodes_mean, depth_mean.
void write_report_csv(const TuningReport& report, std::ostream& out, std::span<const std::string> header_lines = {});

}  // namespace ztree
