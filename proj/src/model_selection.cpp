#include "ztree/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ztree/csv.hpp"
#include "ztree/error.hpp"
#include "ztree/parallel.hpp"
#include "ztree/rng.hpp"

namespace ztree {

std::string_view to_string(MetricKind kind) { return kind == MetricKind::auroc ? "auroc" : "rmse"; }

double auroc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auroc: scores and labels differ in length");
  double positives = 0.0;
  for (double l : labels) {
    if (l != 0.0 && l != 1.0) throw std::invalid_argument("auroc: labels must be 0 or 1");
    positives += l;
  }
  const double negatives = static_cast<double>(labels.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) throw Undefined("AUROC is undefined with a single class");
  const auto ranks = summary::midranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1.0) rank_sum += ranks.midranks[i];
  }
  const double u = rank_sum - positives * (positives + 1.0) / 2.0;
  return u / (positives * negatives);
}

double rmse(std::span<const double> predictions, std::span<const double> actuals) {
  if (predictions.size() != actuals.size()) throw std::invalid_argument("rmse: length mismatch");
  if (predictions.empty()) throw std::invalid_argument("rmse: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - actuals[i];
    total += e * e;
  }
  return std::sqrt(total / static_cast<double>(predictions.size()));
}

MetricKind metric_for(TargetKind kind) {
  switch (kind) {
    case TargetKind::binary: return MetricKind::auroc;
    case TargetKind::continuous: return MetricKind::rmse;
    case TargetKind::time_to_event: break;
  }
  throw Unsupported("no evaluation metric for time-to-event targets");
}

double evaluate(MetricKind kind, std::span<const double> predictions, std::span<const double> actuals) {
  return kind == MetricKind::auroc ? auroc(predictions, actuals) : rmse(predictions, actuals);
}

bool better(MetricKind kind, double a, double b) { return kind == MetricKind::auroc ? a > b : a < b; }

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 15; ++k) grid.push_back(k / 5.0);
  return grid;
}

TuneResult tune_threshold(const Dataset& data, const LearnConfig& config, std::span<const double> grid,
                          const TuneOptions& options) {
  if (grid.empty()) throw std::invalid_argument("threshold grid is empty");
  for (double t : grid) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("grid thresholds must be finite and >= 0");
  }
  if (options.folds < 2) throw std::invalid_argument("external CV needs at least 2 folds");
  if (data.n() < static_cast<std::size_t>(options.folds)) {
    throw TooSmall("dataset has fewer rows than external CV folds");
  }
  const MetricKind kind = metric_for(data.schema().target.kind);
  const double base_threshold = *std::min_element(grid.begin(), grid.end());
  LearnConfig base = config;
  base.threshold = base_threshold;

  const std::size_t n = data.n();
  const std::size_t g = grid.size();
  const auto folds = static_cast<std::size_t>(options.folds);
  const auto fold_of = assign_folds(data, options.folds, false, stream_seed(config.cv.seed, "external-cv"));

  std::vector<std::vector<double>> pooled(g, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> nodes(g, std::vector<double>(folds)), depths(g, std::vector<double>(folds));
  std::vector<std::uint8_t> single_class(folds, 0);
  const int inner_threads = options.threads > 1 ? 1 : options.threads;
  parallel_for(folds, options.threads, [&](std::size_t k) {
    std::vector<std::size_t> train_rows, held_rows;
    for (std::size_t i = 0; i < n; ++i) (fold_of[i] == static_cast<int>(k) ? held_rows : train_rows).push_back(i);
    const auto held = data.subset(held_rows);
    if (kind == MetricKind::auroc) {
      const auto y = held.target();
      single_class[k] = std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
    }
    const auto base_tree = learn_tree(data.subset(train_rows), base, inner_threads);
    for (std::size_t t = 0; t < g; ++t) {
      const auto tree = derive_pruned(base_tree, grid[t]);
      const auto predictions = predict(tree, held);
      for (std::size_t h = 0; h < held_rows.size(); ++h) pooled[t][held_rows[h]] = predictions[h];
      nodes[t][k] = static_cast<double>(tree.node_count());
      depths[t][k] = tree.depth();
    }
  });

  TuneResult result;
  auto& report = result.report;
  report.grid.assign(grid.begin(), grid.end());
  report.metric_kind = kind;
  report.fold_trainings = folds;
  report.single_class_folds = static_cast<std::size_t>(std::count(single_class.begin(), single_class.end(), 1));
  std::size_t best = 0;
  for (std::size_t t = 0; t < g; ++t) {
    report.cv_metric.push_back(evaluate(kind, pooled[t], data.target()));
    report.n_nodes_mean.push_back(mean_of(nodes[t]));
    report.depth_mean.push_back(mean_of(depths[t]));
    if (t == 0) continue;
    const double m = report.cv_metric[t];
    const double m_best = report.cv_metric[best];
    if (better(kind, m, m_best) || (m == m_best && grid[t] > grid[best])) best = t;
  }
  report.chosen = grid[best];
  result.model = derive_pruned(learn_tree(data, base, options.threads), report.chosen);
  return result;
}

void write_report_csv(const TuningReport& report, std::ostream& out, std::span<const std::string> header_lines) {
  for (const auto& line : header_lines) out << "# " << line << '\n';
  out << "# metric: " << to_string(report.metric_kind) << '\n';
  out << "# chosen_threshold: " << csv::format_number(report.chosen) << '\n';
  out << "# fold_trainings: " << report.fold_trainings << '\n';
  out << "# single_class_folds: " << report.single_class_folds << '\n';
  out << "threshold,cv_metric,n_nodes_mean,depth_mean\n";
  for (std::size_t t = 0; t < report.grid.size(); ++t) {
    out << csv::format_number(report.grid[t]) << ',' << csv::format_number(report.cv_metric[t]) << ','
        << csv::format_number(report.n_nodes_mean[t]) << ',' << csv::format_number(report.depth_mean[t]) << '\n';
  }
}

}  // namespace ztree
