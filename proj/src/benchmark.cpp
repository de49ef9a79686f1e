#include "ztree/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "ztree/cart.hpp"
#include "ztree/csv.hpp"
#include "ztree/error.hpp"
#include "ztree/parallel.hpp"
#include "ztree/rng.hpp"

namespace ztree {

std::string_view to_string(Method method) { return method == Method::ztree ? "ztree" : "cart"; }

Method parse_method(std::string_view text) {
  if (text == "ztree") return Method::ztree;
  if (text == "cart") return Method::cart;
  throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

std::vector<int> BenchmarkSpec::default_cart_depths() { return default_cart_depth_grid(); }
std::vector<int> BenchmarkSpec::default_cart_min_splits() { return default_cart_min_split_grid(); }

std::vector<std::size_t> benchmark_training_rows(std::size_t source_rows, std::size_t size, int resample,
                                                 std::uint64_t seed) {
  std::vector<std::size_t> rows(source_rows);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Rng rng(stream_seed(seed, "bench-split", size, static_cast<std::uint64_t>(resample)));
  rng.shuffle(std::span<std::size_t>(rows));
  rows.resize(size);
  return rows;
}

std::pair<double, std::optional<double>> mean_ci95(std::span<const double> values) {
  const std::vector<double> copy(values.begin(), values.end());
  const double mean = mean_of(copy);
  if (values.size() < 2) return {mean, std::nullopt};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return {mean, 1.959963984540054 * sd / std::sqrt(static_cast<double>(values.size()))};
}

namespace {

std::string fingerprint_rows(std::vector<std::size_t> rows) {
  std::sort(rows.begin(), rows.end());
  std::string text;
  for (std::size_t r : rows) text += std::to_string(r) + ',';
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buffer;
}

struct CellResult {
  double metric = 0.0;
  std::size_t n_nodes = 0;
  int depth = 0;
  double wall_time = 0.0;
  std::string tuned;
};

CellResult run_method(Method method, const Dataset& train, const Dataset& test, const BenchmarkSpec& spec,
                      MetricKind kind) {
  const auto start = std::chrono::steady_clock::now();
  CellResult result;
  TreeModel model;
  if (method == Method::ztree) {
    auto tuned = tune_threshold(train, spec.ztree, spec.threshold_grid, TuneOptions{spec.tune_folds, 1});
    model = std::move(tuned.model);
    result.tuned = "threshold=" + csv::format_number(tuned.report.chosen);
  } else {
    const auto tuned = tune_cart(train, spec.cart_depths, spec.cart_min_splits, spec.tune_folds, spec.ztree.cv.seed);
    model = learn_cart(train, tuned.best);
    result.tuned = "max_depth=" + std::to_string(tuned.best.max_depth) +
                   ";min_samples_split=" + std::to_string(tuned.best.min_samples_split);
  }
  result.metric = evaluate(kind, predict(model, test), test.target());
  result.n_nodes = model.node_count();
  result.depth = model.depth();
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

BenchmarkReport run_benchmark(const Dataset& source, const BenchmarkSpec& spec) {
  if (spec.sizes.empty() || spec.methods.empty()) throw std::invalid_argument("benchmark needs sizes and methods");
  if (spec.resamples < 1) throw std::invalid_argument("benchmark needs at least one resample");
  for (std::size_t size : spec.sizes) {
    if (size == 0 || size >= source.n()) {
      throw DataError("training size " + std::to_string(size) + " leaves no test rows in a source of " +
                      std::to_string(source.n()));
    }
  }
  const MetricKind kind = metric_for(source.schema().target.kind);
  const std::size_t resamples = static_cast<std::size_t>(spec.resamples);
  const std::size_t cells = spec.sizes.size() * resamples;
  const std::size_t methods = spec.methods.size();

  std::vector<CellResult> results(cells * methods);
  std::vector<std::string> fingerprints(cells);
  parallel_for(cells, spec.threads, [&](std::size_t c) {
    const std::size_t size = spec.sizes[c / resamples];
    const int resample = static_cast<int>(c % resamples);
    const auto train_rows = benchmark_training_rows(source.n(), size, resample, spec.seed);
    std::vector<std::uint8_t> in_train(source.n(), 0);
    for (std::size_t r : train_rows) in_train[r] = 1;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < source.n(); ++i) {
      if (!in_train[i]) test_rows.push_back(i);
    }
    fingerprints[c] = fingerprint_rows(train_rows);
    const auto train = source.subset(train_rows);
    const auto test = source.subset(test_rows);
    for (std::size_t m = 0; m < methods; ++m) results[c * methods + m] = run_method(spec.methods[m], train, test, spec, kind);
  });

  BenchmarkReport report;
  report.metric_kind = kind;
  report.timing = spec.timing;
  for (std::size_t m = 0; m < methods; ++m) {
    for (std::size_t s = 0; s < spec.sizes.size(); ++s) {
      std::vector<double> metric, nodes, depth;
      for (std::size_t r = 0; r < resamples; ++r) {
        const std::size_t c = s * resamples + r;
        const auto& cell = results[c * methods + m];
        report.rows.push_back(BenchmarkRow{spec.methods[m], spec.sizes[s], static_cast<int>(r), cell.metric, cell.n_nodes,
                                           cell.depth, spec.timing ? cell.wall_time : 0.0, cell.tuned, fingerprints[c]});
        metric.push_back(cell.metric);
        nodes.push_back(static_cast<double>(cell.n_nodes));
        depth.push_back(cell.depth);
      }
      SummaryRow row;
      row.method = spec.methods[m];
      row.size = spec.sizes[s];
      row.resamples = spec.resamples;
      std::tie(row.metric_mean, row.metric_ci) = mean_ci95(metric);
      std::tie(row.n_nodes_mean, row.n_nodes_ci) = mean_ci95(nodes);
      std::tie(row.depth_mean, row.depth_ci) = mean_ci95(depth);
      report.summary.push_back(row);
    }
  }
  return report;
}

namespace {

std::string optional_number(const std::optional<double>& v) { return v ? csv::format_number(*v) : std::string(); }

void write_headers(const BenchmarkReport& report, std::ostream& out, std::span<const std::string> header_lines) {
  for (const auto& line : header_lines) out << "# " << line << '\n';
  out << "# metric: " << to_string(report.metric_kind) << '\n';
  if (report.metric_kind == MetricKind::rmse) out << "# rmse is computed on the target as ingested (the modeling scale)\n";
  out << "# ci: half-width of the normal-approximation 95% confidence interval of the mean\n";
}

}  // namespace

void write_benchmark_csv(const BenchmarkReport& report, std::ostream& out, std::span<const std::string> header_lines) {
  write_headers(report, out, header_lines);
  out << "row_type,method,size,resample,metric,metric_ci,n_nodes,n_nodes_ci,depth,depth_ci,wall_time,tuned,"
         "split_fingerprint\n";
  for (const auto& row : report.rows) {
    out << "detail," << to_string(row.method) << ',' << row.size << ',' << row.resample << ','
        << csv::format_number(row.metric) << ",," << row.n_nodes << ",," << row.depth << ",,"
        << (report.timing ? csv::format_number(row.wall_time) : std::string()) << ',' << csv::escape(row.tuned) << ','
        << row.split_fingerprint << '\n';
  }
  for (const auto& row : report.summary) {
    out << "summary," << to_string(row.method) << ',' << row.size << ",," << csv::format_number(row.metric_mean) << ','
        << optional_number(row.metric_ci) << ',' << csv::format_number(row.n_nodes_mean) << ','
        << optional_number(row.n_nodes_ci) << ',' << csv::format_number(row.depth_mean) << ','
        << optional_number(row.depth_ci) << ",,," << '\n';
  }
}

void write_figure_tables(const BenchmarkReport& report, std::ostream& out, std::span<const std::string> header_lines) {
  write_headers(report, out, header_lines);
  std::vector<std::size_t> sizes;
  std::vector<Method> methods;
  for (const auto& row : report.summary) {
    if (std::find(sizes.begin(), sizes.end(), row.size) == sizes.end()) sizes.push_back(row.size);
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) methods.push_back(row.method);
  }
  auto panel = [&](std::string_view title, auto mean, auto ci) {
    out << '\n' << title << '\n' << "size";
    for (Method m : methods) out << '\t' << to_string(m);
    out << '\n';
    for (std::size_t size : sizes) {
      out << size;
      for (Method m : methods) {
        const auto it = std::find_if(report.summary.begin(), report.summary.end(),
                                     [&](const SummaryRow& r) { return r.method == m && r.size == size; });
        out << '\t' << csv::format_number(mean(*it));
        if (const auto half = ci(*it)) out << " +/- " << csv::format_number(*half);
      }
      out << '\n';
    }
  };
  panel(std::string("panel: ") + std::string(to_string(report.metric_kind)), [](const SummaryRow& r) { return r.metric_mean; },
        [](const SummaryRow& r) { return r.metric_ci; });
  panel("panel: depth", [](const SummaryRow& r) { return r.depth_mean; }, [](const SummaryRow& r) { return r.depth_ci; });
}

}  // namespace ztree
