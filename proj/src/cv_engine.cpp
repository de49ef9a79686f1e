#include "ztree/cv_engine.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ztree/error.hpp"
#include "ztree/parallel.hpp"
#include "ztree/rng.hpp"
#include "ztree/subgroup.hpp"

namespace ztree {

double mean_of(const std::vector<double>& values) {
  double total = 0.0;
  for (double v : values) total += v;
  return values.empty() ? 0.0 : total / static_cast<double>(values.size());
}

std::vector<int> assign_folds(const Dataset& data, int folds, bool by_treatment, std::uint64_t stream) {
  if (folds < 2) throw std::invalid_argument("folds must be at least 2");
  const std::size_t n = data.n();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(stream);
  rng.shuffle(std::span<std::size_t>(order));

  const bool by_class = data.schema().target.kind == TargetKind::binary;
  by_treatment = by_treatment && data.treatment().size() == n;
  auto stratum = [&](std::size_t i) {
    int s = 0;
    if (by_class) s += data.target()[i] == 1.0 ? 1 : 0;
    if (by_treatment) s += data.treatment()[i] == 1.0 ? 2 : 0;
    return s;
  };
  std::vector<int> fold(n);
  std::size_t dealt = 0;
  for (int s = 0; s < 4; ++s) {
    for (auto i : order) {
      if (stratum(i) == s) fold[i] = static_cast<int>(dealt++ % static_cast<std::size_t>(folds));
    }
  }
  return fold;
}

namespace {

double one_repeat(const Dataset& data, const PartitionScorer& scorer, TestKind test, int search_depth,
                  std::size_t min_side, int folds, std::uint64_t stream) {
  const std::size_t n = data.n();
  const auto fold = assign_folds(data, folds, uses_treatment(test), stream);
  std::vector<std::uint8_t> membership(n, 0);
  std::vector<std::size_t> train_rows, held_rows;
  for (int k = 0; k < folds; ++k) {
    train_rows.clear();
    held_rows.clear();
    for (std::size_t i = 0; i < n; ++i) (fold[i] == k ? held_rows : train_rows).push_back(i);
    const auto model = train_best_subgroup(data.subset(train_rows), test, search_depth, min_side);
    if (!model) return 0.0;
    const auto held_membership = apply_model(*model, data.subset(held_rows));
    for (std::size_t h = 0; h < held_rows.size(); ++h) membership[held_rows[h]] = held_membership[h];
  }
  const std::size_t in = kernels::count(membership);
  if (in < std::max<std::size_t>(min_side, 1) || n - in < std::max<std::size_t>(min_side, 1)) return 0.0;
  const auto z = scorer.score(membership);
  return z ? std::abs(*z) : 0.0;
}

}  // namespace

CvScore internal_cv_score(const Dataset& data, TestKind test, int search_depth, std::size_t min_side,
                          const CvConfig& cfg, std::string_view node_path, int threads) {
  if (cfg.folds < 2 || cfg.repeats < 1) throw std::invalid_argument("CV needs folds >= 2 and repeats >= 1");
  if (data.n() < static_cast<std::size_t>(cfg.folds) * min_side || data.n() < static_cast<std::size_t>(cfg.folds)) {
    throw TooSmall("node with " + std::to_string(data.n()) + " rows is too small for " + std::to_string(cfg.folds) +
                   "-fold CV with min_side " + std::to_string(min_side));
  }
  const PartitionScorer scorer(data, test);
  const std::uint64_t path_key = fnv1a(node_path);
  CvScore score;
  score.per_repeat.assign(static_cast<std::size_t>(cfg.repeats), 0.0);
  parallel_for(score.per_repeat.size(), threads, [&](std::size_t r) {
    score.per_repeat[r] =
        one_repeat(data, scorer, test, search_depth, min_side, cfg.folds, stream_seed(cfg.seed, "internal-cv", path_key, r));
  });
  score.mean_score = mean_of(score.per_repeat);
  return score;
}

}  // namespace ztree
