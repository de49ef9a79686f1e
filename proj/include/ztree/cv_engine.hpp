#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "ztree/dataset.hpp"
#include "ztree/stat_tests.hpp"

namespace ztree {

struct CvConfig {
  int folds = 5;
  int repeats = 10;
  std::uint64_t seed = 42;

  bool operator==(const CvConfig&) const = default;
};

struct CvScore {
  double mean_score = 0.0;
  std::vector<double> per_repeat;

  bool operator==(const CvScore&) const = default;
};

/// Arithmetic mean in index order; the one reduction used everywhere a
/// CvScore mean is formed or checked.
double mean_of(const std::vector<double>& values);

/// Fold label (0..folds-1) per row. Rows are shuffled by `rng` and then dealt
/// round-robin stratum by stratum, so fold sizes differ by at most one.
/// Strata: target class for binary targets crossed with treatment arm when
/// `by_treatment` is set.
std::vector<int> assign_folds(const Dataset& data, int folds, bool by_treatment, std::uint64_t stream);

/// Cross-validated |z| of the subgroup found at a node.
///
/// Each repeat shuffles with a stream keyed by (cfg.seed, node_path, repeat),
/// trains the best subgroup on all folds but one and assigns the held-out
/// rows by the fold model. One pooled test of members against non-members of
/// the whole node then gives that repeat's |z|; a repeat scores 0 when a
/// fold finds no subgroup or the pooled partition has a side below min_side
/// or degenerates. The mean over repeats is returned.
///
/// Throws TooSmall when data.n() < folds * min_side. Repeats run on up to
/// `threads` threads with results independent of the thread count.
CvScore internal_cv_score(const Dataset& data, TestKind test, int search_depth, std::size_t min_side,
                          const CvConfig& cfg, std::string_view node_path, int threads = 1);

}  // namespace ztree
