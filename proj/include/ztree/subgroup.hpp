#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ztree/dataset.hpp"
#include "ztree/kernels.hpp"
#include "ztree/stat_tests.hpp"

namespace ztree {

enum class AtomForm { greater, equals };

/// `feature > cutoff` (continuous/ordinal) or `feature == level` (nominal).
struct Atom {
  std::string feature;
  AtomForm form = AtomForm::greater;
  double cutoff = 0.0;
  std::string level;

  std::string to_string() const;
  bool operator==(const Atom&) const = default;
};

/// Conjunction of atoms over distinct features.
struct SubgroupCriterion {
  std::vector<Atom> atoms;

  /// Atoms joined by " & ", e.g. `sex==M & age>65`.
  std::string to_string() const;
  /// Inverse of to_string, resolving feature names against `schema`.
  static SubgroupCriterion parse(std::string_view text, const Schema& schema);
  bool operator==(const SubgroupCriterion&) const = default;
};

struct SubgroupModel {
  SubgroupCriterion criterion;
  ZScore train_score;
};

/// Every conjunction of 1..search_depth atoms over distinct features whose
/// subgroup and complement both hold at least min_side rows. Ordered by atom
/// count, then feature declaration order, then cutoff / level order.
std::vector<SubgroupCriterion> enumerate_criteria(const Dataset& data, int search_depth, std::size_t min_side);

/// Number of candidates before the size filter.
std::size_t count_unfiltered_criteria(const Dataset& data, int search_depth);

bool has_candidates(const Dataset& data, int search_depth, std::size_t min_side);

/// Criterion with the largest |z| over enumerate_criteria; the first in
/// enumeration order wins ties. Degenerate candidates are skipped. nullopt
/// when nothing is left (NoSubgroup).
std::optional<SubgroupModel> train_best_subgroup(const Dataset& data, TestKind test, int search_depth,
                                                 std::size_t min_side);

/// Membership (1 = in subgroup) of every row. Atoms on unknown features,
/// unseen levels and missing cells evaluate to false.
std::vector<std::uint8_t> apply_model(const SubgroupCriterion& criterion, const Dataset& data);
std::vector<std::uint8_t> apply_model(const SubgroupModel& model, const Dataset& data);

/// Signed z of a subgroup-versus-complement partition of one dataset.
/// Per-dataset work (ranks, centring, time order) is done once up front.
class PartitionScorer {
 public:
  PartitionScorer(const Dataset& data, TestKind test);

  /// nullopt when the test degenerates on this partition.
  std::optional<double> score(kernels::ConstMask membership) const;

  TestKind test() const { return test_; }

 private:
  TestKind test_;
  std::vector<double> values_;  // y, centred y, or midranks
  double tie_term_ = 0.0;
  std::vector<std::uint8_t> arm_;
  std::vector<std::size_t> time_order_;
  std::vector<double> sorted_times_;
  std::vector<double> sorted_events_;
};

}  // namespace ztree
