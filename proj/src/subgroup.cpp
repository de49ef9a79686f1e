#include "ztree/subgroup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ztree/csv.hpp"
#include "ztree/error.hpp"

namespace ztree {

std::string Atom::to_string() const {
  if (form == AtomForm::equals) return feature + "==" + level;
  return feature + ">" + csv::format_number(cutoff);
}

std::string SubgroupCriterion::to_string() const {
  std::string text;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) text += " & ";
    text += atoms[i].to_string();
  }
  return text;
}

SubgroupCriterion SubgroupCriterion::parse(std::string_view text, const Schema& schema) {
  SubgroupCriterion criterion;
  std::size_t start = 0;
  for (;;) {
    const auto sep = text.find(" & ", start);
    const auto part = text.substr(start, sep == std::string_view::npos ? std::string_view::npos : sep - start);
    const FeatureSpec* match = nullptr;
    for (const auto& f : schema.features) {
      const std::string_view op = f.ordered() ? ">" : "==";
      if (part.size() > f.name.size() + op.size() && part.starts_with(f.name) &&
          part.substr(f.name.size(), op.size()) == op && (!match || f.name.size() > match->name.size())) {
        match = &f;
      }
    }
    if (!match) throw FormatError("criterion atom '" + std::string(part) + "' names no known feature");
    Atom atom;
    atom.feature = match->name;
    if (match->ordered()) {
      const auto value = csv::parse_number(part.substr(match->name.size() + 1));
      if (!value) throw FormatError("bad cutoff in criterion atom '" + std::string(part) + "'");
      atom.form = AtomForm::greater;
      atom.cutoff = *value;
    } else {
      atom.form = AtomForm::equals;
      atom.level = std::string(part.substr(match->name.size() + 2));
      if (std::find(match->levels.begin(), match->levels.end(), atom.level) == match->levels.end()) {
        throw FormatError("criterion atom '" + std::string(part) + "' names an unknown level");
      }
    }
    criterion.atoms.push_back(std::move(atom));
    if (sep == std::string_view::npos) break;
    start = sep + 3;
  }
  return criterion;
}

namespace {

struct BoundAtom {
  std::size_t feature;
  AtomForm form;
  double value;  // cutoff or level code
};

struct AtomTable {
  std::vector<BoundAtom> atoms;
  std::vector<std::vector<std::uint8_t>> masks;
};

AtomTable build_atoms(const Dataset& data) {
  AtomTable table;
  const std::size_t n = data.n();
  for (std::size_t j = 0; j < data.feature_count(); ++j) {
    const auto& f = data.feature(j);
    if (f.ordered()) {
      for (double c : compute_cutoffs(data.column(j))) table.atoms.push_back({j, AtomForm::greater, c});
    } else {
      for (std::size_t k = 0; k < f.levels.size(); ++k) {
        table.atoms.push_back({j, AtomForm::equals, static_cast<double>(k)});
      }
    }
  }
  table.masks.resize(table.atoms.size(), std::vector<std::uint8_t>(n));
  for (std::size_t a = 0; a < table.atoms.size(); ++a) {
    const auto& atom = table.atoms[a];
    if (atom.form == AtomForm::greater) {
      kernels::greater_than(data.column(atom.feature), atom.value, table.masks[a]);
    } else {
      kernels::equal_to(data.column(atom.feature), atom.value, table.masks[a]);
    }
  }
  return table;
}

Atom unbind(const Dataset& data, const BoundAtom& b) {
  Atom atom;
  const auto& f = data.feature(b.feature);
  atom.feature = f.name;
  atom.form = b.form;
  if (b.form == AtomForm::greater) {
    atom.cutoff = b.value;
  } else {
    atom.level = f.levels[static_cast<std::size_t>(b.value)];
  }
  return atom;
}

/// Visits candidates in enumeration order: fn(indices, mask) returns false to stop.
template <typename Fn>
void for_each_candidate(const AtomTable& table, std::size_t n, int depth, Fn&& fn) {
  const std::size_t m = table.atoms.size();
  std::vector<std::uint8_t> pair(n), triple(n);
  std::size_t idx[3];
  auto feature = [&](std::size_t a) { return table.atoms[a].feature; };
  for (std::size_t a = 0; a < m; ++a) {
    idx[0] = a;
    if (!fn(std::span<const std::size_t>(idx, 1), kernels::ConstMask(table.masks[a]))) return;
  }
  if (depth < 2) return;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      if (feature(b) == feature(a)) continue;
      kernels::and_masks(table.masks[a], table.masks[b], pair);
      idx[0] = a;
      idx[1] = b;
      if (!fn(std::span<const std::size_t>(idx, 2), kernels::ConstMask(pair))) return;
    }
  }
  if (depth < 3) return;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      if (feature(b) == feature(a)) continue;
      kernels::and_masks(table.masks[a], table.masks[b], pair);
      for (std::size_t c = b + 1; c < m; ++c) {
        if (feature(c) == feature(b)) continue;
        kernels::and_masks(pair, table.masks[c], triple);
        idx[0] = a;
        idx[1] = b;
        idx[2] = c;
        if (!fn(std::span<const std::size_t>(idx, 3), kernels::ConstMask(triple))) return;
      }
    }
  }
}

void check_depth(int depth) {
  if (depth < 1 || depth > 3) throw std::invalid_argument("search depth must be 1, 2 or 3");
}

SubgroupCriterion make_criterion(const Dataset& data, const AtomTable& table, std::span<const std::size_t> idx) {
  SubgroupCriterion c;
  for (auto a : idx) c.atoms.push_back(unbind(data, table.atoms[a]));
  return c;
}

}  // namespace

std::vector<SubgroupCriterion> enumerate_criteria(const Dataset& data, int search_depth, std::size_t min_side) {
  check_depth(search_depth);
  std::vector<SubgroupCriterion> out;
  const auto table = build_atoms(data);
  const std::size_t n = data.n();
  for_each_candidate(table, n, search_depth, [&](std::span<const std::size_t> idx, kernels::ConstMask mask) {
    const std::size_t in = kernels::count(mask);
    if (in >= min_side && n - in >= min_side) out.push_back(make_criterion(data, table, idx));
    return true;
  });
  return out;
}

std::size_t count_unfiltered_criteria(const Dataset& data, int search_depth) {
  check_depth(search_depth);
  const auto table = build_atoms(data);
  std::size_t total = 0;
  for_each_candidate(table, data.n(), search_depth, [&](std::span<const std::size_t>, kernels::ConstMask) {
    ++total;
    return true;
  });
  return total;
}

bool has_candidates(const Dataset& data, int search_depth, std::size_t min_side) {
  check_depth(search_depth);
  const std::size_t n = data.n();
  if (n < 2 * min_side) return false;
  const auto table = build_atoms(data);
  bool found = false;
  for_each_candidate(table, n, search_depth, [&](std::span<const std::size_t>, kernels::ConstMask mask) {
    const std::size_t in = kernels::count(mask);
    found = in >= min_side && n - in >= min_side;
    return !found;
  });
  return found;
}

std::optional<SubgroupModel> train_best_subgroup(const Dataset& data, TestKind test, int search_depth,
                                                 std::size_t min_side) {
  check_depth(search_depth);
  const std::size_t n = data.n();
  if (n < 2 * min_side || n == 0) return std::nullopt;
  const auto table = build_atoms(data);
  const PartitionScorer scorer(data, test);

  double best = -1.0;
  double best_signed = 0.0;
  std::size_t best_idx[3];
  std::size_t best_len = 0;
  for_each_candidate(table, n, search_depth, [&](std::span<const std::size_t> idx, kernels::ConstMask mask) {
    const std::size_t in = kernels::count(mask);
    if (in < min_side || n - in < min_side) return true;
    const auto z = scorer.score(mask);
    if (z && std::abs(*z) > best) {
      best = std::abs(*z);
      best_signed = *z;
      best_len = idx.size();
      std::copy(idx.begin(), idx.end(), best_idx);
    }
    return true;
  });
  if (best_len == 0) return std::nullopt;
  return SubgroupModel{make_criterion(data, table, std::span<const std::size_t>(best_idx, best_len)),
                       ZScore{best_signed}};
}

std::vector<std::uint8_t> apply_model(const SubgroupCriterion& criterion, const Dataset& data) {
  const std::size_t n = data.n();
  std::vector<std::uint8_t> membership(n, 1), atom_mask(n);
  for (const auto& atom : criterion.atoms) {
    const auto j = data.schema().find_feature(atom.feature);
    if (!j || data.feature(*j).ordered() != (atom.form == AtomForm::greater)) {
      std::fill(membership.begin(), membership.end(), 0);
      break;
    }
    if (atom.form == AtomForm::greater) {
      kernels::greater_than(data.column(*j), atom.cutoff, atom_mask);
    } else {
      const auto& levels = data.feature(*j).levels;
      const auto it = std::find(levels.begin(), levels.end(), atom.level);
      if (it == levels.end()) {
        std::fill(membership.begin(), membership.end(), 0);
        break;
      }
      kernels::equal_to(data.column(*j), static_cast<double>(it - levels.begin()), atom_mask);
    }
    kernels::and_masks(membership, atom_mask, membership);
  }
  return membership;
}

std::vector<std::uint8_t> apply_model(const SubgroupModel& model, const Dataset& data) {
  return apply_model(model.criterion, data);
}

// ---------------------------------------------------------------------------

namespace {

// Sum of squares about the mean from moment sums, snapped to zero when it is
// within cancellation error of zero so constant groups read as degenerate.
double centred_sum_squares(const kernels::Moments& m) {
  const double ss = m.sum_sq - m.sum * (m.sum / m.count);
  return ss <= 1e-12 * m.sum_sq ? 0.0 : ss;
}

std::optional<summary::Arm> continuous_arm(const kernels::Moments& m) {
  if (m.count < 2.0) return std::nullopt;
  return summary::Arm{m.count, m.sum / m.count, centred_sum_squares(m) / (m.count - 1.0)};
}

}  // namespace

PartitionScorer::PartitionScorer(const Dataset& data, TestKind test) : test_(test) {
  const auto y = data.target();
  const std::size_t n = y.size();
  switch (test) {
    case TestKind::two_proportion_z:
    case TestKind::diff_effect_binary:
      values_.assign(y.begin(), y.end());
      break;
    case TestKind::welch_t:
    case TestKind::diff_effect_continuous: {
      // Centre on an observed value so that equal outcomes stay exactly equal.
      const double centre = n ? y[n / 2] : 0.0;
      values_.resize(n);
      for (std::size_t i = 0; i < n; ++i) values_[i] = y[i] - centre;
      break;
    }
    case TestKind::mann_whitney_u: {
      auto ranks = summary::midranks(y);
      values_ = std::move(ranks.midranks);
      tie_term_ = ranks.tie_term;
      break;
    }
    case TestKind::log_rank: {
      if (data.events().size() != n) throw Unsupported("log-rank test needs a time-to-event target");
      time_order_.resize(n);
      std::iota(time_order_.begin(), time_order_.end(), std::size_t{0});
      std::stable_sort(time_order_.begin(), time_order_.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
      for (auto i : time_order_) {
        sorted_times_.push_back(y[i]);
        sorted_events_.push_back(data.events()[i]);
      }
      break;
    }
  }
  if (uses_treatment(test)) {
    if (data.treatment().size() != n) throw Unsupported("differential-effect tests need a treatment column");
    arm_.resize(n);
    for (std::size_t i = 0; i < n; ++i) arm_[i] = data.treatment()[i] == 1.0 ? 1 : 0;
  }
}

std::optional<double> PartitionScorer::score(kernels::ConstMask membership) const {
  switch (test_) {
    case TestKind::two_proportion_z: {
      const auto m = kernels::split_moments(membership, values_);
      return summary::two_proportion(m.in.sum, m.in.count, m.out.sum, m.out.count);
    }
    case TestKind::welch_t: {
      const auto m = kernels::split_moments(membership, values_);
      const auto a = continuous_arm(m.in);
      const auto b = continuous_arm(m.out);
      if (!a || !b) return std::nullopt;
      return summary::welch(a->mean, a->variance, a->n, b->mean, b->variance, b->n);
    }
    case TestKind::mann_whitney_u: {
      const auto m = kernels::split_moments(membership, values_);
      return summary::mann_whitney(m.in.sum, m.in.count, m.out.sum, m.out.count, tie_term_);
    }
    case TestKind::log_rank: {
      std::vector<std::uint8_t> sorted_mask(time_order_.size());
      for (std::size_t i = 0; i < time_order_.size(); ++i) sorted_mask[i] = membership[time_order_[i]];
      return summary::logrank_sorted(sorted_times_, sorted_events_, sorted_mask);
    }
    case TestKind::diff_effect_binary:
    case TestKind::diff_effect_continuous: {
      const auto m = kernels::split_moments4(membership, arm_, values_);
      const bool binary = test_ == TestKind::diff_effect_binary;
      auto arm = [&](const kernels::Moments& cell) {
        return binary ? summary::arm_from_moments(cell, true) : continuous_arm(cell);
      };
      const auto st = arm(m.cell[1][1]), sc = arm(m.cell[1][0]), ct = arm(m.cell[0][1]), cc = arm(m.cell[0][0]);
      if (!st || !sc || !ct || !cc) return std::nullopt;
      return summary::differential_effect(*st, *sc, *ct, *cc);
    }
  }
  return std::nullopt;
}

}  // namespace ztree
