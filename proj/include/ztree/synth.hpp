#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ztree/dataset.hpp"
#include "ztree/subgroup.hpp"

namespace ztree {

enum class GeneratorMode { outcome_shift, treatment_interaction, null_model };

std::string_view to_string(GeneratorMode mode);
GeneratorMode parse_generator_mode(std::string_view text);

struct GeneratorSpec {
  std::size_t n = 1000;
  std::vector<FeatureSpec> features;
  TargetKind target_kind = TargetKind::continuous;
  std::optional<SubgroupCriterion> planted;
  /// Mean shift in SD units (continuous) or probability delta (binary).
  double effect_size = 1.0;
  GeneratorMode mode = GeneratorMode::outcome_shift;
  std::uint64_t noise_seed = 42;
  /// Positive probability outside the subgroup for binary targets.
  double base_rate = 0.3;
};

/// `continuous` features x0, x1, ... followed by nominal features c0, c1, ...
/// whose levels are "a", "b", ...
std::vector<FeatureSpec> make_features(std::size_t continuous, const std::vector<std::size_t>& nominal_levels);

/// Independent features (continuous uniform(0,1), nominal and ordinal
/// uniform over levels) and an outcome driven by the planted subgroup.
/// treatment-interaction adds a Bernoulli(1/2) column `trt` whose effect is
/// effect_size inside the subgroup and 0 outside; null leaves y independent
/// of everything. Each column draws from its own stream of noise_seed.
Dataset generate(const GeneratorSpec& spec);

}  // namespace ztree
