#include "ztree/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ztree/error.hpp"
#include "ztree/rng.hpp"

namespace ztree {

std::string_view to_string(GeneratorMode mode) {
  switch (mode) {
    case GeneratorMode::outcome_shift: return "outcome-shift";
    case GeneratorMode::treatment_interaction: return "treatment-interaction";
    case GeneratorMode::null_model: return "null";
  }
  return "?";
}

GeneratorMode parse_generator_mode(std::string_view text) {
  for (auto mode : {GeneratorMode::outcome_shift, GeneratorMode::treatment_interaction, GeneratorMode::null_model}) {
    if (to_string(mode) == text) return mode;
  }
  throw std::invalid_argument("unknown generator mode '" + std::string(text) + "'");
}

std::vector<FeatureSpec> make_features(std::size_t continuous, const std::vector<std::size_t>& nominal_levels) {
  std::vector<FeatureSpec> features;
  for (std::size_t j = 0; j < continuous; ++j) features.push_back({"x" + std::to_string(j), FeatureKind::continuous, {}});
  for (std::size_t j = 0; j < nominal_levels.size(); ++j) {
    if (nominal_levels[j] < 2 || nominal_levels[j] > 26) throw std::invalid_argument("nominal features need 2..26 levels");
    FeatureSpec spec{"c" + std::to_string(j), FeatureKind::nominal, {}};
    for (std::size_t l = 0; l < nominal_levels[j]; ++l) spec.levels.emplace_back(1, static_cast<char>('a' + l));
    features.push_back(std::move(spec));
  }
  return features;
}

namespace {

void validate(const GeneratorSpec& spec, const Schema& schema) {
  if (spec.n == 0) throw std::invalid_argument("generator needs n >= 1");
  if (spec.target_kind == TargetKind::time_to_event) throw Unsupported("generator supports binary and continuous targets");
  if (spec.mode == GeneratorMode::null_model) return;
  if (!spec.planted || spec.planted->atoms.empty()) throw std::invalid_argument("a planted criterion is required");
  if (!(spec.effect_size > 0.0) || !std::isfinite(spec.effect_size)) throw std::invalid_argument("effect size must be > 0");
  for (const auto& atom : spec.planted->atoms) {
    const auto j = schema.find_feature(atom.feature);
    if (!j) throw DataError("planted criterion references unknown feature '" + atom.feature + "'");
    const auto& feature = schema.features[*j];
    if (feature.ordered() != (atom.form == AtomForm::greater)) {
      throw DataError("planted atom '" + atom.to_string() + "' does not fit the kind of its feature");
    }
    if (atom.form == AtomForm::equals &&
        std::find(feature.levels.begin(), feature.levels.end(), atom.level) == feature.levels.end()) {
      throw DataError("planted atom '" + atom.to_string() + "' names an unknown level");
    }
  }
  if (spec.target_kind == TargetKind::binary) {
    if (!(spec.base_rate > 0.0 && spec.base_rate + spec.effect_size < 1.0)) {
      throw std::invalid_argument("binary generator needs 0 < base_rate and base_rate + effect_size < 1");
    }
  }
}

}  // namespace

Dataset generate(const GeneratorSpec& spec) {
  Schema schema;
  schema.features = spec.features;
  schema.target.name = "y";
  schema.target.kind = spec.target_kind;
  if (spec.target_kind == TargetKind::binary) schema.target.labels = {"0", "1"};
  const bool treated = spec.mode == GeneratorMode::treatment_interaction;
  if (treated) schema.treatment = "trt";
  validate(spec, schema);

  std::vector<std::vector<double>> columns(schema.features.size(), std::vector<double>(spec.n));
  for (std::size_t j = 0; j < schema.features.size(); ++j) {
    Rng rng(stream_seed(spec.noise_seed, "feature", j));
    const auto& feature = schema.features[j];
    for (auto& cell : columns[j]) {
      cell = feature.kind == FeatureKind::continuous ? rng.uniform() : static_cast<double>(rng.below(feature.levels.size()));
    }
  }
  std::vector<double> treatment;
  if (treated) {
    Rng rng(stream_seed(spec.noise_seed, "treatment"));
    treatment.resize(spec.n);
    for (auto& t : treatment) t = rng.bernoulli(0.5) ? 1.0 : 0.0;
  }

  std::vector<std::uint8_t> member(spec.n, 0);
  if (spec.mode != GeneratorMode::null_model) {
    const Dataset features_only(schema, columns, std::vector<double>(spec.n, 0.0), {}, treatment);
    member = apply_model(*spec.planted, features_only);
  }

  Rng noise(stream_seed(spec.noise_seed, "outcome"));
  std::vector<double> y(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    double shift = 0.0;
    if (spec.mode == GeneratorMode::outcome_shift && member[i]) shift = spec.effect_size;
    if (treated && member[i] && treatment[i] == 1.0) shift = spec.effect_size;
    if (spec.target_kind == TargetKind::binary) {
      y[i] = noise.bernoulli(spec.base_rate + shift) ? 1.0 : 0.0;
    } else {
      y[i] = noise.normal() + shift;
    }
  }
  return Dataset(std::move(schema), std::move(columns), std::move(y), {}, std::move(treatment));
}

}  // namespace ztree
