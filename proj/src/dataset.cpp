#include "ztree/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <unordered_map>

#include "ztree/csv.hpp"
#include "ztree/error.hpp"
#include "ztree/rng.hpp"

namespace ztree {

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::continuous: return "continuous";
    case FeatureKind::nominal: return "nominal";
    case FeatureKind::ordinal: return "ordinal";
  }
  return "?";
}

std::string_view to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::binary: return "binary";
    case TargetKind::continuous: return "continuous";
    case TargetKind::time_to_event: return "time-to-event";
  }
  return "?";
}

std::string_view to_string(NaPolicy policy) {
  switch (policy) {
    case NaPolicy::error: return "error";
    case NaPolicy::drop_rows: return "drop-rows";
    case NaPolicy::na_level: return "na-level";
  }
  return "?";
}

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "continuous") return FeatureKind::continuous;
  if (text == "nominal") return FeatureKind::nominal;
  if (text == "ordinal") return FeatureKind::ordinal;
  throw DataError("unknown feature kind '" + std::string(text) + "'");
}

TargetKind parse_target_kind(std::string_view text) {
  if (text == "binary") return TargetKind::binary;
  if (text == "continuous") return TargetKind::continuous;
  if (text == "time-to-event") return TargetKind::time_to_event;
  throw DataError("unknown target kind '" + std::string(text) + "'");
}

NaPolicy parse_na_policy(std::string_view text) {
  if (text == "error") return NaPolicy::error;
  if (text == "drop-rows") return NaPolicy::drop_rows;
  if (text == "na-level") return NaPolicy::na_level;
  throw DataError("unknown NA policy '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Schema / Dataset

std::string Schema::fingerprint() const {
  std::string canonical;
  for (const auto& f : features) {
    canonical += f.name;
    canonical += '\t';
    canonical += to_string(f.kind);
    for (const auto& level : f.levels) {
      canonical += '\x1f';
      canonical += level;
    }
    canonical += '\n';
  }
  canonical += "target\t" + target.name + '\t' + std::string(to_string(target.kind)) + '\t' +
               target.event_indicator_name;
  for (const auto& label : target.labels) {
    canonical += '\x1f';
    canonical += label;
  }
  canonical += "\ntreatment\t" + treatment.value_or("");
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
  return hex;
}

std::optional<std::size_t> Schema::find_feature(std::string_view name) const {
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (features[j].name == name) return j;
  }
  return std::nullopt;
}

Dataset::Dataset(Schema schema, std::vector<std::vector<double>> columns, std::vector<double> target,
                 std::vector<double> events, std::vector<double> treatment)
    : schema_(std::move(schema)),
      columns_(std::move(columns)),
      target_(std::move(target)),
      events_(std::move(events)),
      treatment_(std::move(treatment)) {
  if (columns_.size() != schema_.features.size()) {
    throw DataError("feature column count does not match schema");
  }
  std::set<std::string_view> names;
  for (const auto& f : schema_.features) {
    if (!names.insert(f.name).second) throw DataError("duplicate feature name '" + f.name + "'");
    if (f.name == schema_.target.name || (schema_.treatment && f.name == *schema_.treatment)) {
      throw DataError("feature '" + f.name + "' collides with the target or treatment column");
    }
    if (f.kind == FeatureKind::continuous && !f.levels.empty()) {
      throw DataError("continuous feature '" + f.name + "' cannot declare levels");
    }
    if (f.kind != FeatureKind::continuous) {
      if (f.levels.empty()) throw DataError("feature '" + f.name + "' declares no levels");
      std::set<std::string_view> distinct(f.levels.begin(), f.levels.end());
      if (distinct.size() != f.levels.size()) throw DataError("feature '" + f.name + "' repeats a level");
    }
  }
  const std::size_t rows = !target_.empty() ? target_.size() : columns_.empty() ? 0 : columns_.front().size();
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].size() != rows) throw DataError("column '" + schema_.features[j].name + "' has wrong length");
    const auto& f = schema_.features[j];
    if (f.kind == FeatureKind::continuous) continue;
    const auto levels = static_cast<double>(f.levels.size());
    for (double code : columns_[j]) {
      if (std::isnan(code)) continue;
      if (code != std::floor(code) || code < -1.0 || code >= levels) {
        throw DataError("column '" + f.name + "' holds an invalid level code");
      }
    }
  }
  if (!events_.empty() && events_.size() != rows) throw DataError("event column has wrong length");
  if (!treatment_.empty() && treatment_.size() != rows) throw DataError("treatment column has wrong length");
  if (!treatment_.empty() && !schema_.treatment) throw DataError("treatment data without a treatment column");
  if (schema_.target.kind == TargetKind::binary && !target_.empty() && schema_.target.labels.size() != 2) {
    throw DataError("binary target needs exactly two labels");
  }
  if (target_.empty() && !columns_.empty()) target_.assign(rows, std::nan(""));
}

bool Dataset::complete() const {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    for (double v : columns_[j]) {
      if (std::isnan(v) || (v < 0.0 && schema_.features[j].kind != FeatureKind::continuous)) return false;
    }
  }
  for (double v : target_) {
    if (std::isnan(v)) return false;
  }
  if (schema_.target.kind == TargetKind::time_to_event) {
    if (events_.size() != n()) return false;
    for (double v : events_) {
      if (v != 0.0 && v != 1.0) return false;
    }
  }
  if (schema_.treatment) {
    if (treatment_.size() != n()) return false;
    for (double v : treatment_) {
      if (v != 0.0 && v != 1.0) return false;
    }
  }
  return true;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  auto pick = [&](std::span<const double> source) {
    std::vector<double> out;
    if (source.empty()) return out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(source[r]);
    return out;
  };
  Dataset out;
  out.schema_ = schema_;
  out.columns_.reserve(columns_.size());
  for (const auto& c : columns_) out.columns_.push_back(pick(c));
  out.target_ = pick(target_);
  out.events_ = pick(events_);
  out.treatment_ = pick(treatment_);
  return out;
}

// ---------------------------------------------------------------------------
// Schema overrides

namespace {

std::vector<std::string> split_levels(std::string_view text) {
  std::vector<std::string> levels;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find('<', start);
    levels.emplace_back(csv::trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return levels;
}

ColumnOverride parse_override(std::string_view spec, std::size_t line) {
  ColumnOverride o;
  auto fail = [&]() -> ColumnOverride {
    throw DataError("schema line " + std::to_string(line) + ": cannot parse '" + std::string(spec) + "'");
  };
  if (spec == "continuous") {
    o.kind = FeatureKind::continuous;
  } else if (spec == "nominal") {
    o.kind = FeatureKind::nominal;
  } else if (spec.starts_with("nominal:")) {
    o.kind = FeatureKind::nominal;
    o.levels = split_levels(spec.substr(8));
  } else if (spec.starts_with("ordinal:")) {
    o.kind = FeatureKind::ordinal;
    o.levels = split_levels(spec.substr(8));
  } else if (spec == "treatment") {
    o.role = ColumnOverride::Role::treatment;
  } else if (spec == "ignore") {
    o.role = ColumnOverride::Role::ignore;
  } else if (spec.starts_with("target:")) {
    o.role = ColumnOverride::Role::target;
    auto rest = spec.substr(7);
    const auto colon = rest.find(':');
    const auto kind = rest.substr(0, colon);
    const auto extra = colon == std::string_view::npos ? std::string_view{} : rest.substr(colon + 1);
    if (kind == "binary") {
      o.target_kind = TargetKind::binary;
      if (!extra.empty()) o.positive_label = std::string(extra);
    } else if (kind == "continuous" && extra.empty()) {
      o.target_kind = TargetKind::continuous;
    } else if (kind == "time-to-event" && !extra.empty()) {
      o.target_kind = TargetKind::time_to_event;
      o.event_column = std::string(extra);
    } else {
      return fail();
    }
  } else {
    return fail();
  }
  for (const auto& level : o.levels) {
    if (level.empty()) return fail();
  }
  return o;
}

}  // namespace

SchemaOverrides SchemaOverrides::parse(std::string_view text) {
  SchemaOverrides out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const auto line = csv::trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("schema line " + std::to_string(line_no) + ": expected 'column = spec'");
    }
    const std::string column(csv::trim(line.substr(0, eq)));
    if (column.empty()) throw DataError("schema line " + std::to_string(line_no) + ": empty column name");
    if (!out.columns.emplace(column, parse_override(csv::trim(line.substr(eq + 1)), line_no)).second) {
      throw DataError("schema names column '" + column + "' twice");
    }
  }
  return out;
}

SchemaOverrides SchemaOverrides::read_file(const std::filesystem::path& path) {
  return parse(csv::read_text(path));
}

// ---------------------------------------------------------------------------
// Ingestion

bool is_missing_cell(std::string_view cell) {
  cell = csv::trim(cell);
  return cell.empty() || cell == "NA" || cell == "N/A" || cell == "?" || cell == "NaN" || cell == "nan" ||
         cell == "null";
}

namespace {

struct ColumnPlan {
  std::size_t source = 0;
  FeatureSpec spec;
  bool levels_pinned = false;
};

void check_name_usable(const std::string& name, std::string_view what) {
  if (name.find("==") != std::string::npos || name.find(" & ") != std::string::npos) {
    throw DataError(std::string(what) + " '" + name + "' contains '==' or ' & ', which criteria cannot express");
  }
}

std::size_t column_index(const csv::Table& table, std::string_view name, std::string_view what) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) throw DataError("unknown " + std::string(what) + " column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - table.header.begin());
}

double parse_binary_indicator(std::string_view cell, std::string_view column, std::size_t row) {
  const auto v = csv::parse_number(csv::trim(cell));
  if (!v || (*v != 0.0 && *v != 1.0)) {
    throw DataError("column '" + std::string(column) + "' row " + std::to_string(row + 1) +
                    ": expected 0 or 1, got '" + std::string(cell) + "'");
  }
  return *v;
}

Dataset ingest_table(const csv::Table& table, const IngestOptions& options) {
  {
    std::set<std::string_view> seen;
    for (const auto& h : table.header) {
      if (h.empty()) throw DataError("header has an empty column name");
      if (!seen.insert(h).second) throw DataError("header repeats column '" + h + "'");
    }
  }
  for (const auto& [name, o] : options.overrides.columns) {
    column_index(table, name, "schema");
  }

  // Roles.
  std::optional<std::string> target_name = options.target;
  std::optional<TargetKind> target_kind = options.target_kind;
  std::optional<std::string> positive_label = options.positive_label;
  std::optional<std::string> event_name = options.event_column;
  std::optional<std::string> treatment_name = options.treatment;
  for (const auto& [name, o] : options.overrides.columns) {
    if (o.role == ColumnOverride::Role::target) {
      if (target_name && *target_name != name) {
        throw DataError("target named both '" + *target_name + "' and '" + name + "'");
      }
      target_name = name;
      if (!target_kind) target_kind = o.target_kind;
      if (!positive_label) positive_label = o.positive_label;
      if (!event_name && !o.event_column.empty()) event_name = o.event_column;
    } else if (o.role == ColumnOverride::Role::treatment) {
      if (!treatment_name) treatment_name = name;
    }
  }
  if (!target_name) {
    if (table.header.empty()) throw DataError("no target column given");
    target_name = table.header.back();
  }
  const std::size_t target_col = column_index(table, *target_name, "target");
  if (target_kind == TargetKind::time_to_event && !event_name) {
    throw DataError("time-to-event target needs an event indicator column");
  }
  std::optional<std::size_t> event_col;
  if (event_name) {
    if (target_kind && *target_kind != TargetKind::time_to_event) {
      throw DataError("event column given for a non time-to-event target");
    }
    target_kind = TargetKind::time_to_event;
    event_col = column_index(table, *event_name, "event");
  }
  std::optional<std::size_t> treatment_col;
  if (treatment_name) treatment_col = column_index(table, *treatment_name, "treatment");

  const std::size_t rows = table.rows.size();
  auto cell = [&](std::size_t r, std::size_t c) { return csv::trim(table.rows[r][c]); };

  // Feature plans with kind inference.
  std::vector<ColumnPlan> plans;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == target_col || c == event_col || c == treatment_col) continue;
    const auto& name = table.header[c];
    ColumnPlan plan;
    plan.source = c;
    plan.spec.name = name;
    const auto it = options.overrides.columns.find(name);
    if (it != options.overrides.columns.end()) {
      const auto& o = it->second;
      if (o.role == ColumnOverride::Role::ignore) continue;
      if (o.role != ColumnOverride::Role::feature) {
        throw DataError("column '" + name + "' has a role that conflicts with the command-line flags");
      }
      plan.spec.kind = o.kind;
      plan.spec.levels = o.levels;
      plan.levels_pinned = !o.levels.empty();
      if (o.kind == FeatureKind::ordinal && o.levels.empty()) {
        throw DataError("ordinal column '" + name + "' needs a level order");
      }
    } else {
      bool numeric = true;
      for (std::size_t r = 0; r < rows && numeric; ++r) {
        const auto v = cell(r, c);
        if (!is_missing_cell(v) && !csv::parse_number(v)) numeric = false;
      }
      plan.spec.kind = numeric ? FeatureKind::continuous : FeatureKind::nominal;
    }
    check_name_usable(name, "feature name");
    plans.push_back(std::move(plan));
  }

  // Missing-data policy.
  std::vector<std::size_t> kept;
  kept.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    bool drop = false;
    auto check = [&](std::size_t c, bool nominal_feature) {
      if (!is_missing_cell(cell(r, c))) return;
      switch (options.na_policy) {
        case NaPolicy::error:
          throw DataError("missing value in column '" + table.header[c] + "' at row " + std::to_string(r + 1));
        case NaPolicy::drop_rows:
          drop = true;
          break;
        case NaPolicy::na_level:
          if (!nominal_feature) drop = true;
          break;
      }
    };
    check(target_col, false);
    if (event_col) check(*event_col, false);
    if (treatment_col) check(*treatment_col, false);
    for (const auto& p : plans) check(p.source, p.spec.kind == FeatureKind::nominal);
    if (!drop) kept.push_back(r);
  }
  if (kept.empty()) throw DataError("all rows dropped");
  const std::size_t n = kept.size();

  Schema schema;
  std::vector<std::vector<double>> columns;
  for (auto& plan : plans) {
    std::vector<double> values(n);
    const auto c = plan.source;
    if (plan.spec.kind == FeatureKind::continuous) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = csv::parse_number(cell(kept[i], c));
        if (!v) {
          throw DataError("column '" + plan.spec.name + "' row " + std::to_string(kept[i] + 1) +
                          ": not a number: '" + std::string(cell(kept[i], c)) + "'");
        }
        values[i] = *v;
      }
    } else {
      auto label_of = [&](std::size_t r) {
        const auto v = cell(r, c);
        return is_missing_cell(v) ? std::string(kNaLevel) : std::string(v);
      };
      if (!plan.levels_pinned) {
        std::set<std::string> observed;
        for (auto r : kept) observed.insert(label_of(r));
        plan.spec.levels.assign(observed.begin(), observed.end());
      }
      std::unordered_map<std::string, double> code;
      for (std::size_t k = 0; k < plan.spec.levels.size(); ++k) {
        check_name_usable(plan.spec.levels[k], "level");
        if (!code.emplace(plan.spec.levels[k], static_cast<double>(k)).second) {
          throw DataError("column '" + plan.spec.name + "' repeats level '" + plan.spec.levels[k] + "'");
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        const auto label = label_of(kept[i]);
        const auto it = code.find(label);
        if (it == code.end()) {
          throw DataError("column '" + plan.spec.name + "' row " + std::to_string(kept[i] + 1) +
                          ": level '" + label + "' is not declared");
        }
        values[i] = it->second;
      }
    }
    schema.features.push_back(plan.spec);
    columns.push_back(std::move(values));
  }

  // Target.
  schema.target.name = *target_name;
  std::vector<double> target(n);
  if (!target_kind) {
    std::set<std::string_view> distinct;
    bool numeric = true;
    for (auto r : kept) {
      distinct.insert(cell(r, target_col));
      numeric = numeric && csv::parse_number(cell(r, target_col)).has_value();
    }
    if (distinct.size() == 2) {
      target_kind = TargetKind::binary;
    } else if (numeric) {
      target_kind = TargetKind::continuous;
    } else {
      throw DataError("cannot infer the kind of target '" + *target_name + "'");
    }
  }
  schema.target.kind = *target_kind;
  if (*target_kind == TargetKind::binary) {
    std::set<std::string> distinct;
    for (auto r : kept) distinct.emplace(cell(r, target_col));
    if (distinct.size() != 2) {
      throw DataError("binary target with " + std::to_string(distinct.size()) + " observed values");
    }
    std::string zero = *distinct.begin();
    std::string one = *distinct.rbegin();
    if (positive_label) {
      if (!distinct.contains(*positive_label)) {
        throw DataError("positive label '" + *positive_label + "' not observed in target");
      }
      if (*positive_label == zero) std::swap(zero, one);
    }
    for (std::size_t i = 0; i < n; ++i) target[i] = cell(kept[i], target_col) == one ? 1.0 : 0.0;
    schema.target.labels = {zero, one};
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = csv::parse_number(cell(kept[i], target_col));
      if (!v) throw DataError("target row " + std::to_string(kept[i] + 1) + " is not a number");
      if (*target_kind == TargetKind::time_to_event && *v < 0.0) {
        throw DataError("negative event time at row " + std::to_string(kept[i] + 1));
      }
      target[i] = *v;
    }
  }

  std::vector<double> events;
  if (*target_kind == TargetKind::time_to_event) {
    schema.target.event_indicator_name = *event_name;
    events.resize(n);
    for (std::size_t i = 0; i < n; ++i) events[i] = parse_binary_indicator(cell(kept[i], *event_col), *event_name, kept[i]);
  }

  std::vector<double> treatment;
  if (treatment_col) {
    schema.treatment = *treatment_name;
    treatment.resize(n);
    bool seen[2] = {false, false};
    for (std::size_t i = 0; i < n; ++i) {
      treatment[i] = parse_binary_indicator(cell(kept[i], *treatment_col), *treatment_name, kept[i]);
      seen[treatment[i] == 1.0] = true;
    }
    if (!seen[0] || !seen[1]) throw DataError("treatment column must contain both 0 and 1");
  }

  return Dataset(std::move(schema), std::move(columns), std::move(target), std::move(events), std::move(treatment));
}

}  // namespace

Dataset ingest_csv_text(std::string_view text, const IngestOptions& options) {
  return ingest_table(csv::parse(text), options);
}

Dataset ingest_csv(const std::filesystem::path& path, const IngestOptions& options) {
  return ingest_table(csv::read_file(path), options);
}

Dataset ingest_for_schema(std::string_view text, const Schema& schema) {
  const auto table = csv::parse(text);
  const std::size_t n = table.rows.size();
  auto find = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - table.header.begin());
  };
  auto cell = [&](std::size_t r, std::size_t c) { return csv::trim(table.rows[r][c]); };
  const double nan = std::nan("");

  std::vector<std::vector<double>> columns;
  for (const auto& f : schema.features) {
    const auto c = find(f.name);
    if (!c) throw DataError("input lacks feature column '" + f.name + "'");
    std::vector<double> values(n, nan);
    if (f.kind == FeatureKind::continuous) {
      for (std::size_t r = 0; r < n; ++r) {
        if (is_missing_cell(cell(r, *c))) continue;
        const auto v = csv::parse_number(cell(r, *c));
        if (!v) throw DataError("column '" + f.name + "' row " + std::to_string(r + 1) + ": not a number");
        values[r] = *v;
      }
    } else {
      std::unordered_map<std::string_view, double> code;
      for (std::size_t k = 0; k < f.levels.size(); ++k) code.emplace(f.levels[k], static_cast<double>(k));
      for (std::size_t r = 0; r < n; ++r) {
        auto label = cell(r, *c);
        if (is_missing_cell(label)) label = kNaLevel;
        const auto it = code.find(label);
        if (it != code.end()) {
          values[r] = it->second;
        } else if (f.kind == FeatureKind::nominal) {
          values[r] = -1.0;  // unseen level: never equal to any declared level
        }
      }
    }
    columns.push_back(std::move(values));
  }

  std::vector<double> target;
  if (const auto c = find(schema.target.name)) {
    target.assign(n, nan);
    for (std::size_t r = 0; r < n; ++r) {
      const auto v = cell(r, *c);
      if (is_missing_cell(v)) continue;
      if (schema.target.kind == TargetKind::binary) {
        if (v == schema.target.labels[1]) {
          target[r] = 1.0;
        } else if (v == schema.target.labels[0]) {
          target[r] = 0.0;
        } else {
          throw DataError("target row " + std::to_string(r + 1) + ": unknown label '" + std::string(v) + "'");
        }
      } else {
        const auto x = csv::parse_number(v);
        if (!x) throw DataError("target row " + std::to_string(r + 1) + " is not a number");
        target[r] = *x;
      }
    }
  }
  std::vector<double> events;
  if (schema.target.kind == TargetKind::time_to_event) {
    if (const auto c = find(schema.target.event_indicator_name)) {
      events.assign(n, nan);
      for (std::size_t r = 0; r < n; ++r) {
        if (!is_missing_cell(cell(r, *c))) events[r] = parse_binary_indicator(cell(r, *c), table.header[*c], r);
      }
    }
  }
  std::vector<double> treatment;
  if (schema.treatment) {
    if (const auto c = find(*schema.treatment)) {
      treatment.assign(n, nan);
      for (std::size_t r = 0; r < n; ++r) {
        if (!is_missing_cell(cell(r, *c))) treatment[r] = parse_binary_indicator(cell(r, *c), table.header[*c], r);
      }
    }
  }
  if (target.empty() && columns.empty()) target.assign(n, nan);
  return Dataset(schema, std::move(columns), std::move(target), std::move(events), std::move(treatment));
}

// ---------------------------------------------------------------------------
// Writer

void write_csv(const Dataset& data, std::ostream& out, std::span<const std::string> header_lines) {
  for (const auto& line : header_lines) out << "# " << line << '\n';
  const auto& schema = data.schema();
  std::vector<std::string> fields;
  for (const auto& f : schema.features) fields.push_back(f.name);
  fields.push_back(schema.target.name);
  const bool tte = schema.target.kind == TargetKind::time_to_event && !data.events().empty();
  const bool trt = schema.treatment && !data.treatment().empty();
  if (tte) fields.push_back(schema.target.event_indicator_name);
  if (trt) fields.push_back(*schema.treatment);
  out << csv::join_row(fields) << '\n';

  auto indicator = [](double v) { return std::isnan(v) ? std::string() : csv::format_number(v); };
  for (std::size_t i = 0; i < data.n(); ++i) {
    fields.clear();
    for (std::size_t j = 0; j < data.feature_count(); ++j) {
      const auto& f = schema.features[j];
      const double v = data.column(j)[i];
      if (std::isnan(v) || (f.kind != FeatureKind::continuous && v < 0.0)) {
        fields.emplace_back();
      } else if (f.kind == FeatureKind::continuous) {
        fields.push_back(csv::format_number(v));
      } else {
        fields.push_back(f.levels[static_cast<std::size_t>(v)]);
      }
    }
    const double y = data.target()[i];
    if (std::isnan(y)) {
      fields.emplace_back();
    } else if (schema.target.kind == TargetKind::binary) {
      fields.push_back(schema.target.labels[static_cast<std::size_t>(y)]);
    } else {
      fields.push_back(csv::format_number(y));
    }
    if (tte) fields.push_back(indicator(data.events()[i]));
    if (trt) fields.push_back(indicator(data.treatment()[i]));
    out << csv::join_row(fields) << '\n';
  }
}

std::string schema_file_text(const Dataset& data) {
  const auto& schema = data.schema();
  std::string text;
  auto join_levels = [](const std::vector<std::string>& levels) {
    std::string s;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      if (k) s += '<';
      s += levels[k];
    }
    return s;
  };
  for (const auto& f : schema.features) {
    text += f.name + " = " + std::string(to_string(f.kind));
    if (f.kind != FeatureKind::continuous) text += ':' + join_levels(f.levels);
    text += '\n';
  }
  text += schema.target.name + " = target:" + std::string(to_string(schema.target.kind));
  if (schema.target.kind == TargetKind::binary) text += ':' + schema.target.labels[1];
  if (schema.target.kind == TargetKind::time_to_event) text += ':' + schema.target.event_indicator_name;
  text += '\n';
  if (schema.treatment) text += *schema.treatment + " = treatment\n";
  return text;
}

// ---------------------------------------------------------------------------
// Cutoffs

std::vector<double> compute_cutoffs(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::erase_if(sorted, [](double v) { return std::isnan(v); });
  std::vector<double> cutoffs;
  if (sorted.empty()) return cutoffs;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double max = sorted.back();
  for (std::size_t k = 1; k <= 19; ++k) {
    const std::size_t rank = (k * n + 19) / 20;  // ceil(k/20 * n), 1-based
    const double v = sorted[std::max<std::size_t>(rank, 1) - 1];
    if (v == max) continue;
    if (cutoffs.empty() || cutoffs.back() != v) cutoffs.push_back(v);
  }
  return cutoffs;
}

CutoffSet compute_cutoffs(const Dataset& data, std::size_t feature) {
  return {data.feature(feature).name, compute_cutoffs(data.column(feature))};
}

}  // namespace ztree
