#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ztree {

enum class FeatureKind { continuous, nominal, ordinal };
enum class TargetKind { binary, continuous, time_to_event };
enum class NaPolicy { error, drop_rows, na_level };

/// Reserved level that missing nominal cells map to under NaPolicy::na_level.
inline constexpr std::string_view kNaLevel = "__NA__";

std::string_view to_string(FeatureKind kind);
std::string_view to_string(TargetKind kind);
std::string_view to_string(NaPolicy policy);
FeatureKind parse_feature_kind(std::string_view text);
TargetKind parse_target_kind(std::string_view text);
NaPolicy parse_na_policy(std::string_view text);

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  /// Nominal: level names, indexed by code. Ordinal: levels in ascending order.
  std::vector<std::string> levels;

  /// Continuous and ordinal features split with `>`; nominal with `==`.
  bool ordered() const { return kind != FeatureKind::nominal; }
  bool operator==(const FeatureSpec&) const = default;
};

struct TargetSpec {
  std::string name;
  TargetKind kind = TargetKind::continuous;
  std::string event_indicator_name;  // time-to-event only
  std::vector<std::string> labels;   // binary only: raw labels of 0 and 1
  bool operator==(const TargetSpec&) const = default;
};

struct Schema {
  std::vector<FeatureSpec> features;
  TargetSpec target;
  std::optional<std::string> treatment;

  /// Hex FNV-1a digest of the canonical schema text.
  std::string fingerprint() const;
  std::optional<std::size_t> find_feature(std::string_view name) const;
  bool operator==(const Schema&) const = default;
};

/// Columnar table of typed features, a target and an optional treatment arm.
///
/// Feature cells are doubles. Nominal and ordinal cells hold level codes;
/// code -1 marks an unseen level and NaN a missing continuous cell, which
/// only scoring datasets may contain. Immutable once built.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Schema schema, std::vector<std::vector<double>> columns, std::vector<double> target,
          std::vector<double> events = {}, std::vector<double> treatment = {});

  const Schema& schema() const { return schema_; }
  std::span<const FeatureSpec> features() const { return schema_.features; }
  const FeatureSpec& feature(std::size_t j) const { return schema_.features[j]; }
  std::size_t feature_count() const { return columns_.size(); }
  std::size_t n() const { return target_.size(); }

  std::span<const double> column(std::size_t j) const { return columns_[j]; }
  /// Outcome (binary 0/1, continuous value, or event time).
  std::span<const double> target() const { return target_; }
  /// Event indicators; empty unless the target is time-to-event.
  std::span<const double> events() const { return events_; }
  /// Treatment arm per row; empty when there is no treatment column.
  std::span<const double> treatment() const { return treatment_; }
  bool has_treatment() const { return schema_.treatment.has_value(); }

  /// True when no cell is missing or unseen (a training-grade dataset).
  bool complete() const;

  Dataset subset(std::span<const std::size_t> rows) const;

  bool operator==(const Dataset&) const = default;

 private:
  Schema schema_;
  std::vector<std::vector<double>> columns_;
  std::vector<double> target_;
  std::vector<double> events_;
  std::vector<double> treatment_;
};

/// Per-column overrides read from a schema file.
///
/// One `column = spec` entry per line, where spec is one of
///   continuous | nominal | nominal:a<b<c | ordinal:low<mid<high
///   target:binary[:positive-label] | target:continuous
///   target:time-to-event:event-column | treatment | ignore
/// Blank lines and lines starting with '#' are skipped.
struct ColumnOverride {
  enum class Role { feature, target, treatment, ignore };
  Role role = Role::feature;
  FeatureKind kind = FeatureKind::continuous;
  std::vector<std::string> levels;  // declared levels (ordinal, or pinned nominal)
  TargetKind target_kind = TargetKind::continuous;
  std::string event_column;
  std::optional<std::string> positive_label;
};

struct SchemaOverrides {
  std::map<std::string, ColumnOverride, std::less<>> columns;

  static SchemaOverrides parse(std::string_view text);
  static SchemaOverrides read_file(const std::filesystem::path& path);
};

struct IngestOptions {
  SchemaOverrides overrides;
  std::optional<std::string> target;  // default: schema file, else the last column
  std::optional<TargetKind> target_kind;
  std::optional<std::string> event_column;
  std::optional<std::string> treatment;
  /// Raw label mapped to 1 for a binary target (default: the larger label).
  std::optional<std::string> positive_label;
  NaPolicy na_policy = NaPolicy::error;
};

/// True for cells treated as missing: empty, NA, N/A, ?, NaN, nan, null.
bool is_missing_cell(std::string_view cell);

Dataset ingest_csv(const std::filesystem::path& path, const IngestOptions& options);
Dataset ingest_csv_text(std::string_view text, const IngestOptions& options);

/// Reads rows to be scored by a model trained on `schema`. Unseen levels
/// become code -1 and missing cells NaN. Target, event and treatment
/// columns are read when present and left empty otherwise.
Dataset ingest_for_schema(std::string_view text, const Schema& schema);

/// Writes the dataset as CSV (features, target, events, treatment) after
/// `# ` prefixed header lines.
void write_csv(const Dataset& data, std::ostream& out, std::span<const std::string> header_lines = {});

/// Schema-file text that makes ingest_csv reproduce `data` from write_csv output.
std::string schema_file_text(const Dataset& data);

struct CutoffSet {
  std::string feature_name;
  std::vector<double> cutoffs;
};

/// Candidate `>` cutoffs: nearest-rank percentiles at 5%, 10%, ..., 95%
/// (sorted value at index ceil(q*n)), deduplicated, with the column maximum
/// removed. A constant column yields no cutoffs.
std::vector<double> compute_cutoffs(std::span<const double> values);
CutoffSet compute_cutoffs(const Dataset& data, std::size_t feature);

}  // namespace ztree
