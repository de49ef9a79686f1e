#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "test_util.hpp"
#include "ztree/csv.hpp"
#include "ztree/dataset.hpp"
#include "ztree/error.hpp"

namespace ztree {
namespace {

const char* kFourRows = "x,y\n1.5,0\n2.5,1\n3.5,1\n4.5,0\n";

/// Nearest-rank oracle: sorted value at index ceil(q*n) (1-based) for q = k/20.
std::vector<double> nearest_rank_oracle(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<double> out;
  for (int k = 1; k <= 19; ++k) {
    const double q = k / 20.0;
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, n);
    const double v = values[rank - 1];
    if (v < values.back() && (out.empty() || out.back() != v)) out.push_back(v);
  }
  return out;
}

TEST(Ingest, InfersKindsFromFourRowCsv) {
  const auto d = ingest_csv_text(kFourRows, {});
  EXPECT_EQ(d.n(), 4u);
  ASSERT_EQ(d.feature_count(), 1u);
  EXPECT_EQ(d.feature(0).kind, FeatureKind::continuous);
  EXPECT_EQ(d.schema().target.kind, TargetKind::binary);
  EXPECT_EQ(d.target()[1], 1.0);
}

TEST(Ingest, DropRowsRemovesMissingRow) {
  IngestOptions options;
  options.na_policy = NaPolicy::drop_rows;
  const auto d = ingest_csv_text("x,y\n1.5,0\nNA,1\n3.5,1\n4.5,0\n", options);
  EXPECT_EQ(d.n(), 3u);
}

TEST(Ingest, MissingCellIsAnErrorByDefault) {
  EXPECT_THROW(ingest_csv_text("x,y\n1.5,0\n,1\n3.5,1\n", {}), DataError);
}

TEST(Ingest, NaLevelAddsExplicitLevel) {
  IngestOptions options;
  options.na_policy = NaPolicy::na_level;
  const auto d = ingest_csv_text("c,y\na,0\n?,1\nb,1\n", options);
  const auto& levels = d.feature(0).levels;
  EXPECT_NE(std::find(levels.begin(), levels.end(), kNaLevel), levels.end());
  EXPECT_TRUE(d.complete());
}

TEST(Ingest, ThreeValuedBinaryTargetIsRejected) {
  IngestOptions options;
  options.target_kind = TargetKind::binary;
  try {
    ingest_csv_text("x,y\n1,0\n2,1\n3,2\n", options);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("binary target with 3 observed values"), std::string::npos);
  }
}

TEST(Ingest, SchemaOverridesDeclareOrdinalAndIgnore) {
  IngestOptions options;
  options.overrides = SchemaOverrides::parse("size = ordinal:small<medium<large\nnoise = ignore\ny = target:continuous\n");
  const auto d = ingest_csv_text("size,noise,y\nlarge,1,0.5\nsmall,2,1.5\nmedium,3,2\n", options);
  ASSERT_EQ(d.feature_count(), 1u);
  EXPECT_EQ(d.feature(0).kind, FeatureKind::ordinal);
  EXPECT_EQ(d.column(0)[0], 2.0);
  EXPECT_EQ(d.column(0)[1], 0.0);
}

TEST(Ingest, TreatmentMustHoldBothArms) {
  IngestOptions options;
  options.treatment = "t";
  EXPECT_THROW(ingest_csv_text("x,t,y\n1,1,0\n2,1,1\n", options), DataError);
  const auto d = ingest_csv_text("x,t,y\n1,1,0\n2,0,1\n", options);
  EXPECT_TRUE(d.has_treatment());
  EXPECT_EQ(d.feature_count(), 1u);
}

TEST(Ingest, TimeToEventTarget) {
  IngestOptions options;
  options.target = "time";
  options.target_kind = TargetKind::time_to_event;
  options.event_column = "status";
  const auto d = ingest_csv_text("x,time,status\n1,5,1\n2,3,0\n", options);
  EXPECT_EQ(d.schema().target.kind, TargetKind::time_to_event);
  EXPECT_EQ(d.events()[1], 0.0);
  EXPECT_EQ(d.feature_count(), 1u);
}

TEST(Ingest, RoundTripThroughWriterIsIdentical) {
  IngestOptions options;
  options.overrides = SchemaOverrides::parse("grade = ordinal:low<mid<high\n");
  const auto d = ingest_csv_text("a,grade,colour,y\n0.25,low,red,1\n1e-3,high,blue,0\n7,mid,red,1\n", options);
  std::ostringstream out;
  write_csv(d, out, std::vector<std::string>{"tool: test"});
  IngestOptions again;
  again.overrides = SchemaOverrides::parse(schema_file_text(d));
  const auto back = ingest_csv_text(out.str(), again);
  EXPECT_EQ(back, d);
}

TEST(Ingest, ScoringDataMapsUnseenLevels) {
  const auto d = ingest_csv_text("c,y\nred,0\nblue,1\n", {});
  const auto s = ingest_for_schema("c\ngreen\nred\n", d.schema());
  EXPECT_EQ(s.column(0)[0], -1.0);
  EXPECT_EQ(s.column(0)[1], 1.0);
  EXPECT_TRUE(std::isnan(s.target()[0]));
}

TEST(Cutoffs, OneToHundred) {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i + 1;
  std::vector<double> expected;
  for (int k = 5; k <= 95; k += 5) expected.push_back(k);
  EXPECT_EQ(compute_cutoffs(v), expected);
}

TEST(Cutoffs, ConstantColumnHasNone) { EXPECT_TRUE(compute_cutoffs(std::vector<double>(10, 7.0)).empty()); }

TEST(Cutoffs, HeavyTies) {
  const std::vector<double> v{1, 1, 1, 1, 1, 1, 1, 1, 1, 2};
  EXPECT_EQ(compute_cutoffs(v), std::vector<double>{1.0});
}

TEST(Cutoffs, MatchNearestRankOracleOnRandomColumns) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(120);
    std::vector<double> v(n);
    const bool ties = trial % 2 == 0;
    for (auto& x : v) x = ties ? static_cast<double>(rng.below(6)) : rng.normal();
    const auto cut = compute_cutoffs(v);
    EXPECT_EQ(cut, nearest_rank_oracle(v)) << "trial " << trial;
    EXPECT_LE(cut.size(), 20u);
    EXPECT_TRUE(std::is_sorted(cut.begin(), cut.end()));
    EXPECT_EQ(std::adjacent_find(cut.begin(), cut.end()), cut.end());
    for (double c : cut) {
      EXPECT_NE(std::find(v.begin(), v.end(), c), v.end());
      EXPECT_TRUE(std::any_of(v.begin(), v.end(), [&](double x) { return x > c; }));
      EXPECT_TRUE(std::any_of(v.begin(), v.end(), [&](double x) { return x <= c; }));
    }
  }
}

TEST(Schema, FingerprintTracksContent) {
  auto a = testing::schema_of({testing::continuous("x")}, TargetKind::binary);
  auto b = a;
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  b.features[0].name = "z";
  EXPECT_NE(a.fingerprint(), b.fingerprint());
}

}  // namespace
}  // namespace ztree
