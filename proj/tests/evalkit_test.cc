// Copyright 2026 The embaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "embaudit/evalkit.h"

#include <cmath>
#include <limits>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace embaudit {
namespace {

using ::embaudit::testing::KindOf;

constexpr Membership kM = Membership::kMember;
constexpr Membership kN = Membership::kNonMember;

ScoredDecisions Entries(std::vector<ScoredEntry> entries) {
  return ScoredDecisions{std::move(entries)};
}

TEST(ComputeMetricsTest, HandExample) {
  // scores 0.9 M(m), 0.8 N(m), 0.8 M(n), 0.1 N(n), -0.5 N(m)
  const ScoredDecisions d = Entries({{0.9, kM, kM},
                                     {0.8, kN, kM},
                                     {0.8, kM, kN},
                                     {0.1, kN, kN},
                                     {-0.5, kN, kM}});
  const std::vector<double> levels = {0.0, 0.5, 1.0};
  EA_ASSERT_OK_AND_ASSIGN(MetricsReport r, ComputeMetrics(d, levels));
  EXPECT_EQ(r.true_positives, 1u);
  EXPECT_EQ(r.false_positives, 1u);
  EXPECT_EQ(r.true_negatives, 1u);
  EXPECT_EQ(r.false_negatives, 2u);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.4);
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 1.0 / 3.0);
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<RocPoint> expected = {{inf, 0, 0},
                                          {0.9, 0, 1.0 / 3},
                                          {0.8, 0.5, 2.0 / 3},
                                          {0.1, 1.0, 2.0 / 3},
                                          {-0.5, 1.0, 1.0}};
  EXPECT_EQ(r.roc, expected);
  ASSERT_EQ(r.tpr_at_fpr.size(), 3u);
  EXPECT_DOUBLE_EQ(r.tpr_at_fpr[0].tpr, 1.0 / 3);
  EXPECT_DOUBLE_EQ(r.tpr_at_fpr[1].tpr, 2.0 / 3);
  EXPECT_DOUBLE_EQ(r.tpr_at_fpr[2].tpr, 1.0);
  EA_ASSERT_OK(CheckRocInvariants(r.roc));
}

TEST(ComputeMetricsTest, UndefinedPrecisionIsZero) {
  EA_ASSERT_OK_AND_ASSIGN(
      MetricsReport r,
      ComputeMetrics(Entries({{0.1, kN, kM}, {0.2, kN, kN}}), std::vector<double>{}));
  EXPECT_EQ(r.precision, 0.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.accuracy, 0.5);
}

TEST(ComputeMetricsTest, SingleClass) {
  const ScoredDecisions d = Entries({{0.1, kM, kM}, {0.2, kN, kM}});
  EA_ASSERT_OK_AND_ASSIGN(MetricsReport r, ComputeMetrics(d, std::vector<double>{}));
  EXPECT_TRUE(r.roc.empty());
  EXPECT_EQ(r.accuracy, 0.5);
  EXPECT_EQ(KindOf(ComputeMetrics(d, std::vector<double>{0.1}).status()),
            ErrorKind::kMetric);
}

TEST(ComputeMetricsTest, Errors) {
  const std::vector<double> none;
  EXPECT_EQ(KindOf(ComputeMetrics(Entries({}), none).status()), ErrorKind::kMetric);
  EXPECT_EQ(KindOf(ComputeMetrics(
                       Entries({{std::numeric_limits<double>::quiet_NaN(), kM, kM}}),
                       none)
                       .status()),
            ErrorKind::kMetric);
  EXPECT_EQ(KindOf(ComputeMetrics(Entries({{0.0, kM, Membership::kUnknown}}), none)
                       .status()),
            ErrorKind::kMetric);
  const std::vector<double> bad_level = {1.5};
  EXPECT_EQ(KindOf(ComputeMetrics(Entries({{0, kM, kM}, {0, kN, kN}}), bad_level)
                       .status()),
            ErrorKind::kMetric);
}

TEST(ComputeMetricsTest, TiedScoresMoveTogether) {
  const ScoredDecisions d = Entries({{1, kM, kM}, {1, kM, kN}, {1, kM, kM}});
  EA_ASSERT_OK_AND_ASSIGN(MetricsReport r, ComputeMetrics(d, std::vector<double>{0.5}));
  ASSERT_EQ(r.roc.size(), 2u);
  EXPECT_EQ(r.roc[1].fpr, 1.0);
  EXPECT_EQ(r.roc[1].tpr, 1.0);
  EXPECT_EQ(r.tpr_at_fpr[0].tpr, 0.0);
}

TEST(CheckRocInvariantsTest, DetectsViolations) {
  const double inf = std::numeric_limits<double>::infinity();
  EA_ASSERT_OK(CheckRocInvariants({{inf, 0, 0}, {1, 0.5, 0.5}, {0, 1, 1}}));
  EXPECT_EQ(KindOf(CheckRocInvariants({{inf, 0, 0}, {1, 0.5, 0.5}, {0, 0.4, 1}})),
            ErrorKind::kInternal);
  EXPECT_EQ(KindOf(CheckRocInvariants({{inf, 0, 0}, {1, 0.5, 1.5}})),
            ErrorKind::kInternal);
}

EmbeddingRecord Rec(uint64_t g, std::vector<float> v) {
  return {g, Membership::kUnknown, std::move(v)};
}

TEST(KnnTest, HandExampleWithTies) {
  EA_ASSERT_OK_AND_ASSIGN(
      EmbeddingSet train_set,
      EmbeddingSet::Create(2, {Rec(0, {1, 0}), Rec(1, {2, 0}), Rec(2, {0, 1}),
                               Rec(3, {0, 0}), Rec(4, {-1, 0})}));
  EA_ASSERT_OK_AND_ASSIGN(
      LabeledEmbeddingSet train,
      LabeledEmbeddingSet::Create(std::move(train_set), {5, 3, 3, 1, 9}));
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet test,
                          EmbeddingSet::Create(2, {Rec(10, {1, 0}), Rec(11, {0, 0})}));
  // Query 0: sims 1, 1, 0, 0, -1. k = 1 keeps train 0 (lower index).
  EXPECT_EQ(*KnnPredict(train, test, 1), (std::vector<uint32_t>{5, 5}));
  // k = 2: classes {5, 3} tie, smallest wins. Zero query: all sims 0, first
  // two are train 0 and 1.
  EXPECT_EQ(*KnnPredict(train, test, 2), (std::vector<uint32_t>{3, 3}));
  EXPECT_EQ(*KnnPredict(train, test, 3), (std::vector<uint32_t>{3, 3}));
  EXPECT_EQ(KindOf(KnnPredict(train, test, 0).status()), ErrorKind::kDomain);
  EXPECT_EQ(KindOf(KnnPredict(train, test, 6).status()), ErrorKind::kDomain);
  EA_ASSERT_OK_AND_ASSIGN(LabeledEmbeddingSet labeled_test,
                          LabeledEmbeddingSet::Create(test, {3, 1}));
  EXPECT_EQ(*KnnUtility(train, labeled_test, 2), 0.5);
}

TEST(KnnTest, LabelCountMismatch) {
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet set, EmbeddingSet::Create(1, {Rec(0, {1})}));
  EXPECT_EQ(KindOf(LabeledEmbeddingSet::Create(set, {1, 2}).status()),
            ErrorKind::kValidation);
}

TEST(ReadClassLabelsTest, ParsesAndRejects) {
  const auto dir = testing::TestDir();
  EA_ASSERT_OK(WriteFileBytes(dir / "ok.txt", "3\n0\n17\n"));
  EXPECT_EQ(*ReadClassLabels(dir / "ok.txt"), (std::vector<uint32_t>{3, 0, 17}));
  EA_ASSERT_OK(WriteFileBytes(dir / "bad.txt", "3\nx\n"));
  EXPECT_FALSE(ReadClassLabels(dir / "bad.txt").ok());
  EXPECT_EQ(KindOf(ReadClassLabels(dir / "none.txt").status()), ErrorKind::kIo);
}

}  // namespace
}  // namespace embaudit
