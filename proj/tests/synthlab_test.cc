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

#include "embaudit/synthlab.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "embaudit/signals.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace embaudit {
namespace {

using ::embaudit::testing::KindOf;

// Accuracy of the Bayes rule by direct numerical integration of
// max(prior * f_m, (1 - prior) * f_nm).
double IntegratedBayesAccuracy(double mm, double sm, double mn, double sn,
                               double prior) {
  auto pdf = [](double x, double m, double s) {
    const double z = (x - m) / s;
    return std::exp(-0.5 * z * z) / (s * std::sqrt(2 * std::numbers::pi));
  };
  const double lo = std::min(mm - 12 * sm, mn - 12 * sn);
  const double hi = std::max(mm + 12 * sm, mn + 12 * sn);
  const int n = 400000;
  const double h = (hi - lo) / n;
  double sum = 0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double f = std::max(prior * pdf(x, mm, sm), (1 - prior) * pdf(x, mn, sn));
    sum += (i == 0 || i == n) ? f / 2 : f;
  }
  return sum * h;
}

NormSpec Spec(size_t count) {
  NormSpec spec;
  spec.mean = 10;
  spec.stddev = 1;
  spec.dimension = 32;
  spec.count = count;
  spec.seed = 77;
  spec.label = Membership::kMember;
  spec.first_group_id = 500;
  return spec;
}

TEST(StandardNormalCdfTest, KnownValues) {
  EXPECT_NEAR(StandardNormalCdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(StandardNormalCdf(1.0), 0.8413447460685429, 1e-15);
  EXPECT_NEAR(StandardNormalCdf(-1.96), 0.024997895148220435, 1e-15);
  EXPECT_NEAR(StandardNormalCdf(-10.0), 7.61985302416047e-24, 1e-36);
}

TEST(BayesOptimalAccuracyTest, EqualVariance) {
  EXPECT_NEAR(BayesOptimalAccuracy({10, 1}, {12, 1}, 0.5), 0.8413447460685429,
              1e-12);
  EXPECT_NEAR(BayesOptimalAccuracy({10, 2}, {10, 2}, 0.5), 0.5, 1e-12);
  EXPECT_EQ(BayesOptimalAccuracy({10, 1}, {12, 1}, 0.0), 1.0);
  EXPECT_EQ(BayesOptimalAccuracy({10, 1}, {12, 1}, 1.0), 1.0);
}

TEST(BayesOptimalAccuracyTest, MatchesNumericalIntegration) {
  struct Case {
    double mm, sm, mn, sn, prior;
  };
  for (const Case& c : {Case{10, 1, 11, 3, 0.5}, Case{10, 1, 12, 1, 0.3},
                        Case{5, 2, 5, 1, 0.5}, Case{0, 1, 4, 0.5, 0.8},
                        Case{10, 1, 10, 1, 0.7}}) {
    EXPECT_NEAR(BayesOptimalAccuracy({c.mm, c.sm}, {c.mn, c.sn}, c.prior),
                IntegratedBayesAccuracy(c.mm, c.sm, c.mn, c.sn, c.prior), 1e-7)
        << c.mm << " " << c.sm << " " << c.mn << " " << c.sn << " " << c.prior;
  }
}

TEST(GenerateTest, ShapeLabelsAndNorms) {
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet set, Generate(Spec(4000)));
  ASSERT_EQ(set.size(), 4000u);
  EXPECT_EQ(set.dimension(), 32u);
  EXPECT_EQ(set[0].group_id, 500u);
  EXPECT_EQ(set[3999].group_id, 4499u);
  EA_ASSERT_OK_AND_ASSIGN(std::vector<double> norms, RecordNorms(set, 2));
  double mean = 0, var = 0;
  for (double n : norms) mean += n;
  mean /= norms.size();
  for (double n : norms) var += (n - mean) * (n - mean);
  var /= norms.size() - 1;
  EXPECT_NEAR(mean, 10, 0.05);
  EXPECT_NEAR(std::sqrt(var), 1, 0.04);
  for (const auto& r : set.records()) EXPECT_EQ(r.label, Membership::kMember);
}

TEST(GenerateTest, RecordStreamsAreIndependentOfCount) {
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet small, Generate(Spec(5)));
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet large, Generate(Spec(50)));
  for (size_t i = 0; i < 5; ++i) EXPECT_EQ(small[i], large[i]);
  NormSpec other = Spec(5);
  other.seed = 78;
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet different, Generate(other));
  EXPECT_NE(different[0].vector, small[0].vector);
}

TEST(GenerateTest, SparseSupportEqualMagnitudes) {
  NormSpec spec = Spec(300);
  spec.sparse_support = SparseSupport{4, 9};
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet set, Generate(spec));
  std::vector<int> seen(10, 0);
  for (const auto& r : set.records()) {
    size_t support = 0;
    float magnitude = 0;
    for (float v : r.vector) {
      if (v == 0) continue;
      ++support;
      if (magnitude == 0) magnitude = std::abs(v);
      EXPECT_EQ(std::abs(v), magnitude);
    }
    ASSERT_GE(support, 4u);
    ASSERT_LE(support, 9u);
    ++seen[support];
    const double l2 = *PNorm(r.vector, 2);
    EXPECT_NEAR(*PNorm(r.vector, 1), l2 * std::sqrt(support), 1e-4 * l2);
    EXPECT_EQ(*PNorm(r.vector, 0), support);
  }
  for (size_t s = 4; s <= 9; ++s) EXPECT_GT(seen[s], 20) << s;
}

TEST(GenerateTest, Validation) {
  EXPECT_EQ(KindOf(Generate(Spec(0)).status()), ErrorKind::kValidation);
  NormSpec spec = Spec(3);
  spec.stddev = 0;
  EXPECT_EQ(KindOf(Generate(spec).status()), ErrorKind::kValidation);
  spec = Spec(3);
  spec.dimension = 0;
  EXPECT_EQ(KindOf(Generate(spec).status()), ErrorKind::kValidation);
  spec = Spec(3);
  spec.sparse_support = SparseSupport{5, 40};
  EXPECT_EQ(KindOf(Generate(spec).status()), ErrorKind::kValidation);
}

TEST(MakeGroupedViewsTest, CopiesWithJitter) {
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet base, Generate(Spec(20)));
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet exact, MakeGroupedViews(base, 3, 0.0, 1));
  ASSERT_EQ(exact.size(), 60u);
  EXPECT_EQ(exact.GroupIds(), base.GroupIds());
  size_t same = 0;
  for (const auto& r : exact.records()) {
    for (const auto& b : base.records()) {
      if (b.group_id == r.group_id) same += b.vector == r.vector;
    }
  }
  EXPECT_EQ(same, 60u);
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet noisy, MakeGroupedViews(base, 3, 0.5, 1));
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet again, MakeGroupedViews(base, 3, 0.5, 1));
  EXPECT_EQ(noisy, again);
  EXPECT_NE(noisy, exact);
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet dup, MakeGroupedViews(base, 2, 0.0, 1));
  EXPECT_EQ(KindOf(MakeGroupedViews(dup, 2, 0.1, 1).status()),
            ErrorKind::kValidation);
}

}  // namespace
}  // namespace embaudit
