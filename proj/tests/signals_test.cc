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

#include "embaudit/signals.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace embaudit {
namespace {

using ::embaudit::testing::KindOf;

double Norm(std::vector<float> v, double p) { return *PNorm(v, p); }

TEST(PNormTest, HandValues) {
  const std::vector<float> v = {3, -4, 0, 12};
  EXPECT_DOUBLE_EQ(Norm(v, 2), 13.0);
  EXPECT_DOUBLE_EQ(Norm(v, 1), 19.0);
  EXPECT_DOUBLE_EQ(Norm(v, 0), 3.0);
  EXPECT_NEAR(Norm(v, 3), std::cbrt(27.0 + 64.0 + 1728.0), 1e-12);
  EXPECT_NEAR(Norm(v, 0.5), std::pow(std::sqrt(3.0) + 2.0 + std::sqrt(12.0), 2.0),
              1e-12);
}

TEST(PNormTest, ZeroVectorAndTinyComponents) {
  EXPECT_EQ(Norm({0, 0, 0}, 2), 0.0);
  EXPECT_EQ(Norm({0, 0, 0}, 0), 0.0);
  EXPECT_EQ(Norm({0, 1e-13f, 1e-3f}, 0), 1.0);
}

TEST(PNormTest, NoOverflowForLargeComponentsAndOrders) {
  const float big = 3e38f;
  const double exact = std::pow(2.0, 1.0 / 10.0) * static_cast<double>(big);
  EXPECT_NEAR(Norm({big, big}, 10) / exact, 1.0, 1e-12);
  EXPECT_NEAR(Norm({big, big}, 2) / (std::sqrt(2.0) * big), 1.0, 1e-12);
  const float tiny = 1e-40f;
  EXPECT_NEAR(Norm({tiny, tiny}, 8) /
                  (std::pow(2.0, 1.0 / 8.0) * static_cast<double>(tiny)),
              1.0, 1e-9);
}

TEST(PNormTest, DomainErrors) {
  EXPECT_EQ(KindOf(PNorm(std::vector<float>{}, 2).status()), ErrorKind::kDomain);
  const std::vector<float> v = {1};
  EXPECT_EQ(KindOf(PNorm(v, -1).status()), ErrorKind::kDomain);
  EXPECT_EQ(KindOf(PNorm(v, std::numeric_limits<double>::quiet_NaN()).status()),
            ErrorKind::kDomain);
  EXPECT_EQ(KindOf(PNorm(v, std::numeric_limits<double>::infinity()).status()),
            ErrorKind::kDomain);
}

TEST(EncoderMiSignatureTest, SortedPairwiseCosines) {
  const std::vector<float> a = {1, 0}, b = {0, 2}, c = {-3, 0}, d = {1, 1};
  std::vector<std::span<const float>> views = {a, b, c, d};
  EA_ASSERT_OK_AND_ASSIGN(AttackSignature sig, EncoderMiSignature(views));
  EXPECT_EQ(sig.kind, SignatureKind::kPairwiseSimilarity);
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<double> expected = {0.0, -1.0, r, 0.0, r, -r};
  std::sort(expected.begin(), expected.end());
  ASSERT_EQ(sig.values.size(), 6u);
  for (size_t i = 0; i < 6; ++i) EXPECT_NEAR(sig.values[i], expected[i], 1e-12);
  EXPECT_TRUE(std::is_sorted(sig.values.begin(), sig.values.end()));
}

TEST(EncoderMiSignatureTest, Errors) {
  const std::vector<float> a = {1, 0}, z = {0, 0};
  std::vector<std::span<const float>> one = {a};
  EXPECT_EQ(KindOf(EncoderMiSignature(one).status()), ErrorKind::kDomain);
  std::vector<std::span<const float>> with_zero = {a, z};
  EXPECT_EQ(KindOf(EncoderMiSignature(with_zero).status()), ErrorKind::kDomain);
}

TEST(SdmiSignatureTest, EuclideanInAnchorOrder) {
  const std::vector<float> target = {1, 1};
  const std::vector<std::vector<float>> anchors = {{4, 5}, {1, 1}, {1, 0}};
  EA_ASSERT_OK_AND_ASSIGN(AttackSignature sig, SdmiSignature(target, anchors));
  EXPECT_EQ(sig.values, (std::vector<double>{5.0, 0.0, 1.0}));
  const std::vector<std::vector<float>> bad = {{1, 2, 3}};
  EXPECT_EQ(KindOf(SdmiSignature(target, bad).status()), ErrorKind::kDomain);
}

EmbeddingRecord Rec(uint64_t g, Membership l, std::vector<float> v) {
  return {g, l, std::move(v)};
}

TEST(BatchSignaturesTest, PairwiseGroupsInAscendingOrder) {
  EA_ASSERT_OK_AND_ASSIGN(
      EmbeddingSet set,
      EmbeddingSet::Create(2, {Rec(9, Membership::kMember, {1, 0}),
                               Rec(3, Membership::kNonMember, {1, 0}),
                               Rec(9, Membership::kMember, {0, 1}),
                               Rec(3, Membership::kNonMember, {2, 0})}));
  EA_ASSERT_OK_AND_ASSIGN(auto sigs,
                          BatchSignatures(set, SignatureKind::kPairwiseSimilarity));
  ASSERT_EQ(sigs.size(), 2u);
  EXPECT_EQ(sigs[0].source_group, 3u);
  EXPECT_EQ(sigs[0].label, Membership::kNonMember);
  EXPECT_NEAR(sigs[0].values[0], 1.0, 1e-12);
  EXPECT_EQ(sigs[1].source_group, 9u);
  EXPECT_NEAR(sigs[1].values[0], 0.0, 1e-12);
}

TEST(BatchSignaturesTest, RaggedGroupsNamed) {
  EA_ASSERT_OK_AND_ASSIGN(
      EmbeddingSet set,
      EmbeddingSet::Create(1, {Rec(1, Membership::kMember, {1}),
                               Rec(1, Membership::kMember, {2}),
                               Rec(77, Membership::kMember, {1})}));
  auto sigs = BatchSignatures(set, SignatureKind::kPairwiseSimilarity);
  EXPECT_EQ(KindOf(sigs.status()), ErrorKind::kValidation);
  EXPECT_NE(sigs.status().message().find("77"), absl::string_view::npos);
}

TEST(BatchSignaturesTest, PerRecordKinds) {
  EA_ASSERT_OK_AND_ASSIGN(
      EmbeddingSet set,
      EmbeddingSet::Create(2, {Rec(1, Membership::kMember, {3, 4}),
                               Rec(2, Membership::kNonMember, {0, 1})}));
  EA_ASSERT_OK_AND_ASSIGN(auto raw, BatchSignatures(set, SignatureKind::kRawFeature));
  ASSERT_EQ(raw.size(), 2u);
  EXPECT_EQ(raw[0].values, (std::vector<double>{3, 4}));
  SignatureParams params;
  params.p = 1;
  EA_ASSERT_OK_AND_ASSIGN(auto norms, BatchSignatures(set, SignatureKind::kPNorm, params));
  EXPECT_EQ(norms[0].values, std::vector<double>{7});
  const std::vector<std::vector<float>> anchors = {{0, 0}};
  params.anchors = anchors;
  EA_ASSERT_OK_AND_ASSIGN(auto dist,
                          BatchSignatures(set, SignatureKind::kAnchorDistance, params));
  EXPECT_EQ(dist[0].values, std::vector<double>{5});
  EXPECT_EQ(dist[1].label, Membership::kNonMember);
  EA_ASSERT_OK_AND_ASSIGN(auto record_norms, RecordNorms(set, 2));
  EXPECT_EQ(record_norms, (std::vector<double>{5, 1}));
}

}  // namespace
}  // namespace embaudit
