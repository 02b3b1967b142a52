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

// Attack signals: p-norms, sorted pairwise view similarities and
// anchor-distance vectors.

#ifndef EMBAUDIT_SIGNALS_H_
#define EMBAUDIT_SIGNALS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "embaudit/emb_data.h"

namespace embaudit {

// Components with |v_i| <= this count as zero for the p = 0 "norm".
inline constexpr double kZeroComponentEpsilon = 1e-12;

enum class SignatureKind {
  kRawFeature,
  kPairwiseSimilarity,
  kAnchorDistance,
  kPNorm,
};

absl::string_view SignatureKindName(SignatureKind kind);

// Pairwise similarities are always emitted in this order.
inline constexpr absl::string_view kSimilaritySortOrder = "ascending";

struct AttackSignature {
  SignatureKind kind = SignatureKind::kRawFeature;
  std::vector<double> values;
  uint64_t source_group = 0;
  Membership label = Membership::kUnknown;
};

// (sum |v_i|^p)^(1/p) for p > 0; the count of |v_i| > kZeroComponentEpsilon
// for p == 0.
absl::StatusOr<double> PNorm(std::span<const float> vector, double p);

// Cosine similarity of every unordered pair of views, sorted ascending.
absl::StatusOr<AttackSignature> EncoderMiSignature(
    std::span<const std::span<const float>> views);

// Euclidean distance from `target` to each anchor, in anchor order.
absl::StatusOr<AttackSignature> SdmiSignature(
    std::span<const float> target,
    std::span<const std::vector<float>> anchors);

struct SignatureParams {
  double p = 2.0;
  std::span<const std::vector<float>> anchors;
};

// kPairwiseSimilarity yields one signature per group in ascending group_id
// order (every group must hold the same number n >= 2 of views); the other
// kinds yield one signature per record in record order.
absl::StatusOr<std::vector<AttackSignature>> BatchSignatures(
    const EmbeddingSet& set, SignatureKind kind,
    const SignatureParams& params = {});

// p-norm of every record, in record order.
absl::StatusOr<std::vector<double>> RecordNorms(const EmbeddingSet& set,
                                                double p);

}  // namespace embaudit

#endif  // EMBAUDIT_SIGNALS_H_
