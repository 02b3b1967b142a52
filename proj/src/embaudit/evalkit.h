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

#ifndef EMBAUDIT_EVALKIT_H_
#define EMBAUDIT_EVALKIT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "embaudit/decision.h"
#include "embaudit/emb_data.h"

namespace embaudit {

inline constexpr double kDefaultFprLevel = 0.001;
inline constexpr size_t kDefaultKnnK = 20;

struct RocPoint {
  // Entries with score >= threshold are called members; the first point
  // uses +inf.
  double threshold = std::numeric_limits<double>::infinity();
  double fpr = 0.0;
  double tpr = 0.0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct TprAtFpr {
  double fpr_level = 0.0;
  double tpr = 0.0;

  friend bool operator==(const TprAtFpr&, const TprAtFpr&) = default;
};

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;  // member is the positive class; 0 if none called
  double recall = 0.0;
  size_t true_positives = 0;
  size_t false_positives = 0;
  size_t true_negatives = 0;
  size_t false_negatives = 0;
  // Empty when the truth labels hold a single class.
  std::vector<RocPoint> roc;
  std::vector<TprAtFpr> tpr_at_fpr;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Confusion metrics from the verdicts; ROC from a sweep over every distinct
// score (tied scores move together); TPR at each FPR level is the largest
// ROC tpr whose fpr does not exceed the level. Requesting FPR levels with a
// single truth class is a kMetric error.
absl::StatusOr<MetricsReport> ComputeMetrics(const ScoredDecisions& decisions,
                                             std::span<const double> fpr_levels);

// Checks the ROC shape invariants; used as an internal consistency gate.
absl::Status CheckRocInvariants(const std::vector<RocPoint>& roc);

struct LabeledEmbeddingSet {
  EmbeddingSet set;
  std::vector<uint32_t> classes;  // one downstream class per record

  static absl::StatusOr<LabeledEmbeddingSet> Create(
      EmbeddingSet set, std::vector<uint32_t> classes);
};

// Majority class among the k most cosine-similar train records. Distance
// ties at the k boundary keep the lower train index; vote ties pick the
// smallest class. A zero vector has similarity 0 to everything.
absl::StatusOr<std::vector<uint32_t>> KnnPredict(
    const LabeledEmbeddingSet& train, const EmbeddingSet& test, size_t k);

// Fraction of test records whose class KnnPredict gets right.
absl::StatusOr<double> KnnUtility(const LabeledEmbeddingSet& train,
                                  const LabeledEmbeddingSet& test, size_t k);

// One unsigned class id per line.
absl::StatusOr<std::vector<uint32_t>> ReadClassLabels(
    const std::filesystem::path& path);

}  // namespace embaudit

#endif  // EMBAUDIT_EVALKIT_H_
