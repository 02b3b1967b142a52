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

// Lp-norm likelihood attack: fit one Gaussian to member p-norms and one to
// non-member p-norms, then score a sample by its Bayes posterior. Also the
// midpoint-threshold baseline over the same norms.

#ifndef EMBAUDIT_LPLA_H_
#define EMBAUDIT_LPLA_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "embaudit/decision.h"
#include "embaudit/emb_data.h"

namespace embaudit {

inline constexpr double kDefaultP = 2.0;
inline constexpr double kDefaultPriorMember = 0.5;

struct GaussianParams {
  double mean = 0.0;
  double stddev = 1.0;
};

struct NormModel {
  double p = kDefaultP;
  GaussianParams member;
  GaussianParams non_member;
  double prior_member = kDefaultPriorMember;
  size_t member_count = 0;
  size_t non_member_count = 0;
};

// Sample mean and unbiased (n - 1) variance on each side.
absl::StatusOr<NormModel> FitNormModel(std::span<const double> member_norms,
                                       std::span<const double> nonmember_norms,
                                       double p, double prior_member);

double LogNormalDensity(double x, const GaussianParams& params);

// score = log L_m - log L_nm + log(P(m) / P(nm)); posterior is the logistic
// of the score. Exact ties (score == 0) are non-members.
MembershipDecision PosteriorMember(const NormModel& model, double norm_value);

struct LplaOptions {
  double p = kDefaultP;
  double prior_member = kDefaultPriorMember;
  // When set, non-member norms are fitted on this set (e.g. embeddings of
  // random inputs) instead of split.attack_nonmembers.
  const EmbeddingSet* nonmember_fit = nullptr;
};

struct LplaResult {
  NormModel model;
  AttackOutcome outcome;
};

// Fits on the attack views, scores every eval record.
absl::StatusOr<LplaResult> LplaAttack(const DatasetSplit& split,
                                      const LplaOptions& options = {});

struct ThresholdModel {
  double p = kDefaultP;
  double member_mean = 0.0;
  double nonmember_mean = 0.0;
  double threshold = 0.0;
};

absl::StatusOr<ThresholdModel> FitThresholdModel(
    std::span<const double> member_norms,
    std::span<const double> nonmember_norms, double p);

// Score is the distance to the threshold, positive on the member mean's
// side. A norm exactly at the threshold is a non-member.
MembershipDecision ThresholdDecide(const ThresholdModel& model,
                                   double norm_value);

struct ThresholdResult {
  ThresholdModel model;
  AttackOutcome outcome;
};

absl::StatusOr<ThresholdResult> ThresholdAttack(const DatasetSplit& split,
                                                double p = kDefaultP);

}  // namespace embaudit

#endif  // EMBAUDIT_LPLA_H_
