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

#include "embaudit/lpla.h"

#include <cmath>
#include <numbers>

#include "absl/strings/str_cat.h"
#include "embaudit/signals.h"
#include "embaudit/status.h"

namespace embaudit {
namespace {

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;
};

absl::StatusOr<SampleMoments> Moments(std::span<const double> values,
                                      absl::string_view side) {
  if (values.size() < 2) {
    return MakeError(ErrorKind::kInsufficientData,
                     absl::StrCat(side, " side has ", values.size(),
                                  " sample(s); need >= 2"));
  }
  for (size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      return MakeError(ErrorKind::kDomain,
                       absl::StrCat(side, " norm ", i, " is not finite"));
    }
  }
  SampleMoments m;
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(values.size());
  for (double v : values) m.variance += (v - m.mean) * (v - m.mean);
  m.variance /= static_cast<double>(values.size() - 1);
  return m;
}

absl::Status CheckPrior(double prior_member) {
  if (!(prior_member > 0.0 && prior_member < 1.0)) {
    return MakeError(ErrorKind::kDomain,
                     absl::StrCat("member prior ", prior_member,
                                  " is outside (0, 1)"));
  }
  return absl::OkStatus();
}

struct EvalNorms {
  std::vector<double> norms;
  std::vector<Membership> truth;
  std::vector<uint64_t> groups;
};

absl::StatusOr<EvalNorms> CollectEvalNorms(const DatasetSplit& split,
                                           double p) {
  EvalNorms eval;
  for (const EmbeddingSet* set : {&split.eval_members, &split.eval_nonmembers}) {
    const Membership truth = set == &split.eval_members
                                 ? Membership::kMember
                                 : Membership::kNonMember;
    for (const EmbeddingRecord& record : set->records()) {
      EMBAUDIT_ASSIGN_OR_RETURN(double norm, PNorm(record.vector, p));
      eval.norms.push_back(norm);
      eval.truth.push_back(truth);
      eval.groups.push_back(record.group_id);
    }
  }
  return eval;
}

}  // namespace

absl::StatusOr<NormModel> FitNormModel(std::span<const double> member_norms,
                                       std::span<const double> nonmember_norms,
                                       double p, double prior_member) {
  EMBAUDIT_RETURN_IF_ERROR(CheckPrior(prior_member));
  EMBAUDIT_ASSIGN_OR_RETURN(SampleMoments member,
                            Moments(member_norms, "member"));
  EMBAUDIT_ASSIGN_OR_RETURN(SampleMoments nonmember,
                            Moments(nonmember_norms, "non-member"));
  if (member.variance == 0.0 || nonmember.variance == 0.0) {
    return MakeError(
        ErrorKind::kDegenerateFit,
        absl::StrCat("zero variance in ",
                     member.variance == 0.0 ? "member" : "non-member",
                     " p-norms (p = ", p, "); the dump has constant norms"));
  }
  NormModel model;
  model.p = p;
  model.member = {member.mean, std::sqrt(member.variance)};
  model.non_member = {nonmember.mean, std::sqrt(nonmember.variance)};
  model.prior_member = prior_member;
  model.member_count = member_norms.size();
  model.non_member_count = nonmember_norms.size();
  return model;
}

double LogNormalDensity(double x, const GaussianParams& params) {
  const double z = (x - params.mean) / params.stddev;
  return -0.5 * z * z - std::log(params.stddev) -
         0.5 * std::log(2.0 * std::numbers::pi);
}

MembershipDecision PosteriorMember(const NormModel& model, double norm_value) {
  const double prior_term =
      model.prior_member == 0.5
          ? 0.0
          : std::log(model.prior_member) - std::log1p(-model.prior_member);
  const double score = LogNormalDensity(norm_value, model.member) -
                       LogNormalDensity(norm_value, model.non_member) +
                       prior_term;
  return DecisionFromScore(score);
}

absl::StatusOr<LplaResult> LplaAttack(const DatasetSplit& split,
                                      const LplaOptions& options) {
  EMBAUDIT_ASSIGN_OR_RETURN(std::vector<double> member_norms,
                            RecordNorms(split.attack_members, options.p));
  const EmbeddingSet& nonmember_source = options.nonmember_fit != nullptr
                                             ? *options.nonmember_fit
                                             : split.attack_nonmembers;
  EMBAUDIT_ASSIGN_OR_RETURN(std::vector<double> nonmember_norms,
                            RecordNorms(nonmember_source, options.p));
  LplaResult result;
  EMBAUDIT_ASSIGN_OR_RETURN(
      result.model, FitNormModel(member_norms, nonmember_norms, options.p,
                                 options.prior_member));
  EMBAUDIT_ASSIGN_OR_RETURN(EvalNorms eval, CollectEvalNorms(split, options.p));
  result.outcome.decisions.reserve(eval.norms.size());
  for (double norm : eval.norms) {
    result.outcome.decisions.push_back(PosteriorMember(result.model, norm));
  }
  result.outcome.truth = std::move(eval.truth);
  result.outcome.groups = std::move(eval.groups);
  return result;
}

absl::StatusOr<ThresholdModel> FitThresholdModel(
    std::span<const double> member_norms,
    std::span<const double> nonmember_norms, double p) {
  EMBAUDIT_ASSIGN_OR_RETURN(SampleMoments member,
                            Moments(member_norms, "member"));
  EMBAUDIT_ASSIGN_OR_RETURN(SampleMoments nonmember,
                            Moments(nonmember_norms, "non-member"));
  ThresholdModel model;
  model.p = p;
  model.member_mean = member.mean;
  model.nonmember_mean = nonmember.mean;
  model.threshold = 0.5 * (member.mean + nonmember.mean);
  return model;
}

MembershipDecision ThresholdDecide(const ThresholdModel& model,
                                   double norm_value) {
  double score = 0.0;
  if (model.member_mean < model.nonmember_mean) {
    score = model.threshold - norm_value;
  } else if (model.member_mean > model.nonmember_mean) {
    score = norm_value - model.threshold;
  }
  return DecisionFromScore(score);
}

absl::StatusOr<ThresholdResult> ThresholdAttack(const DatasetSplit& split,
                                                double p) {
  EMBAUDIT_ASSIGN_OR_RETURN(std::vector<double> member_norms,
                            RecordNorms(split.attack_members, p));
  EMBAUDIT_ASSIGN_OR_RETURN(std::vector<double> nonmember_norms,
                            RecordNorms(split.attack_nonmembers, p));
  ThresholdResult result;
  EMBAUDIT_ASSIGN_OR_RETURN(
      result.model, FitThresholdModel(member_norms, nonmember_norms, p));
  EMBAUDIT_ASSIGN_OR_RETURN(EvalNorms eval, CollectEvalNorms(split, p));
  result.outcome.decisions.reserve(eval.norms.size());
  for (double norm : eval.norms) {
    result.outcome.decisions.push_back(ThresholdDecide(result.model, norm));
  }
  result.outcome.truth = std::move(eval.truth);
  result.outcome.groups = std::move(eval.groups);
  return result;
}

}  // namespace embaudit
