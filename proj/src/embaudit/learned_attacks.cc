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

#include "embaudit/learned_attacks.h"

#include <numeric>

#include "absl/strings/str_cat.h"
#include "embaudit/random.h"
#include "embaudit/signals.h"
#include "embaudit/status.h"

namespace embaudit {
namespace {

std::vector<double> ToDouble(const std::vector<float>& v) {
  return std::vector<double>(v.begin(), v.end());
}

MlpSpec MakeSpec(const LearnedAttackConfig& config, size_t input_width) {
  MlpSpec spec;
  spec.layer_widths.push_back(input_width);
  spec.layer_widths.insert(spec.layer_widths.end(), config.hidden.begin(),
                           config.hidden.end());
  spec.layer_widths.push_back(1);
  spec.activation = config.activation;
  spec.epochs = config.epochs;
  spec.batch_size = config.batch_size;
  spec.learning_rate = config.learning_rate;
  spec.momentum = config.momentum;
  spec.seed = config.seed;
  return spec;
}

struct LabeledRows {
  std::vector<std::vector<double>> rows;
  std::vector<Membership> labels;
  std::vector<uint64_t> groups;
};

void AppendRecords(const EmbeddingSet& set, Membership label,
                   LabeledRows& out) {
  for (const EmbeddingRecord& record : set.records()) {
    out.rows.push_back(ToDouble(record.vector));
    out.labels.push_back(label);
    out.groups.push_back(record.group_id);
  }
}

absl::Status AppendSimilarities(const EmbeddingSet& set, Membership label,
                                size_t expected_views, LabeledRows& out) {
  EMBAUDIT_ASSIGN_OR_RETURN(
      std::vector<AttackSignature> signatures,
      BatchSignatures(set, SignatureKind::kPairwiseSimilarity));
  const size_t expected_width =
      expected_views * (expected_views - (expected_views > 0 ? 1 : 0)) / 2;
  for (AttackSignature& signature : signatures) {
    if (expected_views > 0 && signature.values.size() != expected_width) {
      return MakeError(
          ErrorKind::kValidation,
          absl::StrCat("group ", signature.source_group, " yields ",
                       signature.values.size(), " similarities; ",
                       expected_views, " views per group expected"));
    }
    out.rows.push_back(std::move(signature.values));
    out.labels.push_back(label);
    out.groups.push_back(signature.source_group);
  }
  return absl::OkStatus();
}

absl::StatusOr<AttackOutcome> ScoreRows(const MlpClassifier& classifier,
                                        const LabeledRows& eval) {
  AttackOutcome outcome;
  outcome.decisions.reserve(eval.rows.size());
  for (const std::vector<double>& row : eval.rows) {
    EMBAUDIT_ASSIGN_OR_RETURN(MembershipDecision d, classifier.Predict(row));
    outcome.decisions.push_back(d);
  }
  outcome.truth = eval.labels;
  outcome.groups = eval.groups;
  return outcome;
}

}  // namespace

absl::StatusOr<LearnedAttackResult> RunFeMi(const DatasetSplit& split,
                                            const FeMiConfig& config) {
  LabeledRows train;
  AppendRecords(split.attack_members, Membership::kMember, train);
  AppendRecords(split.attack_nonmembers, Membership::kNonMember, train);
  LabeledRows eval;
  AppendRecords(split.eval_members, Membership::kMember, eval);
  AppendRecords(split.eval_nonmembers, Membership::kNonMember, eval);

  const MlpSpec spec = MakeSpec(config, split.attack_members.dimension());
  EMBAUDIT_ASSIGN_OR_RETURN(MlpClassifier classifier,
                            TrainMlp(spec, train.rows, train.labels));
  EMBAUDIT_ASSIGN_OR_RETURN(AttackOutcome outcome, ScoreRows(classifier, eval));
  return LearnedAttackResult{std::move(outcome), std::move(classifier)};
}

absl::StatusOr<LearnedAttackResult> RunEncoderMi(
    const DatasetSplit& split, const EncoderMiConfig& config) {
  if (config.views == 1) {
    return MakeError(ErrorKind::kConfig,
                     "EncoderMI needs at least 2 views per group");
  }
  LabeledRows train;
  EMBAUDIT_RETURN_IF_ERROR(AppendSimilarities(
      split.attack_members, Membership::kMember, config.views, train));
  EMBAUDIT_RETURN_IF_ERROR(AppendSimilarities(
      split.attack_nonmembers, Membership::kNonMember, config.views, train));
  LabeledRows eval;
  EMBAUDIT_RETURN_IF_ERROR(AppendSimilarities(
      split.eval_members, Membership::kMember, config.views, eval));
  EMBAUDIT_RETURN_IF_ERROR(AppendSimilarities(
      split.eval_nonmembers, Membership::kNonMember, config.views, eval));
  const size_t width = train.rows.front().size();
  for (size_t i = 0; i < eval.rows.size(); ++i) {
    if (eval.rows[i].size() != width) {
      return MakeError(ErrorKind::kValidation,
                       absl::StrCat("eval group ", eval.groups[i],
                                    " has a different view count than the "
                                    "attack groups"));
    }
  }

  const MlpSpec spec = MakeSpec(config, width);
  EMBAUDIT_ASSIGN_OR_RETURN(MlpClassifier classifier,
                            TrainMlp(spec, train.rows, train.labels));
  EMBAUDIT_ASSIGN_OR_RETURN(AttackOutcome outcome, ScoreRows(classifier, eval));
  return LearnedAttackResult{std::move(outcome), std::move(classifier)};
}

absl::StatusOr<SdmiResult> RunSdmi(const DatasetSplit& split,
                                   const SdmiConfig& config,
                                   const EmbeddingSet* anchor_pool) {
  const EmbeddingSet& pool =
      anchor_pool != nullptr ? *anchor_pool : split.attack_nonmembers;
  if (config.anchors == 0) {
    return MakeError(ErrorKind::kConfig, "SD-MI needs at least one anchor");
  }
  if (pool.size() < config.anchors) {
    return MakeError(ErrorKind::kConfig,
                     absl::StrCat("SD-MI wants ", config.anchors,
                                  " anchors but the pool holds ", pool.size(),
                                  " records"));
  }
  if (pool.dimension() != split.attack_members.dimension()) {
    return MakeError(ErrorKind::kValidation,
                     "anchor pool dimension differs from the split");
  }
  std::vector<size_t> indices(pool.size());
  std::iota(indices.begin(), indices.end(), size_t{0});
  CounterRng anchor_rng(DeriveSeed(config.seed, "sdmi/anchors"));
  Shuffle(std::span<size_t>(indices), anchor_rng);
  indices.resize(config.anchors);
  std::vector<std::vector<float>> anchors;
  anchors.reserve(indices.size());
  for (size_t i : indices) anchors.push_back(pool[i].vector);

  auto collect = [&](const EmbeddingSet& set, Membership label,
                     LabeledRows& targets, LabeledRows& signatures)
      -> absl::Status {
    for (const EmbeddingRecord& record : set.records()) {
      EMBAUDIT_ASSIGN_OR_RETURN(AttackSignature signature,
                                SdmiSignature(record.vector, anchors));
      targets.rows.push_back(ToDouble(record.vector));
      targets.labels.push_back(label);
      targets.groups.push_back(record.group_id);
      signatures.rows.push_back(std::move(signature.values));
    }
    return absl::OkStatus();
  };
  LabeledRows train_targets, train_signatures;
  EMBAUDIT_RETURN_IF_ERROR(collect(split.attack_members, Membership::kMember,
                                   train_targets, train_signatures));
  EMBAUDIT_RETURN_IF_ERROR(collect(split.attack_nonmembers,
                                   Membership::kNonMember, train_targets,
                                   train_signatures));

  MlpSpec selector_spec;
  selector_spec.layer_widths.push_back(split.attack_members.dimension());
  selector_spec.layer_widths.insert(selector_spec.layer_widths.end(),
                                    config.selector_hidden.begin(),
                                    config.selector_hidden.end());
  selector_spec.layer_widths.push_back(config.anchors);
  selector_spec.activation = config.selector_activation;
  selector_spec.epochs = config.epochs;
  selector_spec.batch_size = config.batch_size;
  selector_spec.learning_rate = config.learning_rate;
  selector_spec.momentum = config.momentum;
  selector_spec.seed = DeriveSeed(config.seed, "sdmi/selector");

  LearnedAttackConfig attacker_config;
  attacker_config.hidden = config.attacker_hidden;
  attacker_config.activation = config.attacker_activation;
  attacker_config.epochs = config.epochs;
  attacker_config.batch_size = config.batch_size;
  attacker_config.learning_rate = config.learning_rate;
  attacker_config.momentum = config.momentum;
  attacker_config.seed = DeriveSeed(config.seed, "sdmi/attacker");
  const MlpSpec attacker_spec = MakeSpec(attacker_config, config.anchors);

  EMBAUDIT_ASSIGN_OR_RETURN(
      SdmiAttacker attacker,
      TrainSdmi(selector_spec, attacker_spec, train_targets.rows,
                train_signatures.rows, train_targets.labels));

  // Eval signatures are built one record at a time to bound memory.
  AttackOutcome outcome;
  for (const EmbeddingSet* set : {&split.eval_members, &split.eval_nonmembers}) {
    const Membership truth = set == &split.eval_members
                                 ? Membership::kMember
                                 : Membership::kNonMember;
    for (const EmbeddingRecord& record : set->records()) {
      EMBAUDIT_ASSIGN_OR_RETURN(AttackSignature signature,
                                SdmiSignature(record.vector, anchors));
      EMBAUDIT_ASSIGN_OR_RETURN(
          double logit,
          attacker.Logit(ToDouble(record.vector), signature.values));
      outcome.decisions.push_back(DecisionFromScore(logit));
      outcome.truth.push_back(truth);
      outcome.groups.push_back(record.group_id);
    }
  }
  return SdmiResult{std::move(outcome), std::move(attacker),
                    std::move(indices)};
}

}  // namespace embaudit
