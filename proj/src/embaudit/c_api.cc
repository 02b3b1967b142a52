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

#include "embaudit/embaudit.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "embaudit/audit.h"
#include "embaudit/emb_data.h"
#include "embaudit/evalkit.h"
#include "embaudit/lpla.h"
#include "embaudit/signals.h"
#include "embaudit/status.h"
#include "embaudit/synthlab.h"

struct ea_set {
  embaudit::EmbeddingSet set;
};

struct ea_norm_model {
  embaudit::NormModel model;
};

struct ea_classifier {
  embaudit::MlpClassifier classifier;
};

namespace {

using embaudit::ErrorKind;

thread_local std::string last_error;

ea_status StatusFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat:
      return EA_ERR_FORMAT;
    case ErrorKind::kValidation:
      return EA_ERR_VALIDATION;
    case ErrorKind::kDomain:
      return EA_ERR_DOMAIN;
    case ErrorKind::kInsufficientData:
      return EA_ERR_INSUFFICIENT_DATA;
    case ErrorKind::kDegenerateFit:
      return EA_ERR_DEGENERATE_FIT;
    case ErrorKind::kTraining:
      return EA_ERR_TRAINING;
    case ErrorKind::kDivergence:
      return EA_ERR_DIVERGENCE;
    case ErrorKind::kMetric:
      return EA_ERR_METRIC;
    case ErrorKind::kConfig:
      return EA_ERR_CONFIG;
    case ErrorKind::kIo:
      return EA_ERR_IO;
    case ErrorKind::kInternal:
      return EA_ERR_INTERNAL;
  }
  return EA_ERR_INTERNAL;
}

ea_status Fail(ea_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

ea_status Report(const absl::Status& status) {
  if (status.ok()) return EA_OK;
  const auto kind = embaudit::GetErrorKind(status);
  return Fail(kind ? StatusFor(*kind) : EA_ERR_INTERNAL,
              std::string(status.message()));
}

ea_status NullArgument(const char* name) {
  return Fail(EA_ERR_INVALID_ARGUMENT, std::string(name) + " is null");
}

// Runs body, converting escaped exceptions into EA_ERR_INTERNAL.
template <typename Body>
ea_status Guard(Body&& body) {
  try {
    return body();
  } catch (const std::bad_alloc&) {
    return Fail(EA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(EA_ERR_INTERNAL, e.what());
  }
}

bool ValidLabel(uint8_t label) {
  return label == EA_LABEL_NON_MEMBER || label == EA_LABEL_MEMBER ||
         label == EA_LABEL_UNKNOWN;
}

absl::StatusOr<embaudit::AuditConfig> ConfigFor(const ea_run_options& options) {
  EMBAUDIT_ASSIGN_OR_RETURN(embaudit::AuditConfig config,
                            embaudit::LoadAuditConfig(options.config_path));
  if (options.out_dir != nullptr) config.output_dir = options.out_dir;
  if (options.has_seed) config.seed = options.seed;
  if (options.format != nullptr) {
    auto format = embaudit::ParseReportFormat(options.format);
    if (!format.ok()) {
      return embaudit::MakeError(
          ErrorKind::kConfig,
          absl::StrCat("--format: ", format.status().message()));
    }
    config.report_format = *format;
  }
  return config;
}

}  // namespace

extern "C" {

const char* ea_version(void) { return "0.1.0"; }

const char* ea_last_error(void) { return last_error.c_str(); }

const char* ea_status_name(ea_status status) {
  switch (status) {
    case EA_OK:
      return "ok";
    case EA_ERR_FORMAT:
      return "format";
    case EA_ERR_VALIDATION:
      return "validation";
    case EA_ERR_DOMAIN:
      return "domain";
    case EA_ERR_INSUFFICIENT_DATA:
      return "insufficient_data";
    case EA_ERR_DEGENERATE_FIT:
      return "degenerate_fit";
    case EA_ERR_TRAINING:
      return "training";
    case EA_ERR_DIVERGENCE:
      return "divergence";
    case EA_ERR_METRIC:
      return "metric";
    case EA_ERR_CONFIG:
      return "config";
    case EA_ERR_IO:
      return "io";
    case EA_ERR_INTERNAL:
      return "internal";
    case EA_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
  }
  return "unknown";
}

int ea_exit_code_for(ea_status status) {
  switch (status) {
    case EA_OK:
      return 0;
    case EA_ERR_IO:
      return 3;
    case EA_ERR_INTERNAL:
      return 4;
    default:
      return 2;
  }
}

ea_status ea_set_create(uint32_t dimension, ea_set** out) {
  if (out == nullptr) return NullArgument("out");
  return Guard([&] {
    auto set = embaudit::EmbeddingSet::Create(dimension, {});
    if (!set.ok()) return Report(set.status());
    *out = new ea_set{*std::move(set)};
    return EA_OK;
  });
}

ea_status ea_set_append(ea_set* set, uint64_t group_id, uint8_t label,
                        const float* values, size_t count) {
  if (set == nullptr) return NullArgument("set");
  if (values == nullptr && count > 0) return NullArgument("values");
  if (!ValidLabel(label)) {
    return Fail(EA_ERR_VALIDATION, "label must be 0, 1 or 255");
  }
  return Guard([&] {
    embaudit::EmbeddingRecord record;
    record.group_id = group_id;
    record.label = static_cast<embaudit::Membership>(label);
    record.vector.assign(values, values + count);
    return Report(set->set.Append(std::move(record)));
  });
}

ea_status ea_set_read(const char* path, ea_set** out) {
  if (path == nullptr) return NullArgument("path");
  if (out == nullptr) return NullArgument("out");
  return Guard([&] {
    auto set = embaudit::ReadDump(path, embaudit::DumpFormatForPath(path));
    if (!set.ok()) return Report(set.status());
    *out = new ea_set{*std::move(set)};
    return EA_OK;
  });
}

ea_status ea_set_write(const ea_set* set, const char* path) {
  if (set == nullptr) return NullArgument("set");
  if (path == nullptr) return NullArgument("path");
  return Guard([&] {
    return Report(embaudit::WriteDump(set->set, path,
                                      embaudit::DumpFormatForPath(path)));
  });
}

void ea_set_free(ea_set* set) { delete set; }

uint32_t ea_set_dimension(const ea_set* set) {
  return set == nullptr ? 0 : static_cast<uint32_t>(set->set.dimension());
}

size_t ea_set_size(const ea_set* set) {
  return set == nullptr ? 0 : set->set.size();
}

ea_status ea_set_record(const ea_set* set, size_t index, uint64_t* group_id,
                        uint8_t* label, const float** values) {
  if (set == nullptr) return NullArgument("set");
  if (index >= set->set.size()) {
    return Fail(EA_ERR_DOMAIN, "record index " + std::to_string(index) +
                                   " out of range");
  }
  const embaudit::EmbeddingRecord& record = set->set[index];
  if (group_id != nullptr) *group_id = record.group_id;
  if (label != nullptr) *label = static_cast<uint8_t>(record.label);
  if (values != nullptr) *values = record.vector.data();
  return EA_OK;
}

ea_status ea_p_norm(const float* values, size_t count, double p, double* out) {
  if (values == nullptr && count > 0) return NullArgument("values");
  if (out == nullptr) return NullArgument("out");
  return Guard([&] {
    auto norm = embaudit::PNorm(std::span<const float>(values, count), p);
    if (!norm.ok()) return Report(norm.status());
    *out = *norm;
    return EA_OK;
  });
}

ea_status ea_norm_model_fit(const double* member_norms, size_t member_count,
                            const double* nonmember_norms,
                            size_t nonmember_count, double p,
                            double prior_member, ea_norm_model** out) {
  if (member_norms == nullptr && member_count > 0) {
    return NullArgument("member_norms");
  }
  if (nonmember_norms == nullptr && nonmember_count > 0) {
    return NullArgument("nonmember_norms");
  }
  if (out == nullptr) return NullArgument("out");
  return Guard([&] {
    auto model = embaudit::FitNormModel(
        std::span<const double>(member_norms, member_count),
        std::span<const double>(nonmember_norms, nonmember_count), p,
        prior_member);
    if (!model.ok()) return Report(model.status());
    *out = new ea_norm_model{*model};
    return EA_OK;
  });
}

ea_status ea_norm_model_params(const ea_norm_model* model, double* member_mean,
                               double* member_stddev, double* nonmember_mean,
                               double* nonmember_stddev) {
  if (model == nullptr) return NullArgument("model");
  if (member_mean != nullptr) *member_mean = model->model.member.mean;
  if (member_stddev != nullptr) *member_stddev = model->model.member.stddev;
  if (nonmember_mean != nullptr) *nonmember_mean = model->model.non_member.mean;
  if (nonmember_stddev != nullptr) {
    *nonmember_stddev = model->model.non_member.stddev;
  }
  return EA_OK;
}

ea_status ea_norm_model_posterior(const ea_norm_model* model,
                                  double norm_value, double* posterior,
                                  uint8_t* verdict) {
  if (model == nullptr) return NullArgument("model");
  const embaudit::MembershipDecision decision =
      embaudit::PosteriorMember(model->model, norm_value);
  if (posterior != nullptr) *posterior = decision.posterior;
  if (verdict != nullptr) *verdict = static_cast<uint8_t>(decision.verdict);
  return EA_OK;
}

void ea_norm_model_free(ea_norm_model* model) { delete model; }

ea_status ea_compute_metrics(const double* scores, const uint8_t* verdicts,
                             const uint8_t* truths, size_t count,
                             const double* fpr_levels, size_t level_count,
                             ea_metrics* out, double* tpr_out) {
  if (count > 0 && (scores == nullptr || verdicts == nullptr ||
                    truths == nullptr)) {
    return NullArgument("scores, verdicts or truths");
  }
  if (level_count > 0 && (fpr_levels == nullptr || tpr_out == nullptr)) {
    return NullArgument("fpr_levels or tpr_out");
  }
  if (out == nullptr) return NullArgument("out");
  return Guard([&] {
    embaudit::ScoredDecisions decisions;
    decisions.entries.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (!ValidLabel(verdicts[i]) || !ValidLabel(truths[i])) {
        return Fail(EA_ERR_METRIC, "entry " + std::to_string(i) +
                                       " has an invalid label");
      }
      decisions.entries.push_back(
          {scores[i], static_cast<embaudit::Membership>(verdicts[i]),
           static_cast<embaudit::Membership>(truths[i])});
    }
    auto metrics = embaudit::ComputeMetrics(
        decisions, std::vector<double>(fpr_levels, fpr_levels + level_count));
    if (!metrics.ok()) return Report(metrics.status());
    out->accuracy = metrics->accuracy;
    out->precision = metrics->precision;
    out->recall = metrics->recall;
    out->tp = metrics->true_positives;
    out->fp = metrics->false_positives;
    out->tn = metrics->true_negatives;
    out->fn = metrics->false_negatives;
    for (size_t i = 0; i < level_count; ++i) {
      tpr_out[i] = metrics->tpr_at_fpr[i].tpr;
    }
    return EA_OK;
  });
}

double ea_bayes_optimal_accuracy(double member_mean, double member_stddev,
                                 double nonmember_mean,
                                 double nonmember_stddev,
                                 double prior_member) {
  return embaudit::BayesOptimalAccuracy({member_mean, member_stddev},
                                        {nonmember_mean, nonmember_stddev},
                                        prior_member);
}

ea_status ea_knn_utility(const ea_set* train, const uint32_t* train_classes,
                         const ea_set* test, const uint32_t* test_classes,
                         size_t k, double* accuracy) {
  if (train == nullptr || test == nullptr) return NullArgument("set");
  if ((train_classes == nullptr && train->set.size() > 0) ||
      (test_classes == nullptr && test->set.size() > 0)) {
    return NullArgument("classes");
  }
  if (accuracy == nullptr) return NullArgument("accuracy");
  return Guard([&] {
    auto labeled_train = embaudit::LabeledEmbeddingSet::Create(
        train->set, std::vector<uint32_t>(
                        train_classes, train_classes + train->set.size()));
    if (!labeled_train.ok()) return Report(labeled_train.status());
    auto labeled_test = embaudit::LabeledEmbeddingSet::Create(
        test->set,
        std::vector<uint32_t>(test_classes, test_classes + test->set.size()));
    if (!labeled_test.ok()) return Report(labeled_test.status());
    auto result = embaudit::KnnUtility(*labeled_train, *labeled_test, k);
    if (!result.ok()) return Report(result.status());
    *accuracy = *result;
    return EA_OK;
  });
}

ea_status ea_classifier_load(const char* path, ea_classifier** out) {
  if (path == nullptr) return NullArgument("path");
  if (out == nullptr) return NullArgument("out");
  return Guard([&] {
    auto classifier = embaudit::LoadCheckpoint(path);
    if (!classifier.ok()) return Report(classifier.status());
    *out = new ea_classifier{*std::move(classifier)};
    return EA_OK;
  });
}

size_t ea_classifier_input_dimension(const ea_classifier* classifier) {
  return classifier == nullptr ? 0 : classifier->classifier.input_width();
}

ea_status ea_classifier_predict(const ea_classifier* classifier,
                                const double* features, size_t count,
                                double* member_probability) {
  if (classifier == nullptr) return NullArgument("classifier");
  if (features == nullptr && count > 0) return NullArgument("features");
  if (member_probability == nullptr) return NullArgument("member_probability");
  return Guard([&] {
    auto decision = classifier->classifier.Predict(
        std::span<const double>(features, count));
    if (!decision.ok()) return Report(decision.status());
    *member_probability = decision->posterior;
    return EA_OK;
  });
}

void ea_classifier_free(ea_classifier* classifier) { delete classifier; }

ea_status ea_cmd_audit(const ea_run_options* options) {
  if (options == nullptr || options->config_path == nullptr) {
    return NullArgument("config_path");
  }
  return Guard([&] {
    auto config = ConfigFor(*options);
    if (!config.ok()) return Report(config.status());
    return Report(embaudit::RunAudit(*config).status());
  });
}

ea_status ea_cmd_sweep_p(const ea_run_options* options, char** csv_out) {
  if (options == nullptr || options->config_path == nullptr) {
    return NullArgument("config_path");
  }
  return Guard([&] {
    auto config = ConfigFor(*options);
    if (!config.ok()) return Report(config.status());
    auto csv = embaudit::RunSweepP(*config);
    if (!csv.ok()) return Report(csv.status());
    if (csv_out != nullptr) {
      char* copy = static_cast<char*>(std::malloc(csv->size() + 1));
      if (copy == nullptr) return Fail(EA_ERR_INTERNAL, "out of memory");
      std::memcpy(copy, csv->c_str(), csv->size() + 1);
      *csv_out = copy;
    }
    return EA_OK;
  });
}

ea_status ea_cmd_split(const ea_run_options* options) {
  if (options == nullptr || options->config_path == nullptr) {
    return NullArgument("config_path");
  }
  return Guard([&] {
    auto config = ConfigFor(*options);
    if (!config.ok()) return Report(config.status());
    return Report(embaudit::RunSplit(*config));
  });
}

ea_status ea_cmd_synth(const ea_run_options* options, double* bayes_accuracy) {
  if (options == nullptr || options->config_path == nullptr) {
    return NullArgument("config_path");
  }
  return Guard([&] {
    auto spec = embaudit::LoadSynthSpec(options->config_path);
    if (!spec.ok()) return Report(spec.status());
    if (options->out_dir != nullptr) spec->output_dir = options->out_dir;
    if (options->has_seed) spec->seed = options->seed;
    if (options->format != nullptr) {
      auto format = embaudit::ParseDumpFormat(options->format);
      if (!format.ok()) {
        return Fail(EA_ERR_CONFIG, absl::StrCat("--format: ",
                                                format.status().message()));
      }
      spec->format = *format;
    }
    auto result = embaudit::RunSynth(*spec);
    if (!result.ok()) return Report(result.status());
    if (bayes_accuracy != nullptr) *bayes_accuracy = result->bayes_accuracy;
    return EA_OK;
  });
}

ea_status ea_cmd_histogram(const char* const* dump_paths, size_t dump_count,
                           double p, size_t bins, const char* out_path) {
  if (dump_paths == nullptr && dump_count > 0) return NullArgument("dump_paths");
  if (out_path == nullptr) return NullArgument("out_path");
  return Guard([&] {
    std::vector<std::filesystem::path> dumps;
    for (size_t i = 0; i < dump_count; ++i) {
      if (dump_paths[i] == nullptr) return NullArgument("dump path");
      dumps.emplace_back(dump_paths[i]);
    }
    return Report(embaudit::RunHistogram(dumps, p, bins, out_path).status());
  });
}

void ea_string_free(char* text) { std::free(text); }

}  // extern "C"
