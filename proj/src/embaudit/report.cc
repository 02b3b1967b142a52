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

#include "embaudit/report.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "embaudit/emb_data.h"
#include "embaudit/status.h"

namespace embaudit {
namespace {

std::string FullPrecision(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.17g", value);
}

std::string Short(double value) { return absl::StrFormat("%.6g", value); }

}  // namespace

absl::StatusOr<ReportFormat> ParseReportFormat(absl::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  return MakeError(ErrorKind::kConfig,
                   absl::StrCat("unknown report format '", name,
                                "' (expected json or csv)"));
}

absl::string_view ReportExtension(ReportFormat format) {
  return format == ReportFormat::kJson ? ".json" : ".csv";
}

double RoundSignificant(double value) {
  if (!std::isfinite(value) || value == 0.0) return value;
  return std::strtod(Short(value).c_str(), nullptr);
}

nlohmann::json ReportJson(const MetricsReport& report,
                          const RunProvenance& provenance) {
  nlohmann::json j;
  j["attack"] = provenance.attack;
  j["config_digest"] = provenance.config_digest;
  j["seed"] = provenance.seed;
  j["units"] = "fraction";
  j["accuracy"] = RoundSignificant(report.accuracy);
  j["precision"] = RoundSignificant(report.precision);
  j["recall"] = RoundSignificant(report.recall);
  j["eval_count"] = report.true_positives + report.false_positives +
                    report.true_negatives + report.false_negatives;
  j["confusion"] = {{"tp", report.true_positives},
                    {"fp", report.false_positives},
                    {"tn", report.true_negatives},
                    {"fn", report.false_negatives}};
  j["roc_points"] = report.roc.size();
  if (!report.tpr_at_fpr.empty()) {
    nlohmann::json levels = nlohmann::json::array();
    for (const TprAtFpr& t : report.tpr_at_fpr) {
      levels.push_back({{"fpr", RoundSignificant(t.fpr_level)},
                        {"tpr", RoundSignificant(t.tpr)},
                        {"tpr_percent", RoundSignificant(100.0 * t.tpr)}});
    }
    j["tpr_at_fpr"] = std::move(levels);
  }
  if (!provenance.params.empty()) j["params"] = provenance.params;
  if (provenance.runtime_ms.has_value()) {
    j["runtime_ms"] = RoundSignificant(*provenance.runtime_ms);
  }
  return j;
}

std::string RenderReport(const MetricsReport& report,
                         const RunProvenance& provenance,
                         ReportFormat format) {
  if (format == ReportFormat::kJson) {
    return ReportJson(report, provenance).dump(2) + "\n";
  }
  std::string header = "attack,config_digest,seed,accuracy,precision,recall";
  std::string row = absl::StrCat(provenance.attack, ",",
                                 provenance.config_digest, ",", provenance.seed,
                                 ",", Short(report.accuracy), ",",
                                 Short(report.precision), ",",
                                 Short(report.recall));
  for (const TprAtFpr& t : report.tpr_at_fpr) {
    absl::StrAppend(&header, ",tpr_at_fpr_", Short(t.fpr_level));
    absl::StrAppend(&row, ",", Short(t.tpr));
  }
  if (provenance.runtime_ms.has_value()) {
    absl::StrAppend(&header, ",runtime_ms");
    absl::StrAppend(&row, ",", Short(*provenance.runtime_ms));
  }
  return absl::StrCat(header, "\n", row, "\n");
}

std::string RenderRocCsv(const MetricsReport& report) {
  std::string out = "threshold,fpr,tpr\n";
  for (const RocPoint& point : report.roc) {
    absl::StrAppend(&out, FullPrecision(point.threshold), ",",
                    FullPrecision(point.fpr), ",", FullPrecision(point.tpr),
                    "\n");
  }
  return out;
}

absl::Status EmitReport(const MetricsReport& report,
                        const RunProvenance& provenance,
                        const std::filesystem::path& path,
                        ReportFormat format) {
  return WriteFileBytes(path, RenderReport(report, provenance, format));
}

absl::Status WriteRocCsv(const MetricsReport& report,
                         const std::filesystem::path& path) {
  return WriteFileBytes(path, RenderRocCsv(report));
}

std::string RenderUtility(const UtilityResult& result,
                          const RunProvenance& provenance,
                          ReportFormat format) {
  if (format == ReportFormat::kJson) {
    nlohmann::json j;
    j["attack"] = provenance.attack;
    j["config_digest"] = provenance.config_digest;
    j["seed"] = provenance.seed;
    j["metric"] = "knn_accuracy";
    j["similarity"] = "cosine";
    j["k"] = result.k;
    j["accuracy"] = RoundSignificant(result.knn_accuracy);
    j["train_count"] = result.train_count;
    j["test_count"] = result.test_count;
    if (provenance.runtime_ms.has_value()) {
      j["runtime_ms"] = RoundSignificant(*provenance.runtime_ms);
    }
    return j.dump(2) + "\n";
  }
  return absl::StrCat("metric,k,accuracy,train_count,test_count\nknn_accuracy,",
                      result.k, ",", Short(result.knn_accuracy), ",",
                      result.train_count, ",", result.test_count, "\n");
}

absl::Status EmitUtilityReport(const UtilityResult& result,
                               const RunProvenance& provenance,
                               const std::filesystem::path& path,
                               ReportFormat format) {
  return WriteFileBytes(path, RenderUtility(result, provenance, format));
}

}  // namespace embaudit
