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

// Report serialization. JSON reports use sorted keys and 6 significant
// digits, so identical inputs produce identical bytes. ROC tables keep full
// precision for re-analysis.

#ifndef EMBAUDIT_REPORT_H_
#define EMBAUDIT_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "embaudit/evalkit.h"
#include "json.hpp"

namespace embaudit {

enum class ReportFormat { kJson, kCsv };

absl::StatusOr<ReportFormat> ParseReportFormat(absl::string_view name);
absl::string_view ReportExtension(ReportFormat format);

struct RunProvenance {
  std::string attack;
  std::string config_digest;
  uint64_t seed = 0;
  std::optional<double> runtime_ms;
  // Attack-specific parameters (fitted means, p, widths...).
  nlohmann::json params = nlohmann::json::object();
};

// Rounds to 6 significant digits.
double RoundSignificant(double value);

nlohmann::json ReportJson(const MetricsReport& report,
                          const RunProvenance& provenance);
std::string RenderReport(const MetricsReport& report,
                         const RunProvenance& provenance, ReportFormat format);
// `threshold,fpr,tpr`, one row per ROC point.
std::string RenderRocCsv(const MetricsReport& report);

absl::Status EmitReport(const MetricsReport& report,
                        const RunProvenance& provenance,
                        const std::filesystem::path& path,
                        ReportFormat format);
absl::Status WriteRocCsv(const MetricsReport& report,
                         const std::filesystem::path& path);

struct UtilityResult {
  double knn_accuracy = 0.0;
  size_t k = kDefaultKnnK;
  size_t train_count = 0;
  size_t test_count = 0;
};

std::string RenderUtility(const UtilityResult& result,
                          const RunProvenance& provenance, ReportFormat format);
absl::Status EmitUtilityReport(const UtilityResult& result,
                               const RunProvenance& provenance,
                               const std::filesystem::path& path,
                               ReportFormat format);

}  // namespace embaudit

#endif  // EMBAUDIT_REPORT_H_
