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

// End-to-end audit orchestration behind the command-line tool: config
// parsing, dump loading, attack runs and report files.
//
// Config is a JSON object. Relative paths resolve against the config file's
// directory. Keys (defaults in brackets):
//   member_dump, nonmember_dump       required dump paths (.csv => CSV)
//   aux_dump                          SD-MI anchor pool [attack non-members]
//   random_nonmember_dump             LpLA non-member fit set [attack split]
//   attacks                           subset of lpla, threshold, fe_mi,
//                                     encodermi, sdmi [["lpla"]]
//   p_values [[2]]  fpr_levels [[0.001]]  prior_member [0.5]
//   split      {"attack_fraction": f} [0.2] or the four group counts
//              attack_members, attack_nonmembers, eval_members,
//              eval_nonmembers
//   seed [0]  output_dir ["audit_out"]  report_format ["json"]
//   report_runtime [false]  save_checkpoints [false]  histogram_bins [50]
//   fe_mi, encodermi      {hidden, activation, epochs, batch_size,
//                          learning_rate, momentum}; encodermi also views
//                          [fe_mi: 128,64 relu 500 128 1e-3 0.9;
//                           encodermi: epochs 200, views 10]
//   sdmi                  {anchors [2000], selector_hidden [[256]],
//                          attacker_hidden [[256,128,64,32]], epochs [200],
//                          batch_size [128], learning_rate, momentum}
//   utility               {train_dump, train_classes, test_dump,
//                          test_classes, k [20]}
//
// Seeds: every consumer draws from DeriveSeed(seed, label) with labels
// "split", "fe_mi", "encodermi" and "sdmi".

#ifndef EMBAUDIT_AUDIT_H_
#define EMBAUDIT_AUDIT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "embaudit/emb_data.h"
#include "embaudit/learned_attacks.h"
#include "embaudit/report.h"
#include "embaudit/synthlab.h"
#include "json.hpp"

namespace embaudit {

enum class AttackKind { kLpla, kThreshold, kFeMi, kEncoderMi, kSdmi };

absl::string_view AttackKindName(AttackKind kind);
absl::StatusOr<AttackKind> ParseAttackKind(absl::string_view name);

struct UtilityConfig {
  std::filesystem::path train_dump;
  std::filesystem::path train_classes;
  std::filesystem::path test_dump;
  std::filesystem::path test_classes;
  size_t k = kDefaultKnnK;
};

struct AuditConfig {
  std::filesystem::path base_dir;  // for resolving relative paths
  std::filesystem::path member_dump;
  std::filesystem::path nonmember_dump;
  std::optional<std::filesystem::path> aux_dump;
  std::optional<std::filesystem::path> random_nonmember_dump;
  std::vector<AttackKind> attacks = {AttackKind::kLpla};
  std::vector<double> p_values = {2.0};
  std::vector<double> fpr_levels = {kDefaultFprLevel};
  double prior_member = 0.5;
  double attack_fraction = 0.2;
  std::optional<SplitCounts> split_counts;
  uint64_t seed = 0;
  std::filesystem::path output_dir = "audit_out";
  ReportFormat report_format = ReportFormat::kJson;
  bool report_runtime = false;
  bool save_checkpoints = false;
  size_t histogram_bins = 50;
  FeMiConfig fe_mi;
  EncoderMiConfig encodermi;
  SdmiConfig sdmi;
  std::optional<UtilityConfig> utility;

  std::filesystem::path Resolve(const std::filesystem::path& p) const;
};

absl::StatusOr<AuditConfig> ParseAuditConfig(
    const nlohmann::json& json, const std::filesystem::path& base_dir = {});
absl::StatusOr<AuditConfig> LoadAuditConfig(const std::filesystem::path& path);

// Every setting that influences results, with defaults filled in. The
// output directory and report formatting flags are excluded.
nlohmann::json CanonicalConfig(const AuditConfig& config);
// 16 hex digits of FNV-1a over the compact canonical JSON.
std::string ConfigDigest(const AuditConfig& config);

// "lpla_p2", "threshold_p0.5", "fe_mi", ...
std::string AttackRunName(AttackKind kind, double p);

struct AttackSummary {
  std::string name;
  MetricsReport metrics;
};

struct AuditSummary {
  std::string config_digest;
  std::vector<AttackSummary> attacks;
  std::optional<UtilityResult> utility;
};

absl::StatusOr<DatasetSplit> LoadSplit(const AuditConfig& config);

// Runs every selected attack (each p for lpla / threshold) and writes one
// report and ROC table per run plus summary.json.
absl::StatusOr<AuditSummary> RunAudit(const AuditConfig& config);

// LpLA once per p on one split; writes sweep_p.csv. Returns the CSV text.
absl::StatusOr<std::string> RunSweepP(const AuditConfig& config);

// Writes the four split views as EMB1 dumps.
absl::Status RunSplit(const AuditConfig& config);

struct PopulationSpec {
  double mean = 10.0;
  double stddev = 1.0;
  size_t count = 0;
};

struct ViewsSpec {
  size_t count = 10;
  double member_jitter = 0.0;
  double nonmember_jitter = 0.0;
};

// Synthetic population recipe (JSON keys match field names; populations
// are objects {mean, stddev, count}; views {count, member_jitter,
// nonmember_jitter}; sparse_support {min, max}).
struct SynthSpec {
  size_t dimension = 128;
  uint64_t seed = 0;
  double prior_member = 0.5;
  PopulationSpec member;
  PopulationSpec nonmember;
  std::optional<PopulationSpec> aux;
  std::optional<ViewsSpec> views;
  std::optional<SparseSupport> sparse_support;
  DumpFormat format = DumpFormat::kBinary;
  std::filesystem::path output_dir = "synth_out";
};

absl::StatusOr<SynthSpec> ParseSynthSpec(
    const nlohmann::json& json, const std::filesystem::path& base_dir = {});
absl::StatusOr<SynthSpec> LoadSynthSpec(const std::filesystem::path& path);

struct SynthResult {
  double bayes_accuracy = 0.0;
  std::vector<std::filesystem::path> written;
};

// Writes member / non-member (and aux) dumps; group ids are disjoint across
// the files.
absl::StatusOr<SynthResult> RunSynth(const SynthSpec& spec);

// Bins the p-norms of every record in `dumps` over their common range and
// writes `bin_low,bin_high,member,non_member,unknown`.
absl::StatusOr<std::string> RunHistogram(
    const std::vector<std::filesystem::path>& dumps, double p, size_t bins,
    const std::filesystem::path& out_path);

}  // namespace embaudit

#endif  // EMBAUDIT_AUDIT_H_
