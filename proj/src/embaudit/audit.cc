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

#include "embaudit/audit.h"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <set>
#include <system_error>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "embaudit/evalkit.h"
#include "embaudit/lpla.h"
#include "embaudit/random.h"
#include "embaudit/signals.h"
#include "embaudit/status.h"
#include "embaudit/synthlab.h"

namespace embaudit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

absl::Status ConfigError(absl::string_view field, absl::string_view problem) {
  return MakeError(ErrorKind::kConfig,
                   absl::StrCat("config field '", field, "': ", problem));
}

// Typed, strict access to the members of one JSON object. Keys that are
// never read are reported by RejectUnknown.
class Fields {
 public:
  Fields(const json& object, std::string prefix)
      : object_(object), prefix_(std::move(prefix)) {}

  absl::Status CheckObject() const {
    if (!object_.is_object()) {
      return ConfigError(prefix_.empty() ? "<root>" : prefix_,
                         "expected an object");
    }
    return absl::OkStatus();
  }

  bool Has(const std::string& key) {
    seen_.insert(key);
    return object_.contains(key) && !object_.at(key).is_null();
  }

  const json& At(const std::string& key) const { return object_.at(key); }

  std::string Name(absl::string_view key) const {
    return prefix_.empty() ? std::string(key) : absl::StrCat(prefix_, ".", key);
  }

  absl::Status Number(const std::string& key, double& out) {
    if (!Has(key)) return absl::OkStatus();
    const json& v = At(key);
    if (!v.is_number()) return ConfigError(Name(key), "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) return ConfigError(Name(key), "must be finite");
    return absl::OkStatus();
  }

  template <typename T>
  absl::Status Unsigned(const std::string& key, T& out) {
    if (!Has(key)) return absl::OkStatus();
    const json& v = At(key);
    if (!v.is_number_unsigned() &&
        !(v.is_number_integer() && v.get<int64_t>() >= 0)) {
      return ConfigError(Name(key), "expected a non-negative integer");
    }
    out = static_cast<T>(v.get<uint64_t>());
    return absl::OkStatus();
  }

  absl::Status Bool(const std::string& key, bool& out) {
    if (!Has(key)) return absl::OkStatus();
    if (!At(key).is_boolean()) return ConfigError(Name(key), "expected a bool");
    out = At(key).get<bool>();
    return absl::OkStatus();
  }

  absl::Status String(const std::string& key, std::string& out) {
    if (!Has(key)) return absl::OkStatus();
    if (!At(key).is_string()) {
      return ConfigError(Name(key), "expected a string");
    }
    out = At(key).get<std::string>();
    return absl::OkStatus();
  }

  absl::Status Path(const std::string& key, std::optional<fs::path>& out) {
    if (!Has(key)) return absl::OkStatus();
    std::string s;
    EMBAUDIT_RETURN_IF_ERROR(String(key, s));
    if (s.empty()) return ConfigError(Name(key), "path is empty");
    out = fs::path(s);
    return absl::OkStatus();
  }

  absl::Status RequiredPath(const std::string& key, fs::path& out) {
    std::optional<fs::path> p;
    EMBAUDIT_RETURN_IF_ERROR(Path(key, p));
    if (!p.has_value()) return ConfigError(Name(key), "is required");
    out = *p;
    return absl::OkStatus();
  }

  absl::Status NumberList(const std::string& key, std::vector<double>& out) {
    if (!Has(key)) return absl::OkStatus();
    const json& v = At(key);
    if (!v.is_array()) return ConfigError(Name(key), "expected an array");
    out.clear();
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        return ConfigError(absl::StrCat(Name(key), "[", i, "]"),
                           "expected a finite number");
      }
      out.push_back(v[i].get<double>());
    }
    return absl::OkStatus();
  }

  absl::Status SizeList(const std::string& key, std::vector<size_t>& out) {
    if (!Has(key)) return absl::OkStatus();
    const json& v = At(key);
    if (!v.is_array()) return ConfigError(Name(key), "expected an array");
    out.clear();
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer() || v[i].get<int64_t>() <= 0) {
        return ConfigError(absl::StrCat(Name(key), "[", i, "]"),
                           "expected a positive integer");
      }
      out.push_back(v[i].get<size_t>());
    }
    return absl::OkStatus();
  }

  absl::Status RejectUnknown() const {
    for (const auto& [key, value] : object_.items()) {
      if (!seen_.contains(key)) return ConfigError(Name(key), "unknown key");
    }
    return absl::OkStatus();
  }

 private:
  const json& object_;
  std::string prefix_;
  std::set<std::string> seen_;
};

absl::Status ParseLearned(Fields& fields, LearnedAttackConfig& config) {
  EMBAUDIT_RETURN_IF_ERROR(fields.SizeList("hidden", config.hidden));
  std::string activation(ActivationName(config.activation));
  EMBAUDIT_RETURN_IF_ERROR(fields.String("activation", activation));
  auto parsed = ParseActivation(activation);
  if (!parsed.ok()) {
    return ConfigError(fields.Name("activation"), parsed.status().message());
  }
  config.activation = *parsed;
  EMBAUDIT_RETURN_IF_ERROR(fields.Unsigned("epochs", config.epochs));
  EMBAUDIT_RETURN_IF_ERROR(fields.Unsigned("batch_size", config.batch_size));
  EMBAUDIT_RETURN_IF_ERROR(fields.Number("learning_rate", config.learning_rate));
  EMBAUDIT_RETURN_IF_ERROR(fields.Number("momentum", config.momentum));
  if (config.epochs == 0) return ConfigError(fields.Name("epochs"), "must be >= 1");
  if (config.batch_size == 0) {
    return ConfigError(fields.Name("batch_size"), "must be >= 1");
  }
  if (!(config.learning_rate > 0.0)) {
    return ConfigError(fields.Name("learning_rate"), "must be > 0");
  }
  if (!(config.momentum >= 0.0 && config.momentum < 1.0)) {
    return ConfigError(fields.Name("momentum"), "must lie in [0, 1)");
  }
  return absl::OkStatus();
}

json LearnedJson(const LearnedAttackConfig& config) {
  return {{"hidden", config.hidden},
          {"activation", ActivationName(config.activation)},
          {"epochs", config.epochs},
          {"batch_size", config.batch_size},
          {"learning_rate", config.learning_rate},
          {"momentum", config.momentum}};
}

std::string FormatP(double p) { return absl::StrFormat("%g", p); }

absl::Status EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return MakeError(ErrorKind::kIo, absl::StrCat("cannot create directory '",
                                                  dir.string(),
                                                  "': ", ec.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<json> ReadJsonFile(const fs::path& path) {
  EMBAUDIT_ASSIGN_OR_RETURN(std::string text, ReadFileBytes(path));
  json parsed = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    return MakeError(ErrorKind::kConfig,
                     absl::StrCat("'", path.string(), "' is not valid JSON"));
  }
  return parsed;
}

absl::StatusOr<EmbeddingSet> LoadDump(const AuditConfig& config,
                                      const fs::path& path) {
  const fs::path resolved = config.Resolve(path);
  return ReadDump(resolved, DumpFormatForPath(resolved));
}

json TprJson(const MetricsReport& metrics) {
  json levels = json::array();
  for (const TprAtFpr& t : metrics.tpr_at_fpr) {
    levels.push_back({{"fpr", RoundSignificant(t.fpr_level)},
                      {"tpr", RoundSignificant(t.tpr)},
                      {"tpr_percent", RoundSignificant(100.0 * t.tpr)}});
  }
  return levels;
}

json GaussianJson(const GaussianParams& g) {
  return {{"mean", RoundSignificant(g.mean)},
          {"stddev", RoundSignificant(g.stddev)}};
}

struct AttackRun {
  std::string name;
  AttackOutcome outcome;
  json params = json::object();
};

}  // namespace

absl::string_view AttackKindName(AttackKind kind) {
  switch (kind) {
    case AttackKind::kLpla:
      return "lpla";
    case AttackKind::kThreshold:
      return "threshold";
    case AttackKind::kFeMi:
      return "fe_mi";
    case AttackKind::kEncoderMi:
      return "encodermi";
    case AttackKind::kSdmi:
      return "sdmi";
  }
  return "unknown";
}

absl::StatusOr<AttackKind> ParseAttackKind(absl::string_view name) {
  for (AttackKind kind : {AttackKind::kLpla, AttackKind::kThreshold,
                          AttackKind::kFeMi, AttackKind::kEncoderMi,
                          AttackKind::kSdmi}) {
    if (AttackKindName(kind) == name) return kind;
  }
  return MakeError(ErrorKind::kConfig,
                   absl::StrCat("unknown attack '", name,
                                "' (expected lpla, threshold, fe_mi, "
                                "encodermi or sdmi)"));
}

fs::path AuditConfig::Resolve(const fs::path& p) const {
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

absl::StatusOr<AuditConfig> ParseAuditConfig(const json& root,
                                              const fs::path& base_dir) {
  Fields fields(root, "");
  EMBAUDIT_RETURN_IF_ERROR(fields.CheckObject());
  AuditConfig config;
  config.base_dir = base_dir;
  EMBAUDIT_RETURN_IF_ERROR(fields.RequiredPath("member_dump", config.member_dump));
  EMBAUDIT_RETURN_IF_ERROR(
      fields.RequiredPath("nonmember_dump", config.nonmember_dump));
  EMBAUDIT_RETURN_IF_ERROR(fields.Path("aux_dump", config.aux_dump));
  EMBAUDIT_RETURN_IF_ERROR(
      fields.Path("random_nonmember_dump", config.random_nonmember_dump));

  if (fields.Has("attacks")) {
    const json& attacks = fields.At("attacks");
    if (!attacks.is_array()) return ConfigError("attacks", "expected an array");
    config.attacks.clear();
    for (size_t i = 0; i < attacks.size(); ++i) {
      const std::string field = absl::StrCat("attacks[", i, "]");
      if (!attacks[i].is_string()) {
        return ConfigError(field, "expected an attack name");
      }
      auto kind = ParseAttackKind(attacks[i].get<std::string>());
      if (!kind.ok()) return ConfigError(field, kind.status().message());
      if (std::find(config.attacks.begin(), config.attacks.end(), *kind) !=
          config.attacks.end()) {
        return ConfigError(field, "attack listed twice");
      }
      config.attacks.push_back(*kind);
    }
  }
  if (config.attacks.empty()) {
    return ConfigError("attacks", "select at least one attack");
  }

  EMBAUDIT_RETURN_IF_ERROR(fields.NumberList("p_values", config.p_values));
  EMBAUDIT_RETURN_IF_ERROR(fields.NumberList("fpr_levels", config.fpr_levels));
  EMBAUDIT_RETURN_IF_ERROR(fields.Number("prior_member", config.prior_member));
  const bool norm_attack =
      std::any_of(config.attacks.begin(), config.attacks.end(), [](AttackKind k) {
        return k == AttackKind::kLpla || k == AttackKind::kThreshold;
      });
  if (norm_attack && config.p_values.empty()) {
    return ConfigError("p_values", "must be non-empty for lpla / threshold");
  }
  for (size_t i = 0; i < config.p_values.size(); ++i) {
    if (config.p_values[i] < 0.0) {
      return ConfigError(absl::StrCat("p_values[", i, "]"), "must be >= 0");
    }
  }
  for (size_t i = 0; i < config.fpr_levels.size(); ++i) {
    if (!(config.fpr_levels[i] >= 0.0 && config.fpr_levels[i] <= 1.0)) {
      return ConfigError(absl::StrCat("fpr_levels[", i, "]"),
                         "must lie in [0, 1]");
    }
  }
  if (!(config.prior_member > 0.0 && config.prior_member < 1.0)) {
    return ConfigError("prior_member", "must lie in (0, 1)");
  }

  if (fields.Has("split")) {
    Fields split(fields.At("split"), "split");
    EMBAUDIT_RETURN_IF_ERROR(split.CheckObject());
    const bool has_fraction = split.Has("attack_fraction");
    const bool has_counts = split.Has("attack_members") ||
                            split.Has("attack_nonmembers") ||
                            split.Has("eval_members") ||
                            split.Has("eval_nonmembers");
    if (has_fraction && has_counts) {
      return ConfigError("split",
                         "give either attack_fraction or group counts");
    }
    if (has_counts) {
      SplitCounts counts;
      EMBAUDIT_RETURN_IF_ERROR(split.Unsigned("attack_members", counts.attack_members));
      EMBAUDIT_RETURN_IF_ERROR(
          split.Unsigned("attack_nonmembers", counts.attack_nonmembers));
      EMBAUDIT_RETURN_IF_ERROR(split.Unsigned("eval_members", counts.eval_members));
      EMBAUDIT_RETURN_IF_ERROR(
          split.Unsigned("eval_nonmembers", counts.eval_nonmembers));
      if (counts.attack_members == 0 || counts.attack_nonmembers == 0 ||
          counts.eval_members == 0 || counts.eval_nonmembers == 0) {
        return ConfigError("split", "all four group counts must be >= 1");
      }
      config.split_counts = counts;
    }
    EMBAUDIT_RETURN_IF_ERROR(
        split.Number("attack_fraction", config.attack_fraction));
    EMBAUDIT_RETURN_IF_ERROR(split.RejectUnknown());
  }
  if (!(config.attack_fraction > 0.0 && config.attack_fraction < 1.0)) {
    return ConfigError("split.attack_fraction", "must lie in (0, 1)");
  }

  EMBAUDIT_RETURN_IF_ERROR(fields.Unsigned("seed", config.seed));
  std::optional<fs::path> output_dir;
  EMBAUDIT_RETURN_IF_ERROR(fields.Path("output_dir", output_dir));
  if (output_dir.has_value()) config.output_dir = *output_dir;
  config.output_dir = config.Resolve(config.output_dir);
  std::string report_format = "json";
  EMBAUDIT_RETURN_IF_ERROR(fields.String("report_format", report_format));
  auto format = ParseReportFormat(report_format);
  if (!format.ok()) return ConfigError("report_format", format.status().message());
  config.report_format = *format;
  EMBAUDIT_RETURN_IF_ERROR(fields.Bool("report_runtime", config.report_runtime));
  EMBAUDIT_RETURN_IF_ERROR(
      fields.Bool("save_checkpoints", config.save_checkpoints));
  EMBAUDIT_RETURN_IF_ERROR(fields.Unsigned("histogram_bins", config.histogram_bins));
  if (config.histogram_bins == 0) {
    return ConfigError("histogram_bins", "must be >= 1");
  }

  if (fields.Has("fe_mi")) {
    Fields sub(fields.At("fe_mi"), "fe_mi");
    EMBAUDIT_RETURN_IF_ERROR(sub.CheckObject());
    EMBAUDIT_RETURN_IF_ERROR(ParseLearned(sub, config.fe_mi));
    EMBAUDIT_RETURN_IF_ERROR(sub.RejectUnknown());
  }
  if (fields.Has("encodermi")) {
    Fields sub(fields.At("encodermi"), "encodermi");
    EMBAUDIT_RETURN_IF_ERROR(sub.CheckObject());
    EMBAUDIT_RETURN_IF_ERROR(ParseLearned(sub, config.encodermi));
    EMBAUDIT_RETURN_IF_ERROR(sub.Unsigned("views", config.encodermi.views));
    if (config.encodermi.views == 1) {
      return ConfigError("encodermi.views", "must be 0 (any) or >= 2");
    }
    EMBAUDIT_RETURN_IF_ERROR(sub.RejectUnknown());
  }
  if (fields.Has("sdmi")) {
    Fields sub(fields.At("sdmi"), "sdmi");
    EMBAUDIT_RETURN_IF_ERROR(sub.CheckObject());
    SdmiConfig& s = config.sdmi;
    EMBAUDIT_RETURN_IF_ERROR(sub.Unsigned("anchors", s.anchors));
    EMBAUDIT_RETURN_IF_ERROR(sub.SizeList("selector_hidden", s.selector_hidden));
    EMBAUDIT_RETURN_IF_ERROR(sub.SizeList("attacker_hidden", s.attacker_hidden));
    EMBAUDIT_RETURN_IF_ERROR(sub.Unsigned("epochs", s.epochs));
    EMBAUDIT_RETURN_IF_ERROR(sub.Unsigned("batch_size", s.batch_size));
    EMBAUDIT_RETURN_IF_ERROR(sub.Number("learning_rate", s.learning_rate));
    EMBAUDIT_RETURN_IF_ERROR(sub.Number("momentum", s.momentum));
    if (s.anchors == 0) return ConfigError("sdmi.anchors", "must be >= 1");
    if (s.epochs == 0) return ConfigError("sdmi.epochs", "must be >= 1");
    if (s.batch_size == 0) return ConfigError("sdmi.batch_size", "must be >= 1");
    if (!(s.learning_rate > 0.0)) {
      return ConfigError("sdmi.learning_rate", "must be > 0");
    }
    if (!(s.momentum >= 0.0 && s.momentum < 1.0)) {
      return ConfigError("sdmi.momentum", "must lie in [0, 1)");
    }
    EMBAUDIT_RETURN_IF_ERROR(sub.RejectUnknown());
  }
  if (fields.Has("utility")) {
    Fields sub(fields.At("utility"), "utility");
    EMBAUDIT_RETURN_IF_ERROR(sub.CheckObject());
    UtilityConfig u;
    EMBAUDIT_RETURN_IF_ERROR(sub.RequiredPath("train_dump", u.train_dump));
    EMBAUDIT_RETURN_IF_ERROR(sub.RequiredPath("train_classes", u.train_classes));
    EMBAUDIT_RETURN_IF_ERROR(sub.RequiredPath("test_dump", u.test_dump));
    EMBAUDIT_RETURN_IF_ERROR(sub.RequiredPath("test_classes", u.test_classes));
    EMBAUDIT_RETURN_IF_ERROR(sub.Unsigned("k", u.k));
    if (u.k == 0) return ConfigError("utility.k", "must be >= 1");
    EMBAUDIT_RETURN_IF_ERROR(sub.RejectUnknown());
    config.utility = std::move(u);
  }
  EMBAUDIT_RETURN_IF_ERROR(fields.RejectUnknown());

  std::vector<std::pair<std::string, fs::path>> paths = {
      {"member_dump", config.member_dump},
      {"nonmember_dump", config.nonmember_dump}};
  if (config.aux_dump) paths.emplace_back("aux_dump", *config.aux_dump);
  if (config.random_nonmember_dump) {
    paths.emplace_back("random_nonmember_dump", *config.random_nonmember_dump);
  }
  if (config.utility) {
    paths.emplace_back("utility.train_dump", config.utility->train_dump);
    paths.emplace_back("utility.train_classes", config.utility->train_classes);
    paths.emplace_back("utility.test_dump", config.utility->test_dump);
    paths.emplace_back("utility.test_classes", config.utility->test_classes);
  }
  for (size_t i = 0; i < paths.size(); ++i) {
    for (size_t j = i + 1; j < paths.size(); ++j) {
      if (config.Resolve(paths[i].second).lexically_normal() ==
          config.Resolve(paths[j].second).lexically_normal()) {
        return ConfigError(paths[j].first,
                           absl::StrCat("same path as ", paths[i].first));
      }
    }
  }
  return config;
}

absl::StatusOr<AuditConfig> LoadAuditConfig(const fs::path& path) {
  EMBAUDIT_ASSIGN_OR_RETURN(json parsed, ReadJsonFile(path));
  return ParseAuditConfig(parsed, path.parent_path());
}

json CanonicalConfig(const AuditConfig& config) {
  json j;
  j["member_dump"] = config.member_dump.generic_string();
  j["nonmember_dump"] = config.nonmember_dump.generic_string();
  j["aux_dump"] =
      config.aux_dump ? json(config.aux_dump->generic_string()) : json(nullptr);
  j["random_nonmember_dump"] =
      config.random_nonmember_dump
          ? json(config.random_nonmember_dump->generic_string())
          : json(nullptr);
  json attacks = json::array();
  for (AttackKind kind : config.attacks) attacks.push_back(AttackKindName(kind));
  j["attacks"] = std::move(attacks);
  j["p_values"] = config.p_values;
  j["fpr_levels"] = config.fpr_levels;
  j["prior_member"] = config.prior_member;
  if (config.split_counts) {
    j["split"] = {{"attack_members", config.split_counts->attack_members},
                  {"attack_nonmembers", config.split_counts->attack_nonmembers},
                  {"eval_members", config.split_counts->eval_members},
                  {"eval_nonmembers", config.split_counts->eval_nonmembers}};
  } else {
    j["split"] = {{"attack_fraction", config.attack_fraction}};
  }
  j["seed"] = config.seed;
  j["fe_mi"] = LearnedJson(config.fe_mi);
  json encodermi = LearnedJson(config.encodermi);
  encodermi["views"] = config.encodermi.views;
  j["encodermi"] = std::move(encodermi);
  j["sdmi"] = {{"anchors", config.sdmi.anchors},
               {"selector_hidden", config.sdmi.selector_hidden},
               {"attacker_hidden", config.sdmi.attacker_hidden},
               {"epochs", config.sdmi.epochs},
               {"batch_size", config.sdmi.batch_size},
               {"learning_rate", config.sdmi.learning_rate},
               {"momentum", config.sdmi.momentum}};
  if (config.utility) {
    j["utility"] = {{"train_dump", config.utility->train_dump.generic_string()},
                    {"train_classes",
                     config.utility->train_classes.generic_string()},
                    {"test_dump", config.utility->test_dump.generic_string()},
                    {"test_classes", config.utility->test_classes.generic_string()},
                    {"k", config.utility->k}};
  } else {
    j["utility"] = nullptr;
  }
  return j;
}

std::string ConfigDigest(const AuditConfig& config) {
  return absl::StrFormat("%016x", Fnv1a64(CanonicalConfig(config).dump()));
}

std::string AttackRunName(AttackKind kind, double p) {
  if (kind == AttackKind::kLpla || kind == AttackKind::kThreshold) {
    return absl::StrCat(AttackKindName(kind), "_p", FormatP(p));
  }
  return std::string(AttackKindName(kind));
}

absl::StatusOr<DatasetSplit> LoadSplit(const AuditConfig& config) {
  EMBAUDIT_ASSIGN_OR_RETURN(EmbeddingSet members,
                            LoadDump(config, config.member_dump));
  EMBAUDIT_ASSIGN_OR_RETURN(EmbeddingSet nonmembers,
                            LoadDump(config, config.nonmember_dump));
  const uint64_t split_seed = DeriveSeed(config.seed, "split");
  if (config.split_counts) {
    return MakeSplit(members, nonmembers, *config.split_counts, split_seed);
  }
  return MakeSplit(members, nonmembers, config.attack_fraction, split_seed);
}

absl::StatusOr<AuditSummary> RunAudit(const AuditConfig& config) {
  using Clock = std::chrono::steady_clock;
  EMBAUDIT_ASSIGN_OR_RETURN(DatasetSplit split, LoadSplit(config));
  std::optional<EmbeddingSet> aux;
  if (config.aux_dump) {
    EMBAUDIT_ASSIGN_OR_RETURN(aux, LoadDump(config, *config.aux_dump));
  }
  std::optional<EmbeddingSet> random_nonmembers;
  if (config.random_nonmember_dump) {
    EMBAUDIT_ASSIGN_OR_RETURN(random_nonmembers,
                              LoadDump(config, *config.random_nonmember_dump));
  }
  EMBAUDIT_RETURN_IF_ERROR(EnsureDirectory(config.output_dir));

  AuditSummary summary;
  summary.config_digest = ConfigDigest(config);
  const absl::string_view ext = ReportExtension(config.report_format);
  json summary_attacks = json::array();

  auto finish = [&](AttackRun run, Clock::time_point start) -> absl::Status {
    EMBAUDIT_ASSIGN_OR_RETURN(
        MetricsReport metrics,
        ComputeMetrics(run.outcome.Scored(), config.fpr_levels));
    EMBAUDIT_RETURN_IF_ERROR(CheckRocInvariants(metrics.roc));
    RunProvenance provenance;
    provenance.attack = run.name;
    provenance.config_digest = summary.config_digest;
    provenance.seed = config.seed;
    provenance.params = std::move(run.params);
    if (config.report_runtime) {
      provenance.runtime_ms =
          std::chrono::duration<double, std::milli>(Clock::now() - start)
              .count();
    }
    EMBAUDIT_RETURN_IF_ERROR(
        EmitReport(metrics, provenance,
                   config.output_dir / absl::StrCat(run.name, ext),
                   config.report_format));
    EMBAUDIT_RETURN_IF_ERROR(WriteRocCsv(
        metrics, config.output_dir / absl::StrCat(run.name, "_roc.csv")));
    json entry = {{"attack", run.name},
                  {"accuracy", RoundSignificant(metrics.accuracy)},
                  {"precision", RoundSignificant(metrics.precision)},
                  {"recall", RoundSignificant(metrics.recall)}};
    if (!metrics.tpr_at_fpr.empty()) entry["tpr_at_fpr"] = TprJson(metrics);
    summary_attacks.push_back(std::move(entry));
    summary.attacks.push_back({run.name, std::move(metrics)});
    return absl::OkStatus();
  };

  for (AttackKind kind : config.attacks) {
    switch (kind) {
      case AttackKind::kLpla:
        for (double p : config.p_values) {
          const auto start = Clock::now();
          LplaOptions options;
          options.p = p;
          options.prior_member = config.prior_member;
          if (random_nonmembers) options.nonmember_fit = &*random_nonmembers;
          EMBAUDIT_ASSIGN_OR_RETURN(LplaResult result, LplaAttack(split, options));
          AttackRun run{AttackRunName(kind, p), std::move(result.outcome)};
          run.params = {
              {"p", p},
              {"prior_member", config.prior_member},
              {"member", GaussianJson(result.model.member)},
              {"non_member", GaussianJson(result.model.non_member)},
              {"fit_counts",
               {result.model.member_count, result.model.non_member_count}},
              {"nonmember_fit_source",
               random_nonmembers ? "random_nonmember_dump" : "attack_split"}};
          EMBAUDIT_RETURN_IF_ERROR(finish(std::move(run), start));
        }
        break;
      case AttackKind::kThreshold:
        for (double p : config.p_values) {
          const auto start = Clock::now();
          EMBAUDIT_ASSIGN_OR_RETURN(ThresholdResult result,
                                    ThresholdAttack(split, p));
          AttackRun run{AttackRunName(kind, p), std::move(result.outcome)};
          run.params = {{"p", p},
                        {"member_mean", RoundSignificant(result.model.member_mean)},
                        {"nonmember_mean",
                         RoundSignificant(result.model.nonmember_mean)},
                        {"threshold", RoundSignificant(result.model.threshold)}};
          EMBAUDIT_RETURN_IF_ERROR(finish(std::move(run), start));
        }
        break;
      case AttackKind::kFeMi: {
        const auto start = Clock::now();
        FeMiConfig fe_mi = config.fe_mi;
        fe_mi.seed = DeriveSeed(config.seed, "fe_mi");
        EMBAUDIT_ASSIGN_OR_RETURN(LearnedAttackResult result,
                                  RunFeMi(split, fe_mi));
        if (config.save_checkpoints) {
          EMBAUDIT_RETURN_IF_ERROR(SaveCheckpoint(
              result.classifier, config.output_dir / "fe_mi.mlp"));
        }
        AttackRun run{AttackRunName(kind, 0), std::move(result.outcome)};
        run.params = {{"layer_widths", result.classifier.network().widths()},
                      {"epochs", fe_mi.epochs},
                      {"batch_size", fe_mi.batch_size}};
        EMBAUDIT_RETURN_IF_ERROR(finish(std::move(run), start));
        break;
      }
      case AttackKind::kEncoderMi: {
        const auto start = Clock::now();
        EncoderMiConfig encodermi = config.encodermi;
        encodermi.seed = DeriveSeed(config.seed, "encodermi");
        EMBAUDIT_ASSIGN_OR_RETURN(LearnedAttackResult result,
                                  RunEncoderMi(split, encodermi));
        if (config.save_checkpoints) {
          EMBAUDIT_RETURN_IF_ERROR(SaveCheckpoint(
              result.classifier, config.output_dir / "encodermi.mlp"));
        }
        AttackRun run{AttackRunName(kind, 0), std::move(result.outcome)};
        run.params = {{"layer_widths", result.classifier.network().widths()},
                      {"epochs", encodermi.epochs},
                      {"batch_size", encodermi.batch_size},
                      {"views", encodermi.views},
                      {"similarity", "cosine"},
                      {"similarity_sort", kSimilaritySortOrder}};
        EMBAUDIT_RETURN_IF_ERROR(finish(std::move(run), start));
        break;
      }
      case AttackKind::kSdmi: {
        const auto start = Clock::now();
        SdmiConfig sdmi = config.sdmi;
        sdmi.seed = DeriveSeed(config.seed, "sdmi");
        EMBAUDIT_ASSIGN_OR_RETURN(
            SdmiResult result, RunSdmi(split, sdmi, aux ? &*aux : nullptr));
        if (config.save_checkpoints) {
          EMBAUDIT_RETURN_IF_ERROR(SaveCheckpoint(
              result.attacker.attacker(), config.output_dir / "sdmi_attacker.mlp"));
          MlpSpec selector_spec;
          selector_spec.layer_widths = result.attacker.selector().widths();
          selector_spec.activation = result.attacker.selector().activation();
          EMBAUDIT_RETURN_IF_ERROR(SaveCheckpoint(
              MlpClassifier(selector_spec, result.attacker.target_standardizer(),
                            result.attacker.selector()),
              config.output_dir / "sdmi_selector.mlp"));
        }
        AttackRun run{AttackRunName(kind, 0), std::move(result.outcome)};
        run.params = {
            {"anchors", sdmi.anchors},
            {"anchor_source", aux ? "aux_dump" : "attack_nonmembers"},
            {"selector_widths", result.attacker.selector().widths()},
            {"attacker_widths", result.attacker.attacker().network().widths()},
            {"epochs", sdmi.epochs},
            {"batch_size", sdmi.batch_size}};
        EMBAUDIT_RETURN_IF_ERROR(finish(std::move(run), start));
        break;
      }
    }
  }

  json summary_json;
  summary_json["config_digest"] = summary.config_digest;
  summary_json["seed"] = config.seed;
  summary_json["units"] = "fraction";
  summary_json["attacks"] = std::move(summary_attacks);
  summary_json["config"] = CanonicalConfig(config);
  summary_json["split"] = {{"attack_members", split.attack_members.size()},
                           {"attack_nonmembers", split.attack_nonmembers.size()},
                           {"eval_members", split.eval_members.size()},
                           {"eval_nonmembers", split.eval_nonmembers.size()}};

  if (config.utility) {
    const auto start = Clock::now();
    const UtilityConfig& u = *config.utility;
    EMBAUDIT_ASSIGN_OR_RETURN(EmbeddingSet train_set, LoadDump(config, u.train_dump));
    EMBAUDIT_ASSIGN_OR_RETURN(std::vector<uint32_t> train_classes,
                              ReadClassLabels(config.Resolve(u.train_classes)));
    EMBAUDIT_ASSIGN_OR_RETURN(EmbeddingSet test_set, LoadDump(config, u.test_dump));
    EMBAUDIT_ASSIGN_OR_RETURN(std::vector<uint32_t> test_classes,
                              ReadClassLabels(config.Resolve(u.test_classes)));
    EMBAUDIT_ASSIGN_OR_RETURN(
        LabeledEmbeddingSet train,
        LabeledEmbeddingSet::Create(std::move(train_set), std::move(train_classes)));
    EMBAUDIT_ASSIGN_OR_RETURN(
        LabeledEmbeddingSet test,
        LabeledEmbeddingSet::Create(std::move(test_set), std::move(test_classes)));
    UtilityResult utility;
    utility.k = u.k;
    utility.train_count = train.set.size();
    utility.test_count = test.set.size();
    EMBAUDIT_ASSIGN_OR_RETURN(utility.knn_accuracy, KnnUtility(train, test, u.k));
    RunProvenance provenance;
    provenance.attack = "knn_utility";
    provenance.config_digest = summary.config_digest;
    provenance.seed = config.seed;
    if (config.report_runtime) {
      provenance.runtime_ms =
          std::chrono::duration<double, std::milli>(Clock::now() - start)
              .count();
    }
    EMBAUDIT_RETURN_IF_ERROR(EmitUtilityReport(
        utility, provenance,
        config.output_dir / absl::StrCat("knn_utility", ext),
        config.report_format));
    summary_json["utility"] = {{"knn_accuracy",
                                RoundSignificant(utility.knn_accuracy)},
                               {"k", utility.k}};
    summary.utility = utility;
  }

  EMBAUDIT_RETURN_IF_ERROR(WriteFileBytes(config.output_dir / "summary.json",
                                          summary_json.dump(2) + "\n"));
  return summary;
}

absl::StatusOr<std::string> RunSweepP(const AuditConfig& config) {
  if (config.p_values.size() < 2) {
    return ConfigError("p_values", "a sweep needs at least 2 values");
  }
  EMBAUDIT_ASSIGN_OR_RETURN(DatasetSplit split, LoadSplit(config));
  std::optional<EmbeddingSet> random_nonmembers;
  if (config.random_nonmember_dump) {
    EMBAUDIT_ASSIGN_OR_RETURN(random_nonmembers,
                              LoadDump(config, *config.random_nonmember_dump));
  }
  std::string csv = "p,accuracy";
  for (double level : config.fpr_levels) {
    absl::StrAppend(&csv, ",tpr_at_fpr_", absl::StrFormat("%.6g", level));
  }
  csv.push_back('\n');
  for (double p : config.p_values) {
    LplaOptions options;
    options.p = p;
    options.prior_member = config.prior_member;
    if (random_nonmembers) options.nonmember_fit = &*random_nonmembers;
    EMBAUDIT_ASSIGN_OR_RETURN(LplaResult result, LplaAttack(split, options));
    EMBAUDIT_ASSIGN_OR_RETURN(
        MetricsReport metrics,
        ComputeMetrics(result.outcome.Scored(), config.fpr_levels));
    absl::StrAppend(&csv, FormatP(p), ",",
                    absl::StrFormat("%.6g", metrics.accuracy));
    for (const TprAtFpr& t : metrics.tpr_at_fpr) {
      absl::StrAppend(&csv, ",", absl::StrFormat("%.6g", t.tpr));
    }
    csv.push_back('\n');
  }
  EMBAUDIT_RETURN_IF_ERROR(EnsureDirectory(config.output_dir));
  EMBAUDIT_RETURN_IF_ERROR(
      WriteFileBytes(config.output_dir / "sweep_p.csv", csv));
  return csv;
}

absl::Status RunSplit(const AuditConfig& config) {
  EMBAUDIT_ASSIGN_OR_RETURN(DatasetSplit split, LoadSplit(config));
  EMBAUDIT_RETURN_IF_ERROR(EnsureDirectory(config.output_dir));
  const std::pair<const char*, const EmbeddingSet*> views[] = {
      {"attack_members.emb1", &split.attack_members},
      {"attack_nonmembers.emb1", &split.attack_nonmembers},
      {"eval_members.emb1", &split.eval_members},
      {"eval_nonmembers.emb1", &split.eval_nonmembers}};
  for (const auto& [name, set] : views) {
    EMBAUDIT_RETURN_IF_ERROR(
        WriteDump(*set, config.output_dir / name, DumpFormat::kBinary));
  }
  return absl::OkStatus();
}

namespace {

absl::Status ParsePopulation(Fields& parent, const std::string& key,
                             std::optional<PopulationSpec>& out) {
  if (!parent.Has(key)) return absl::OkStatus();
  Fields fields(parent.At(key), key);
  EMBAUDIT_RETURN_IF_ERROR(fields.CheckObject());
  PopulationSpec population;
  EMBAUDIT_RETURN_IF_ERROR(fields.Number("mean", population.mean));
  EMBAUDIT_RETURN_IF_ERROR(fields.Number("stddev", population.stddev));
  if (!fields.Has("count")) return ConfigError(fields.Name("count"), "is required");
  EMBAUDIT_RETURN_IF_ERROR(fields.Unsigned("count", population.count));
  EMBAUDIT_RETURN_IF_ERROR(fields.RejectUnknown());
  out = population;
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<SynthSpec> ParseSynthSpec(const json& root,
                                         const fs::path& base_dir) {
  Fields fields(root, "");
  EMBAUDIT_RETURN_IF_ERROR(fields.CheckObject());
  SynthSpec spec;
  EMBAUDIT_RETURN_IF_ERROR(fields.Unsigned("dimension", spec.dimension));
  EMBAUDIT_RETURN_IF_ERROR(fields.Unsigned("seed", spec.seed));
  EMBAUDIT_RETURN_IF_ERROR(fields.Number("prior_member", spec.prior_member));
  std::optional<PopulationSpec> member, nonmember;
  EMBAUDIT_RETURN_IF_ERROR(ParsePopulation(fields, "member", member));
  EMBAUDIT_RETURN_IF_ERROR(ParsePopulation(fields, "nonmember", nonmember));
  EMBAUDIT_RETURN_IF_ERROR(ParsePopulation(fields, "aux", spec.aux));
  if (!member) return ConfigError("member", "is required");
  if (!nonmember) return ConfigError("nonmember", "is required");
  spec.member = *member;
  spec.nonmember = *nonmember;
  if (fields.Has("views")) {
    Fields sub(fields.At("views"), "views");
    EMBAUDIT_RETURN_IF_ERROR(sub.CheckObject());
    ViewsSpec views;
    EMBAUDIT_RETURN_IF_ERROR(sub.Unsigned("count", views.count));
    EMBAUDIT_RETURN_IF_ERROR(sub.Number("member_jitter", views.member_jitter));
    EMBAUDIT_RETURN_IF_ERROR(
        sub.Number("nonmember_jitter", views.nonmember_jitter));
    EMBAUDIT_RETURN_IF_ERROR(sub.RejectUnknown());
    spec.views = views;
  }
  if (fields.Has("sparse_support")) {
    Fields sub(fields.At("sparse_support"), "sparse_support");
    EMBAUDIT_RETURN_IF_ERROR(sub.CheckObject());
    SparseSupport support;
    EMBAUDIT_RETURN_IF_ERROR(sub.Unsigned("min", support.min_size));
    EMBAUDIT_RETURN_IF_ERROR(sub.Unsigned("max", support.max_size));
    EMBAUDIT_RETURN_IF_ERROR(sub.RejectUnknown());
    spec.sparse_support = support;
  }
  std::string format = "binary";
  EMBAUDIT_RETURN_IF_ERROR(fields.String("format", format));
  auto parsed_format = ParseDumpFormat(format);
  if (!parsed_format.ok()) {
    return ConfigError("format", parsed_format.status().message());
  }
  spec.format = *parsed_format;
  std::optional<fs::path> output_dir;
  EMBAUDIT_RETURN_IF_ERROR(fields.Path("output_dir", output_dir));
  if (output_dir) spec.output_dir = *output_dir;
  if (!spec.output_dir.is_absolute() && !base_dir.empty()) {
    spec.output_dir = base_dir / spec.output_dir;
  }
  EMBAUDIT_RETURN_IF_ERROR(fields.RejectUnknown());
  if (!(spec.prior_member > 0.0 && spec.prior_member < 1.0)) {
    return ConfigError("prior_member", "must lie in (0, 1)");
  }
  return spec;
}

absl::StatusOr<SynthSpec> LoadSynthSpec(const fs::path& path) {
  EMBAUDIT_ASSIGN_OR_RETURN(json parsed, ReadJsonFile(path));
  return ParseSynthSpec(parsed, path.parent_path());
}

absl::StatusOr<SynthResult> RunSynth(const SynthSpec& spec) {
  struct Population {
    const char* name;
    PopulationSpec spec;
    Membership label;
    double jitter;
  };
  std::vector<Population> populations = {
      {"member", spec.member, Membership::kMember,
       spec.views ? spec.views->member_jitter : 0.0},
      {"nonmember", spec.nonmember, Membership::kNonMember,
       spec.views ? spec.views->nonmember_jitter : 0.0}};
  if (spec.aux) {
    populations.push_back({"aux", *spec.aux, Membership::kNonMember, 0.0});
  }
  if (spec.views && spec.views->count == 0) {
    return MakeError(ErrorKind::kValidation, "views.count must be >= 1");
  }

  // Generate everything before touching the output directory.
  std::vector<EmbeddingSet> sets;
  uint64_t next_group = 0;
  for (const Population& population : populations) {
    NormSpec norm_spec;
    norm_spec.mean = population.spec.mean;
    norm_spec.stddev = population.spec.stddev;
    norm_spec.dimension = spec.dimension;
    norm_spec.count = population.spec.count;
    norm_spec.seed = DeriveSeed(spec.seed, absl::StrCat("synth/", population.name));
    norm_spec.label = population.label;
    norm_spec.first_group_id = next_group;
    norm_spec.sparse_support = spec.sparse_support;
    auto generated = Generate(norm_spec);
    if (!generated.ok()) {
      return MakeError(ErrorKind::kValidation,
                       absl::StrCat(population.name, ": ",
                                    generated.status().message()));
    }
    next_group += population.spec.count;
    EmbeddingSet set = *std::move(generated);
    if (spec.views && absl::string_view(population.name) != "aux") {
      EMBAUDIT_ASSIGN_OR_RETURN(
          set, MakeGroupedViews(
                   set, spec.views->count, population.jitter,
                   DeriveSeed(spec.seed,
                              absl::StrCat("synth/", population.name, "_views"))));
    }
    sets.push_back(std::move(set));
  }

  EMBAUDIT_RETURN_IF_ERROR(EnsureDirectory(spec.output_dir));
  SynthResult result;
  const std::string ext = spec.format == DumpFormat::kCsv ? ".csv" : ".emb1";
  for (size_t i = 0; i < populations.size(); ++i) {
    const fs::path path =
        spec.output_dir / absl::StrCat(populations[i].name, ext);
    EMBAUDIT_RETURN_IF_ERROR(WriteDump(sets[i], path, spec.format));
    result.written.push_back(path);
  }
  result.bayes_accuracy = BayesOptimalAccuracy(
      {spec.member.mean, spec.member.stddev},
      {spec.nonmember.mean, spec.nonmember.stddev}, spec.prior_member);
  return result;
}

absl::StatusOr<std::string> RunHistogram(const std::vector<fs::path>& dumps,
                                         double p, size_t bins,
                                         const fs::path& out_path) {
  if (dumps.empty()) {
    return MakeError(ErrorKind::kConfig, "histogram needs at least one dump");
  }
  if (bins == 0) return MakeError(ErrorKind::kConfig, "bins must be >= 1");
  std::vector<std::pair<double, Membership>> values;
  for (const fs::path& path : dumps) {
    EMBAUDIT_ASSIGN_OR_RETURN(EmbeddingSet set,
                              ReadDump(path, DumpFormatForPath(path)));
    EMBAUDIT_ASSIGN_OR_RETURN(std::vector<double> norms, RecordNorms(set, p));
    for (size_t i = 0; i < norms.size(); ++i) {
      values.emplace_back(norms[i], set[i].label);
    }
  }
  double lo = 0.0;
  double hi = 1.0;
  if (!values.empty()) {
    lo = hi = values.front().first;
    for (const auto& [v, label] : values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi == lo) hi = lo + 1.0;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::array<size_t, 3>> counts(bins, {0, 0, 0});
  for (const auto& [v, label] : values) {
    size_t bin = static_cast<size_t>((v - lo) / width);
    bin = std::min(bin, bins - 1);
    const size_t column = label == Membership::kMember      ? 0
                          : label == Membership::kNonMember ? 1
                                                            : 2;
    ++counts[bin][column];
  }
  std::string csv = "bin_low,bin_high,member,non_member,unknown\n";
  for (size_t b = 0; b < bins; ++b) {
    const double bin_lo = lo + width * static_cast<double>(b);
    const double bin_hi = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
    absl::StrAppend(&csv, absl::StrFormat("%.9g", bin_lo), ",",
                    absl::StrFormat("%.9g", bin_hi), ",", counts[b][0], ",",
                    counts[b][1], ",", counts[b][2], "\n");
  }
  if (out_path.has_parent_path()) {
    EMBAUDIT_RETURN_IF_ERROR(EnsureDirectory(out_path.parent_path()));
  }
  EMBAUDIT_RETURN_IF_ERROR(WriteFileBytes(out_path, csv));
  return csv;
}

}  // namespace embaudit
