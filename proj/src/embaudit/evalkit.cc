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

#include "embaudit/evalkit.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "absl/strings/ascii.h"
#include "embaudit/status.h"

namespace embaudit {

absl::StatusOr<MetricsReport> ComputeMetrics(
    const ScoredDecisions& decisions, std::span<const double> fpr_levels) {
  const std::vector<ScoredEntry>& entries = decisions.entries;
  if (entries.empty()) {
    return MakeError(ErrorKind::kMetric, "no decisions to evaluate");
  }
  for (double level : fpr_levels) {
    if (!(level >= 0.0 && level <= 1.0)) {
      return MakeError(ErrorKind::kMetric,
                       absl::StrCat("FPR level ", level, " is outside [0, 1]"));
    }
  }
  MetricsReport report;
  size_t positives = 0;
  for (size_t i = 0; i < entries.size(); ++i) {
    const ScoredEntry& e = entries[i];
    if (e.truth == Membership::kUnknown || e.verdict == Membership::kUnknown) {
      return MakeError(ErrorKind::kMetric,
                       absl::StrCat("entry ", i, " has an unknown label"));
    }
    if (std::isnan(e.score)) {
      return MakeError(ErrorKind::kMetric,
                       absl::StrCat("entry ", i, " has a NaN score"));
    }
    const bool truth = e.truth == Membership::kMember;
    const bool called = e.verdict == Membership::kMember;
    positives += truth;
    if (truth && called) ++report.true_positives;
    if (!truth && called) ++report.false_positives;
    if (!truth && !called) ++report.true_negatives;
    if (truth && !called) ++report.false_negatives;
  }
  const double n = static_cast<double>(entries.size());
  report.accuracy =
      static_cast<double>(report.true_positives + report.true_negatives) / n;
  const size_t called = report.true_positives + report.false_positives;
  report.precision = called == 0 ? 0.0
                                 : static_cast<double>(report.true_positives) /
                                       static_cast<double>(called);
  report.recall = positives == 0 ? 0.0
                                 : static_cast<double>(report.true_positives) /
                                       static_cast<double>(positives);

  const size_t negatives = entries.size() - positives;
  if (positives == 0 || negatives == 0) {
    if (!fpr_levels.empty()) {
      return MakeError(ErrorKind::kMetric,
                       "ROC needs both member and non-member truth labels");
    }
    return report;
  }

  std::vector<size_t> order(entries.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return entries[a].score > entries[b].score;
  });
  report.roc.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  size_t tp = 0;
  size_t fp = 0;
  for (size_t i = 0; i < order.size();) {
    const double cut = entries[order[i]].score;
    while (i < order.size() && entries[order[i]].score == cut) {
      if (entries[order[i]].truth == Membership::kMember) {
        ++tp;
      } else {
        ++fp;
      }
      ++i;
    }
    report.roc.push_back({cut,
                          static_cast<double>(fp) / static_cast<double>(negatives),
                          static_cast<double>(tp) / static_cast<double>(positives)});
  }
  for (double level : fpr_levels) {
    double best = 0.0;
    for (const RocPoint& point : report.roc) {
      if (point.fpr <= level) best = std::max(best, point.tpr);
    }
    report.tpr_at_fpr.push_back({level, best});
  }
  return report;
}

absl::Status CheckRocInvariants(const std::vector<RocPoint>& roc) {
  if (roc.empty()) return absl::OkStatus();
  if (roc.front().fpr != 0.0 || roc.front().tpr != 0.0) {
    return MakeError(ErrorKind::kInternal, "ROC does not start at (0, 0)");
  }
  if (roc.back().fpr != 1.0 || roc.back().tpr != 1.0) {
    return MakeError(ErrorKind::kInternal, "ROC does not end at (1, 1)");
  }
  for (size_t i = 1; i < roc.size(); ++i) {
    if (roc[i].fpr < roc[i - 1].fpr || roc[i].tpr < roc[i - 1].tpr) {
      return MakeError(ErrorKind::kInternal,
                       absl::StrCat("ROC decreases at point ", i));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<LabeledEmbeddingSet> LabeledEmbeddingSet::Create(
    EmbeddingSet set, std::vector<uint32_t> classes) {
  if (classes.size() != set.size()) {
    return MakeError(ErrorKind::kValidation,
                     absl::StrCat(set.size(), " records but ", classes.size(),
                                  " class labels"));
  }
  return LabeledEmbeddingSet{std::move(set), std::move(classes)};
}

namespace {

double Dot(std::span<const float> a, std::span<const float> b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

}  // namespace

absl::StatusOr<std::vector<uint32_t>> KnnPredict(
    const LabeledEmbeddingSet& train, const EmbeddingSet& test, size_t k) {
  if (train.set.empty() || test.empty()) {
    return MakeError(ErrorKind::kDomain, "K-NN needs non-empty train and test");
  }
  if (k == 0 || k > train.set.size()) {
    return MakeError(ErrorKind::kDomain,
                     absl::StrCat("k = ", k, " must lie in [1, ",
                                  train.set.size(), "]"));
  }
  if (train.set.dimension() != test.dimension()) {
    return MakeError(ErrorKind::kDomain,
                     absl::StrCat("train dimension ", train.set.dimension(),
                                  " != test dimension ", test.dimension()));
  }
  const size_t n = train.set.size();
  std::vector<double> train_norms(n);
  for (size_t i = 0; i < n; ++i) {
    train_norms[i] = std::sqrt(Dot(train.set[i].vector, train.set[i].vector));
  }

  std::vector<uint32_t> predictions;
  predictions.reserve(test.size());
  std::vector<double> similarity(n);
  std::vector<size_t> order(n);
  for (const EmbeddingRecord& query : test.records()) {
    const double query_norm = std::sqrt(Dot(query.vector, query.vector));
    for (size_t i = 0; i < n; ++i) {
      const double denom = query_norm * train_norms[i];
      similarity[i] =
          denom == 0.0 ? 0.0 : Dot(query.vector, train.set[i].vector) / denom;
    }
    std::iota(order.begin(), order.end(), size_t{0});
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](size_t a, size_t b) {
                        if (similarity[a] != similarity[b]) {
                          return similarity[a] > similarity[b];
                        }
                        return a < b;
                      });
    std::map<uint32_t, size_t> votes;
    for (size_t j = 0; j < k; ++j) ++votes[train.classes[order[j]]];
    uint32_t best_class = 0;
    size_t best_votes = 0;
    for (const auto& [cls, count] : votes) {
      if (count > best_votes) {
        best_class = cls;
        best_votes = count;
      }
    }
    predictions.push_back(best_class);
  }
  return predictions;
}

absl::StatusOr<double> KnnUtility(const LabeledEmbeddingSet& train,
                                  const LabeledEmbeddingSet& test, size_t k) {
  EMBAUDIT_ASSIGN_OR_RETURN(std::vector<uint32_t> predictions,
                            KnnPredict(train, test.set, k));
  size_t correct = 0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    correct += predictions[i] == test.classes[i];
  }
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

absl::StatusOr<std::vector<uint32_t>> ReadClassLabels(
    const std::filesystem::path& path) {
  EMBAUDIT_ASSIGN_OR_RETURN(std::string text, ReadFileBytes(path));
  std::vector<uint32_t> classes;
  size_t line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(),
                                     value);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      return MakeError(ErrorKind::kFormat,
                       absl::StrCat(path.string(), ":", line_number,
                                    ": bad class label '", line, "'"));
    }
    classes.push_back(value);
  }
  return classes;
}

}  // namespace embaudit
