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

#include "embaudit/signals.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "absl/strings/str_cat.h"
#include "embaudit/status.h"

namespace embaudit {
namespace {

double Dot(std::span<const float> a, std::span<const float> b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

}  // namespace

absl::string_view SignatureKindName(SignatureKind kind) {
  switch (kind) {
    case SignatureKind::kRawFeature:
      return "raw_feature";
    case SignatureKind::kPairwiseSimilarity:
      return "pairwise_similarity";
    case SignatureKind::kAnchorDistance:
      return "anchor_distance";
    case SignatureKind::kPNorm:
      return "p_norm";
  }
  return "unknown";
}

absl::StatusOr<double> PNorm(std::span<const float> vector, double p) {
  if (vector.empty()) {
    return MakeError(ErrorKind::kDomain, "p-norm of an empty vector");
  }
  if (!(p >= 0.0) || !std::isfinite(p)) {
    return MakeError(ErrorKind::kDomain,
                     absl::StrCat("p must be a finite value >= 0, got ", p));
  }
  if (p == 0.0) {
    size_t count = 0;
    for (float v : vector) {
      if (std::fabs(static_cast<double>(v)) > kZeroComponentEpsilon) ++count;
    }
    return static_cast<double>(count);
  }
  double largest = 0.0;
  for (float v : vector) {
    largest = std::max(largest, std::fabs(static_cast<double>(v)));
  }
  if (largest == 0.0) return 0.0;
  // Scaling by the largest magnitude keeps |v_i|^p representable.
  double sum = 0.0;
  if (p == 1.0) {
    for (float v : vector) sum += std::fabs(static_cast<double>(v));
    return sum;
  }
  if (p == 2.0) {
    for (float v : vector) {
      const double r = static_cast<double>(v) / largest;
      sum += r * r;
    }
    return largest * std::sqrt(sum);
  }
  for (float v : vector) {
    sum += std::pow(std::fabs(static_cast<double>(v)) / largest, p);
  }
  return largest * std::pow(sum, 1.0 / p);
}

absl::StatusOr<AttackSignature> EncoderMiSignature(
    std::span<const std::span<const float>> views) {
  if (views.size() < 2) {
    return MakeError(ErrorKind::kDomain,
                     absl::StrCat("need at least 2 views, got ", views.size()));
  }
  const size_t dimension = views[0].size();
  std::vector<double> norms(views.size());
  for (size_t i = 0; i < views.size(); ++i) {
    if (views[i].size() != dimension || dimension == 0) {
      return MakeError(ErrorKind::kDomain,
                       absl::StrCat("view ", i, " has dimension ",
                                    views[i].size(), ", expected ", dimension));
    }
    norms[i] = std::sqrt(Dot(views[i], views[i]));
    if (norms[i] == 0.0) {
      return MakeError(ErrorKind::kDomain,
                       absl::StrCat("view ", i,
                                    " is the zero vector; cosine undefined"));
    }
  }
  AttackSignature signature;
  signature.kind = SignatureKind::kPairwiseSimilarity;
  signature.values.reserve(views.size() * (views.size() - 1) / 2);
  for (size_t i = 0; i < views.size(); ++i) {
    for (size_t j = i + 1; j < views.size(); ++j) {
      const double cosine = Dot(views[i], views[j]) / (norms[i] * norms[j]);
      signature.values.push_back(std::clamp(cosine, -1.0, 1.0));
    }
  }
  std::sort(signature.values.begin(), signature.values.end());
  return signature;
}

absl::StatusOr<AttackSignature> SdmiSignature(
    std::span<const float> target,
    std::span<const std::vector<float>> anchors) {
  AttackSignature signature;
  signature.kind = SignatureKind::kAnchorDistance;
  signature.values.reserve(anchors.size());
  for (size_t k = 0; k < anchors.size(); ++k) {
    if (anchors[k].size() != target.size()) {
      return MakeError(ErrorKind::kDomain,
                       absl::StrCat("anchor ", k, " has dimension ",
                                    anchors[k].size(), ", target has ",
                                    target.size()));
    }
    double sum = 0.0;
    for (size_t i = 0; i < target.size(); ++i) {
      const double diff =
          static_cast<double>(target[i]) - static_cast<double>(anchors[k][i]);
      sum += diff * diff;
    }
    signature.values.push_back(std::sqrt(sum));
  }
  return signature;
}

absl::StatusOr<std::vector<double>> RecordNorms(const EmbeddingSet& set,
                                                double p) {
  std::vector<double> norms;
  norms.reserve(set.size());
  for (const EmbeddingRecord& record : set.records()) {
    EMBAUDIT_ASSIGN_OR_RETURN(double norm, PNorm(record.vector, p));
    norms.push_back(norm);
  }
  return norms;
}

absl::StatusOr<std::vector<AttackSignature>> BatchSignatures(
    const EmbeddingSet& set, SignatureKind kind,
    const SignatureParams& params) {
  std::vector<AttackSignature> out;
  if (kind == SignatureKind::kPairwiseSimilarity) {
    std::map<uint64_t, std::vector<size_t>> groups;
    for (size_t i = 0; i < set.size(); ++i) {
      groups[set[i].group_id].push_back(i);
    }
    out.reserve(groups.size());
    size_t views_per_group = 0;
    for (const auto& [group, indices] : groups) {
      if (indices.size() < 2) {
        return MakeError(ErrorKind::kValidation,
                         absl::StrCat("group ", group, " has ", indices.size(),
                                      " view(s); pairwise similarity needs "
                                      ">= 2"));
      }
      if (views_per_group == 0) views_per_group = indices.size();
      if (indices.size() != views_per_group) {
        return MakeError(ErrorKind::kValidation,
                         absl::StrCat("group ", group, " has ", indices.size(),
                                      " views, expected ", views_per_group));
      }
      std::vector<std::span<const float>> views;
      views.reserve(indices.size());
      for (size_t i : indices) views.emplace_back(set[i].vector);
      EMBAUDIT_ASSIGN_OR_RETURN(AttackSignature signature,
                                EncoderMiSignature(views));
      signature.source_group = group;
      signature.label = set[indices.front()].label;
      out.push_back(std::move(signature));
    }
    return out;
  }

  out.reserve(set.size());
  for (const EmbeddingRecord& record : set.records()) {
    AttackSignature signature;
    switch (kind) {
      case SignatureKind::kRawFeature:
        signature.kind = kind;
        signature.values.assign(record.vector.begin(), record.vector.end());
        break;
      case SignatureKind::kPNorm: {
        signature.kind = kind;
        EMBAUDIT_ASSIGN_OR_RETURN(double norm, PNorm(record.vector, params.p));
        signature.values = {norm};
        break;
      }
      case SignatureKind::kAnchorDistance: {
        EMBAUDIT_ASSIGN_OR_RETURN(signature,
                                  SdmiSignature(record.vector, params.anchors));
        break;
      }
      case SignatureKind::kPairwiseSimilarity:
        break;
    }
    signature.source_group = record.group_id;
    signature.label = record.label;
    out.push_back(std::move(signature));
  }
  return out;
}

}  // namespace embaudit
