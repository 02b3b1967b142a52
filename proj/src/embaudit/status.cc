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

#include "embaudit/status.h"

#include <array>
#include <string>

#include "absl/strings/cord.h"

namespace embaudit {
namespace {

constexpr absl::string_view kKindPayloadUrl = "embaudit/error_kind";

constexpr std::array<ErrorKind, 11> kAllKinds = {
    ErrorKind::kFormat,           ErrorKind::kValidation,
    ErrorKind::kDomain,           ErrorKind::kInsufficientData,
    ErrorKind::kDegenerateFit,    ErrorKind::kTraining,
    ErrorKind::kDivergence,       ErrorKind::kMetric,
    ErrorKind::kConfig,           ErrorKind::kIo,
    ErrorKind::kInternal,
};

absl::StatusCode CanonicalCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat:
      return absl::StatusCode::kDataLoss;
    case ErrorKind::kValidation:
    case ErrorKind::kConfig:
      return absl::StatusCode::kInvalidArgument;
    case ErrorKind::kDomain:
      return absl::StatusCode::kOutOfRange;
    case ErrorKind::kInsufficientData:
    case ErrorKind::kDegenerateFit:
    case ErrorKind::kTraining:
    case ErrorKind::kMetric:
      return absl::StatusCode::kFailedPrecondition;
    case ErrorKind::kDivergence:
      return absl::StatusCode::kAborted;
    case ErrorKind::kIo:
      return absl::StatusCode::kUnavailable;
    case ErrorKind::kInternal:
      return absl::StatusCode::kInternal;
  }
  return absl::StatusCode::kUnknown;
}

}  // namespace

absl::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat:
      return "format";
    case ErrorKind::kValidation:
      return "validation";
    case ErrorKind::kDomain:
      return "domain";
    case ErrorKind::kInsufficientData:
      return "insufficient_data";
    case ErrorKind::kDegenerateFit:
      return "degenerate_fit";
    case ErrorKind::kTraining:
      return "training";
    case ErrorKind::kDivergence:
      return "divergence";
    case ErrorKind::kMetric:
      return "metric";
    case ErrorKind::kConfig:
      return "config";
    case ErrorKind::kIo:
      return "io";
    case ErrorKind::kInternal:
      return "internal";
  }
  return "unknown";
}

absl::Status MakeError(ErrorKind kind, absl::string_view message) {
  absl::Status status(CanonicalCode(kind), message);
  status.SetPayload(kKindPayloadUrl, absl::Cord(ErrorKindName(kind)));
  return status;
}

std::optional<ErrorKind> GetErrorKind(const absl::Status& status) {
  if (status.ok()) return std::nullopt;
  auto payload = status.GetPayload(kKindPayloadUrl);
  if (!payload.has_value()) return std::nullopt;
  const std::string name(*payload);
  for (ErrorKind kind : kAllKinds) {
    if (ErrorKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

}  // namespace embaudit
