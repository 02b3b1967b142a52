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

#ifndef EMBAUDIT_STATUS_H_
#define EMBAUDIT_STATUS_H_

#include <optional>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace embaudit {

// Error categories surfaced by the library. Each maps onto a canonical absl
// code and is carried as a status payload so callers (and the C API) can
// recover the exact category.
enum class ErrorKind {
  kFormat,            // malformed dump / checkpoint bytes
  kValidation,        // well-formed input that breaks a data invariant
  kDomain,            // argument outside an operation's mathematical domain
  kInsufficientData,  // too few samples to fit
  kDegenerateFit,     // zero variance
  kTraining,          // untrainable input (e.g. one class)
  kDivergence,        // non-finite loss during training
  kMetric,            // metric undefined for the input
  kConfig,            // bad configuration
  kIo,                // filesystem failure
  kInternal,          // invariant breach inside the library
};

absl::string_view ErrorKindName(ErrorKind kind);

absl::Status MakeError(ErrorKind kind, absl::string_view message);

// Returns the category attached by MakeError, or nullopt for OK / foreign
// statuses.
std::optional<ErrorKind> GetErrorKind(const absl::Status& status);

inline bool IsErrorKind(const absl::Status& status, ErrorKind kind) {
  return GetErrorKind(status) == kind;
}

}  // namespace embaudit

#define EMBAUDIT_STATUS_CONCAT_INNER_(a, b) a##b
#define EMBAUDIT_STATUS_CONCAT_(a, b) EMBAUDIT_STATUS_CONCAT_INNER_(a, b)

#define EMBAUDIT_RETURN_IF_ERROR(expr)           \
  do {                                           \
    ::absl::Status embaudit_status_ = (expr);    \
    if (!embaudit_status_.ok()) {                \
      return embaudit_status_;                   \
    }                                            \
  } while (false)

#define EMBAUDIT_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                                    \
  if (!tmp.ok()) {                                       \
    return std::move(tmp).status();                      \
  }                                                      \
  lhs = std::move(tmp).value()

#define EMBAUDIT_ASSIGN_OR_RETURN(lhs, rexpr) \
  EMBAUDIT_ASSIGN_OR_RETURN_IMPL_(            \
      EMBAUDIT_STATUS_CONCAT_(embaudit_statusor_, __LINE__), lhs, rexpr)

#endif  // EMBAUDIT_STATUS_H_
