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

// Embedding records, sets and the EMB1 / CSV dump formats.
//
// EMB1 layout (little-endian):
//   0..3   "EMB1"
//   4..7   u32 version (1)
//   8..11  u32 dimension
//   12..19 u64 record count
//   20     u8 flags, bit0 = per-record label byte present
//   then per record: u64 group_id, [u8 label], dimension x binary32.
// Label bytes: 0 = non_member, 1 = member, 255 = unknown. The writer omits
// labels (flags = 0) exactly when every record is unknown.

#ifndef EMBAUDIT_EMB_DATA_H_
#define EMBAUDIT_EMB_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace embaudit {

enum class Membership : uint8_t {
  kNonMember = 0,
  kMember = 1,
  kUnknown = 255,
};

absl::string_view MembershipName(Membership label);
absl::StatusOr<Membership> ParseMembership(absl::string_view name);

struct EmbeddingRecord {
  uint64_t group_id = 0;
  Membership label = Membership::kUnknown;
  std::vector<float> vector;

  friend bool operator==(const EmbeddingRecord&,
                         const EmbeddingRecord&) = default;
};

// An ordered, validated collection of records sharing one dimension. A
// group_id always maps to exactly one label within a set.
class EmbeddingSet {
 public:
  static absl::StatusOr<EmbeddingSet> Create(
      size_t dimension, std::vector<EmbeddingRecord> records,
      std::string source_tag = "");

  // Validates and appends one record.
  absl::Status Append(EmbeddingRecord record);

  size_t dimension() const { return dimension_; }
  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<EmbeddingRecord>& records() const { return records_; }
  const EmbeddingRecord& operator[](size_t i) const { return records_[i]; }
  const std::string& source_tag() const { return source_tag_; }

  // Distinct group ids, ascending.
  std::vector<uint64_t> GroupIds() const;

  // Source tag is provenance only and does not take part in equality.
  friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b) {
    return a.dimension_ == b.dimension_ && a.records_ == b.records_;
  }

 private:
  EmbeddingSet(size_t dimension, std::string source_tag)
      : dimension_(dimension), source_tag_(std::move(source_tag)) {}

  absl::Status CheckRecord(const EmbeddingRecord& record, size_t index) const;

  size_t dimension_ = 0;
  std::vector<EmbeddingRecord> records_;
  std::string source_tag_;
  absl::flat_hash_map<uint64_t, Membership> group_labels_;
};

enum class DumpFormat { kBinary, kCsv };

absl::StatusOr<DumpFormat> ParseDumpFormat(absl::string_view name);
// ".csv" selects CSV; everything else is EMB1.
DumpFormat DumpFormatForPath(const std::filesystem::path& path);

inline constexpr uint32_t kEmb1Version = 1;
inline constexpr size_t kEmb1HeaderSize = 21;

std::string EncodeEmb1(const EmbeddingSet& set);
absl::StatusOr<EmbeddingSet> DecodeEmb1(absl::string_view bytes,
                                        std::string source_tag = "");
std::string EncodeCsv(const EmbeddingSet& set);
absl::StatusOr<EmbeddingSet> DecodeCsv(absl::string_view text,
                                       std::string source_tag = "");

absl::StatusOr<EmbeddingSet> ReadDump(const std::filesystem::path& path,
                                      DumpFormat format);
absl::Status WriteDump(const EmbeddingSet& set,
                       const std::filesystem::path& path, DumpFormat format);

// Four disjoint views: attack_* for fitting, eval_* for scoring. Records in
// each view carry the label of their side.
struct DatasetSplit {
  EmbeddingSet attack_members;
  EmbeddingSet attack_nonmembers;
  EmbeddingSet eval_members;
  EmbeddingSet eval_nonmembers;
};

// Group counts per view.
struct SplitCounts {
  size_t attack_members = 0;
  size_t attack_nonmembers = 0;
  size_t eval_members = 0;
  size_t eval_nonmembers = 0;
};

// Partitions each side by group: floor(fraction * groups) groups go to the
// attack view and the rest to the eval view.
absl::StatusOr<DatasetSplit> MakeSplit(const EmbeddingSet& members,
                                       const EmbeddingSet& nonmembers,
                                       double attack_fraction, uint64_t seed);

// Explicit group counts; groups beyond attack + eval are left unused.
absl::StatusOr<DatasetSplit> MakeSplit(const EmbeddingSet& members,
                                       const EmbeddingSet& nonmembers,
                                       const SplitCounts& counts,
                                       uint64_t seed);

// Reads a whole file. Missing or unreadable files are kIo errors.
absl::StatusOr<std::string> ReadFileBytes(const std::filesystem::path& path);
absl::Status WriteFileBytes(const std::filesystem::path& path,
                            absl::string_view bytes);

}  // namespace embaudit

#endif  // EMBAUDIT_EMB_DATA_H_
