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

#include "embaudit/emb_data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <system_error>
#include <utility>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "embaudit/random.h"
#include "embaudit/status.h"

namespace embaudit {
namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};
constexpr uint8_t kFlagLabels = 0x01;

template <typename T>
void PutLe(std::string& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T GetLe(const unsigned char* p) {
  T value = 0;
  for (size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(p[i]) << (8 * i);
  }
  return value;
}

absl::StatusOr<Membership> MembershipFromByte(uint8_t byte) {
  switch (byte) {
    case 0:
      return Membership::kNonMember;
    case 1:
      return Membership::kMember;
    case 255:
      return Membership::kUnknown;
    default:
      return MakeError(ErrorKind::kFormat,
                       absl::StrCat("invalid label byte ", byte));
  }
}

absl::string_view StripCr(absl::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

absl::string_view MembershipName(Membership label) {
  switch (label) {
    case Membership::kNonMember:
      return "non_member";
    case Membership::kMember:
      return "member";
    case Membership::kUnknown:
      return "unknown";
  }
  return "unknown";
}

absl::StatusOr<Membership> ParseMembership(absl::string_view name) {
  if (name == "member") return Membership::kMember;
  if (name == "non_member") return Membership::kNonMember;
  if (name == "unknown") return Membership::kUnknown;
  return MakeError(ErrorKind::kValidation,
                   absl::StrCat("unknown membership label '", name, "'"));
}

absl::StatusOr<EmbeddingSet> EmbeddingSet::Create(
    size_t dimension, std::vector<EmbeddingRecord> records,
    std::string source_tag) {
  if (dimension == 0) {
    return MakeError(ErrorKind::kValidation, "dimension must be >= 1");
  }
  EmbeddingSet set(dimension, std::move(source_tag));
  set.records_.reserve(records.size());
  for (EmbeddingRecord& record : records) {
    EMBAUDIT_RETURN_IF_ERROR(set.Append(std::move(record)));
  }
  return set;
}

absl::Status EmbeddingSet::CheckRecord(const EmbeddingRecord& record,
                                       size_t index) const {
  if (record.vector.size() != dimension_) {
    return MakeError(
        ErrorKind::kValidation,
        absl::StrCat("record ", index, ": vector length ", record.vector.size(),
                     " does not match dimension ", dimension_));
  }
  for (size_t j = 0; j < record.vector.size(); ++j) {
    if (!std::isfinite(record.vector[j])) {
      return MakeError(ErrorKind::kValidation,
                       absl::StrCat("record ", index, ": component ", j,
                                    " is not finite"));
    }
  }
  auto it = group_labels_.find(record.group_id);
  if (it != group_labels_.end() && it->second != record.label) {
    return MakeError(
        ErrorKind::kValidation,
        absl::StrCat("record ", index, ": group ", record.group_id,
                     " already labeled ", MembershipName(it->second),
                     ", got ", MembershipName(record.label)));
  }
  return absl::OkStatus();
}

absl::Status EmbeddingSet::Append(EmbeddingRecord record) {
  if (dimension_ == 0) {
    return MakeError(ErrorKind::kValidation, "dimension must be >= 1");
  }
  EMBAUDIT_RETURN_IF_ERROR(CheckRecord(record, records_.size()));
  group_labels_.emplace(record.group_id, record.label);
  records_.push_back(std::move(record));
  return absl::OkStatus();
}

std::vector<uint64_t> EmbeddingSet::GroupIds() const {
  std::vector<uint64_t> ids;
  ids.reserve(group_labels_.size());
  for (const auto& [id, label] : group_labels_) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

absl::StatusOr<DumpFormat> ParseDumpFormat(absl::string_view name) {
  if (name == "binary" || name == "emb1") return DumpFormat::kBinary;
  if (name == "csv") return DumpFormat::kCsv;
  return MakeError(ErrorKind::kConfig,
                   absl::StrCat("unknown dump format '", name, "'"));
}

DumpFormat DumpFormatForPath(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? DumpFormat::kCsv : DumpFormat::kBinary;
}

std::string EncodeEmb1(const EmbeddingSet& set) {
  const bool with_labels = std::any_of(
      set.records().begin(), set.records().end(),
      [](const EmbeddingRecord& r) { return r.label != Membership::kUnknown; });
  const size_t record_size =
      8 + (with_labels ? 1 : 0) + 4 * set.dimension();
  std::string out;
  out.reserve(kEmb1HeaderSize + record_size * set.size());
  out.append(kMagic, 4);
  PutLe<uint32_t>(out, kEmb1Version);
  PutLe<uint32_t>(out, static_cast<uint32_t>(set.dimension()));
  PutLe<uint64_t>(out, set.size());
  out.push_back(static_cast<char>(with_labels ? kFlagLabels : 0));
  for (const EmbeddingRecord& record : set.records()) {
    PutLe<uint64_t>(out, record.group_id);
    if (with_labels) out.push_back(static_cast<char>(record.label));
    for (float component : record.vector) {
      uint32_t bits;
      std::memcpy(&bits, &component, sizeof(bits));
      PutLe<uint32_t>(out, bits);
    }
  }
  return out;
}

absl::StatusOr<EmbeddingSet> DecodeEmb1(absl::string_view bytes,
                                        std::string source_tag) {
  if (bytes.size() < kEmb1HeaderSize) {
    return MakeError(ErrorKind::kFormat,
                     absl::StrCat("EMB1 header truncated: ", bytes.size(),
                                  " bytes"));
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (std::memcmp(p, kMagic, 4) != 0) {
    return MakeError(ErrorKind::kFormat, "bad magic, expected \"EMB1\"");
  }
  const uint32_t version = GetLe<uint32_t>(p + 4);
  if (version != kEmb1Version) {
    return MakeError(ErrorKind::kFormat,
                     absl::StrCat("unsupported EMB1 version ", version));
  }
  const uint32_t dimension = GetLe<uint32_t>(p + 8);
  const uint64_t count = GetLe<uint64_t>(p + 12);
  const uint8_t flags = p[20];
  if ((flags & ~kFlagLabels) != 0) {
    return MakeError(ErrorKind::kFormat,
                     absl::StrCat("unknown EMB1 flag bits ", flags));
  }
  if (dimension == 0) {
    return MakeError(ErrorKind::kValidation, "dimension must be >= 1");
  }
  const bool with_labels = (flags & kFlagLabels) != 0;
  const uint64_t record_size =
      8 + (with_labels ? 1 : 0) + 4 * static_cast<uint64_t>(dimension);
  const uint64_t payload = bytes.size() - kEmb1HeaderSize;
  if (count > payload / record_size || payload != count * record_size) {
    return MakeError(ErrorKind::kFormat,
                     absl::StrCat("EMB1 payload is ", payload,
                                  " bytes, header implies ", count, " x ",
                                  record_size));
  }

  EMBAUDIT_ASSIGN_OR_RETURN(
      EmbeddingSet set, EmbeddingSet::Create(dimension, {}, std::move(source_tag)));
  const unsigned char* cursor = p + kEmb1HeaderSize;
  for (uint64_t i = 0; i < count; ++i) {
    EmbeddingRecord record;
    record.group_id = GetLe<uint64_t>(cursor);
    cursor += 8;
    if (with_labels) {
      auto label = MembershipFromByte(*cursor++);
      if (!label.ok()) {
        return MakeError(ErrorKind::kFormat,
                         absl::StrCat("record ", i, ": ",
                                      label.status().message()));
      }
      record.label = *label;
    }
    record.vector.resize(dimension);
    for (uint32_t j = 0; j < dimension; ++j) {
      const uint32_t bits = GetLe<uint32_t>(cursor);
      cursor += 4;
      std::memcpy(&record.vector[j], &bits, sizeof(bits));
    }
    EMBAUDIT_RETURN_IF_ERROR(set.Append(std::move(record)));
  }
  return set;
}

std::string EncodeCsv(const EmbeddingSet& set) {
  std::string out = "group_id,label";
  for (size_t j = 0; j < set.dimension(); ++j) absl::StrAppend(&out, ",v", j);
  out.push_back('\n');
  char buffer[64];
  for (const EmbeddingRecord& record : set.records()) {
    absl::StrAppend(&out, record.group_id, ",", MembershipName(record.label));
    for (float component : record.vector) {
      // Shortest representation that parses back to the same binary32.
      auto result = std::to_chars(buffer, buffer + sizeof(buffer), component);
      out.push_back(',');
      out.append(buffer, result.ptr);
    }
    out.push_back('\n');
  }
  return out;
}

absl::StatusOr<EmbeddingSet> DecodeCsv(absl::string_view text,
                                       std::string source_tag) {
  std::vector<absl::string_view> lines = absl::StrSplit(text, '\n');
  if (!lines.empty() && StripCr(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) return MakeError(ErrorKind::kFormat, "CSV has no header");

  std::vector<absl::string_view> header =
      absl::StrSplit(StripCr(lines[0]), ',');
  if (header.size() < 3 || header[0] != "group_id" || header[1] != "label") {
    return MakeError(ErrorKind::kFormat,
                     "CSV header must be group_id,label,v0,...");
  }
  const size_t dimension = header.size() - 2;
  for (size_t j = 0; j < dimension; ++j) {
    if (header[j + 2] != absl::StrCat("v", j)) {
      return MakeError(ErrorKind::kFormat,
                       absl::StrCat("CSV header column ", j + 2, " must be v",
                                    j));
    }
  }

  EMBAUDIT_ASSIGN_OR_RETURN(
      EmbeddingSet set,
      EmbeddingSet::Create(dimension, {}, std::move(source_tag)));
  for (size_t row = 1; row < lines.size(); ++row) {
    const size_t index = row - 1;
    std::vector<absl::string_view> fields =
        absl::StrSplit(StripCr(lines[row]), ',');
    if (fields.size() != dimension + 2) {
      return MakeError(ErrorKind::kValidation,
                       absl::StrCat("record ", index, ": expected ", dimension,
                                    " components, got ",
                                    fields.size() < 2 ? 0 : fields.size() - 2));
    }
    EmbeddingRecord record;
    auto [gptr, gerr] = std::from_chars(
        fields[0].data(), fields[0].data() + fields[0].size(),
        record.group_id);
    if (gerr != std::errc() || gptr != fields[0].data() + fields[0].size()) {
      return MakeError(ErrorKind::kFormat,
                       absl::StrCat("record ", index, ": bad group_id '",
                                    fields[0], "'"));
    }
    auto label = ParseMembership(fields[1]);
    if (!label.ok()) {
      return MakeError(ErrorKind::kFormat, absl::StrCat("record ", index, ": ",
                                                        label.status().message()));
    }
    record.label = *label;
    record.vector.resize(dimension);
    for (size_t j = 0; j < dimension; ++j) {
      absl::string_view field = fields[j + 2];
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(),
                                       record.vector[j]);
      if (ec == std::errc::result_out_of_range) {
        return MakeError(ErrorKind::kValidation,
                         absl::StrCat("record ", index, ": component ", j,
                                      " is not finite"));
      }
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        return MakeError(ErrorKind::kFormat,
                         absl::StrCat("record ", index, ": bad component '",
                                      field, "'"));
      }
    }
    EMBAUDIT_RETURN_IF_ERROR(set.Append(std::move(record)));
  }
  return set;
}

absl::StatusOr<std::string> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("cannot open '", path.string(), "'"));
  }
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("read failed for '", path.string(), "'"));
  }
  return bytes;
}

absl::Status WriteFileBytes(const std::filesystem::path& path,
                            absl::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("cannot open '", path.string(),
                                  "' for writing"));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("write failed for '", path.string(), "'"));
  }
  return absl::OkStatus();
}

absl::StatusOr<EmbeddingSet> ReadDump(const std::filesystem::path& path,
                                      DumpFormat format) {
  EMBAUDIT_ASSIGN_OR_RETURN(std::string bytes, ReadFileBytes(path));
  absl::StatusOr<EmbeddingSet> set = format == DumpFormat::kBinary
                                         ? DecodeEmb1(bytes, path.string())
                                         : DecodeCsv(bytes, path.string());
  if (!set.ok()) {
    absl::Status annotated(set.status().code(),
                           absl::StrCat(path.string(), ": ",
                                        set.status().message()));
    set.status().ForEachPayload(
        [&](absl::string_view url, const absl::Cord& payload) {
          annotated.SetPayload(url, payload);
        });
    return annotated;
  }
  return set;
}

absl::Status WriteDump(const EmbeddingSet& set,
                       const std::filesystem::path& path, DumpFormat format) {
  return WriteFileBytes(
      path, format == DumpFormat::kBinary ? EncodeEmb1(set) : EncodeCsv(set));
}

namespace {

// Returns the records of `source` whose group is in `groups`, relabeled to
// `label`, in source order.
absl::StatusOr<EmbeddingSet> SelectGroups(
    const EmbeddingSet& source, const absl::flat_hash_set<uint64_t>& groups,
    Membership label) {
  std::vector<EmbeddingRecord> records;
  for (const EmbeddingRecord& record : source.records()) {
    if (!groups.contains(record.group_id)) continue;
    EmbeddingRecord copy = record;
    copy.label = label;
    records.push_back(std::move(copy));
  }
  return EmbeddingSet::Create(source.dimension(), std::move(records),
                              source.source_tag());
}

absl::Status CheckSide(const EmbeddingSet& set, Membership side,
                       absl::string_view name) {
  if (set.empty()) {
    return MakeError(ErrorKind::kValidation,
                     absl::StrCat(name, " set is empty"));
  }
  for (size_t i = 0; i < set.size(); ++i) {
    const Membership label = set[i].label;
    if (label != side && label != Membership::kUnknown) {
      return MakeError(ErrorKind::kValidation,
                       absl::StrCat(name, " record ", i, " is labeled ",
                                    MembershipName(label)));
    }
  }
  return absl::OkStatus();
}

struct SidePartition {
  absl::flat_hash_set<uint64_t> attack;
  absl::flat_hash_set<uint64_t> eval;
};

SidePartition PartitionGroups(std::vector<uint64_t> groups, size_t attack,
                              size_t eval, uint64_t seed) {
  CounterRng rng(seed);
  Shuffle(std::span<uint64_t>(groups), rng);
  SidePartition partition;
  partition.attack.insert(groups.begin(), groups.begin() + attack);
  partition.eval.insert(groups.begin() + attack,
                        groups.begin() + attack + eval);
  return partition;
}

absl::StatusOr<DatasetSplit> SplitByCounts(const EmbeddingSet& members,
                                           const EmbeddingSet& nonmembers,
                                           const SplitCounts& counts,
                                           uint64_t seed) {
  const SidePartition member_groups =
      PartitionGroups(members.GroupIds(), counts.attack_members,
                      counts.eval_members, DeriveSeed(seed, "split/members"));
  const SidePartition nonmember_groups = PartitionGroups(
      nonmembers.GroupIds(), counts.attack_nonmembers, counts.eval_nonmembers,
      DeriveSeed(seed, "split/nonmembers"));
  EMBAUDIT_ASSIGN_OR_RETURN(
      EmbeddingSet attack_members,
      SelectGroups(members, member_groups.attack, Membership::kMember));
  EMBAUDIT_ASSIGN_OR_RETURN(
      EmbeddingSet eval_members,
      SelectGroups(members, member_groups.eval, Membership::kMember));
  EMBAUDIT_ASSIGN_OR_RETURN(
      EmbeddingSet attack_nonmembers,
      SelectGroups(nonmembers, nonmember_groups.attack, Membership::kNonMember));
  EMBAUDIT_ASSIGN_OR_RETURN(
      EmbeddingSet eval_nonmembers,
      SelectGroups(nonmembers, nonmember_groups.eval, Membership::kNonMember));
  return DatasetSplit{std::move(attack_members), std::move(attack_nonmembers),
                      std::move(eval_members), std::move(eval_nonmembers)};
}

absl::Status CheckSplitInputs(const EmbeddingSet& members,
                              const EmbeddingSet& nonmembers) {
  EMBAUDIT_RETURN_IF_ERROR(CheckSide(members, Membership::kMember, "member"));
  EMBAUDIT_RETURN_IF_ERROR(
      CheckSide(nonmembers, Membership::kNonMember, "non-member"));
  if (members.dimension() != nonmembers.dimension()) {
    return MakeError(ErrorKind::kValidation,
                     absl::StrCat("dimension mismatch: members ",
                                  members.dimension(), ", non-members ",
                                  nonmembers.dimension()));
  }
  const std::vector<uint64_t> member_ids = members.GroupIds();
  const std::vector<uint64_t> nonmember_ids = nonmembers.GroupIds();
  std::vector<uint64_t> shared;
  std::set_intersection(member_ids.begin(), member_ids.end(),
                        nonmember_ids.begin(), nonmember_ids.end(),
                        std::back_inserter(shared));
  if (!shared.empty()) {
    return MakeError(ErrorKind::kValidation,
                     absl::StrCat("group ", shared.front(),
                                  " appears in both member and non-member "
                                  "sets (",
                                  shared.size(), " shared groups)"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<DatasetSplit> MakeSplit(const EmbeddingSet& members,
                                       const EmbeddingSet& nonmembers,
                                       double attack_fraction, uint64_t seed) {
  if (!(attack_fraction > 0.0 && attack_fraction < 1.0)) {
    return MakeError(ErrorKind::kConfig,
                     absl::StrCat("attack fraction ", attack_fraction,
                                  " is outside (0, 1)"));
  }
  EMBAUDIT_RETURN_IF_ERROR(CheckSplitInputs(members, nonmembers));
  const size_t member_groups = members.GroupIds().size();
  const size_t nonmember_groups = nonmembers.GroupIds().size();
  SplitCounts counts;
  counts.attack_members =
      static_cast<size_t>(std::floor(attack_fraction * member_groups));
  counts.attack_nonmembers =
      static_cast<size_t>(std::floor(attack_fraction * nonmember_groups));
  counts.eval_members = member_groups - counts.attack_members;
  counts.eval_nonmembers = nonmember_groups - counts.attack_nonmembers;
  if (counts.attack_members == 0 || counts.attack_nonmembers == 0 ||
      counts.eval_members == 0 || counts.eval_nonmembers == 0) {
    return MakeError(
        ErrorKind::kConfig,
        absl::StrCat("attack fraction ", attack_fraction,
                     " leaves an empty partition (", member_groups,
                     " member groups, ", nonmember_groups,
                     " non-member groups)"));
  }
  return SplitByCounts(members, nonmembers, counts, seed);
}

absl::StatusOr<DatasetSplit> MakeSplit(const EmbeddingSet& members,
                                       const EmbeddingSet& nonmembers,
                                       const SplitCounts& counts,
                                       uint64_t seed) {
  EMBAUDIT_RETURN_IF_ERROR(CheckSplitInputs(members, nonmembers));
  if (counts.attack_members == 0 || counts.attack_nonmembers == 0 ||
      counts.eval_members == 0 || counts.eval_nonmembers == 0) {
    return MakeError(ErrorKind::kConfig, "split counts must all be >= 1");
  }
  const size_t member_groups = members.GroupIds().size();
  const size_t nonmember_groups = nonmembers.GroupIds().size();
  if (counts.attack_members + counts.eval_members > member_groups) {
    return MakeError(ErrorKind::kConfig,
                     absl::StrCat("split needs ",
                                  counts.attack_members + counts.eval_members,
                                  " member groups, have ", member_groups));
  }
  if (counts.attack_nonmembers + counts.eval_nonmembers > nonmember_groups) {
    return MakeError(
        ErrorKind::kConfig,
        absl::StrCat("split needs ",
                     counts.attack_nonmembers + counts.eval_nonmembers,
                     " non-member groups, have ", nonmember_groups));
  }
  return SplitByCounts(members, nonmembers, counts, seed);
}

}  // namespace embaudit
