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

#include <cmath>
#include <cstring>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace embaudit {
namespace {

using ::embaudit::testing::KindOf;

EmbeddingRecord Rec(uint64_t group, Membership label, std::vector<float> v) {
  return {group, label, std::move(v)};
}

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}
void PutU64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}
void PutF32(std::string& out, float f) {
  uint32_t bits;
  std::memcpy(&bits, &f, 4);
  PutU32(out, bits);
}

// Hand-assembled EMB1 bytes.
std::string Emb1Bytes(uint32_t dim, const std::vector<EmbeddingRecord>& recs,
                      bool labels) {
  std::string out = "EMB1";
  PutU32(out, 1);
  PutU32(out, dim);
  PutU64(out, recs.size());
  out.push_back(labels ? 1 : 0);
  for (const EmbeddingRecord& r : recs) {
    PutU64(out, r.group_id);
    if (labels) out.push_back(static_cast<char>(r.label));
    for (float f : r.vector) PutF32(out, f);
  }
  return out;
}

TEST(EmbeddingSetTest, CreateValidates) {
  EXPECT_TRUE(EmbeddingSet::Create(2, {Rec(1, Membership::kMember, {1, 2})}).ok());
  auto wrong_dim = EmbeddingSet::Create(2, {Rec(1, Membership::kMember, {1})});
  EXPECT_EQ(KindOf(wrong_dim.status()), ErrorKind::kValidation);
  auto nan = EmbeddingSet::Create(
      1, {Rec(1, Membership::kMember, {0}),
          Rec(2, Membership::kMember, {std::numeric_limits<float>::quiet_NaN()})});
  EXPECT_EQ(KindOf(nan.status()), ErrorKind::kValidation);
  EXPECT_NE(nan.status().message().find("1"), absl::string_view::npos);
  auto inf = EmbeddingSet::Create(
      1, {Rec(1, Membership::kMember, {std::numeric_limits<float>::infinity()})});
  EXPECT_EQ(KindOf(inf.status()), ErrorKind::kValidation);
  auto conflict = EmbeddingSet::Create(1, {Rec(4, Membership::kMember, {0}),
                                           Rec(4, Membership::kNonMember, {0})});
  EXPECT_EQ(KindOf(conflict.status()), ErrorKind::kValidation);
}

TEST(EmbeddingSetTest, AppendAndGroups) {
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet set, EmbeddingSet::Create(1, {}));
  EA_ASSERT_OK(set.Append(Rec(5, Membership::kMember, {1})));
  EA_ASSERT_OK(set.Append(Rec(2, Membership::kMember, {2})));
  EA_ASSERT_OK(set.Append(Rec(5, Membership::kMember, {3})));
  EXPECT_EQ(KindOf(set.Append(Rec(5, Membership::kUnknown, {3}))),
            ErrorKind::kValidation);
  EXPECT_EQ(KindOf(set.Append(Rec(6, Membership::kUnknown, {3, 4}))),
            ErrorKind::kValidation);
  EXPECT_EQ(set.size(), 3u);
  EXPECT_EQ(set.GroupIds(), (std::vector<uint64_t>{2, 5}));
}

TEST(Emb1Test, EncodeMatchesHandAssembledBytes) {
  std::vector<EmbeddingRecord> recs = {
      Rec(7, Membership::kMember, {1.5f, -2.0f}),
      Rec(0xFFFFFFFFFFULL, Membership::kNonMember, {0.0f, 3.25f}),
      Rec(9, Membership::kUnknown, {-0.0f, 1e-40f})};
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet set, EmbeddingSet::Create(2, recs));
  const std::string expected = Emb1Bytes(2, recs, true);
  EXPECT_EQ(expected.size(), kEmb1HeaderSize + 3 * (8 + 1 + 8));
  EXPECT_EQ(EncodeEmb1(set), expected);
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet back, DecodeEmb1(expected));
  EXPECT_EQ(back, set);
  EXPECT_TRUE(std::signbit(back[2].vector[0]));
}

TEST(Emb1Test, AllUnknownOmitsLabels) {
  std::vector<EmbeddingRecord> recs = {Rec(1, Membership::kUnknown, {1}),
                                       Rec(2, Membership::kUnknown, {2})};
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet set, EmbeddingSet::Create(1, recs));
  EXPECT_EQ(EncodeEmb1(set), Emb1Bytes(1, recs, false));
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet back,
                          DecodeEmb1(Emb1Bytes(1, recs, false)));
  EXPECT_EQ(back, set);
}

TEST(Emb1Test, EmptySet) {
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet set, EmbeddingSet::Create(3, {}));
  const std::string bytes = EncodeEmb1(set);
  EXPECT_EQ(bytes.size(), kEmb1HeaderSize);
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet back, DecodeEmb1(bytes));
  EXPECT_EQ(back.dimension(), 3u);
  EXPECT_TRUE(back.empty());
}

TEST(Emb1Test, RejectsMalformedInput) {
  std::vector<EmbeddingRecord> recs = {Rec(1, Membership::kMember, {1, 2})};
  const std::string good = Emb1Bytes(2, recs, true);
  auto kind = [](absl::string_view bytes) {
    return KindOf(DecodeEmb1(bytes).status());
  };
  EXPECT_EQ(kind(good.substr(0, 10)), ErrorKind::kFormat);
  EXPECT_EQ(kind(good.substr(0, good.size() - 1)), ErrorKind::kFormat);
  EXPECT_EQ(kind(good + "x"), ErrorKind::kFormat);
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_EQ(kind(bad_magic), ErrorKind::kFormat);
  std::string bad_version = good;
  bad_version[4] = 2;
  EXPECT_EQ(kind(bad_version), ErrorKind::kFormat);
  std::string bad_flags = good;
  bad_flags[20] = 3;
  EXPECT_EQ(kind(bad_flags), ErrorKind::kFormat);
  std::string bad_label = good;
  bad_label[kEmb1HeaderSize + 8] = 7;
  EXPECT_EQ(kind(bad_label), ErrorKind::kFormat);
  std::string nan_value = good;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(&nan_value[kEmb1HeaderSize + 9], &nan, 4);
  EXPECT_EQ(kind(nan_value), ErrorKind::kValidation);
  std::string huge_count = good;
  huge_count[19] = 0x7F;
  EXPECT_EQ(kind(huge_count), ErrorKind::kFormat);
}

TEST(CsvTest, RoundTripExact) {
  std::vector<EmbeddingRecord> recs = {
      Rec(3, Membership::kMember, {0.1f, -1e-38f, 3.4028235e38f}),
      Rec(4, Membership::kNonMember, {1.0f / 3.0f, -0.0f, 1e-45f}),
      Rec(5, Membership::kUnknown, {0, 0, 0})};
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet set, EmbeddingSet::Create(3, recs));
  const std::string csv = EncodeCsv(set);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "group_id,label,v0,v1,v2");
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet back, DecodeCsv(csv));
  EXPECT_EQ(back, set);
}

TEST(CsvTest, RejectsBadRows) {
  EXPECT_EQ(KindOf(DecodeCsv("group_id,label,v0\n1,member,1,2\n").status()),
            ErrorKind::kValidation);
  EXPECT_EQ(KindOf(DecodeCsv("group,label,v0\n1,member,1\n").status()),
            ErrorKind::kFormat);
  EXPECT_EQ(KindOf(DecodeCsv("group_id,label,v0\n1,maybe,1\n").status()),
            ErrorKind::kFormat);
  EXPECT_EQ(KindOf(DecodeCsv("group_id,label,v0\n1,member,abc\n").status()),
            ErrorKind::kFormat);
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet ok,
                          DecodeCsv("group_id,label,v0\n1,non_member,2.5\n"));
  EXPECT_EQ(ok[0].label, Membership::kNonMember);
  EXPECT_EQ(ok[0].vector[0], 2.5f);
}

TEST(DumpFileTest, ReadWriteAndIoErrors) {
  const auto dir = testing::TestDir();
  EA_ASSERT_OK_AND_ASSIGN(
      EmbeddingSet set,
      EmbeddingSet::Create(2, {Rec(1, Membership::kMember, {1, 2})}));
  EA_ASSERT_OK(WriteDump(set, dir / "a.emb1", DumpFormat::kBinary));
  EA_ASSERT_OK(WriteDump(set, dir / "a.csv", DumpFormat::kCsv));
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet a, ReadDump(dir / "a.emb1", DumpFormat::kBinary));
  EA_ASSERT_OK_AND_ASSIGN(EmbeddingSet b, ReadDump(dir / "a.csv", DumpFormat::kCsv));
  EXPECT_EQ(a, set);
  EXPECT_EQ(b, set);
  EXPECT_EQ(DumpFormatForPath("x/y.csv"), DumpFormat::kCsv);
  EXPECT_EQ(DumpFormatForPath("x/y.emb1"), DumpFormat::kBinary);
  auto missing = ReadDump(dir / "missing.emb1", DumpFormat::kBinary);
  EXPECT_EQ(KindOf(missing.status()), ErrorKind::kIo);
  EXPECT_NE(missing.status().message().find("missing.emb1"),
            absl::string_view::npos);
  EA_ASSERT_OK(WriteFileBytes(dir / "junk.emb1", "junk"));
  auto junk = ReadDump(dir / "junk.emb1", DumpFormat::kBinary);
  EXPECT_EQ(KindOf(junk.status()), ErrorKind::kFormat);
  EXPECT_NE(junk.status().message().find("junk.emb1"), absl::string_view::npos);
}

EmbeddingSet Side(uint64_t first_group, size_t groups, size_t views,
                  Membership label) {
  std::vector<EmbeddingRecord> recs;
  for (size_t g = 0; g < groups; ++g) {
    for (size_t v = 0; v < views; ++v) {
      recs.push_back(Rec(first_group + g, label,
                         {static_cast<float>(g), static_cast<float>(v)}));
    }
  }
  return *EmbeddingSet::Create(2, std::move(recs));
}

std::set<uint64_t> Groups(const EmbeddingSet& s) {
  auto ids = s.GroupIds();
  return {ids.begin(), ids.end()};
}

TEST(SplitTest, FractionPartitionsGroupsDisjointly) {
  const EmbeddingSet members = Side(0, 10, 3, Membership::kMember);
  const EmbeddingSet nonmembers = Side(100, 20, 3, Membership::kUnknown);
  EA_ASSERT_OK_AND_ASSIGN(DatasetSplit split, MakeSplit(members, nonmembers, 0.25, 1));
  EXPECT_EQ(Groups(split.attack_members).size(), 2u);
  EXPECT_EQ(Groups(split.eval_members).size(), 8u);
  EXPECT_EQ(Groups(split.attack_nonmembers).size(), 5u);
  EXPECT_EQ(Groups(split.eval_nonmembers).size(), 15u);
  EXPECT_EQ(split.attack_members.size(), 6u);
  std::set<uint64_t> all;
  for (const EmbeddingSet* s : {&split.attack_members, &split.eval_members,
                                &split.attack_nonmembers, &split.eval_nonmembers}) {
    for (uint64_t g : Groups(*s)) EXPECT_TRUE(all.insert(g).second);
  }
  EXPECT_EQ(all.size(), 30u);
  for (const auto& r : split.eval_nonmembers.records()) {
    EXPECT_EQ(r.label, Membership::kNonMember);
  }
  for (const auto& r : split.attack_members.records()) {
    EXPECT_EQ(r.label, Membership::kMember);
  }
  EA_ASSERT_OK_AND_ASSIGN(DatasetSplit again, MakeSplit(members, nonmembers, 0.25, 1));
  EXPECT_EQ(again.attack_members, split.attack_members);
  EXPECT_EQ(again.eval_nonmembers, split.eval_nonmembers);
  EA_ASSERT_OK_AND_ASSIGN(DatasetSplit other, MakeSplit(members, nonmembers, 0.25, 2));
  EXPECT_NE(Groups(other.attack_nonmembers), Groups(split.attack_nonmembers));
}

TEST(SplitTest, ExplicitCounts) {
  const EmbeddingSet members = Side(0, 10, 1, Membership::kMember);
  const EmbeddingSet nonmembers = Side(100, 10, 1, Membership::kNonMember);
  EA_ASSERT_OK_AND_ASSIGN(
      DatasetSplit split, MakeSplit(members, nonmembers, SplitCounts{2, 3, 4, 5}, 1));
  EXPECT_EQ(split.attack_members.size(), 2u);
  EXPECT_EQ(split.attack_nonmembers.size(), 3u);
  EXPECT_EQ(split.eval_members.size(), 4u);
  EXPECT_EQ(split.eval_nonmembers.size(), 5u);
  auto too_many = MakeSplit(members, nonmembers, SplitCounts{6, 1, 5, 1}, 1);
  EXPECT_EQ(KindOf(too_many.status()), ErrorKind::kConfig);
}

TEST(SplitTest, Errors) {
  const EmbeddingSet members = Side(0, 4, 1, Membership::kMember);
  const EmbeddingSet nonmembers = Side(100, 4, 1, Membership::kNonMember);
  EXPECT_EQ(KindOf(MakeSplit(members, nonmembers, 0.1, 1).status()),
            ErrorKind::kConfig);
  EXPECT_EQ(KindOf(MakeSplit(members, nonmembers, 1.0, 1).status()),
            ErrorKind::kConfig);
  const EmbeddingSet clash = Side(2, 4, 1, Membership::kNonMember);
  EXPECT_EQ(KindOf(MakeSplit(members, clash, 0.5, 1).status()),
            ErrorKind::kValidation);
  EXPECT_EQ(KindOf(MakeSplit(members, members, 0.5, 1).status()),
            ErrorKind::kValidation);
}

}  // namespace
}  // namespace embaudit
