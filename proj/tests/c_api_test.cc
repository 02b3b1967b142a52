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

#include "embaudit/embaudit.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"

namespace {

namespace fs = std::filesystem;

fs::path FreshDir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  fs::path dir = fs::temp_directory_path() / "embaudit_c_api" /
                 (std::string(info->test_suite_name()) + "." + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int RunCli(const std::string& args, const fs::path& log) {
  const std::string command = std::string("\"") + EMBAUDIT_CLI_PATH + "\" " +
                              args + " > \"" + log.string() + "\" 2>&1";
  const int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

TEST(CApiTest, SetLifecycleAndRoundTrip) {
  const fs::path dir = FreshDir();
  ea_set* set = nullptr;
  ASSERT_EQ(ea_set_create(3, &set), EA_OK);
  const float a[] = {1, 2, 3};
  const float b[] = {-1, 0, 0.5f};
  ASSERT_EQ(ea_set_append(set, 7, EA_LABEL_MEMBER, a, 3), EA_OK);
  ASSERT_EQ(ea_set_append(set, 8, EA_LABEL_NON_MEMBER, b, 3), EA_OK);
  EXPECT_EQ(ea_set_append(set, 9, EA_LABEL_MEMBER, a, 2), EA_ERR_VALIDATION);
  EXPECT_NE(std::string(ea_last_error()), "");
  EXPECT_EQ(ea_set_append(set, 9, 4, a, 3), EA_ERR_VALIDATION);
  EXPECT_EQ(ea_set_size(set), 2u);
  EXPECT_EQ(ea_set_dimension(set), 3u);

  for (const char* name : {"s.emb1", "s.csv"}) {
    const std::string path = (dir / name).string();
    ASSERT_EQ(ea_set_write(set, path.c_str()), EA_OK);
    ea_set* back = nullptr;
    ASSERT_EQ(ea_set_read(path.c_str(), &back), EA_OK) << ea_last_error();
    ASSERT_EQ(ea_set_size(back), 2u);
    uint64_t group = 0;
    uint8_t label = 0;
    const float* values = nullptr;
    ASSERT_EQ(ea_set_record(back, 1, &group, &label, &values), EA_OK);
    EXPECT_EQ(group, 8u);
    EXPECT_EQ(label, EA_LABEL_NON_MEMBER);
    EXPECT_EQ(values[2], 0.5f);
    EXPECT_EQ(ea_set_record(back, 2, &group, &label, &values), EA_ERR_DOMAIN);
    ea_set_free(back);
  }
  ea_set* missing = nullptr;
  EXPECT_EQ(ea_set_read((dir / "none.emb1").c_str(), &missing), EA_ERR_IO);
  EXPECT_EQ(ea_set_read(nullptr, &missing), EA_ERR_INVALID_ARGUMENT);
  ea_set_free(set);
  ea_set_free(nullptr);
}

TEST(CApiTest, NormModelAndMetrics) {
  const float v[] = {3, 4};
  double norm = 0;
  ASSERT_EQ(ea_p_norm(v, 2, 2.0, &norm), EA_OK);
  EXPECT_EQ(norm, 5.0);
  EXPECT_EQ(ea_p_norm(v, 2, -1.0, &norm), EA_ERR_DOMAIN);

  const double m[] = {9, 10, 11};
  const double n[] = {11, 12, 13};
  ea_norm_model* model = nullptr;
  ASSERT_EQ(ea_norm_model_fit(m, 3, n, 3, 2.0, 0.5, &model), EA_OK);
  double mm, ms, nm, ns;
  ASSERT_EQ(ea_norm_model_params(model, &mm, &ms, &nm, &ns), EA_OK);
  EXPECT_EQ(mm, 10.0);
  EXPECT_EQ(ms, 1.0);
  EXPECT_EQ(nm, 12.0);
  double posterior;
  uint8_t verdict;
  ASSERT_EQ(ea_norm_model_posterior(model, 9.0, &posterior, &verdict), EA_OK);
  EXPECT_EQ(verdict, EA_LABEL_MEMBER);
  EXPECT_NEAR(posterior, 1.0 / (1.0 + std::exp(-4.0)), 1e-12);
  ea_norm_model_free(model);
  const double flat[] = {1, 1};
  EXPECT_EQ(ea_norm_model_fit(flat, 2, n, 3, 2.0, 0.5, &model),
            EA_ERR_DEGENERATE_FIT);

  const double scores[] = {0.9, 0.2, 0.3};
  const uint8_t verdicts[] = {1, 0, 1};
  const uint8_t truths[] = {1, 1, 0};
  const double levels[] = {0.5};
  ea_metrics metrics;
  double tpr;
  ASSERT_EQ(ea_compute_metrics(scores, verdicts, truths, 3, levels, 1, &metrics, &tpr),
            EA_OK);
  EXPECT_EQ(metrics.tp, 1u);
  EXPECT_EQ(metrics.fp, 1u);
  EXPECT_EQ(metrics.fn, 1u);
  EXPECT_EQ(tpr, 0.5);
  EXPECT_EQ(ea_compute_metrics(scores, verdicts, verdicts, 3, levels, 1, &metrics,
                               &tpr),
            EA_OK);
  const uint8_t unknown[] = {255, 1, 0};
  EXPECT_EQ(ea_compute_metrics(scores, verdicts, unknown, 3, nullptr, 0, &metrics,
                               nullptr),
            EA_ERR_METRIC);
  EXPECT_NEAR(ea_bayes_optimal_accuracy(10, 1, 12, 1, 0.5), 0.841344746, 1e-9);
}

TEST(CApiTest, KnnUtility) {
  ea_set* train = nullptr;
  ea_set* test = nullptr;
  ASSERT_EQ(ea_set_create(2, &train), EA_OK);
  ASSERT_EQ(ea_set_create(2, &test), EA_OK);
  const float x[] = {1, 0}, y[] = {0, 1};
  ea_set_append(train, 0, EA_LABEL_UNKNOWN, x, 2);
  ea_set_append(train, 1, EA_LABEL_UNKNOWN, y, 2);
  ea_set_append(test, 2, EA_LABEL_UNKNOWN, y, 2);
  const uint32_t train_classes[] = {4, 6};
  const uint32_t test_classes[] = {6};
  double accuracy = 0;
  ASSERT_EQ(ea_knn_utility(train, train_classes, test, test_classes, 1, &accuracy),
            EA_OK);
  EXPECT_EQ(accuracy, 1.0);
  EXPECT_EQ(ea_knn_utility(train, train_classes, test, test_classes, 5, &accuracy),
            EA_ERR_DOMAIN);
  ea_set_free(train);
  ea_set_free(test);
}

TEST(CApiTest, StatusHelpers) {
  EXPECT_EQ(ea_exit_code_for(EA_OK), 0);
  EXPECT_EQ(ea_exit_code_for(EA_ERR_CONFIG), 2);
  EXPECT_EQ(ea_exit_code_for(EA_ERR_VALIDATION), 2);
  EXPECT_EQ(ea_exit_code_for(EA_ERR_FORMAT), 2);
  EXPECT_EQ(ea_exit_code_for(EA_ERR_IO), 3);
  EXPECT_EQ(ea_exit_code_for(EA_ERR_INTERNAL), 4);
  EXPECT_STREQ(ea_status_name(EA_ERR_DEGENERATE_FIT), "degenerate_fit");
  EXPECT_STREQ(ea_version(), "0.1.0");
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = FreshDir();
    WriteText(dir_ / "synth.json", R"({
      "dimension": 16, "seed": 4,
      "member": {"mean": 10, "stddev": 1, "count": 200},
      "nonmember": {"mean": 12, "stddev": 1, "count": 200},
      "output_dir": "dumps"})");
    ASSERT_EQ(RunCli("synth --config " + (dir_ / "synth.json").string(),
                     dir_ / "synth.log"),
              0)
        << ReadText(dir_ / "synth.log");
  }

  std::string Audit(const std::string& extra) const {
    return R"({"member_dump": "dumps/member.emb1",
               "nonmember_dump": "dumps/nonmember.emb1")" +
           extra + "}";
  }

  fs::path dir_;
};

TEST_F(CliTest, SynthEchoesBayesAccuracy) {
  EXPECT_EQ(ReadText(dir_ / "synth.log"), "bayes_accuracy 0.841345\n");
  EXPECT_TRUE(fs::exists(dir_ / "dumps/member.emb1"));
  EXPECT_TRUE(fs::exists(dir_ / "dumps/nonmember.emb1"));
}

TEST_F(CliTest, AuditWithOverrides) {
  WriteText(dir_ / "audit.json", Audit(R"(, "attacks": ["lpla"])"));
  const std::string out = (dir_ / "custom").string();
  ASSERT_EQ(RunCli("audit --config " + (dir_ / "audit.json").string() + " --out " +
                       out + " --seed 3 --format csv",
                   dir_ / "audit.log"),
            0)
      << ReadText(dir_ / "audit.log");
  const std::string report = ReadText(dir_ / "custom/lpla_p2.csv");
  EXPECT_EQ(report.substr(0, report.find('\n')),
            "attack,config_digest,seed,accuracy,precision,recall,tpr_at_fpr_0.001");
  EXPECT_NE(report.find(",3,"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "custom/summary.json"));
}

TEST_F(CliTest, ExitCodes) {
  WriteText(dir_ / "bad_attack.json", Audit(R"(, "attacks": ["lpla", "nope"])"));
  EXPECT_EQ(RunCli("audit --config " + (dir_ / "bad_attack.json").string(),
                   dir_ / "a.log"),
            2);
  EXPECT_NE(ReadText(dir_ / "a.log").find("attacks[1]"), std::string::npos);

  WriteText(dir_ / "missing.json",
            R"({"member_dump": "dumps/gone.emb1", "nonmember_dump": "dumps/nonmember.emb1"})");
  EXPECT_EQ(RunCli("audit --config " + (dir_ / "missing.json").string(),
                   dir_ / "b.log"),
            3);
  EXPECT_EQ(RunCli("audit --config " + (dir_ / "no_such_config.json").string(),
                   dir_ / "c.log"),
            3);
  WriteText(dir_ / "sweep.json", Audit(R"(, "p_values": [2])"));
  EXPECT_EQ(RunCli("sweep-p --config " + (dir_ / "sweep.json").string(),
                   dir_ / "d.log"),
            2);
  EXPECT_EQ(RunCli("audit", dir_ / "e.log"), 2);
  EXPECT_EQ(RunCli("frobnicate", dir_ / "f.log"), 2);
  EXPECT_EQ(RunCli("--help", dir_ / "g.log"), 0);
  WriteText(dir_ / "synth0.json", R"({
      "member": {"mean": 10, "stddev": 1, "count": 0},
      "nonmember": {"mean": 12, "stddev": 1, "count": 5}})");
  EXPECT_EQ(RunCli("synth --config " + (dir_ / "synth0.json").string(),
                   dir_ / "h.log"),
            2);
}

TEST_F(CliTest, SweepHistogramSplit) {
  WriteText(dir_ / "sweep.json", Audit(R"(, "p_values": [1, 2, 3], "output_dir": "sw")"));
  ASSERT_EQ(RunCli("sweep-p --config " + (dir_ / "sweep.json").string(),
                   dir_ / "sweep.log"),
            0);
  EXPECT_EQ(ReadText(dir_ / "sweep.log"), ReadText(dir_ / "sw/sweep_p.csv"));
  ASSERT_EQ(RunCli("histogram " + (dir_ / "dumps/member.emb1").string() + " " +
                       (dir_ / "dumps/nonmember.emb1").string() +
                       " --bins 7 --p 1 --out " + (dir_ / "h.csv").string(),
                   dir_ / "hist.log"),
            0);
  const std::string hist = ReadText(dir_ / "h.csv");
  EXPECT_EQ(std::count(hist.begin(), hist.end(), '\n'), 8);
  ASSERT_EQ(RunCli("split --config " + (dir_ / "sweep.json").string() + " --out " +
                       (dir_ / "parts").string(),
                   dir_ / "split.log"),
            0);
  ea_set* part = nullptr;
  ASSERT_EQ(ea_set_read((dir_ / "parts/eval_nonmembers.emb1").c_str(), &part), EA_OK);
  EXPECT_EQ(ea_set_size(part), 160u);
  ea_set_free(part);
}

}  // namespace
