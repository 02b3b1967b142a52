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

// embaudit command-line tool. Talks to the library only through the C API.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "embaudit/embaudit.h"

namespace {

struct RunFlags {
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
  std::string format;

  ea_run_options Options() const {
    ea_run_options options{};
    options.config_path = config.c_str();
    options.out_dir = out.empty() ? nullptr : out.c_str();
    options.has_seed = seed.has_value() ? 1 : 0;
    options.seed = seed.value_or(0);
    options.format = format.empty() ? nullptr : format.c_str();
    return options;
  }
};

void AddRunFlags(CLI::App* command, RunFlags& flags,
                 const std::vector<std::string>& formats) {
  command->add_option("--config", flags.config, "JSON config file")
      ->required();
  command->add_option("--out", flags.out, "Output directory");
  command->add_option("--seed", flags.seed, "Root seed override");
  command->add_option("--format", flags.format, "Output format")
      ->check(CLI::IsMember(formats));
}

int Finish(ea_status status) {
  if (status != EA_OK) {
    std::fprintf(stderr, "embaudit: %s error: %s\n", ea_status_name(status),
                 ea_last_error());
  }
  return ea_exit_code_for(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Membership-privacy audit of embedding dumps"};
  app.set_version_flag("--version", std::string(ea_version()));
  app.require_subcommand(1);

  RunFlags audit_flags;
  CLI::App* audit = app.add_subcommand("audit", "Run the configured attacks");
  AddRunFlags(audit, audit_flags, {"json", "csv"});

  RunFlags sweep_flags;
  CLI::App* sweep =
      app.add_subcommand("sweep-p", "LpLA accuracy for every configured p");
  AddRunFlags(sweep, sweep_flags, {"csv"});

  RunFlags split_flags;
  CLI::App* split =
      app.add_subcommand("split", "Write the attack/eval partitions as EMB1");
  AddRunFlags(split, split_flags, {"binary"});

  RunFlags synth_flags;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate synthetic member/non-member dumps");
  AddRunFlags(synth, synth_flags, {"binary", "csv"});

  std::vector<std::string> histogram_dumps;
  double histogram_p = 2.0;
  size_t histogram_bins = 50;
  std::string histogram_out = "histogram.csv";
  CLI::App* histogram =
      app.add_subcommand("histogram", "Binned p-norm counts per label");
  histogram->add_option("dumps", histogram_dumps, "Dump files")->required();
  histogram->add_option("--p", histogram_p, "Norm order");
  histogram->add_option("--bins", histogram_bins, "Bin count");
  histogram->add_option("--out", histogram_out, "Output CSV path");
  histogram->add_option("--format", "Output format")
      ->check(CLI::IsMember({"csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*audit) {
    const ea_run_options options = audit_flags.Options();
    return Finish(ea_cmd_audit(&options));
  }
  if (*sweep) {
    const ea_run_options options = sweep_flags.Options();
    char* csv = nullptr;
    const ea_status status = ea_cmd_sweep_p(&options, &csv);
    if (status == EA_OK) std::fputs(csv, stdout);
    ea_string_free(csv);
    return Finish(status);
  }
  if (*split) {
    const ea_run_options options = split_flags.Options();
    return Finish(ea_cmd_split(&options));
  }
  if (*synth) {
    const ea_run_options options = synth_flags.Options();
    double bayes = 0.0;
    const ea_status status = ea_cmd_synth(&options, &bayes);
    if (status == EA_OK) std::printf("bayes_accuracy %.6f\n", bayes);
    return Finish(status);
  }
  std::vector<const char*> paths;
  for (const std::string& dump : histogram_dumps) paths.push_back(dump.c_str());
  return Finish(ea_cmd_histogram(paths.data(), paths.size(), histogram_p,
                                 histogram_bins, histogram_out.c_str()));
}
