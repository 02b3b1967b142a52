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

// Learned baseline attacks over a DatasetSplit: Fe-MI on raw embeddings,
// EncoderMI on sorted view similarities, SD-MI on anchor distances weighted
// by a learned selector.

#ifndef EMBAUDIT_LEARNED_ATTACKS_H_
#define EMBAUDIT_LEARNED_ATTACKS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "embaudit/attack_net.h"
#include "embaudit/decision.h"
#include "embaudit/emb_data.h"

namespace embaudit {

struct LearnedAttackConfig {
  std::vector<size_t> hidden = {128, 64};
  Activation activation = Activation::kRelu;
  size_t epochs = 200;
  size_t batch_size = 128;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  uint64_t seed = 0;
};

struct FeMiConfig : LearnedAttackConfig {
  FeMiConfig() { epochs = 500; }
};

struct EncoderMiConfig : LearnedAttackConfig {
  // Expected views per group; 0 accepts any uniform group size >= 2.
  size_t views = 10;
};

struct SdmiConfig {
  size_t anchors = 2000;
  std::vector<size_t> selector_hidden = {256};
  Activation selector_activation = Activation::kRelu;
  std::vector<size_t> attacker_hidden = {256, 128, 64, 32};
  Activation attacker_activation = Activation::kTanh;
  size_t epochs = 200;
  size_t batch_size = 128;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  uint64_t seed = 0;
};

struct LearnedAttackResult {
  AttackOutcome outcome;
  MlpClassifier classifier;
};

absl::StatusOr<LearnedAttackResult> RunFeMi(const DatasetSplit& split,
                                            const FeMiConfig& config);

// One decision per eval group (ascending group id within each side).
absl::StatusOr<LearnedAttackResult> RunEncoderMi(
    const DatasetSplit& split, const EncoderMiConfig& config);

struct SdmiResult {
  AttackOutcome outcome;
  SdmiAttacker attacker;
  // Pool indices of the chosen anchors, in anchor order.
  std::vector<size_t> anchor_indices;
};

// Anchors are drawn uniformly without replacement from `anchor_pool`, or
// from the attack non-members when it is null.
absl::StatusOr<SdmiResult> RunSdmi(const DatasetSplit& split,
                                   const SdmiConfig& config,
                                   const EmbeddingSet* anchor_pool = nullptr);

}  // namespace embaudit

#endif  // EMBAUDIT_LEARNED_ATTACKS_H_
