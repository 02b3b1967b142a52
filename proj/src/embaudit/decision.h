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

#ifndef EMBAUDIT_DECISION_H_
#define EMBAUDIT_DECISION_H_

#include <cmath>
#include <cstdint>
#include <vector>

#include "embaudit/emb_data.h"

namespace embaudit {

// One attack verdict. `score` is oriented so that larger means "more likely
// member"; verdict is member exactly when score > 0.
struct MembershipDecision {
  double posterior = 0.5;
  Membership verdict = Membership::kNonMember;
  double score = 0.0;
};

// Builds a decision from an oriented score, with posterior = logistic(score).
// Positive scores too small to move the logistic off 0.5 are nudged one ulp
// so that posterior > 0.5 holds exactly when verdict is member.
inline MembershipDecision DecisionFromScore(double score) {
  MembershipDecision d;
  d.score = score;
  d.posterior = score >= 0 ? 1.0 / (1.0 + std::exp(-score))
                           : std::exp(score) / (1.0 + std::exp(score));
  if (score > 0) {
    d.verdict = Membership::kMember;
    if (d.posterior <= 0.5) d.posterior = std::nextafter(0.5, 1.0);
  } else {
    d.verdict = Membership::kNonMember;
    if (score < 0 && d.posterior >= 0.5) d.posterior = std::nextafter(0.5, 0.0);
  }
  return d;
}

struct ScoredEntry {
  double score = 0.0;
  Membership verdict = Membership::kNonMember;
  Membership truth = Membership::kNonMember;
};

struct ScoredDecisions {
  std::vector<ScoredEntry> entries;
};

// Decisions for every eval item plus its ground truth and group, in eval
// order (eval members first, then eval non-members).
struct AttackOutcome {
  std::vector<MembershipDecision> decisions;
  std::vector<Membership> truth;
  std::vector<uint64_t> groups;

  ScoredDecisions Scored() const {
    ScoredDecisions scored;
    scored.entries.reserve(decisions.size());
    for (size_t i = 0; i < decisions.size(); ++i) {
      scored.entries.push_back(
          {decisions[i].score, decisions[i].verdict, truth[i]});
    }
    return scored;
  }
};

}  // namespace embaudit

#endif  // EMBAUDIT_DECISION_H_
