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

// Synthetic embedding populations with planted norm distributions, and the
// analytic two-Gaussian Bayes accuracy they are checked against.

#ifndef EMBAUDIT_SYNTHLAB_H_
#define EMBAUDIT_SYNTHLAB_H_

#include <cstddef>
#include <cstdint>
#include <optional>

#include "absl/status/statusor.h"
#include "embaudit/emb_data.h"
#include "embaudit/lpla.h"

namespace embaudit {

// Directions supported on a random subset of coordinates whose size is
// uniform on [min_size, max_size], with equal-magnitude random-sign entries.
// For such vectors every p-norm with p > 0 is the L2 norm times a factor
// that depends only on the support size.
struct SparseSupport {
  size_t min_size = 1;
  size_t max_size = 1;
};

struct NormSpec {
  double mean = 10.0;
  double stddev = 1.0;
  size_t dimension = 128;
  size_t count = 1000;
  uint64_t seed = 0;
  Membership label = Membership::kUnknown;
  // Record i gets group id first_group_id + i.
  uint64_t first_group_id = 0;
  // Isotropic Gaussian directions when unset.
  std::optional<SparseSupport> sparse_support;
};

// Record i is a random direction scaled to an L2 norm drawn from
// Normal(mean, stddev^2), redrawn while negative. Record i uses only the
// stream DeriveSeed(seed, i), so any subset of records can be regenerated
// independently.
absl::StatusOr<EmbeddingSet> Generate(const NormSpec& spec);

double StandardNormalCdf(double x);

// Exact accuracy of the Bayes rule deciding between Normal(member) with
// prior `prior_member` and Normal(nonmember). prior 0 or 1 gives 1.
double BayesOptimalAccuracy(const GaussianParams& member,
                            const GaussianParams& nonmember,
                            double prior_member);

// n_views copies of each base record (which must have a unique group id),
// each plus i.i.d. Normal(0, jitter^2) noise per component.
absl::StatusOr<EmbeddingSet> MakeGroupedViews(const EmbeddingSet& base,
                                              size_t n_views, double jitter,
                                              uint64_t seed);

}  // namespace embaudit

#endif  // EMBAUDIT_SYNTHLAB_H_
