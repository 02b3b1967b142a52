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

#include "embaudit/synthlab.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "embaudit/random.h"
#include "embaudit/status.h"

namespace embaudit {
namespace {

absl::Status ValidateSpec(const NormSpec& spec) {
  if (!(spec.mean > 0.0) || !std::isfinite(spec.mean)) {
    return MakeError(ErrorKind::kValidation,
                     absl::StrCat("norm mean must be > 0, got ", spec.mean));
  }
  if (!(spec.stddev > 0.0) || !std::isfinite(spec.stddev)) {
    return MakeError(ErrorKind::kValidation,
                     absl::StrCat("norm stddev must be > 0, got ", spec.stddev));
  }
  if (spec.dimension == 0) {
    return MakeError(ErrorKind::kValidation, "dimension must be >= 1");
  }
  if (spec.count == 0) {
    return MakeError(ErrorKind::kValidation, "count must be >= 1");
  }
  if (spec.sparse_support.has_value()) {
    const SparseSupport& s = *spec.sparse_support;
    if (s.min_size == 0 || s.min_size > s.max_size ||
        s.max_size > spec.dimension) {
      return MakeError(ErrorKind::kValidation,
                       absl::StrCat("support size range [", s.min_size, ", ",
                                    s.max_size, "] is invalid for dimension ",
                                    spec.dimension));
    }
  }
  return absl::OkStatus();
}

double DrawNorm(const NormSpec& spec, CounterRng& rng) {
  while (true) {
    const double r = spec.mean + spec.stddev * rng.NextNormal();
    if (r >= 0.0) return r;
  }
}

std::vector<float> IsotropicVector(size_t dimension, double norm,
                                   CounterRng& rng) {
  std::vector<double> direction(dimension);
  double length = 0.0;
  while (length == 0.0) {
    for (double& x : direction) x = rng.NextNormal();
    length = std::sqrt(std::inner_product(direction.begin(), direction.end(),
                                          direction.begin(), 0.0));
  }
  std::vector<float> v(dimension);
  for (size_t i = 0; i < dimension; ++i) {
    v[i] = static_cast<float>(direction[i] / length * norm);
  }
  return v;
}

std::vector<float> SparseSignVector(size_t dimension,
                                    const SparseSupport& support, double norm,
                                    CounterRng& rng) {
  const size_t k =
      support.min_size +
      static_cast<size_t>(rng.NextBelow(support.max_size - support.min_size + 1));
  std::vector<size_t> coords(dimension);
  std::iota(coords.begin(), coords.end(), size_t{0});
  for (size_t i = 0; i < k; ++i) {
    const size_t j = i + static_cast<size_t>(rng.NextBelow(dimension - i));
    std::swap(coords[i], coords[j]);
  }
  const double magnitude = norm / std::sqrt(static_cast<double>(k));
  std::vector<float> v(dimension, 0.0f);
  for (size_t i = 0; i < k; ++i) {
    const bool negative = (rng.NextU64() & 1) != 0;
    v[coords[i]] = static_cast<float>(negative ? -magnitude : magnitude);
  }
  return v;
}

double IntervalProbability(const GaussianParams& g, double lo, double hi) {
  const double upper =
      std::isinf(hi) ? (hi > 0 ? 1.0 : 0.0)
                     : StandardNormalCdf((hi - g.mean) / g.stddev);
  const double lower =
      std::isinf(lo) ? (lo > 0 ? 1.0 : 0.0)
                     : StandardNormalCdf((lo - g.mean) / g.stddev);
  return upper - lower;
}

}  // namespace

absl::StatusOr<EmbeddingSet> Generate(const NormSpec& spec) {
  EMBAUDIT_RETURN_IF_ERROR(ValidateSpec(spec));
  std::vector<EmbeddingRecord> records(spec.count);
  for (size_t i = 0; i < spec.count; ++i) {
    CounterRng rng(DeriveSeed(spec.seed, static_cast<uint64_t>(i)));
    const double norm = DrawNorm(spec, rng);
    EmbeddingRecord& record = records[i];
    record.group_id = spec.first_group_id + i;
    record.label = spec.label;
    record.vector = spec.sparse_support.has_value()
                        ? SparseSignVector(spec.dimension, *spec.sparse_support,
                                           norm, rng)
                        : IsotropicVector(spec.dimension, norm, rng);
  }
  return EmbeddingSet::Create(
      spec.dimension, std::move(records),
      absl::StrCat("synthlab:normal(", spec.mean, ",", spec.stddev, ")"));
}

double StandardNormalCdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double BayesOptimalAccuracy(const GaussianParams& member,
                            const GaussianParams& nonmember,
                            double prior_member) {
  if (prior_member <= 0.0 || prior_member >= 1.0) return 1.0;
  const double pi = prior_member;
  // Member region is {x : a x^2 + b x + c > 0}, where the quadratic is the
  // log posterior odds.
  const double vm = member.stddev * member.stddev;
  const double vn = nonmember.stddev * nonmember.stddev;
  const double a = -0.5 / vm + 0.5 / vn;
  const double b = member.mean / vm - nonmember.mean / vn;
  const double c = -0.5 * member.mean * member.mean / vm +
                   0.5 * nonmember.mean * nonmember.mean / vn -
                   std::log(member.stddev) + std::log(nonmember.stddev) +
                   std::log(pi) - std::log1p(-pi);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Probability mass of the member region under each distribution.
  double member_hit = 0.0;
  double nonmember_in_region = 0.0;
  if (a == 0.0) {
    if (b == 0.0) {
      return c > 0.0 ? pi : 1.0 - pi;
    }
    const double root = -c / b;
    const double lo = b > 0.0 ? root : -kInf;
    const double hi = b > 0.0 ? kInf : root;
    member_hit = IntervalProbability(member, lo, hi);
    nonmember_in_region = IntervalProbability(nonmember, lo, hi);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) {
      return a > 0.0 ? pi : 1.0 - pi;
    }
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b == 0.0 ? 1.0 : b));
    double r1 = q / a;
    double r2 = c / q;
    if (r1 > r2) std::swap(r1, r2);
    const double member_inside = IntervalProbability(member, r1, r2);
    const double nonmember_inside = IntervalProbability(nonmember, r1, r2);
    if (a < 0.0) {
      member_hit = member_inside;
      nonmember_in_region = nonmember_inside;
    } else {
      member_hit = 1.0 - member_inside;
      nonmember_in_region = 1.0 - nonmember_inside;
    }
  }
  return pi * member_hit + (1.0 - pi) * (1.0 - nonmember_in_region);
}

absl::StatusOr<EmbeddingSet> MakeGroupedViews(const EmbeddingSet& base,
                                              size_t n_views, double jitter,
                                              uint64_t seed) {
  if (n_views == 0) {
    return MakeError(ErrorKind::kValidation, "n_views must be >= 1");
  }
  if (!(jitter >= 0.0) || !std::isfinite(jitter)) {
    return MakeError(ErrorKind::kValidation, "jitter must be >= 0");
  }
  absl::flat_hash_set<uint64_t> seen;
  std::vector<EmbeddingRecord> records;
  records.reserve(base.size() * n_views);
  for (size_t i = 0; i < base.size(); ++i) {
    const EmbeddingRecord& source = base[i];
    if (!seen.insert(source.group_id).second) {
      return MakeError(ErrorKind::kValidation,
                       absl::StrCat("base group ", source.group_id,
                                    " appears more than once"));
    }
    CounterRng rng(DeriveSeed(seed, static_cast<uint64_t>(i)));
    for (size_t v = 0; v < n_views; ++v) {
      EmbeddingRecord view = source;
      if (jitter > 0.0) {
        for (float& x : view.vector) {
          x = static_cast<float>(static_cast<double>(x) +
                                 jitter * rng.NextNormal());
        }
      }
      records.push_back(std::move(view));
    }
  }
  return EmbeddingSet::Create(base.dimension(), std::move(records),
                              base.source_tag());
}

}  // namespace embaudit
