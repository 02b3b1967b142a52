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

#ifndef EMBAUDIT_RANDOM_H_
#define EMBAUDIT_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <span>

#include "absl/strings/string_view.h"

namespace embaudit {

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t x);

// 64-bit FNV-1a over the bytes of `text`.
uint64_t Fnv1a64(absl::string_view text);

// Child seed for the consumer named `label`. Every random stream in the
// library is obtained from a root seed through one of these two derivations,
// so results reproduce bit-for-bit on any platform.
uint64_t DeriveSeed(uint64_t seed, absl::string_view label);
uint64_t DeriveSeed(uint64_t seed, uint64_t index);

// Counter-based SplitMix64 generator: draw k (k = 0, 1, ...) is
// Mix64(key + (k + 1) * 0x9E3779B97F4A7C15). Normal variates use the
// Box-Muller transform rather than <random> distributions, whose outputs are
// implementation-defined.
class CounterRng {
 public:
  explicit CounterRng(uint64_t key) : key_(key) {}

  uint64_t NextU64();
  // Uniform on [0, 1) with 53 bits of resolution.
  double NextDouble();
  // Uniform on (0, 1].
  double NextOpenDouble() { return 1.0 - NextDouble(); }
  // Uniform integer on [0, bound); bound must be > 0.
  uint64_t NextBelow(uint64_t bound);
  double NextNormal();

  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

template <typename T>
void Shuffle(std::span<T> items, CounterRng& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.NextBelow(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace embaudit

#endif  // EMBAUDIT_RANDOM_H_
