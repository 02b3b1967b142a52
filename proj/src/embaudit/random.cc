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

#include "embaudit/random.h"

#include <cmath>
#include <numbers>

namespace embaudit {
namespace {
constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}  // namespace

uint64_t Mix64(uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

uint64_t Fnv1a64(absl::string_view text) {
  uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

uint64_t DeriveSeed(uint64_t seed, absl::string_view label) {
  return Mix64(seed ^ Fnv1a64(label));
}

uint64_t DeriveSeed(uint64_t seed, uint64_t index) {
  return Mix64(seed + Mix64(index + kGamma));
}

uint64_t CounterRng::NextU64() {
  ++counter_;
  return Mix64(key_ + counter_ * kGamma);
}

double CounterRng::NextDouble() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

uint64_t CounterRng::NextBelow(uint64_t bound) {
  // Rejection keeps the result exactly uniform.
  const uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const uint64_t r = NextU64();
    if (r >= threshold) return r % bound;
  }
}

double CounterRng::NextNormal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = NextOpenDouble();
  const double u2 = NextDouble();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace embaudit
