// Copyright 2026 The TextPGD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TEXTPGD_UTIL_RNG_H_
#define TEXTPGD_UTIL_RNG_H_

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace textpgd {

// CounterRng is a keyed, counter-based generator: the i-th output is a pure
// function of (key, i), computed by two rounds of the SplitMix64 finalizer.
// Split() derives an independent child key from a label, so work items can
// each own a stream whose values do not depend on scheduling order.
//
// All distributions are implemented here rather than with <random>
// distributions, whose output is implementation-defined.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : key_(Mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  CounterRng Split(std::string_view label) const;
  CounterRng Split(uint64_t index) const;

  uint64_t key() const { return key_; }
  uint64_t counter() const { return counter_; }

  uint64_t NextU64();
  // Uniform in [0, 1) with 53 bits of precision.
  double Uniform();
  // Unbiased integer in [0, n); n must be positive.
  uint64_t UniformInt(uint64_t n);
  // Standard normal via Box-Muller (one output per two uniforms).
  double Normal();
  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = UniformInt(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  static uint64_t Mix(uint64_t x);

 private:
  struct KeyTag {};
  CounterRng(uint64_t key, KeyTag) : key_(key) {}

  uint64_t key_;
  uint64_t counter_ = 0;
};

// FNV-1a, used for stream labels and vocabulary fingerprints.
uint64_t Fnv1a(std::string_view bytes, uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace textpgd

#endif  // TEXTPGD_UTIL_RNG_H_
