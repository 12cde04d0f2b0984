// Copyright 2026 The kmtext Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Portable random streams. The standard distributions are implementation
// defined, so everything that feeds persisted output is drawn through the
// helpers here on top of std::mt19937_64, whose sequence is fixed by the
// standard.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace kmtext {

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline uint64_t Fnv1a64(std::string_view s, uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(SplitMix64(seed)) {}

  // Stream keyed by (seed, name, index); independent of call order elsewhere.
  static Rng Keyed(uint64_t seed, std::string_view name, uint64_t index) {
    return Rng(SplitMix64(SplitMix64(seed) ^ Fnv1a64(name)) ^ SplitMix64(index + 1));
  }

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, n). Rejection sampling, so unbiased for any n > 0.
  uint64_t Uniform(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform in [0, 1).
  double UniformReal() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Knuth's multiplication method; fine for the small means used here.
  uint64_t Poisson(double lambda) {
    const double limit = std::exp(-lambda);
    uint64_t k = 0;
    double p = UniformReal();
    while (p > limit) {
      ++k;
      p *= UniformReal();
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace kmtext
