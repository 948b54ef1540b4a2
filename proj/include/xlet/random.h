// Copyright 2026 The xlet Authors.
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

#ifndef XLET_RANDOM_H_
#define XLET_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace xlet {

// Seeded generator with portable sampling helpers. The std distributions are
// implementation-defined, so every derived draw is computed here from the raw
// mt19937_64 stream to keep artifacts identical across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform integer in [0, n). n must be positive.
  uint64_t Uniform(uint64_t n) {
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double UniformDouble() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; one value per call.
  double Normal() {
    double u1 = UniformDouble();
    double u2 = UniformDouble();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Draws k distinct indices from [0, n) in draw order (partial
  // Fisher-Yates).
  std::vector<size_t> SampleWithoutReplacement(size_t n, size_t k) {
    std::vector<size_t> pool(n);
    for (size_t i = 0; i < n; ++i) pool[i] = i;
    if (k > n) k = n;
    for (size_t i = 0; i < k; ++i) {
      size_t j = i + Uniform(n - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

  template <typename T>
  void Shuffle(std::vector<T> *items) {
    for (size_t i = items->size(); i > 1; --i) {
      size_t j = Uniform(i);
      std::swap((*items)[i - 1], (*items)[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace xlet

#endif  // XLET_RANDOM_H_
