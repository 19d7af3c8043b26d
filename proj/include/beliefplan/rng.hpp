// Copyright 2026 The beliefplan Authors
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

#ifndef BELIEFPLAN_RNG_HPP_
#define BELIEFPLAN_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace bp {

/// SplitMix64 finalizer; used to whiten seeds and derive child streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic child-seed derivation: each extra index folds into the
/// parent seed, so (master, cell, trial) style hierarchies reproduce
/// exactly regardless of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a) {
  return splitmix64(seed ^ (0x9e3779b97f4a7c15ULL + splitmix64(a)));
}
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b) {
  return derive_seed(derive_seed(seed, a), b);
}
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b, std::uint64_t c) {
  return derive_seed(derive_seed(seed, a, b), c);
}

/// Seeded random generator with fixed variate transforms.
///
/// mt19937_64 output is pinned by the standard; the uniform and normal
/// transforms are implemented here (rather than with std distributions,
/// whose algorithms are implementation-defined) so that a seed produces
/// an identical stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed)
      : gen_(splitmix64(seed)), cached_normal_(0.0), has_cached_normal_(false) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Uniform integer in [lo, hi], inclusive. Unbiased via rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return lo + static_cast<std::int64_t>(next_u64());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return lo + static_cast<std::int64_t>(v % span);
  }

  /// Standard normal via Box-Muller; generates pairs, caches the second.
  double normal() {
    if (has_cached_normal_) {
      has_cached_normal_ = false;
      return cached_normal_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
  }

  /// Bernoulli draw with success probability p.
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 gen_;
  double cached_normal_;
  bool has_cached_normal_;
};

}  // namespace bp

#endif  // BELIEFPLAN_RNG_HPP_
