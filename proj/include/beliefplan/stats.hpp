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

#ifndef BELIEFPLAN_STATS_HPP_
#define BELIEFPLAN_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "beliefplan/errors.hpp"

namespace bp {

/// Standard normal CDF.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

/// z value for a 99% two-sided Wilson interval.
inline constexpr double kWilsonZ99 = 2.5758293035489004;

struct WilsonInterval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Wilson score interval for a binomial proportion.
inline WilsonInterval wilson_interval(std::int64_t successes,
                                      std::int64_t trials,
                                      double z = kWilsonZ99) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Upper tail P(chi^2_d > t) for d in {1, 2, 3}; the only dimensions a
/// position block can have here.
inline double chi_square_tail(int dof, double t) {
  if (t <= 0.0) return 1.0;
  switch (dof) {
    case 1:
      return std::erfc(std::sqrt(t / 2.0));
    case 2:
      return std::exp(-t / 2.0);
    case 3:
      return std::erfc(std::sqrt(t / 2.0)) +
             std::sqrt(2.0 * t / M_PI) * std::exp(-t / 2.0);
    default:
      throw Error("chi_square_tail: unsupported dof");
  }
}

}  // namespace bp

#endif  // BELIEFPLAN_STATS_HPP_
