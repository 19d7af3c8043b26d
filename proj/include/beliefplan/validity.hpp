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

#ifndef BELIEFPLAN_VALIDITY_HPP_
#define BELIEFPLAN_VALIDITY_HPP_

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "beliefplan/environment.hpp"
#include "beliefplan/errors.hpp"
#include "beliefplan/gaussian.hpp"
#include "beliefplan/stats.hpp"

namespace bp {

namespace detail {

/// Variance below which a direction is treated as deterministic.
inline constexpr double kDegenerateVariance = 1e-15;

/// Position block of the total covariance.
inline Eigen::MatrixXd position_covariance(const GaussianBelief& b,
                                           Eigen::Index position_dim) {
  return b.sigma.topLeftCorner(position_dim, position_dim) +
         b.lambda.topLeftCorner(position_dim, position_dim);
}

/// P(a . pos > c) with a point-mass fallback for degenerate variance.
inline double halfplane_tail(double mean_proj, double c, double variance) {
  if (variance < kDegenerateVariance) {
    if (mean_proj > c) return 1.0;
    if (mean_proj < c) return 0.0;
    return 0.5;
  }
  return normal_cdf((mean_proj - c) / std::sqrt(variance));
}

}  // namespace detail

/// Probability that the position lies on the far side of the half-plane
/// {x : a.x > c}, with `a` a unit vector over the position coordinates.
/// The position block of the total covariance drives the tail.
inline double halfplane_violation_prob(const GaussianBelief& b,
                                       const Eigen::VectorXd& a, double c,
                                       Eigen::Index position_dim = 2) {
  if (a.size() != position_dim || b.dim() < position_dim) {
    throw DimensionMismatchError("halfplane_violation_prob: dimension mismatch");
  }
  if (std::abs(a.norm() - 1.0) > 1e-9) {
    throw Error("halfplane_violation_prob: direction must be unit length");
  }
  const Eigen::MatrixXd cov = detail::position_covariance(b, position_dim);
  const double variance = a.dot(cov * a);
  if (variance < detail::kDegenerateVariance) {
    throw DegenerateDirectionError(
        "halfplane_violation_prob: zero variance along direction");
  }
  const double mean_proj = a.dot(b.mean.head(position_dim));
  return normal_cdf((mean_proj - c) / std::sqrt(variance));
}

/// Upper bound on P(position in polygon): minimum over the polygon's faces
/// of the probability of the inward half-plane containing it.
inline double obstacle_collision_bound(const GaussianBelief& b,
                                       const ConvexPolygon& poly) {
  const Eigen::MatrixXd cov = detail::position_covariance(b, 2);
  const Eigen::Vector2d mean(b.mean(0), b.mean(1));
  double bound = 1.0;
  for (const auto& f : poly.faces()) {
    const double variance = f.inward_normal.dot(cov * f.inward_normal);
    const double tail = detail::halfplane_tail(f.inward_normal.dot(mean),
                                               f.offset, variance);
    bound = std::min(bound, tail);
  }
  return bound;
}

/// Union bound on the probability of leaving the workspace box: sum of the
/// per-face Gaussian tails.
inline double workspace_exit_bound(const GaussianBelief& b,
                                   const Environment& env) {
  const Eigen::MatrixXd cov = detail::position_covariance(b, env.position_dim);
  double total = 0.0;
  for (Eigen::Index i = 0; i < env.position_dim; ++i) {
    const double mu = b.mean(i);
    const double variance = cov(i, i);
    total += detail::halfplane_tail(mu, env.bounds.max(i), variance);
    total += detail::halfplane_tail(-mu, -env.bounds.min(i), variance);
  }
  return std::min(1.0, total);
}

/// Per-step chance constraint: every obstacle bound and the workspace exit
/// bound stay below delta.
inline bool is_valid(const GaussianBelief& b, const Environment& env) {
  if (workspace_exit_bound(b, env) >= env.delta) return false;
  for (const auto& obs : env.obstacles) {
    if (obstacle_collision_bound(b, obs) >= env.delta) return false;
  }
  return true;
}

/// Conservative lower bound on the probability of the position lying in
/// the goal region.
inline double goal_probability_lower_bound(const GaussianBelief& b,
                                           const Environment& env) {
  const Eigen::Index d = env.position_dim;
  const Eigen::MatrixXd cov = detail::position_covariance(b, d);
  const Eigen::VectorXd mean = b.mean.head(d);
  if (env.goal.shape == GoalRegion::Shape::kBox) {
    // Off-diagonal mass decides between the exact product form (valid for
    // independent axes) and the Bonferroni union bound.
    double offdiag = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        if (i != j) offdiag = std::max(offdiag, std::abs(cov(i, j)));
      }
    }
    if (offdiag <= 1e-9) {
      double prob = 1.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        const double variance = cov(i, i);
        const double lo = env.goal.box.min(i);
        const double hi = env.goal.box.max(i);
        if (variance < detail::kDegenerateVariance) {
          prob *= (mean(i) >= lo && mean(i) <= hi) ? 1.0 : 0.0;
        } else {
          const double s = std::sqrt(variance);
          prob *= normal_cdf((hi - mean(i)) / s) - normal_cdf((lo - mean(i)) / s);
        }
      }
      return std::max(0.0, prob);
    }
    double tail_sum = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double variance = cov(i, i);
      tail_sum += detail::halfplane_tail(mean(i), env.goal.box.max(i), variance);
      tail_sum += detail::halfplane_tail(-mean(i), -env.goal.box.min(i), variance);
    }
    return std::max(0.0, 1.0 - tail_sum);
  }
  // Disc goal: whiten by the largest eigenvalue of the position block and
  // bound the miss probability with the chi-square tail.
  const double slack = env.goal.radius - (mean - env.goal.center).norm();
  if (slack <= 0.0) return 0.0;
  const double lmax = std::max(detail::kDegenerateVariance,
                               Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov)
                                   .eigenvalues()
                                   .maxCoeff());
  return std::max(0.0, 1.0 - chi_square_tail(static_cast<int>(d),
                                             slack * slack / lmax));
}

/// Terminal chance constraint: conservative P(in goal) must exceed
/// 1 - delta.
inline bool goal_satisfied(const GaussianBelief& b, const Environment& env) {
  return goal_probability_lower_bound(b, env) > 1.0 - env.delta;
}

}  // namespace bp

#endif  // BELIEFPLAN_VALIDITY_HPP_
