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

#ifndef BELIEFPLAN_SAMPLING_HPP_
#define BELIEFPLAN_SAMPLING_HPP_

#include <algorithm>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "beliefplan/environment.hpp"
#include "beliefplan/errors.hpp"
#include "beliefplan/gaussian.hpp"
#include "beliefplan/linear_system.hpp"
#include "beliefplan/rng.hpp"
#include "beliefplan/validity.hpp"

namespace bp {

/// Belief-sampling knobs.
struct SamplerParams {
  Eigen::VectorXd lambda_max;  // per-dimension covariance eigenvalue cap
  Eigen::VectorXd lambda_low;  // low-uncertainty eigenvalues used by the bias
  double p_bias = 0.0;         // probability of drawing the low eigenvalues
  double p_goal = 0.05;        // probability of sampling the mean in the goal
  std::uint64_t seed = 0;
};

inline void validate_sampler_params(const SamplerParams& p, Eigen::Index n) {
  if (p.lambda_max.size() != n || p.lambda_low.size() != n) {
    throw ValidationError("sampler: lambda vectors must have state dimension");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(p.lambda_low(i) > 0.0) || !(p.lambda_low(i) <= p.lambda_max(i))) {
      throw ValidationError(
          "sampler: need 0 < lambda_low <= lambda_max on dimension " +
          std::to_string(i));
    }
  }
  if (p.p_bias < 0.0 || p.p_bias > 1.0 || p.p_goal < 0.0 || p.p_goal > 1.0) {
    throw ValidationError("sampler: probabilities must lie in [0, 1]");
  }
}

/// Mean-sampling domain: the full state box (position dims first) plus the
/// goal region over the position coordinates.
struct SampleSpace {
  AxisBox state_box;
  GoalRegion goal;
  Eigen::Index position_dim = 2;
};

inline SampleSpace make_sample_space(const Environment& env,
                                     const LinearSystem& sys) {
  SampleSpace space;
  space.position_dim = env.position_dim;
  const Eigen::Index n = sys.state_dim();
  space.state_box.min = Eigen::VectorXd(n);
  space.state_box.max = Eigen::VectorXd(n);
  space.state_box.min.head(env.position_dim) = env.bounds.min;
  space.state_box.max.head(env.position_dim) = env.bounds.max;
  const Eigen::Index aux = n - env.position_dim;
  if (aux > 0) {
    if (sys.aux_min.size() != aux || sys.aux_max.size() != aux) {
      throw ValidationError(
          "system: aux state bounds must cover the non-position dimensions");
    }
    space.state_box.min.tail(aux) = sys.aux_min;
    space.state_box.max.tail(aux) = sys.aux_max;
  }
  space.goal = env.goal;
  return space;
}

/// Samples a mean state: with probability p_goal the position block lands
/// in the goal region, otherwise uniform over the box. Always within the
/// box.
inline Eigen::VectorXd sample_mean(const SampleSpace& space,
                                   const SamplerParams& params, Rng& rng) {
  const Eigen::Index n = space.state_box.dim();
  Eigen::VectorXd mean(n);
  const bool to_goal = rng.bernoulli(params.p_goal);
  // Non-position (and non-goal-biased) dimensions are uniform in the box.
  for (Eigen::Index i = 0; i < n; ++i) {
    mean(i) = rng.uniform(space.state_box.min(i), space.state_box.max(i));
  }
  if (!to_goal) return mean;
  const Eigen::Index d = space.position_dim;
  if (space.goal.shape == GoalRegion::Shape::kBox) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double lo = std::max(space.goal.box.min(i), space.state_box.min(i));
      const double hi = std::min(space.goal.box.max(i), space.state_box.max(i));
      mean(i) = rng.uniform(lo, hi);
    }
    return mean;
  }
  // Disc goal: rejection inside the bounding square, clipped to the box.
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Eigen::VectorXd p(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      p(i) = rng.uniform(space.goal.center(i) - space.goal.radius,
                         space.goal.center(i) + space.goal.radius);
    }
    if ((p - space.goal.center).norm() <= space.goal.radius &&
        space.state_box.min.head(d).cwiseMax(p) == p &&
        space.state_box.max.head(d).cwiseMin(p) == p) {
      mean.head(d) = p;
      return mean;
    }
  }
  // Sliver intersection; fall back to the clamped centroid.
  Eigen::VectorXd c = space.goal.centroid();
  for (Eigen::Index i = 0; i < d; ++i) {
    c(i) = std::clamp(c(i), space.state_box.min(i), space.state_box.max(i));
  }
  mean.head(d) = c;
  return mean;
}

/// Haar-uniform random orthogonal matrix: QR of an i.i.d. standard normal
/// matrix, with the sign convention that makes R's diagonal positive.
inline Eigen::MatrixXd sample_orthogonal(Eigen::Index n, Rng& rng) {
  while (true) {
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        m(i, j) = rng.normal();
      }
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd o = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    bool degenerate = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(r(i, i)) < 1e-300) {
        degenerate = true;  // probability-zero; resample
        break;
      }
      if (r(i, i) < 0.0) o.col(i) = -o.col(i);
    }
    if (!degenerate) return o;
  }
}

/// Random covariance: eigenvalues either fixed at lambda_low (probability
/// p_bias) or drawn uniformly from (0, lambda_max[i]], rotated by a
/// Haar-uniform eigenbasis.
inline Eigen::MatrixXd sample_covariance(const SamplerParams& params,
                                         Rng& rng) {
  const Eigen::Index n = params.lambda_max.size();
  Eigen::VectorXd eigenvalues(n);
  if (rng.bernoulli(params.p_bias)) {
    eigenvalues = params.lambda_low;
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      // 1 - u maps [0,1) onto (0,1], keeping eigenvalues strictly positive.
      eigenvalues(i) = params.lambda_max(i) * (1.0 - rng.uniform01());
    }
  }
  const Eigen::MatrixXd o = sample_orthogonal(n, rng);
  return symmetrize(o * eigenvalues.asDiagonal() * o.transpose());
}

/// A full belief sample: mean from the state box / goal bias, covariance
/// from the eigenvalue sampler. The sampled covariance is carried as sigma
/// with zero dispersion; only the total matters for distance queries.
inline GaussianBelief sample_belief(const SampleSpace& space,
                                    const SamplerParams& params, Rng& rng) {
  const Eigen::VectorXd mean = sample_mean(space, params, rng);
  const Eigen::MatrixXd cov = sample_covariance(params, rng);
  GaussianBelief b;
  b.mean = mean;
  b.sigma = cov;
  b.lambda = Eigen::MatrixXd::Zero(cov.rows(), cov.cols());
  return b;
}

/// Options for the per-dimension eigenvalue-cap search.
struct LambdaMaxOptions {
  double cap = 1e9;            // search ceiling before declaring Unbounded
  double epsilon = 1e-6;       // variance on the non-probed dimensions
  int grid = 50;               // grid points per workspace axis
  bool include_bounds = true;  // count workspace exit as a violation
  double relative_tol = 0.01;  // bisection stop
};

namespace detail {

inline bool violates_everywhere(const Environment& env, Eigen::Index n,
                                Eigen::Index dim, double lambda,
                                const LambdaMaxOptions& opts) {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n) * opts.epsilon;
  cov(dim, dim) = lambda;
  const Eigen::Index d = env.position_dim;
  Eigen::VectorXd state = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Index> idx(d, 0);
  while (true) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double t = opts.grid > 1
                           ? static_cast<double>(idx[i]) / (opts.grid - 1)
                           : 0.5;
      state(i) = env.bounds.min(i) + t * (env.bounds.max(i) - env.bounds.min(i));
    }
    GaussianBelief b;
    b.mean = state;
    b.sigma = cov;
    b.lambda = Eigen::MatrixXd::Zero(n, n);
    bool violated = false;
    if (opts.include_bounds && workspace_exit_bound(b, env) >= env.delta) {
      violated = true;
    }
    if (!violated) {
      for (const auto& obs : env.obstacles) {
        if (obstacle_collision_bound(b, obs) >= env.delta) {
          violated = true;
          break;
        }
      }
    }
    if (!violated) return false;
    // Advance the grid index odometer.
    Eigen::Index i = 0;
    for (; i < d; ++i) {
      if (++idx[i] < opts.grid) break;
      idx[i] = 0;
    }
    if (i == d) return true;
  }
}

}  // namespace detail

/// Smallest per-dimension eigenvalue whose diagonal covariance (epsilon on
/// the other dimensions) violates the chance constraint at every grid
/// point of the workspace; found by doubling then bisection to 1%
/// relative tolerance. Throws UnboundedError when no eigenvalue below the
/// cap qualifies (e.g. obstacle-free workspace with bounds excluded).
inline Eigen::VectorXd compute_lambda_max(const Environment& env,
                                          Eigen::Index state_dim,
                                          const LambdaMaxOptions& opts = {}) {
  Eigen::VectorXd result(state_dim);
  for (Eigen::Index dim = 0; dim < state_dim; ++dim) {
    if (dim >= env.position_dim) {
      throw UnboundedError(
          "compute_lambda_max: non-position dimension " + std::to_string(dim) +
          " cannot violate the chance constraint; supply lambda_max");
    }
    if (!detail::violates_everywhere(env, state_dim, dim, opts.cap, opts)) {
      throw UnboundedError(
          "compute_lambda_max: no eigenvalue below the cap violates the "
          "constraint everywhere on dimension " +
          std::to_string(dim));
    }
    double hi = opts.epsilon;
    while (hi < opts.cap &&
           !detail::violates_everywhere(env, state_dim, dim, hi, opts)) {
      hi *= 2.0;
    }
    hi = std::min(hi, opts.cap);
    double lo = hi / 2.0;
    while ((hi - lo) > opts.relative_tol * hi) {
      const double mid = 0.5 * (lo + hi);
      if (detail::violates_everywhere(env, state_dim, dim, mid, opts)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    result(dim) = hi;
  }
  return result;
}

}  // namespace bp

#endif  // BELIEFPLAN_SAMPLING_HPP_
