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

#ifndef BELIEFPLAN_PROPAGATION_HPP_
#define BELIEFPLAN_PROPAGATION_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "beliefplan/environment.hpp"
#include "beliefplan/errors.hpp"
#include "beliefplan/gaussian.hpp"
#include "beliefplan/linear_system.hpp"

namespace bp {

/// Nominal controls, the trajectory they generate, and the belief at every
/// step. Cost is the Euclidean path length of the nominal positions.
struct MotionPlan {
  std::vector<Eigen::VectorXd> controls;        // T entries
  std::vector<Eigen::VectorXd> nominal_states;  // T + 1 entries
  std::vector<GaussianBelief> beliefs;          // T + 1 entries
  double cost = 0.0;

  std::size_t steps() const { return controls.size(); }
};

inline double nominal_path_length(const std::vector<Eigen::VectorXd>& states,
                                  Eigen::Index position_dim) {
  double length = 0.0;
  for (std::size_t k = 1; k < states.size(); ++k) {
    length += (states[k].head(position_dim) - states[k - 1].head(position_dim))
                  .norm();
  }
  return length;
}

namespace detail {

/// Kalman covariance recursion for one step. `measurement` may be null (no
/// update; the gain is zero).
inline void covariance_step(const Eigen::MatrixXd& sigma,
                            const Eigen::MatrixXd& lambda,
                            const LinearSystem& sys,
                            const Eigen::MatrixXd* measurement,
                            Eigen::MatrixXd* sigma_out,
                            Eigen::MatrixXd* lambda_out) {
  const Eigen::MatrixXd sigma_pred =
      symmetrize(sys.a * sigma * sys.a.transpose() + sys.q);
  const Eigen::MatrixXd closed = sys.closed_loop();
  const Eigen::MatrixXd lambda_pushed =
      symmetrize(closed * lambda * closed.transpose());
  if (measurement == nullptr) {
    *sigma_out = sigma_pred;
    *lambda_out = lambda_pushed;
    return;
  }
  const Eigen::MatrixXd c_sigma = sys.c * sigma_pred;  // C Sigma^-
  const Eigen::MatrixXd innovation =
      symmetrize(c_sigma * sys.c.transpose() + *measurement);
  Eigen::VectorXd evals;
  Eigen::MatrixXd evecs;
  eigendecompose(innovation, &evals, &evecs);
  const double emin = evals.minCoeff();
  const double emax = evals.maxCoeff();
  if (!(emin > 0.0) || emax / emin > 1e12) {
    throw SingularInnovationError(
        "covariance update: innovation matrix is not invertible");
  }
  // L = Sigma^- C' (C Sigma^- C' + R)^-1, via a symmetric solve.
  const Eigen::MatrixXd gain_t = innovation.ldlt().solve(c_sigma);
  const Eigen::MatrixXd correction = symmetrize(gain_t.transpose() * c_sigma);
  *sigma_out = symmetrize(sigma_pred - correction);
  *lambda_out = symmetrize(lambda_pushed + correction);
}

}  // namespace detail

/// Propagates the belief one step to the given (already advanced) nominal
/// state. The measurement covariance, if any, is the one available at that
/// nominal state's position.
inline GaussianBelief belief_step(const GaussianBelief& b,
                                  const Eigen::VectorXd& x_next_nominal,
                                  const LinearSystem& sys,
                                  const Environment& env) {
  if (b.dim() != sys.state_dim() || x_next_nominal.size() != sys.state_dim()) {
    throw DimensionMismatchError("belief_step: dimension mismatch");
  }
  const Eigen::MatrixXd* measurement =
      env.measurement_at(env.position_of(x_next_nominal));
  Eigen::MatrixXd sigma_out, lambda_out;
  detail::covariance_step(b.sigma, b.lambda, sys, measurement, &sigma_out,
                          &lambda_out);
  return make_belief(x_next_nominal, sigma_out, lambda_out);
}

/// One edge of propagation: beliefs and nominal states after each control,
/// for per-step validity checking. Sequence length must respect the
/// system's duration bounds.
struct EdgeResult {
  std::vector<GaussianBelief> beliefs;        // one per control applied
  std::vector<Eigen::VectorXd> states;        // matching nominal states
};

inline EdgeResult propagate_edge(const GaussianBelief& b,
                                 const Eigen::VectorXd& x_nominal,
                                 std::span<const Eigen::VectorXd> controls,
                                 const LinearSystem& sys,
                                 const Environment& env) {
  const int len = static_cast<int>(controls.size());
  if (len < sys.t_min || len > sys.t_max) {
    throw Error("propagate_edge: control sequence length outside [t_min, t_max]");
  }
  EdgeResult result;
  result.beliefs.reserve(controls.size());
  result.states.reserve(controls.size());
  Eigen::VectorXd x = x_nominal;
  GaussianBelief current = b;
  for (const auto& u : controls) {
    x = nominal_step(x, u, sys);
    current = belief_step(current, x, sys, env);
    result.states.push_back(x);
    result.beliefs.push_back(current);
  }
  return result;
}

/// Builds the full plan produced by applying `controls` from `b0`,
/// recomputing states, beliefs, and path-length cost.
inline MotionPlan make_plan(const GaussianBelief& b0,
                            std::vector<Eigen::VectorXd> controls,
                            const LinearSystem& sys, const Environment& env) {
  MotionPlan plan;
  plan.nominal_states.reserve(controls.size() + 1);
  plan.beliefs.reserve(controls.size() + 1);
  plan.nominal_states.push_back(b0.mean);
  plan.beliefs.push_back(b0);
  Eigen::VectorXd x = b0.mean;
  GaussianBelief current = b0;
  for (const auto& u : controls) {
    x = nominal_step(x, u, sys);
    current = belief_step(current, x, sys, env);
    plan.nominal_states.push_back(x);
    plan.beliefs.push_back(current);
  }
  plan.controls = std::move(controls);
  plan.cost = nominal_path_length(plan.nominal_states, env.position_dim);
  return plan;
}

}  // namespace bp

#endif  // BELIEFPLAN_PROPAGATION_HPP_
