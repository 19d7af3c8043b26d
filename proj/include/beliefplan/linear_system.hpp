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

#ifndef BELIEFPLAN_LINEAR_SYSTEM_HPP_
#define BELIEFPLAN_LINEAR_SYSTEM_HPP_

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "beliefplan/errors.hpp"
#include "beliefplan/gaussian.hpp"

namespace bp {

/// Discrete-time linear system with process noise, position-block
/// observations, and a fixed stabilizing tracking gain.
struct LinearSystem {
  Eigen::MatrixXd a;  // n x n dynamics
  Eigen::MatrixXd b;  // n x m input
  Eigen::MatrixXd c;  // p x n observation
  Eigen::MatrixXd q;  // n x n process noise covariance
  Eigen::MatrixXd k;  // m x n feedback gain
  Eigen::VectorXd u_min;
  Eigen::VectorXd u_max;
  int t_min = 1;   // edge duration bounds, in steps
  int t_max = 20;
  // Sampling box for non-position state dimensions (empty when the state
  // is position only).
  Eigen::VectorXd aux_min;
  Eigen::VectorXd aux_max;

  Eigen::Index state_dim() const { return a.rows(); }
  Eigen::Index control_dim() const { return b.cols(); }
  Eigen::Index measurement_dim() const { return c.rows(); }

  Eigen::MatrixXd closed_loop() const { return a - b * k; }

  bool control_in_bounds(const Eigen::VectorXd& u) const {
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (u(i) < u_min(i) - 1e-12 || u(i) > u_max(i) + 1e-12) return false;
    }
    return true;
  }
};

inline double spectral_radius(const Eigen::MatrixXd& m) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(m, /*computeEigenvectors=*/false)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

/// Structural checks run at load time.
inline void validate_system(const LinearSystem& sys) {
  const Eigen::Index n = sys.state_dim();
  const Eigen::Index m = sys.control_dim();
  const Eigen::Index p = sys.measurement_dim();
  if (sys.a.cols() != n) throw ValidationError("A must be square");
  if (sys.b.rows() != n) throw ValidationError("B row count must match A");
  if (sys.c.cols() != n) throw ValidationError("C column count must match A");
  if (sys.q.rows() != n || sys.q.cols() != n) {
    throw ValidationError("Q must be n x n");
  }
  if (sys.k.rows() != m || sys.k.cols() != n) {
    throw ValidationError("K must be m x n");
  }
  if (sys.u_min.size() != m || sys.u_max.size() != m) {
    throw ValidationError("control bounds must have one entry per input");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(sys.u_min(i) <= sys.u_max(i))) {
      throw ValidationError("control bound min exceeds max on input " +
                            std::to_string(i));
    }
  }
  if (sys.t_min < 1 || sys.t_max < sys.t_min) {
    throw ValidationError("duration bounds need 1 <= t_min <= t_max");
  }
  if (min_eigenvalue(sys.q) < -kPsdTolerance) {
    throw ValidationError("Q is not positive semidefinite");
  }
  const double radius = spectral_radius(sys.closed_loop());
  if (!(radius < 1.0)) {
    throw ValidationError("A - BK is not stable (spectral radius " +
                          std::to_string(radius) + ")");
  }
  if ((p > 0 && sys.measurement_dim() != p) || p < 0) {
    throw ValidationError("malformed observation matrix");
  }
}

/// Noise-free dynamics step x' = A x + B u.
inline Eigen::VectorXd nominal_step(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& u,
                                    const LinearSystem& sys) {
  if (x.size() != sys.state_dim() || u.size() != sys.control_dim()) {
    throw DimensionMismatchError("nominal_step: dimension mismatch");
  }
  if (!sys.control_in_bounds(u)) {
    throw ControlOutOfBoundsError("nominal_step: control outside bounds");
  }
  return sys.a * x + sys.b * u;
}

/// Infinite-horizon discrete LQR gain by Riccati fixed-point iteration.
/// Throws NoConvergenceError after 1e5 iterations (e.g. unstabilizable
/// pairs).
inline Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& a,
                                const Eigen::MatrixXd& b,
                                const Eigen::MatrixXd& s_cost,
                                const Eigen::MatrixXd& r_cost) {
  constexpr int kMaxIterations = 100000;
  constexpr double kTolerance = 1e-10;
  Eigen::MatrixXd p = s_cost;
  for (int it = 0; it < kMaxIterations; ++it) {
    const Eigen::MatrixXd bt_p = b.transpose() * p;
    const Eigen::MatrixXd gain_denominator = r_cost + bt_p * b;
    const Eigen::MatrixXd gain =
        gain_denominator.ldlt().solve(bt_p * a);  // (R + B'PB)^-1 B'PA
    const Eigen::MatrixXd next = symmetrize(
        s_cost + a.transpose() * p * (a - b * gain));
    const double diff = (next - p).cwiseAbs().maxCoeff();
    p = next;
    if (!p.allFinite() || p.cwiseAbs().maxCoeff() > 1e14) break;
    if (diff <= kTolerance * std::max(1.0, p.cwiseAbs().maxCoeff())) {
      return gain_denominator.ldlt().solve(b.transpose() * p * a);
    }
  }
  throw NoConvergenceError("lqr_gain: Riccati iteration did not converge");
}

}  // namespace bp

#endif  // BELIEFPLAN_LINEAR_SYSTEM_HPP_
