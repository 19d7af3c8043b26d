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

#ifndef BELIEFPLAN_GAUSSIAN_HPP_
#define BELIEFPLAN_GAUSSIAN_HPP_

#include <Eigen/Dense>
#include <string>

#include "beliefplan/errors.hpp"

namespace bp {

/// Absolute eigenvalue tolerance below which a covariance is rejected as
/// not PSD; negatives within tolerance are clamped to zero.
inline constexpr double kPsdTolerance = 1e-9;

/// Gaussian belief over the robot state.
///
/// The covariance is kept as two parts updated by different recursions:
/// `sigma` is the covariance of the estimation error (truth around the
/// online estimate) and `lambda` the dispersion of the estimate itself
/// around the nominal trajectory. Their sum is the covariance of the
/// state distribution and is what every probability or distance
/// computation consumes.
///
/// Values are immutable after construction and safe to share across
/// threads.
struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd lambda;

  Eigen::Index dim() const { return mean.size(); }
};

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

namespace detail {

/// Self-adjoint eigendecomposition with the closed-form 2x2/3x3 paths.
inline void eigendecompose(const Eigen::MatrixXd& m, Eigen::VectorXd* evals,
                           Eigen::MatrixXd* evecs) {
  const Eigen::Index n = m.rows();
  if (n == 2) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es;
    es.computeDirect(m);
    *evals = es.eigenvalues();
    *evecs = es.eigenvectors();
  } else if (n == 3) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
    es.computeDirect(m);
    *evals = es.eigenvalues();
    *evecs = es.eigenvectors();
  } else if (n == 4) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es{Eigen::Matrix4d(m)};
    *evals = es.eigenvalues();
    *evecs = es.eigenvectors();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    *evals = es.eigenvalues();
    *evecs = es.eigenvectors();
  }
}

/// Symmetrizes, verifies eigenvalues >= -kPsdTolerance, and clamps any
/// negative ones to zero. `what` names the matrix in error messages.
inline Eigen::MatrixXd validate_psd(const Eigen::MatrixXd& m,
                                    const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatchError(std::string(what) + " is not square");
  }
  if (!m.allFinite()) {
    throw NotPsdError(std::string(what) + " has non-finite entries");
  }
  const Eigen::MatrixXd sym = symmetrize(m);
  Eigen::VectorXd evals;
  Eigen::MatrixXd evecs;
  eigendecompose(sym, &evals, &evecs);
  if (evals.minCoeff() < -kPsdTolerance) {
    throw NotPsdError(std::string(what) + " has eigenvalue " +
                      std::to_string(evals.minCoeff()) +
                      " below -1e-9");
  }
  if (evals.minCoeff() >= 0.0) return sym;
  const Eigen::VectorXd clamped = evals.cwiseMax(0.0);
  return symmetrize(evecs * clamped.asDiagonal() * evecs.transpose());
}

}  // namespace detail

/// Builds a belief from raw parts. Covariances are symmetrized; an
/// eigenvalue below -1e-9 raises NotPsdError, negatives within tolerance
/// are clamped to zero.
inline GaussianBelief make_belief(const Eigen::VectorXd& mean,
                                  const Eigen::MatrixXd& sigma,
                                  const Eigen::MatrixXd& lambda) {
  const Eigen::Index n = mean.size();
  if (sigma.rows() != n || sigma.cols() != n || lambda.rows() != n ||
      lambda.cols() != n) {
    throw DimensionMismatchError(
        "make_belief: mean/sigma/lambda dimensions disagree");
  }
  if (!mean.allFinite()) {
    throw NotPsdError("make_belief: mean has non-finite entries");
  }
  GaussianBelief b;
  b.mean = mean;
  b.sigma = detail::validate_psd(sigma, "sigma");
  b.lambda = detail::validate_psd(lambda, "lambda");
  return b;
}

/// The covariance of the state distribution, sigma + lambda.
inline Eigen::MatrixXd total_covariance(const GaussianBelief& b) {
  return b.sigma + b.lambda;
}

/// Symmetric PSD square root via eigendecomposition, negative eigenvalues
/// clamped to zero. Handles rank-deficient input (e.g. a zero dispersion
/// block at the initial belief).
inline Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatchError("sqrt_psd: matrix is not square");
  }
  Eigen::VectorXd evals;
  Eigen::MatrixXd evecs;
  detail::eigendecompose(symmetrize(m), &evals, &evecs);
  if (evals.minCoeff() < -kPsdTolerance) {
    throw NotPsdError("sqrt_psd: eigenvalue " +
                      std::to_string(evals.minCoeff()) + " below -1e-9");
  }
  const Eigen::VectorXd roots = evals.cwiseMax(0.0).cwiseSqrt();
  return symmetrize(evecs * roots.asDiagonal() * evecs.transpose());
}

/// Smallest eigenvalue of a symmetric matrix.
inline double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::VectorXd evals;
  Eigen::MatrixXd evecs;
  detail::eigendecompose(symmetrize(m), &evals, &evecs);
  return evals.minCoeff();
}

}  // namespace bp

#endif  // BELIEFPLAN_GAUSSIAN_HPP_
