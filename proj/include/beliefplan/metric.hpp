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

#ifndef BELIEFPLAN_METRIC_HPP_
#define BELIEFPLAN_METRIC_HPP_

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "beliefplan/errors.hpp"
#include "beliefplan/gaussian.hpp"

namespace bp {

/// Distance used for select / near-neighbor / pruning queries.
enum class MetricKind {
  kWasserstein2,   // squared 2-Wasserstein on the full distributions
  kEuclideanMean,  // Euclidean distance between means only
};

namespace detail {

/// Fixed-size variant; keeps the n = 3, 4 hot paths off the heap.
template <int N>
double wasserstein_cross_trace_fixed(
    const Eigen::Ref<const Eigen::MatrixXd>& s1,
    const Eigen::Ref<const Eigen::MatrixXd>& s2) {
  using Mat = Eigen::Matrix<double, N, N>;
  const Mat a = s1;
  const Mat b = s2;
  Eigen::SelfAdjointEigenSolver<Mat> es1(a);
  const Mat r1 = es1.eigenvectors() *
                 es1.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                 es1.eigenvectors().transpose();
  const Mat inner = r1 * b * r1;
  Eigen::SelfAdjointEigenSolver<Mat> es2(
      Mat(0.5 * (inner + inner.transpose())));
  return es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
}

/// Trace coupling term Tr((S1^1/2 S2 S1^1/2)^1/2) between two PSD
/// covariances. Only eigenvalues of the inner product matrix are needed,
/// never the matrix square root itself.
inline double wasserstein_cross_trace(const Eigen::MatrixXd& s1,
                                      const Eigen::MatrixXd& s2) {
  const Eigen::Index n = s1.rows();
  if (n == 1) {
    return std::sqrt(std::max(0.0, s1(0, 0) * s2(0, 0)));
  }
  if (n == 2) {
    // Eigenvalues of S1*S2 are real and nonnegative for PSD factors;
    // sqrt(l1) + sqrt(l2) = sqrt(tr + 2 sqrt(det)).
    const double tr = s1(0, 0) * s2(0, 0) + 2.0 * s1(0, 1) * s2(0, 1) +
                      s1(1, 1) * s2(1, 1);
    const double det = std::max(0.0, s1(0, 0) * s1(1, 1) - s1(0, 1) * s1(0, 1)) *
                       std::max(0.0, s2(0, 0) * s2(1, 1) - s2(0, 1) * s2(0, 1));
    return std::sqrt(std::max(0.0, tr + 2.0 * std::sqrt(det)));
  }
  if (n == 3) return wasserstein_cross_trace_fixed<3>(s1, s2);
  if (n == 4) return wasserstein_cross_trace_fixed<4>(s1, s2);
  const Eigen::MatrixXd r1 = sqrt_psd(s1);
  const Eigen::MatrixXd inner = symmetrize(r1 * s2 * r1);
  Eigen::VectorXd evals;
  Eigen::MatrixXd evecs;
  eigendecompose(inner, &evals, &evecs);
  return evals.cwiseMax(0.0).cwiseSqrt().sum();
}

}  // namespace detail

/// Squared 2-Wasserstein distance between the state distributions of two
/// beliefs (distance on total covariance):
///   |mu1 - mu2|^2 + Tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2).
/// Nonnegative; tiny negative round-off is clamped to zero.
inline double wasserstein2(const GaussianBelief& b1, const GaussianBelief& b2) {
  if (b1.dim() != b2.dim()) {
    throw DimensionMismatchError("wasserstein2: beliefs of different dimension");
  }
  const Eigen::MatrixXd s1 = total_covariance(b1);
  const Eigen::MatrixXd s2 = total_covariance(b2);
  const double mean_term = (b1.mean - b2.mean).squaredNorm();
  const double trace_term =
      s1.trace() + s2.trace() - 2.0 * detail::wasserstein_cross_trace(s1, s2);
  return std::max(0.0, mean_term + trace_term);
}

/// Euclidean distance between belief means; covariance-blind.
inline double euclidean_mean(const GaussianBelief& b1,
                             const GaussianBelief& b2) {
  if (b1.dim() != b2.dim()) {
    throw DimensionMismatchError(
        "euclidean_mean: beliefs of different dimension");
  }
  return (b1.mean - b2.mean).norm();
}

/// Metric dispatcher. `raw` values are what the planner compares and what
/// radii are expressed in (squared form for Wasserstein); `rooted`
/// converts a raw value to the true-metric scale used by index pruning
/// and the triangle inequality.
class Metric {
 public:
  explicit Metric(MetricKind kind) : kind_(kind) {}

  MetricKind kind() const { return kind_; }

  double operator()(const GaussianBelief& a, const GaussianBelief& b) const {
    return kind_ == MetricKind::kWasserstein2 ? wasserstein2(a, b)
                                              : euclidean_mean(a, b);
  }

  double rooted(double raw) const {
    return kind_ == MetricKind::kWasserstein2 ? std::sqrt(std::max(0.0, raw))
                                              : raw;
  }

 private:
  MetricKind kind_;
};

}  // namespace bp

#endif  // BELIEFPLAN_METRIC_HPP_
