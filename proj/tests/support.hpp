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

#ifndef BELIEFPLAN_TESTS_SUPPORT_HPP_
#define BELIEFPLAN_TESTS_SUPPORT_HPP_

#include <string>

#include <Eigen/Dense>

#include "beliefplan/gaussian.hpp"
#include "beliefplan/rng.hpp"

namespace bptest {

inline std::string config_dir() { return BELIEFPLAN_CONFIG_DIR; }

inline std::string config_path(const std::string& name) {
  return config_dir() + "/" + name;
}

/// Random symmetric PSD matrix with eigenvalues in (lo, hi].
inline Eigen::MatrixXd random_psd(Eigen::Index n, double lo, double hi,
                                  bp::Rng& rng) {
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rng.normal();
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd evals(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    evals(i) = lo + (hi - lo) * (1.0 - rng.uniform01());
  }
  return bp::symmetrize(q * evals.asDiagonal() * q.transpose());
}

inline bp::GaussianBelief random_belief(Eigen::Index n, double mean_span,
                                        double cov_lo, double cov_hi,
                                        bp::Rng& rng) {
  Eigen::VectorXd mean(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mean(i) = rng.uniform(-mean_span, mean_span);
  }
  return bp::make_belief(mean, random_psd(n, cov_lo, cov_hi, rng),
                         Eigen::MatrixXd::Zero(n, n));
}

}  // namespace bptest

#endif  // BELIEFPLAN_TESTS_SUPPORT_HPP_
