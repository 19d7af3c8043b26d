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

#include "beliefplan/metric.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "beliefplan/sampling.hpp"
#include "support.hpp"

using bp::euclidean_mean;
using bp::GaussianBelief;
using bp::make_belief;
using bp::wasserstein2;

namespace {

GaussianBelief belief(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  return make_belief(mean, cov, Eigen::MatrixXd::Zero(cov.rows(), cov.cols()));
}

}  // namespace

TEST_CASE("wasserstein2 self distance is zero") {
  bp::Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const GaussianBelief b = bptest::random_belief(2 + i % 3, 10, 0.1, 5, rng);
    REQUIRE(wasserstein2(b, b) <= 1e-9);
  }
}

TEST_CASE("wasserstein2 equal covariances reduce to squared mean distance") {
  const GaussianBelief a =
      belief(Eigen::Vector2d(0, 0), Eigen::MatrixXd::Identity(2, 2));
  const GaussianBelief b =
      belief(Eigen::Vector2d(3, 4), Eigen::MatrixXd::Identity(2, 2));
  REQUIRE(wasserstein2(a, b) == Catch::Approx(25.0).margin(1e-9));
}

TEST_CASE("wasserstein2 diagonal closed form") {
  // 1-D: (sigma1 - sigma2)^2 when means agree.
  Eigen::VectorXd mean(1);
  mean << 0.0;
  Eigen::MatrixXd c1(1, 1), c2(1, 1);
  c1 << 4.0;
  c2 << 1.0;
  REQUIRE(wasserstein2(belief(mean, c1), belief(mean, c2)) ==
          Catch::Approx(1.0).margin(1e-10));

  bp::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + trial % 3;
    Eigen::VectorXd a(n), c(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i) = rng.uniform(0.05, 9.0);
      c(i) = rng.uniform(0.05, 9.0);
    }
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
    double expected = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = std::sqrt(a(i)) - std::sqrt(c(i));
      expected += d * d;
    }
    const double got = wasserstein2(belief(mu, a.asDiagonal()),
                                    belief(mu, c.asDiagonal()));
    REQUIRE(got == Catch::Approx(expected).margin(1e-8));
  }
}

TEST_CASE("wasserstein2 symmetry") {
  bp::Rng rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const Eigen::Index n = trial % 2 == 0 ? 2 : 4;
    const GaussianBelief a = bptest::random_belief(n, 50, 0.05, 16, rng);
    const GaussianBelief b = bptest::random_belief(n, 50, 0.05, 16, rng);
    const double ab = wasserstein2(a, b);
    const double ba = wasserstein2(b, a);
    REQUIRE(std::abs(ab - ba) <= 1e-8 * std::max(1.0, std::abs(ab)));
  }
}

TEST_CASE("wasserstein2 positive when distributions differ") {
  const GaussianBelief a =
      belief(Eigen::Vector2d(0, 0), Eigen::MatrixXd::Identity(2, 2));
  const GaussianBelief shifted =
      belief(Eigen::Vector2d(0.1, 0), Eigen::MatrixXd::Identity(2, 2));
  const GaussianBelief widened =
      belief(Eigen::Vector2d(0, 0), 2.0 * Eigen::MatrixXd::Identity(2, 2));
  REQUIRE(wasserstein2(a, shifted) > 0.0);
  REQUIRE(wasserstein2(a, widened) > 0.0);
}

TEST_CASE("wasserstein2 triangle inequality on the root") {
  bp::Rng rng(23);
  for (int trial = 0; trial < 2000; ++trial) {
    const Eigen::Index n = trial % 2 == 0 ? 2 : 4;
    const GaussianBelief a = bptest::random_belief(n, 20, 0.05, 9, rng);
    const GaussianBelief b = bptest::random_belief(n, 20, 0.05, 9, rng);
    const GaussianBelief c = bptest::random_belief(n, 20, 0.05, 9, rng);
    const double ab = std::sqrt(wasserstein2(a, b));
    const double bc = std::sqrt(wasserstein2(b, c));
    const double ac = std::sqrt(wasserstein2(a, c));
    REQUIRE(ac <= ab + bc + 1e-7);
  }
}

TEST_CASE("commuting covariances match the spectral closed form") {
  bp::Rng rng(29);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index n = 2 + trial % 3;
    // Same eigenbasis, different eigenvalues: the covariances commute.
    const Eigen::MatrixXd o = bp::sample_orthogonal(n, rng);
    Eigen::VectorXd e1(n), e2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      e1(i) = rng.uniform(0.05, 9.0);
      e2(i) = rng.uniform(0.05, 9.0);
    }
    const Eigen::MatrixXd s1 =
        bp::symmetrize(o * e1.asDiagonal() * o.transpose());
    const Eigen::MatrixXd s2 =
        bp::symmetrize(o * e2.asDiagonal() * o.transpose());
    const Eigen::MatrixXd r1 = bp::sqrt_psd(s1);
    const Eigen::MatrixXd r2 = bp::sqrt_psd(s2);
    const double closed_form = ((r1 - r2) * (r1 - r2)).trace();
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
    const double via_metric = wasserstein2(belief(mu, s1), belief(mu, s2));
    REQUIRE(std::abs(via_metric - closed_form) <=
            1e-8 * std::max(1.0, closed_form));
  }
}

TEST_CASE("euclidean_mean ignores covariance") {
  const GaussianBelief a =
      belief(Eigen::Vector2d(1, 1), 0.01 * Eigen::MatrixXd::Identity(2, 2));
  const GaussianBelief b =
      belief(Eigen::Vector2d(1, 1), 400.0 * Eigen::MatrixXd::Identity(2, 2));
  REQUIRE(euclidean_mean(a, b) == 0.0);
}

TEST_CASE("euclidean_mean examples") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  REQUIRE(euclidean_mean(belief(Eigen::Vector2d(0, 0), eye),
                         belief(Eigen::Vector2d(3, 4), eye)) ==
          Catch::Approx(5.0));
  Eigen::VectorXd p(1), q(1);
  p << 1.0;
  q << -1.0;
  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  REQUIRE(euclidean_mean(belief(p, one), belief(q, one)) == Catch::Approx(2.0));
}

TEST_CASE("metric dimension mismatch") {
  const GaussianBelief a =
      belief(Eigen::Vector2d(0, 0), Eigen::MatrixXd::Identity(2, 2));
  const GaussianBelief b =
      belief(Eigen::Vector3d(0, 0, 0), Eigen::MatrixXd::Identity(3, 3));
  REQUIRE_THROWS_AS(wasserstein2(a, b), bp::DimensionMismatchError);
  REQUIRE_THROWS_AS(euclidean_mean(a, b), bp::DimensionMismatchError);
}
