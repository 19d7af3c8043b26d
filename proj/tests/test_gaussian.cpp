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

#include "beliefplan/gaussian.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using bp::GaussianBelief;
using bp::make_belief;
using bp::sqrt_psd;
using bp::total_covariance;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("make_belief identity case") {
  const GaussianBelief b = make_belief(Eigen::Vector2d(0, 0),
                                       Eigen::MatrixXd::Identity(2, 2),
                                       Eigen::MatrixXd::Zero(2, 2));
  REQUIRE(total_covariance(b).isApprox(Eigen::MatrixXd::Identity(2, 2)));
}

TEST_CASE("make_belief rejects negative variance") {
  Eigen::VectorXd mean(1);
  mean << 1.0;
  Eigen::MatrixXd sigma(1, 1), lambda(1, 1);
  sigma << -1.0;
  lambda << 0.0;
  REQUIRE_THROWS_AS(make_belief(mean, sigma, lambda), bp::NotPsdError);
}

TEST_CASE("make_belief rejects dimension mismatch") {
  REQUIRE_THROWS_AS(make_belief(Eigen::Vector3d::Zero(),
                                Eigen::MatrixXd::Identity(2, 2),
                                Eigen::MatrixXd::Zero(2, 2)),
                    bp::DimensionMismatchError);
}

TEST_CASE("total covariance adds the two parts") {
  const GaussianBelief b =
      make_belief(Eigen::Vector2d(0, 0), mat2(1, 0.5, 0.5, 1),
                  mat2(0.1, 0, 0, 0.1));
  REQUIRE(total_covariance(b).isApprox(mat2(1.1, 0.5, 0.5, 1.1), 1e-12));

  const GaussianBelief half = make_belief(
      Eigen::Vector2d(0, 0), 0.5 * Eigen::MatrixXd::Identity(2, 2),
      0.5 * Eigen::MatrixXd::Identity(2, 2));
  REQUIRE(total_covariance(half).isApprox(Eigen::MatrixXd::Identity(2, 2)));

  const GaussianBelief diag =
      make_belief(Eigen::Vector2d(0, 0), mat2(1, 0, 0, 2), mat2(3, 0, 0, 4));
  REQUIRE(total_covariance(diag).isApprox(mat2(4, 0, 0, 6)));
}

TEST_CASE("construction symmetrizes") {
  Eigen::MatrixXd skew(2, 2);
  skew << 1.0, 0.3, 0.1, 1.0;
  const GaussianBelief b = make_belief(Eigen::Vector2d(0, 0), skew,
                                       Eigen::MatrixXd::Zero(2, 2));
  REQUIRE((b.sigma - b.sigma.transpose()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(b.sigma(0, 1) == Catch::Approx(0.2));
}

TEST_CASE("construction clamps tiny negative eigenvalues") {
  // Within tolerance: eigenvalues {1, -5e-10} must clamp, not throw.
  Eigen::MatrixXd sigma = mat2(1, 0, 0, -5e-10);
  const GaussianBelief b = make_belief(Eigen::Vector2d(0, 0), sigma,
                                       Eigen::MatrixXd::Zero(2, 2));
  REQUIRE(bp::min_eigenvalue(b.sigma) >= 0.0);
}

TEST_CASE("sqrt_psd identity and diagonal") {
  REQUIRE(sqrt_psd(Eigen::MatrixXd::Identity(2, 2))
              .isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-12));
  REQUIRE(sqrt_psd(mat2(4, 0, 0, 9)).isApprox(mat2(2, 0, 0, 3), 1e-12));
}

TEST_CASE("sqrt_psd squares back") {
  const Eigen::MatrixXd m = mat2(2, 1, 1, 2);
  const Eigen::MatrixXd s = sqrt_psd(m);
  REQUIRE((s * s - m).norm() / m.norm() < 1e-8);
  REQUIRE(bp::min_eigenvalue(s) >= 0.0);
}

TEST_CASE("sqrt_psd rejects indefinite input") {
  REQUIRE_THROWS_AS(sqrt_psd(mat2(1, 0, 0, -1)), bp::NotPsdError);
}

TEST_CASE("sqrt_psd handles rank deficiency") {
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 3);
  REQUIRE(sqrt_psd(zero).isApprox(zero));
  // Rank-1 projector is its own square root.
  Eigen::MatrixXd p(2, 2);
  p << 0.5, 0.5, 0.5, 0.5;
  REQUIRE(sqrt_psd(p).isApprox(p, 1e-10));
}

TEST_CASE("sqrt_psd round-trip property") {
  bp::Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + trial % 3;
    const Eigen::MatrixXd s = bptest::random_psd(n, 0.1, 9.0, rng);
    const Eigen::MatrixXd recovered = sqrt_psd(s * s);
    REQUIRE((recovered - s).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("constructed beliefs stay PSD under random inputs") {
  bp::Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + trial % 3;
    const GaussianBelief b =
        bptest::random_belief(n, 50.0, 1e-6, 25.0, rng);
    REQUIRE(bp::min_eigenvalue(b.sigma) >= -bp::kPsdTolerance);
    REQUIRE(bp::min_eigenvalue(b.lambda) >= -bp::kPsdTolerance);
    REQUIRE(bp::min_eigenvalue(total_covariance(b)) >= -bp::kPsdTolerance);
    REQUIRE((b.sigma - b.sigma.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}
