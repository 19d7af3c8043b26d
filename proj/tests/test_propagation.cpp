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

#include "beliefplan/propagation.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "beliefplan/linear_system.hpp"
#include "support.hpp"

using bp::belief_step;
using bp::GaussianBelief;
using bp::LinearSystem;
using bp::make_belief;
using bp::nominal_step;

namespace {

// Scalar system A=B=C=1 with measurements everywhere.
LinearSystem scalar_system(double q, double k) {
  LinearSystem sys;
  sys.a = Eigen::MatrixXd::Constant(1, 1, 1.0);
  sys.b = Eigen::MatrixXd::Constant(1, 1, 1.0);
  sys.c = Eigen::MatrixXd::Constant(1, 1, 1.0);
  sys.q = Eigen::MatrixXd::Constant(1, 1, q);
  sys.k = Eigen::MatrixXd::Constant(1, 1, k);
  sys.u_min = Eigen::VectorXd::Constant(1, -10.0);
  sys.u_max = Eigen::VectorXd::Constant(1, 10.0);
  return sys;
}

LinearSystem planar_system(double q) {
  LinearSystem sys;
  sys.a = Eigen::MatrixXd::Identity(2, 2);
  sys.b = Eigen::MatrixXd::Identity(2, 2);
  sys.c = Eigen::MatrixXd::Identity(2, 2);
  sys.q = q * Eigen::MatrixXd::Identity(2, 2);
  sys.k = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  sys.u_min = Eigen::Vector2d(-3, -3);
  sys.u_max = Eigen::Vector2d(3, 3);
  return sys;
}

// Planar environment, optionally with a measurement region covering
// everything.
bp::Environment plane_env(double r) {
  bp::Environment env;
  env.position_dim = 2;
  env.bounds.min = Eigen::Vector2d(-1e6, -1e6);
  env.bounds.max = Eigen::Vector2d(1e6, 1e6);
  env.goal.shape = bp::GoalRegion::Shape::kBox;
  env.goal.box.min = Eigen::Vector2d(0, 0);
  env.goal.box.max = Eigen::Vector2d(1, 1);
  env.delta = 0.05;
  if (r > 0) {
    bp::MeasurementRegion mr;
    mr.region = bp::ConvexPolygon::from_vertices(
        {{-1e6, -1e6}, {1e6, -1e6}, {1e6, 1e6}, {-1e6, 1e6}});
    mr.noise = r * Eigen::MatrixXd::Identity(2, 2);
    env.measurement_regions.push_back(mr);
  }
  return env;
}

}  // namespace

TEST_CASE("nominal_step examples") {
  LinearSystem sys = planar_system(0.0);
  REQUIRE(nominal_step(Eigen::Vector2d(1, 2), Eigen::Vector2d(0.5, -0.5), sys)
              .isApprox(Eigen::Vector2d(1.5, 1.5)));
  REQUIRE(nominal_step(Eigen::Vector2d(4, -2), Eigen::Vector2d(0, 0), sys)
              .isApprox(Eigen::Vector2d(4, -2)));

  LinearSystem doubling = scalar_system(0.0, 0.5);
  doubling.a(0, 0) = 2.0;
  REQUIRE(nominal_step(Eigen::VectorXd::Constant(1, 3.0),
                       Eigen::VectorXd::Constant(1, 1.0), doubling)(0) ==
          Catch::Approx(7.0));
}

TEST_CASE("nominal_step rejects out-of-bounds controls") {
  const LinearSystem sys = planar_system(0.0);
  REQUIRE_THROWS_AS(
      nominal_step(Eigen::Vector2d(0, 0), Eigen::Vector2d(4.0, 0), sys),
      bp::ControlOutOfBoundsError);
}

TEST_CASE("scalar covariance iteration reaches the Riccati fixed point") {
  // q = r = 0.01: the stationary point of s = (s+q) r / ((s+q) + r).
  const double kFixedPoint = 0.0061803398874989484;
  const LinearSystem sys = scalar_system(0.01, 0.5);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(1, 1, 1.0);
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(1, 1);
  const Eigen::MatrixXd noise = Eigen::MatrixXd::Constant(1, 1, 0.01);
  for (int k = 0; k < 500; ++k) {
    Eigen::MatrixXd sigma_out, lambda_out;
    bp::detail::covariance_step(sigma, lambda, sys, &noise, &sigma_out,
                                &lambda_out);
    sigma = sigma_out;
    lambda = lambda_out;
  }
  REQUIRE(std::abs(sigma(0, 0) - kFixedPoint) < 1e-8);
  // Lambda converges too: fixed point of l = (a-bk)^2 l + (sigma- - sigma+).
  const double sigma_pred = kFixedPoint + 0.01;
  const double correction = sigma_pred - kFixedPoint;
  const double lambda_fp = correction / (1.0 - 0.25);
  REQUIRE(std::abs(lambda(0, 0) - lambda_fp) < 1e-8);
}

TEST_CASE("no noise and no measurements keep the belief frozen") {
  const LinearSystem sys = planar_system(0.0);
  const bp::Environment env = plane_env(-1.0);
  GaussianBelief b = make_belief(Eigen::Vector2d(0, 0),
                                 Eigen::MatrixXd::Identity(2, 2),
                                 Eigen::MatrixXd::Zero(2, 2));
  for (int k = 0; k < 10; ++k) {
    b = belief_step(b, Eigen::Vector2d(0.1 * k, 0), sys, env);
    REQUIRE(b.sigma.isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-12));
    REQUIRE(b.lambda.cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("without measurements the estimation covariance grows") {
  const LinearSystem sys = planar_system(0.05);
  const bp::Environment env = plane_env(-1.0);
  GaussianBelief b = make_belief(Eigen::Vector2d(0, 0),
                                 Eigen::MatrixXd::Identity(2, 2),
                                 Eigen::MatrixXd::Zero(2, 2));
  double last = b.sigma.trace();
  for (int k = 0; k < 20; ++k) {
    b = belief_step(b, Eigen::Vector2d(0, 0), sys, env);
    REQUIRE(b.sigma.trace() > last);
    last = b.sigma.trace();
  }
}

TEST_CASE("measurement updates never increase sigma in the Loewner order") {
  bp::Rng rng(21);
  const LinearSystem sys = planar_system(0.05);
  const bp::Environment with = plane_env(0.01);
  const bp::Environment without = plane_env(-1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const GaussianBelief b = bptest::random_belief(2, 10, 0.05, 9.0, rng);
    const GaussianBelief updated =
        belief_step(b, Eigen::Vector2d(0, 0), sys, with);
    const GaussianBelief predicted =
        belief_step(b, Eigen::Vector2d(0, 0), sys, without);
    REQUIRE(bp::min_eigenvalue(predicted.sigma - updated.sigma) >= -1e-9);
    REQUIRE(bp::min_eigenvalue(updated.sigma) >= -bp::kPsdTolerance);
    REQUIRE(bp::min_eigenvalue(updated.lambda) >= -bp::kPsdTolerance);
  }
}

TEST_CASE("belief_step flags a singular innovation") {
  LinearSystem sys = planar_system(0.0);
  GaussianBelief b = make_belief(Eigen::Vector2d(0, 0),
                                 Eigen::MatrixXd::Zero(2, 2),
                                 Eigen::MatrixXd::Zero(2, 2));
  bp::Environment env = plane_env(1.0);
  env.measurement_regions[0].noise = Eigen::MatrixXd::Zero(2, 2);
  // Zero prior covariance, zero process noise, zero measurement noise:
  // the innovation is exactly singular.
  REQUIRE_THROWS_AS(belief_step(b, Eigen::Vector2d(0, 0), sys, env),
                    bp::SingularInnovationError);
}

TEST_CASE("propagate_edge composes nominal and belief steps") {
  const LinearSystem sys = planar_system(0.01);
  const bp::Environment env = plane_env(-1.0);
  const GaussianBelief b = make_belief(Eigen::Vector2d(1, 1),
                                       Eigen::MatrixXd::Identity(2, 2),
                                       Eigen::MatrixXd::Zero(2, 2));

  SECTION("empty control sequences are rejected") {
    REQUIRE_THROWS_AS(
        bp::propagate_edge(b, b.mean, std::span<const Eigen::VectorXd>{}, sys,
                           env),
        bp::Error);
  }

  SECTION("a single step equals the (nominal_step, belief_step) pair") {
    const std::vector<Eigen::VectorXd> controls{Eigen::Vector2d(0.5, -0.5)};
    const bp::EdgeResult edge = bp::propagate_edge(b, b.mean, controls, sys, env);
    REQUIRE(edge.states.size() == 1);
    const Eigen::VectorXd x = nominal_step(b.mean, controls[0], sys);
    const GaussianBelief expect = belief_step(b, x, sys, env);
    REQUIRE(edge.states[0] == x);
    REQUIRE(edge.beliefs[0].sigma == expect.sigma);
  }

  SECTION("constant controls telescope") {
    const std::vector<Eigen::VectorXd> controls(10, Eigen::Vector2d(0.5, 0.2));
    const bp::EdgeResult edge = bp::propagate_edge(b, b.mean, controls, sys, env);
    REQUIRE(edge.states.back().isApprox(
        Eigen::Vector2d(1 + 5.0, 1 + 2.0), 1e-12));
  }
}

TEST_CASE("lqr_gain matches the scalar closed form") {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Constant(1, 1, 1.0);
  const Eigen::MatrixXd k = bp::lqr_gain(one, one, one, one);
  // Fixed point P = (1 + sqrt 5)/2, gain K = P / (1 + P).
  const double p = 1.618033988749895;
  REQUIRE(k(0, 0) == Catch::Approx(p / (1.0 + p)).margin(1e-9));
}

TEST_CASE("lqr_gain diverges without control authority") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Constant(1, 1, 1.0);
  const Eigen::MatrixXd b = Eigen::MatrixXd::Zero(1, 1);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(1, 1);
  REQUIRE_THROWS_AS(bp::lqr_gain(a, b, eye, eye), bp::NoConvergenceError);
}

TEST_CASE("lqr_gain is zero for a dead-beat stable plant") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  const Eigen::MatrixXd b = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  REQUIRE(bp::lqr_gain(a, b, eye, eye).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("make_plan satisfies the motion plan invariants") {
  const LinearSystem sys = planar_system(0.01);
  const bp::Environment env = plane_env(-1.0);
  const GaussianBelief b0 = make_belief(Eigen::Vector2d(0, 0),
                                        Eigen::MatrixXd::Identity(2, 2),
                                        Eigen::MatrixXd::Zero(2, 2));
  std::vector<Eigen::VectorXd> controls(5, Eigen::Vector2d(1.0, 0.0));
  controls.push_back(Eigen::Vector2d(0.0, 2.0));
  const bp::MotionPlan plan = bp::make_plan(b0, controls, sys, env);
  REQUIRE(plan.controls.size() == 6);
  REQUIRE(plan.nominal_states.size() == 7);
  REQUIRE(plan.beliefs.size() == 7);
  for (std::size_t k = 0; k + 1 < plan.nominal_states.size(); ++k) {
    REQUIRE((plan.nominal_states[k + 1] -
             (sys.a * plan.nominal_states[k] + sys.b * plan.controls[k]))
                .cwiseAbs()
                .maxCoeff() == 0.0);
  }
  REQUIRE(plan.cost == Catch::Approx(7.0).margin(1e-12));
}

TEST_CASE("system validation rejects unstable closed loops") {
  LinearSystem sys = planar_system(0.01);
  sys.k = Eigen::MatrixXd::Zero(2, 2);  // A - BK = I, spectral radius 1
  REQUIRE_THROWS_AS(bp::validate_system(sys), bp::ValidationError);
}
