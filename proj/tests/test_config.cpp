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

#include "beliefplan/config.hpp"

#include <cstdio>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

namespace {

// Writes `text` to a temp file and returns its path.
std::string temp_yaml(const std::string& name, const std::string& text) {
  const std::string path = "/tmp/beliefplan_test_" + name + ".yaml";
  std::ofstream out(path);
  out << text;
  return path;
}

constexpr const char* kMinimalRun = R"(
environment:
  bounds: { min: [0, 0], max: [50, 50] }
  delta: 0.05
  goal: { box: { min: [40, 40], max: [45, 45] } }
system:
  a: [[1, 0], [0, 1]]
  b: [[1, 0], [0, 1]]
  c: [[1, 0], [0, 1]]
  q: 0.02
  control_bounds: { min: [-2, -2], max: [2, 2] }
planner:
  algorithm: rrt
  metric: l2
  seed: 5
  lambda_max: 100
  lambda_low: 2
  iteration_budget: 100
initial_belief:
  mean: [5, 5]
  sigma: 0.5
)";

}  // namespace

TEST_CASE("shipped environment configs load and validate") {
  const bp::RunConfig env1 = bp::load_config(bptest::config_path("run_env1.yaml"));
  REQUIRE(env1.environment.obstacles.empty());
  REQUIRE(env1.environment.measurement_regions.empty());
  REQUIRE(env1.environment.bounds.max(0) == 100.0);
  REQUIRE(env1.environment.delta == 0.05);
  REQUIRE(env1.algo == bp::PlannerAlgo::kBeliefSst);
  REQUIRE(env1.params.metric == bp::MetricKind::kWasserstein2);
  REQUIRE(env1.b_init.mean == Eigen::Vector2d(10, 10));

  for (const char* name : {"run_env2.yaml", "run_env3.yaml"}) {
    const bp::RunConfig config = bp::load_config(bptest::config_path(name));
    REQUIRE_FALSE(config.environment.measurement_regions.empty());
    for (const auto& mr : config.environment.measurement_regions) {
      REQUIRE(mr.noise.isApprox(0.01 * Eigen::MatrixXd::Identity(2, 2)));
    }
    REQUIRE_FALSE(config.environment.obstacles.empty());
  }
}

TEST_CASE("derived quantities: gain computed when k is omitted") {
  const bp::RunConfig config =
      bp::load_config(bptest::config_path("run_env1.yaml"));
  // Identity-weight LQR for the planar integrator.
  const double expected = 1.618033988749895 / (1.0 + 1.618033988749895);
  REQUIRE(config.system.k(0, 0) == Catch::Approx(expected).margin(1e-9));
  REQUIRE(config.system.k(0, 1) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(bp::spectral_radius(config.system.closed_loop()) < 1.0);
}

TEST_CASE("unicycle system config loads with explicit aux bounds") {
  const std::string path = temp_yaml("unicycle_run", R"(
environment: { file: )" + bptest::config_path("env1.yaml") + R"( }
system: { file: )" + bptest::config_path("sys_unicycle.yaml") + R"( }
planner:
  algorithm: sst
  lambda_max: [500, 500, 25, 25]
  lambda_low: [1, 1, 0.25, 0.25]
  iteration_budget: 10
initial_belief:
  mean: [10, 10, 0, 0]
  sigma: 1.0
)");
  const bp::RunConfig config = bp::load_config(path);
  REQUIRE(config.system.state_dim() == 4);
  REQUIRE(config.system.measurement_dim() == 2);
  REQUIRE(config.environment.position_dim == 2);
  // Scalar measurement covariances expand to p x p.
  REQUIRE(config.system.aux_min.size() == 2);
  REQUIRE(bp::spectral_radius(config.system.closed_loop()) < 1.0);
}

TEST_CASE("minimal inline config loads") {
  const bp::RunConfig config =
      bp::load_config(temp_yaml("minimal", kMinimalRun));
  REQUIRE(config.algo == bp::PlannerAlgo::kBeliefRrt);
  REQUIRE(config.params.metric == bp::MetricKind::kEuclideanMean);
  REQUIRE(config.params.sampler.seed == 5);
  REQUIRE(config.params.iteration_budget == 100);
  REQUIRE(config.b_init.sigma(0, 0) == 0.5);
}

TEST_CASE("collinear polygon fails with a line number") {
  std::string text = kMinimalRun;
  text += R"(
)";
  // Re-build with an obstacles entry holding a zero-area polygon.
  const std::string bad = R"(
environment:
  bounds: { min: [0, 0], max: [50, 50] }
  delta: 0.05
  goal: { box: { min: [40, 40], max: [45, 45] } }
  obstacles:
    - [[0, 0], [1, 1], [2, 2]]
system:
  a: [[1, 0], [0, 1]]
  b: [[1, 0], [0, 1]]
  c: [[1, 0], [0, 1]]
  q: 0.02
  control_bounds: { min: [-2, -2], max: [2, 2] }
planner:
  lambda_max: 100
  iteration_budget: 10
initial_belief:
  mean: [5, 5]
  sigma: 0.5
)";
  try {
    bp::load_config(temp_yaml("collinear", bad));
    FAIL("expected ValidationError");
  } catch (const bp::ValidationError& e) {
    const std::string what = e.what();
    REQUIRE(what.find("degenerate") != std::string::npos);
    REQUIRE(what.find("line") != std::string::npos);
  }
}

TEST_CASE("unstable supplied gain is rejected") {
  const std::string bad = R"(
environment:
  bounds: { min: [0, 0], max: [50, 50] }
  delta: 0.05
  goal: { box: { min: [40, 40], max: [45, 45] } }
system:
  a: [[1, 0], [0, 1]]
  b: [[1, 0], [0, 1]]
  c: [[1, 0], [0, 1]]
  q: 0.02
  k: [[0, 0], [0, 0]]
  control_bounds: { min: [-2, -2], max: [2, 2] }
planner:
  lambda_max: 100
  iteration_budget: 10
initial_belief:
  mean: [5, 5]
  sigma: 0.5
)";
  REQUIRE_THROWS_AS(bp::load_config(temp_yaml("unstable", bad)),
                    bp::ValidationError);
}

TEST_CASE("missing keys raise parse errors naming the key") {
  const std::string bad = R"(
environment:
  bounds: { min: [0, 0], max: [50, 50] }
  delta: 0.05
system:
  a: [[1]]
  b: [[1]]
  c: [[1]]
  q: 0.01
  control_bounds: { min: [-1], max: [1] }
planner: { lambda_max: 10, iteration_budget: 5 }
initial_belief: { mean: [5], sigma: 0.5 }
)";
  try {
    bp::load_config(temp_yaml("missing_goal", bad));
    FAIL("expected ParseError");
  } catch (const bp::ParseError& e) {
    REQUIRE(std::string(e.what()).find("goal") != std::string::npos);
  }
}

TEST_CASE("lambda_max defaults to the environment-derived cap") {
  // env2 has obstacles, so the cap search converges without an explicit
  // lambda_max entry.
  const std::string text = R"(
environment: { file: )" + bptest::config_path("env2.yaml") + R"( }
system: { file: )" + bptest::config_path("sys2d.yaml") + R"( }
planner:
  iteration_budget: 10
initial_belief:
  mean: [10, 50]
  sigma: 4.0
)";
  const bp::RunConfig config = bp::load_config(temp_yaml("lambda_auto", text));
  REQUIRE(config.params.sampler.lambda_max(0) > 0.0);
  REQUIRE(config.params.sampler.lambda_max(1) > 0.0);
  // Default low eigenvalues are 5% of the cap.
  REQUIRE(config.params.sampler.lambda_low(0) ==
          Catch::Approx(0.05 * config.params.sampler.lambda_max(0)));
}

TEST_CASE("bench spec loads with variants and cutoffs") {
  const bp::BenchmarkSpec spec =
      bp::load_bench_spec(bptest::config_path("bench_small.yaml"));
  REQUIRE(spec.variants.size() == 3);
  REQUIRE(spec.trials == 3);
  REQUIRE(spec.cutoffs.size() == 2);
  REQUIRE(spec.cutoffs[0].kind == bp::Cutoff::Kind::kIterations);
  REQUIRE(spec.cutoffs[0].label() == "1500it");
  REQUIRE(spec.master_seed == 20260810);
  REQUIRE(spec.environment_name == "env1");
  REQUIRE(spec.budget.iterations == 3000);
}

TEST_CASE("scenario config loads run and updates") {
  const bp::ScenarioConfig scenario =
      bp::load_scenario(bptest::config_path("replan_scenario.yaml"));
  REQUIRE(scenario.updates.size() == 1);
  REQUIRE(scenario.updates[0].first == 5);
  REQUIRE(scenario.updates[0].second.obstacles.size() == 3);
  REQUIRE(scenario.replan_budget_s == 1.0);
  REQUIRE(scenario.run.b_init.mean == Eigen::Vector2d(10, 62));
}

TEST_CASE("nonexistent file raises IoError") {
  REQUIRE_THROWS_AS(bp::load_config("/nonexistent/nowhere.yaml"), bp::IoError);
}
