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

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "beliefplan/artifacts.hpp"
#include "beliefplan/bench.hpp"
#include "beliefplan/config.hpp"
#include "beliefplan/executor.hpp"
#include "beliefplan/planner.hpp"

namespace {

struct Overrides {
  std::optional<std::string> algorithm;
  std::optional<std::string> metric;
  std::optional<std::string> nn_index;
  std::optional<std::uint64_t> seed;
  std::optional<double> p_bias;
  std::optional<double> p_goal;
  std::optional<double> time_budget_s;
  std::optional<std::uint64_t> iteration_budget;
  std::optional<double> sst_delta_bn;
  std::optional<double> sst_delta_s;
  std::optional<int> extend_candidates;
  std::optional<double> lambda_max;
  std::optional<double> lambda_low;
};

void add_override_flags(CLI::App* cmd, Overrides* o) {
  cmd->add_option("--algorithm", o->algorithm, "Planner: sst or rrt");
  cmd->add_option("--metric", o->metric, "Metric: w2 or l2");
  cmd->add_option("--nn-index", o->nn_index, "Neighbor index: linear or vptree");
  cmd->add_option("--seed", o->seed, "Sampler seed");
  cmd->add_option("--p-bias", o->p_bias, "Low-uncertainty sampling bias");
  cmd->add_option("--p-goal", o->p_goal, "Goal sampling bias");
  cmd->add_option("--time-budget-s", o->time_budget_s, "Wall-clock budget");
  cmd->add_option("--iteration-budget", o->iteration_budget,
                  "Iteration budget");
  cmd->add_option("--sst-delta-bn", o->sst_delta_bn, "SST selection radius");
  cmd->add_option("--sst-delta-s", o->sst_delta_s, "SST witness radius");
  cmd->add_option("--extend-candidates", o->extend_candidates,
                  "Candidate controls per extension");
  cmd->add_option("--lambda-max", o->lambda_max,
                  "Covariance eigenvalue cap (all dimensions)");
  cmd->add_option("--lambda-low", o->lambda_low,
                  "Bias eigenvalue (all dimensions)");
}

void apply_overrides(const Overrides& o, bp::RunConfig* config) {
  const Eigen::Index n = config->system.state_dim();
  if (o.algorithm) {
    if (*o.algorithm == "sst") {
      config->algo = bp::PlannerAlgo::kBeliefSst;
    } else if (*o.algorithm == "rrt") {
      config->algo = bp::PlannerAlgo::kBeliefRrt;
    } else {
      throw bp::ValidationError("--algorithm must be sst or rrt");
    }
  }
  if (o.metric) {
    if (*o.metric == "w2") {
      config->params.metric = bp::MetricKind::kWasserstein2;
    } else if (*o.metric == "l2") {
      config->params.metric = bp::MetricKind::kEuclideanMean;
    } else {
      throw bp::ValidationError("--metric must be w2 or l2");
    }
  }
  if (o.nn_index) {
    if (*o.nn_index == "linear") {
      config->params.nn_index = bp::IndexKind::kLinear;
    } else if (*o.nn_index == "vptree") {
      config->params.nn_index = bp::IndexKind::kVpTree;
    } else {
      throw bp::ValidationError("--nn-index must be linear or vptree");
    }
  }
  if (o.seed) config->params.sampler.seed = *o.seed;
  if (o.p_bias) config->params.sampler.p_bias = *o.p_bias;
  if (o.p_goal) config->params.sampler.p_goal = *o.p_goal;
  if (o.time_budget_s) config->params.time_budget_s = *o.time_budget_s;
  if (o.iteration_budget) config->params.iteration_budget = *o.iteration_budget;
  if (o.sst_delta_bn) config->params.sst_delta_bn = *o.sst_delta_bn;
  if (o.sst_delta_s) config->params.sst_delta_s = *o.sst_delta_s;
  if (o.extend_candidates) {
    config->params.extend_candidates = *o.extend_candidates;
  }
  if (o.lambda_max) {
    config->params.sampler.lambda_max =
        Eigen::VectorXd::Constant(n, *o.lambda_max);
  }
  if (o.lambda_low) {
    config->params.sampler.lambda_low =
        Eigen::VectorXd::Constant(n, *o.lambda_low);
  }
  bp::validate_planner_params(config->params, n);
}

int cmd_plan(const std::string& config_path, const Overrides& overrides,
             const std::string& out_dir) {
  bp::RunConfig config = bp::load_config(config_path);
  apply_overrides(overrides, &config);
  std::filesystem::create_directories(out_dir);
  const bp::PlanResult result = bp::plan(
      config.environment, config.system, config.b_init, config.params,
      config.algo);
  if (!result.best_plan) {
    std::cout << "status: no_solution\n";
    std::cout << "iterations: " << result.stats.iterations << "\n";
    std::cout << "nodes: " << result.stats.nodes_added << "\n";
    return 0;
  }
  const bp::MotionPlan& plan = *result.best_plan;
  const std::string csv = out_dir + "/plan.csv";
  const std::string svg = out_dir + "/plan.svg";
  bp::write_plan_csv(plan, csv);
  bp::write_plan_svg(plan, config.environment, svg);
  std::cout << "status: solved\n";
  std::cout << "cost: " << plan.cost << "\n";
  std::cout << "steps: " << plan.steps() << "\n";
  std::cout << "first_solution_time_s: " << result.first_solution_time_s
            << "\n";
  std::cout << "first_solution_iteration: " << result.first_solution_iteration
            << "\n";
  std::cout << "iterations: " << result.stats.iterations << "\n";
  std::cout << "nodes: " << result.stats.nodes_added << "\n";
  std::cout << "plan_csv: " << csv << "\n";
  std::cout << "plan_svg: " << svg << "\n";
  return 0;
}

int cmd_bench(const std::string& spec_path, const std::string& out_path,
              int threads) {
  const bp::BenchmarkSpec spec = bp::load_bench_spec(spec_path);
  const bp::BenchResult result = bp::run_benchmark(spec, threads);
  bp::write_bench_csv(result, out_path);
  std::cout << "cells: " << result.cells.size() << "\n";
  std::cout << "csv: " << out_path << "\n";
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& plan_path,
                 std::int64_t trials, std::uint64_t seed,
                 const std::string& out_path) {
  const bp::RunConfig config = bp::load_config(config_path);
  const bp::PlanFile file = bp::read_plan_csv(plan_path);
  const bp::MotionPlan plan =
      bp::replay_plan(file, config.system, config.environment);
  bp::Rng rng(seed);
  const bp::ChanceEstimate est = bp::estimate_chance(
      plan, config.system, config.environment, trials, rng);
  std::cout << "trials: " << est.trials << "\n";
  std::cout << "collision_rate: " << est.collision_rate << " (wilson99 "
            << est.collision_wilson.lower << ".." << est.collision_wilson.upper
            << ")\n";
  std::cout << "goal_rate: " << est.goal_rate << " (wilson99 "
            << est.goal_wilson.lower << ".." << est.goal_wilson.upper
            << ", among non-collided trials)\n";
  std::cout << "success_rate: " << est.success_rate << " (wilson99 "
            << est.success_wilson.lower << ".." << est.success_wilson.upper
            << ")\n";
  double worst = 0.0;
  for (const auto& w : est.per_step_collision_wilson) {
    worst = std::max(worst, w.upper);
  }
  std::cout << "max_per_step_collision_wilson_upper: " << worst << "\n";
  std::cout << "delta: " << config.environment.delta << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw bp::IoError("cannot open for writing: " + out_path);
    out << "step,collision_rate,wilson_lower,wilson_upper\n";
    for (std::size_t k = 0; k < est.per_step_collision_rate.size(); ++k) {
      out << k << "," << est.per_step_collision_rate[k] << ","
          << est.per_step_collision_wilson[k].lower << ","
          << est.per_step_collision_wilson[k].upper << "\n";
    }
    std::cout << "csv: " << out_path << "\n";
  }
  return 0;
}

int cmd_replan(const std::string& scenario_path, const Overrides& overrides,
               std::uint64_t exec_seed, const std::string& out_dir) {
  bp::ScenarioConfig scenario = bp::load_scenario(scenario_path);
  apply_overrides(overrides, &scenario.run);
  std::filesystem::create_directories(out_dir);
  bp::ScenarioScript script;
  script.initial_env = scenario.run.environment;
  script.b_init = scenario.run.b_init;
  script.algo = scenario.run.algo;
  script.params = scenario.run.params;
  script.initial_budget_s = scenario.initial_budget_s;
  script.replan_budget_s = scenario.replan_budget_s;
  for (auto& [at_step, env] : scenario.updates) {
    script.updates.push_back({at_step, std::move(env)});
  }
  bp::Rng rng(exec_seed);
  const bp::ScenarioLog log = bp::replan_scenario(script, scenario.run.system,
                                                  rng);
  std::cout << "plans: " << log.plans.size() << "\n";
  std::cout << "updates_applied: " << log.update_steps.size() << "\n";
  std::cout << "collided: " << (log.collided ? "true" : "false") << "\n";
  std::cout << "reached_goal: " << (log.reached_goal ? "true" : "false")
            << "\n";
  std::cout << "status: "
            << (log.replan_failed
                    ? "replan_failed"
                    : (log.collided ? "collided"
                                    : (log.reached_goal ? "completed"
                                                        : "incomplete")))
            << "\n";
  if (log.replan_failed) std::cout << "failure: " << log.failure << "\n";
  const Eigen::Index envs = static_cast<Eigen::Index>(log.plans.size());
  for (Eigen::Index i = 0; i < envs; ++i) {
    const bp::Environment& env =
        i == 0 ? script.initial_env
               : script.updates[std::min<std::size_t>(i - 1,
                                                      script.updates.size() - 1)]
                     .environment;
    const std::string csv = out_dir + "/plan_" + std::to_string(i) + ".csv";
    const std::string svg = out_dir + "/plan_" + std::to_string(i) + ".svg";
    bp::write_plan_csv(log.plans[i], csv);
    bp::write_plan_svg(log.plans[i], env, svg);
  }
  std::cout << "out_dir: " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Belief-space kinodynamic planning under chance constraints"};
  app.require_subcommand(1);

  std::string config_path, spec_path, plan_path, scenario_path;
  std::string out_dir = "out";
  std::string out_csv = "bench.csv";
  std::string sim_csv;
  std::int64_t trials = 10000;
  std::uint64_t seed = 0;
  int threads = 1;
  Overrides overrides;

  CLI::App* plan_cmd =
      app.add_subcommand("plan", "Plan once and emit plan CSV + SVG");
  plan_cmd->add_option("--config", config_path, "Run config file")->required();
  plan_cmd->add_option("--out", out_dir, "Output directory");
  add_override_flags(plan_cmd, &overrides);

  CLI::App* bench_cmd =
      app.add_subcommand("bench", "Run a benchmark grid, emit CSV");
  bench_cmd->add_option("--spec", spec_path, "Benchmark spec file")->required();
  bench_cmd->add_option("--out", out_csv, "Output CSV path");
  bench_cmd->add_option("--threads", threads, "Concurrent trials");

  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Monte Carlo chance estimation for a stored plan");
  sim_cmd->add_option("--config", config_path, "Run config file")->required();
  sim_cmd->add_option("--plan", plan_path, "Plan CSV file")->required();
  sim_cmd->add_option("--trials", trials, "Rollout count");
  sim_cmd->add_option("--seed", seed, "Rollout seed");
  sim_cmd->add_option("--out", sim_csv, "Per-step CSV output path");

  CLI::App* replan_cmd = app.add_subcommand(
      "replan", "Execute a scripted environment-update scenario");
  replan_cmd->add_option("--scenario", scenario_path, "Scenario file")
      ->required();
  replan_cmd->add_option("--out", out_dir, "Output directory");
  replan_cmd->add_option("--exec-seed", seed, "Execution noise seed");
  add_override_flags(replan_cmd, &overrides);

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan_cmd->parsed()) return cmd_plan(config_path, overrides, out_dir);
    if (bench_cmd->parsed()) return cmd_bench(spec_path, out_csv, threads);
    if (sim_cmd->parsed()) {
      return cmd_simulate(config_path, plan_path, trials, seed, sim_csv);
    }
    if (replan_cmd->parsed()) {
      return cmd_replan(scenario_path, overrides, seed, out_dir);
    }
  } catch (const bp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
