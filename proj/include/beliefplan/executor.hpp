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

#ifndef BELIEFPLAN_EXECUTOR_HPP_
#define BELIEFPLAN_EXECUTOR_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beliefplan/environment.hpp"
#include "beliefplan/errors.hpp"
#include "beliefplan/gaussian.hpp"
#include "beliefplan/linear_system.hpp"
#include "beliefplan/planner.hpp"
#include "beliefplan/propagation.hpp"
#include "beliefplan/rng.hpp"
#include "beliefplan/stats.hpp"

namespace bp {

struct RolloutResult {
  bool collided = false;
  int collision_step = -1;  // step index of the first collision
  bool reached_goal = false;
  std::vector<Eigen::VectorXd> true_trajectory;
  std::vector<Eigen::VectorXd> estimate_trajectory;
};

/// Explicit initial condition for deterministic tests; when absent the
/// initial state and estimate are sampled from the plan's first belief.
struct RolloutInit {
  Eigen::VectorXd x0;
  Eigen::VectorXd xhat0;
};

namespace detail {

inline Eigen::VectorXd gaussian_draw(const Eigen::MatrixXd& sqrt_cov,
                                     Rng& rng) {
  Eigen::VectorXd z(sqrt_cov.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return sqrt_cov * z;
}

}  // namespace detail

/// Closed-loop Monte Carlo execution of a plan: tracking controller on the
/// filtered estimate, process noise on the truth, measurements drawn when
/// the true state sits in a measurement region. Collision flags the first
/// step whose true position enters an obstacle or leaves the workspace;
/// the trajectory truncates there.
inline RolloutResult rollout(const MotionPlan& plan, const LinearSystem& sys,
                             const Environment& env, Rng& rng,
                             const RolloutInit* init = nullptr) {
  const GaussianBelief& b0 = plan.beliefs.front();
  const Eigen::MatrixXd sqrt_q = sqrt_psd(sys.q);
  std::vector<Eigen::MatrixXd> sqrt_noise;
  sqrt_noise.reserve(env.measurement_regions.size());
  for (const auto& mr : env.measurement_regions) {
    sqrt_noise.push_back(sqrt_psd(mr.noise));
  }

  Eigen::VectorXd xhat, x;
  if (init != nullptr) {
    x = init->x0;
    xhat = init->xhat0;
  } else {
    xhat = b0.mean + detail::gaussian_draw(sqrt_psd(b0.lambda), rng);
    x = xhat + detail::gaussian_draw(sqrt_psd(b0.sigma), rng);
  }
  Eigen::MatrixXd p = b0.sigma;

  RolloutResult result;
  result.true_trajectory.push_back(x);
  result.estimate_trajectory.push_back(xhat);
  auto in_collision = [&](const Eigen::VectorXd& state) {
    const Eigen::VectorXd pos = env.position_of(state);
    return !env.bounds.contains(pos) || env.in_any_obstacle(pos);
  };
  if (in_collision(x)) {
    result.collided = true;
    result.collision_step = 0;
    return result;
  }

  const std::size_t horizon = plan.steps();
  for (std::size_t k = 0; k < horizon; ++k) {
    const Eigen::VectorXd u =
        plan.controls[k] - sys.k * (xhat - plan.nominal_states[k]);
    x = sys.a * x + sys.b * u + detail::gaussian_draw(sqrt_q, rng);
    Eigen::VectorXd xhat_pred = sys.a * xhat + sys.b * u;
    p = symmetrize(sys.a * p * sys.a.transpose() + sys.q);
    const int region = env.measurement_region_index(env.position_of(x));
    if (region >= 0) {
      const Eigen::MatrixXd& noise = env.measurement_regions[region].noise;
      const Eigen::VectorXd z =
          sys.c * x + detail::gaussian_draw(sqrt_noise[region], rng);
      const Eigen::MatrixXd c_p = sys.c * p;
      const Eigen::MatrixXd innovation =
          symmetrize(c_p * sys.c.transpose() + noise);
      const Eigen::MatrixXd gain_t = innovation.ldlt().solve(c_p);
      xhat = xhat_pred + gain_t.transpose() * (z - sys.c * xhat_pred);
      p = symmetrize(p - gain_t.transpose() * c_p);
    } else {
      xhat = xhat_pred;
    }
    result.true_trajectory.push_back(x);
    result.estimate_trajectory.push_back(xhat);
    if (in_collision(x)) {
      result.collided = true;
      result.collision_step = static_cast<int>(k) + 1;
      return result;
    }
  }
  result.reached_goal = env.goal.contains(env.position_of(x));
  return result;
}

/// Aggregated rollout statistics with Wilson intervals. The per-step
/// series counts trials whose first collision happened at that step. The
/// goal rate conditions on non-collided trials — it estimates the
/// terminal-distribution constraint, while collisions are accounted for
/// by the per-step series — and `success_rate` is the unconditional
/// fraction that both survived and ended in the goal.
struct ChanceEstimate {
  std::int64_t trials = 0;
  std::vector<double> per_step_collision_rate;
  std::vector<WilsonInterval> per_step_collision_wilson;
  double collision_rate = 0.0;
  WilsonInterval collision_wilson;
  double goal_rate = 0.0;
  WilsonInterval goal_wilson;
  double success_rate = 0.0;
  WilsonInterval success_wilson;
};

/// Runs `trials` independent rollouts (per-trial streams split from the
/// master generator) and aggregates collision and goal statistics.
/// `wilson_z` sets the interval width (default: two-sided 99%).
inline ChanceEstimate estimate_chance(const MotionPlan& plan,
                                      const LinearSystem& sys,
                                      const Environment& env,
                                      std::int64_t trials, Rng& rng,
                                      double wilson_z = kWilsonZ99) {
  if (trials < 100) {
    throw Error("estimate_chance: needs at least 100 trials");
  }
  const std::uint64_t master = rng.next_u64();
  const std::size_t horizon = plan.steps() + 1;
  std::vector<std::int64_t> first_collision(horizon, 0);
  std::int64_t collided = 0;
  std::int64_t reached = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng trial_rng(derive_seed(master, static_cast<std::uint64_t>(t)));
    const RolloutResult r = rollout(plan, sys, env, trial_rng);
    if (r.collided) {
      ++collided;
      ++first_collision[static_cast<std::size_t>(r.collision_step)];
    }
    if (r.reached_goal) ++reached;
  }
  ChanceEstimate est;
  est.trials = trials;
  est.per_step_collision_rate.resize(horizon);
  est.per_step_collision_wilson.resize(horizon);
  for (std::size_t k = 0; k < horizon; ++k) {
    est.per_step_collision_rate[k] =
        static_cast<double>(first_collision[k]) / static_cast<double>(trials);
    est.per_step_collision_wilson[k] =
        wilson_interval(first_collision[k], trials, wilson_z);
  }
  est.collision_rate = static_cast<double>(collided) / static_cast<double>(trials);
  est.collision_wilson = wilson_interval(collided, trials, wilson_z);
  const std::int64_t survived = trials - collided;
  est.goal_rate =
      survived > 0 ? static_cast<double>(reached) / static_cast<double>(survived)
                   : 0.0;
  est.goal_wilson = wilson_interval(reached, std::max<std::int64_t>(survived, 1),
                                    wilson_z);
  est.success_rate = static_cast<double>(reached) / static_cast<double>(trials);
  est.success_wilson = wilson_interval(reached, trials, wilson_z);
  return est;
}

/// Scripted environment change applied when execution reaches `at_step`.
struct EnvironmentUpdate {
  int at_step = 0;
  Environment environment;
};

struct ScenarioScript {
  Environment initial_env;
  GaussianBelief b_init;
  PlannerAlgo algo = PlannerAlgo::kBeliefSst;
  PlannerParams params;
  double initial_budget_s = 5.0;
  double replan_budget_s = 1.0;
  std::vector<EnvironmentUpdate> updates;  // ascending at_step
};

struct ScenarioLog {
  std::vector<MotionPlan> plans;      // initial plan, then one per replan
  std::vector<int> update_steps;      // executed step index of each update
  std::vector<Eigen::VectorXd> executed_trajectory;
  std::vector<Eigen::VectorXd> estimate_trajectory;
  bool collided = false;
  bool reached_goal = false;
  bool replan_failed = false;
  std::string failure;
};

/// Headless online-replanning run: executes the current plan step by step;
/// each scripted update swaps the environment, rebuilds the belief from
/// the running filter (estimate as mean, filter covariance as sigma, zero
/// dispersion since the estimate is known exactly at that instant), and
/// replans within the per-replan budget. A failed replan halts the
/// scenario with replan_failed set.
inline ScenarioLog replan_scenario(const ScenarioScript& script,
                                   const LinearSystem& sys, Rng& rng) {
  ScenarioLog log;
  PlannerParams initial_params = script.params;
  initial_params.time_budget_s = script.initial_budget_s;
  PlanResult planned;
  try {
    planned = plan(script.initial_env, sys, script.b_init, initial_params,
                   script.algo);
  } catch (const ValidationError& e) {
    log.replan_failed = true;
    log.failure = std::string("initial plan: ") + e.what();
    return log;
  }
  if (!planned.best_plan) {
    log.replan_failed = true;
    log.failure = "initial plan: no solution within budget";
    return log;
  }
  log.plans.push_back(*planned.best_plan);

  Environment current_env = script.initial_env;
  const MotionPlan* current_plan = &log.plans.back();
  std::size_t plan_step = 0;
  int global_step = 0;
  std::size_t next_update = 0;

  // Truth and filter state, as in rollout().
  const GaussianBelief& b0 = script.b_init;
  Eigen::VectorXd xhat =
      b0.mean + detail::gaussian_draw(sqrt_psd(b0.lambda), rng);
  Eigen::VectorXd x = xhat + detail::gaussian_draw(sqrt_psd(b0.sigma), rng);
  Eigen::MatrixXd p = b0.sigma;
  const Eigen::MatrixXd sqrt_q = sqrt_psd(sys.q);
  log.executed_trajectory.push_back(x);
  log.estimate_trajectory.push_back(xhat);

  auto in_collision = [&](const Eigen::VectorXd& state) {
    const Eigen::VectorXd pos = current_env.position_of(state);
    return !current_env.bounds.contains(pos) ||
           current_env.in_any_obstacle(pos);
  };
  if (in_collision(x)) {
    log.collided = true;
    return log;
  }

  while (true) {
    if (next_update < script.updates.size() &&
        global_step == script.updates[next_update].at_step) {
      current_env = script.updates[next_update].environment;
      ++next_update;
      GaussianBelief belief;
      try {
        belief = make_belief(xhat, p,
                             Eigen::MatrixXd::Zero(p.rows(), p.cols()));
      } catch (const Error& e) {
        log.replan_failed = true;
        log.failure = std::string("replan belief: ") + e.what();
        return log;
      }
      PlannerParams replan_params = script.params;
      replan_params.time_budget_s = script.replan_budget_s;
      replan_params.sampler.seed =
          derive_seed(script.params.sampler.seed, 0x5e9, next_update);
      PlanResult replanned;
      try {
        replanned = plan(current_env, sys, belief, replan_params, script.algo);
      } catch (const ValidationError& e) {
        log.replan_failed = true;
        log.failure = std::string("replan: ") + e.what();
        return log;
      }
      if (!replanned.best_plan) {
        log.replan_failed = true;
        log.failure = "replan: no solution within budget";
        return log;
      }
      log.plans.push_back(*replanned.best_plan);
      log.update_steps.push_back(global_step);
      current_plan = &log.plans.back();
      plan_step = 0;
    }
    if (plan_step >= current_plan->steps()) break;

    const Eigen::VectorXd u =
        current_plan->controls[plan_step] -
        sys.k * (xhat - current_plan->nominal_states[plan_step]);
    x = sys.a * x + sys.b * u + detail::gaussian_draw(sqrt_q, rng);
    Eigen::VectorXd xhat_pred = sys.a * xhat + sys.b * u;
    p = symmetrize(sys.a * p * sys.a.transpose() + sys.q);
    const int region =
        current_env.measurement_region_index(current_env.position_of(x));
    if (region >= 0) {
      const Eigen::MatrixXd& noise =
          current_env.measurement_regions[region].noise;
      const Eigen::VectorXd z =
          sys.c * x + detail::gaussian_draw(sqrt_psd(noise), rng);
      const Eigen::MatrixXd c_p = sys.c * p;
      const Eigen::MatrixXd innovation =
          symmetrize(c_p * sys.c.transpose() + noise);
      const Eigen::MatrixXd gain_t = innovation.ldlt().solve(c_p);
      xhat = xhat_pred + gain_t.transpose() * (z - sys.c * xhat_pred);
      p = symmetrize(p - gain_t.transpose() * c_p);
    } else {
      xhat = xhat_pred;
    }
    ++plan_step;
    ++global_step;
    log.executed_trajectory.push_back(x);
    log.estimate_trajectory.push_back(xhat);
    if (in_collision(x)) {
      log.collided = true;
      return log;
    }
  }
  log.reached_goal =
      !log.collided && current_env.goal.contains(current_env.position_of(x));
  return log;
}

}  // namespace bp

#endif  // BELIEFPLAN_EXECUTOR_HPP_
