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

#ifndef BELIEFPLAN_PLANNER_HPP_
#define BELIEFPLAN_PLANNER_HPP_

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "beliefplan/environment.hpp"
#include "beliefplan/errors.hpp"
#include "beliefplan/gaussian.hpp"
#include "beliefplan/linear_system.hpp"
#include "beliefplan/metric.hpp"
#include "beliefplan/nn_index.hpp"
#include "beliefplan/propagation.hpp"
#include "beliefplan/rng.hpp"
#include "beliefplan/sampling.hpp"
#include "beliefplan/validity.hpp"

namespace bp {

enum class PlannerAlgo { kBeliefRrt, kBeliefSst };

struct PlannerParams {
  MetricKind metric = MetricKind::kWasserstein2;
  SamplerParams sampler;
  // Selection and witness radii, in raw metric units (squared-Wasserstein
  // scale for the W2 metric).
  double sst_delta_bn = 15.0;
  double sst_delta_s = 5.0;
  int extend_candidates = 3;
  double time_budget_s = std::numeric_limits<double>::infinity();
  std::uint64_t iteration_budget =
      std::numeric_limits<std::uint64_t>::max();
  IndexKind nn_index = IndexKind::kLinear;
  bool stop_at_first = false;  // return at the first solution found
};

inline void validate_planner_params(const PlannerParams& p, Eigen::Index n) {
  validate_sampler_params(p.sampler, n);
  if (!(p.sst_delta_bn > 0.0) || !(p.sst_delta_s > 0.0)) {
    throw ValidationError("planner: SST radii must be positive");
  }
  if (p.extend_candidates < 1) {
    throw ValidationError("planner: extend_candidates must be >= 1");
  }
  if (std::isinf(p.time_budget_s) &&
      p.iteration_budget == std::numeric_limits<std::uint64_t>::max()) {
    throw ValidationError("planner: no finite budget configured");
  }
}

/// Tree node: belief plus the edge that produced it. The edge holds one
/// control applied for `edge_steps` steps.
struct TreeNode {
  GaussianBelief belief;
  int parent = -1;
  Eigen::VectorXd edge_control;
  int edge_steps = 0;
  double cost = 0.0;
  bool active = true;
  // Internal bookkeeping.
  int children = 0;
  bool removed = false;

  std::vector<Eigen::VectorXd> edge_controls() const {
    return std::vector<Eigen::VectorXd>(edge_steps, edge_control);
  }
};

struct CostSample {
  double time_s = 0.0;
  std::uint64_t iteration = 0;
  double cost = 0.0;
};

struct TreeStats {
  std::uint64_t iterations = 0;
  std::uint64_t extend_attempts = 0;
  std::uint64_t extend_successes = 0;
  int nodes_added = 0;
  int nodes_active = 0;
  int witnesses = 0;
};

struct PlanResult {
  std::optional<MotionPlan> best_plan;
  double first_solution_time_s = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t first_solution_iteration = 0;
  std::vector<CostSample> cost_history;  // appended on improvement only
  TreeStats stats;
};

/// Tree-based belief planner: the generic sample/select/extend/prune loop
/// with RRT (nearest) or SST (best-near + witness pruning) selection.
class Planner {
 public:
  Planner(const Environment& env, const LinearSystem& sys,
          const PlannerParams& params, PlannerAlgo algo)
      : env_(env),
        sys_(sys),
        params_(params),
        algo_(algo),
        metric_(params.metric),
        space_(make_sample_space(env, sys)),
        rng_(params.sampler.seed),
        node_index_(params.metric, sys.state_dim(), params.nn_index),
        witness_index_(params.metric, sys.state_dim(), params.nn_index) {
    validate_planner_params(params, sys.state_dim());
  }

  /// Anytime search. Returns the best goal-satisfying plan found within
  /// the budgets; an empty best_plan (with stats) when none was found.
  PlanResult run(const GaussianBelief& b_init) {
    if (!is_valid(b_init, env_)) {
      throw ValidationError("plan: initial belief violates the chance constraint");
    }
    start_ = Clock::now();
    result_ = PlanResult{};
    nodes_.clear();
    witnesses_.clear();
    best_cost_ = std::numeric_limits<double>::infinity();

    const int root = add_node(-1, b_init, Eigen::VectorXd(), 0, 0.0);
    if (algo_ == PlannerAlgo::kBeliefSst) attach_witness(root);
    if (goal_satisfied(b_init, env_)) {
      // Zero-length plan; nothing can beat cost 0.
      MotionPlan plan;
      plan.nominal_states.push_back(b_init.mean);
      plan.beliefs.push_back(b_init);
      plan.cost = 0.0;
      record_solution(std::move(plan), 0.0);
      finish_stats();
      return std::move(result_);
    }

    while (result_.stats.iterations < params_.iteration_budget &&
           elapsed_s() < params_.time_budget_s) {
      ++result_.stats.iterations;
      const GaussianBelief sample =
          sample_belief(space_, params_.sampler, rng_);
      const int selected = algo_ == PlannerAlgo::kBeliefRrt
                               ? rrt_select(sample)
                               : sst_select(sample);
      auto extension = extend(selected, sample);
      if (!extension) continue;
      const int id = algo_ == PlannerAlgo::kBeliefRrt
                         ? insert_rrt(selected, *extension)
                         : insert_sst(selected, *extension);
      if (id < 0) continue;
      if (goal_satisfied(nodes_[id].belief, env_) &&
          nodes_[id].cost < best_cost_) {
        record_solution(extract_plan(id), nodes_[id].cost);
        if (params_.stop_at_first) break;
      }
    }
    finish_stats();
    return std::move(result_);
  }

  /// Active node closest to the sample; ties to the lowest id.
  int rrt_select(const GaussianBelief& sample) const {
    return node_index_.nearest(sample);
  }

  /// Cheapest active node within delta_bn of the sample; nearest active
  /// node when none is in range. Ties to the lowest id.
  int sst_select(const GaussianBelief& sample) const {
    const std::vector<int> near =
        node_index_.within(sample, params_.sst_delta_bn);
    int best = -1;
    for (int id : near) {
      if (best < 0 || nodes_[id].cost < nodes_[best].cost) best = id;
    }
    if (best >= 0) return best;
    return node_index_.nearest(sample);
  }

  struct Extension {
    GaussianBelief belief;
    Eigen::VectorXd control;
    int steps = 0;
    double edge_length = 0.0;
  };

  /// Draws `extend_candidates` (control, duration) pairs from the selected
  /// node, discards candidates whose per-step beliefs violate the chance
  /// constraint, and keeps the survivor closest to the sample. Empty when
  /// all candidates fail.
  std::optional<Extension> extend(int node_id, const GaussianBelief& sample) {
    const TreeNode& node = nodes_[node_id];
    std::optional<Extension> best;
    double best_distance = std::numeric_limits<double>::infinity();
    for (int c = 0; c < params_.extend_candidates; ++c) {
      ++result_.stats.extend_attempts;
      Eigen::VectorXd u(sys_.control_dim());
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        u(i) = rng_.uniform(sys_.u_min(i), sys_.u_max(i));
      }
      const int steps =
          static_cast<int>(rng_.uniform_int(sys_.t_min, sys_.t_max));
      Eigen::VectorXd x = node.belief.mean;
      GaussianBelief b = node.belief;
      double length = 0.0;
      bool ok = true;
      for (int k = 0; k < steps; ++k) {
        const Eigen::VectorXd x_next = nominal_step(x, u, sys_);
        b = belief_step(b, x_next, sys_, env_);
        if (!is_valid(b, env_)) {
          ok = false;
          break;
        }
        length += (x_next.head(env_.position_dim) - x.head(env_.position_dim))
                      .norm();
        x = x_next;
      }
      if (!ok) continue;
      ++result_.stats.extend_successes;
      const double d = metric_(b, sample);
      if (d < best_distance) {
        best_distance = d;
        best = Extension{std::move(b), std::move(u), steps, length};
      }
    }
    return best;
  }

  int insert_rrt(int parent, const Extension& ext) {
    return add_node(parent, ext.belief, ext.control, ext.steps,
                    ext.edge_length);
  }

  /// Witness-gated insertion: the new node must beat the cost of the
  /// representative of its witness region, else it is discarded. A beaten
  /// representative is deactivated and inactive leaf chains are deleted.
  int insert_sst(int parent, const Extension& ext) {
    const double cost = nodes_[parent].cost + ext.edge_length;
    int witness = -1;
    const int near = witness_index_.nearest(ext.belief);
    if (near >= 0 &&
        metric_(witnesses_[near].belief, ext.belief) <= params_.sst_delta_s) {
      witness = near;
    }
    if (witness >= 0) {
      const int rep = witnesses_[witness].representative;
      if (rep >= 0 && nodes_[rep].cost <= cost) return -1;
      const int id = add_node(parent, ext.belief, ext.control, ext.steps,
                              ext.edge_length);
      witnesses_[witness].representative = id;
      if (rep >= 0) deactivate_and_prune(rep);
      return id;
    }
    const int id =
        add_node(parent, ext.belief, ext.control, ext.steps, ext.edge_length);
    attach_witness(id);
    return id;
  }

  /// Concatenates edge controls along the root path and re-propagates;
  /// the recomputed terminal belief must match the stored one.
  MotionPlan extract_plan(int node_id) const {
    std::vector<int> chain;
    for (int cur = node_id; cur >= 0; cur = nodes_[cur].parent) {
      chain.push_back(cur);
    }
    std::vector<Eigen::VectorXd> controls;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      if (nodes_[*it].parent < 0) continue;
      for (int k = 0; k < nodes_[*it].edge_steps; ++k) {
        controls.push_back(nodes_[*it].edge_control);
      }
    }
    MotionPlan plan =
        make_plan(nodes_[chain.back()].belief, std::move(controls), sys_, env_);
    const GaussianBelief& stored = nodes_[node_id].belief;
    const GaussianBelief& recomputed = plan.beliefs.back();
    const double mismatch = std::max(
        {(stored.mean - recomputed.mean).cwiseAbs().maxCoeff(),
         (stored.sigma - recomputed.sigma).cwiseAbs().maxCoeff(),
         (stored.lambda - recomputed.lambda).cwiseAbs().maxCoeff()});
    if (mismatch > 1e-9) {
      throw InconsistentTreeError(
          "extract_plan: re-propagated terminal belief deviates by " +
          std::to_string(mismatch));
    }
    return plan;
  }

  struct Witness {
    GaussianBelief belief;
    int representative = -1;
  };

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<Witness>& witnesses() const { return witnesses_; }
  const Environment& environment() const { return env_; }
  const LinearSystem& system() const { return sys_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }

  /// Raw tree insertion, bypassing the search loop; for building hand-laid
  /// trees in verification code.
  int add_node_for_test(int parent, const GaussianBelief& belief,
                        const Eigen::VectorXd& control, int steps,
                        double edge_length) {
    return add_node(parent, belief, control, steps, edge_length);
  }

 private:
  using Clock = std::chrono::steady_clock;

  double elapsed_s() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  int add_node(int parent, const GaussianBelief& belief,
               const Eigen::VectorXd& control, int steps, double edge_length) {
    TreeNode node;
    node.belief = belief;
    node.parent = parent;
    node.edge_control = control;
    node.edge_steps = steps;
    node.cost = parent >= 0 ? nodes_[parent].cost + edge_length : 0.0;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(node));
    if (parent >= 0) ++nodes_[parent].children;
    node_index_.add(id, nodes_[id].belief);
    ++result_.stats.nodes_added;
    return id;
  }

  void attach_witness(int node_id) {
    const int wid = static_cast<int>(witnesses_.size());
    witnesses_.push_back({nodes_[node_id].belief, node_id});
    witness_index_.add(wid, witnesses_[wid].belief);
  }

  void deactivate_and_prune(int node_id) {
    nodes_[node_id].active = false;
    node_index_.remove(node_id);
    int cur = node_id;
    while (cur >= 0 && !nodes_[cur].active && nodes_[cur].children == 0 &&
           nodes_[cur].parent >= 0 && !nodes_[cur].removed) {
      nodes_[cur].removed = true;
      const int parent = nodes_[cur].parent;
      --nodes_[parent].children;
      cur = parent;
    }
  }

  // `node_cost` (the tree-accumulated cost) gates improvements and feeds
  // the history so the reported series is strictly decreasing even when
  // the re-propagated plan cost differs in the last ulp.
  void record_solution(MotionPlan plan, double node_cost) {
    best_cost_ = node_cost;
    const double t = elapsed_s();
    if (!result_.best_plan) {
      result_.first_solution_time_s = t;
      result_.first_solution_iteration = result_.stats.iterations;
    }
    result_.cost_history.push_back({t, result_.stats.iterations, node_cost});
    result_.best_plan = std::move(plan);
  }

  void finish_stats() {
    int active = 0;
    for (const auto& node : nodes_) {
      if (node.active && !node.removed) ++active;
    }
    result_.stats.nodes_active = active;
    result_.stats.witnesses = static_cast<int>(witnesses_.size());
  }

  const Environment& env_;
  const LinearSystem& sys_;
  PlannerParams params_;
  PlannerAlgo algo_;
  Metric metric_;
  SampleSpace space_;
  Rng rng_;
  NeighborIndex node_index_;
  NeighborIndex witness_index_;
  std::vector<TreeNode> nodes_;
  std::vector<Witness> witnesses_;
  PlanResult result_;
  double best_cost_ = std::numeric_limits<double>::infinity();
  Clock::time_point start_;
};

/// One-shot convenience wrapper around Planner::run.
inline PlanResult plan(const Environment& env, const LinearSystem& sys,
                       const GaussianBelief& b_init,
                       const PlannerParams& params, PlannerAlgo algo) {
  Planner planner(env, sys, params, algo);
  return planner.run(b_init);
}

}  // namespace bp

#endif  // BELIEFPLAN_PLANNER_HPP_
