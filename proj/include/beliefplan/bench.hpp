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

#ifndef BELIEFPLAN_BENCH_HPP_
#define BELIEFPLAN_BENCH_HPP_

#include <atomic>
#include <cmath>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "beliefplan/artifacts.hpp"
#include "beliefplan/config.hpp"
#include "beliefplan/planner.hpp"

namespace bp {

/// Outcome of one benchmark trial.
struct TrialOutcome {
  bool solved = false;
  double first_time_s = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t first_iteration = 0;
  double first_cost = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> cost_at_cutoff;  // NaN where unsolved by the cutoff
  std::uint64_t iterations = 0;
};

/// Aggregated cell of the benchmark table.
struct BenchCell {
  BenchVariant variant;
  int trials = 0;
  int solved = 0;
  int censored = 0;  // trials with no solution within the budget
  double first_iteration_mean = 0.0, first_iteration_se = 0.0;
  double first_cost_mean = 0.0, first_cost_se = 0.0;
  std::vector<double> cutoff_cost_mean, cutoff_cost_se;
  std::vector<int> cutoff_solved;
  double wallclock_first_time_mean = 0.0, wallclock_first_time_se = 0.0;
  std::vector<TrialOutcome> outcomes;
};

struct BenchResult {
  BenchmarkSpec spec;  // echoed for labeling
  std::vector<BenchCell> cells;
};

namespace detail {

/// Last-value-carried-forward cost at a cutoff; NaN when no solution yet.
inline double cost_at_cutoff(const std::vector<CostSample>& history,
                             const Cutoff& cutoff) {
  double cost = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : history) {
    const bool within = cutoff.kind == Cutoff::Kind::kTime
                            ? s.time_s <= cutoff.time_s
                            : s.iteration <= cutoff.iterations;
    if (within) {
      cost = s.cost;
    } else {
      break;
    }
  }
  return cost;
}

struct MeanSe {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
};

inline MeanSe mean_and_se(const std::vector<double>& values) {
  if (values.empty()) return {};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / values.size();
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double variance = ss / (values.size() - 1);
  return {mean, std::sqrt(variance / values.size())};
}

}  // namespace detail

/// Runs one trial of one variant with a deterministically derived seed.
inline TrialOutcome run_bench_trial(const BenchmarkSpec& spec,
                                    std::size_t variant_idx, int trial) {
  const BenchVariant& variant = spec.variants[variant_idx];
  PlannerParams params = spec.base_params;
  params.metric = variant.metric;
  params.sampler.p_bias = variant.p_bias;
  params.sampler.seed = derive_seed(spec.master_seed, variant_idx,
                                    static_cast<std::uint64_t>(trial));
  config_detail::apply_budget(spec.budget, &params);
  const PlanResult result =
      plan(spec.environment, spec.system, spec.b_init, params, variant.algo);
  TrialOutcome outcome;
  outcome.iterations = result.stats.iterations;
  outcome.solved = result.best_plan.has_value();
  if (outcome.solved) {
    outcome.first_time_s = result.first_solution_time_s;
    outcome.first_iteration = result.first_solution_iteration;
    outcome.first_cost = result.cost_history.front().cost;
  }
  outcome.cost_at_cutoff.reserve(spec.cutoffs.size());
  for (const auto& cutoff : spec.cutoffs) {
    outcome.cost_at_cutoff.push_back(
        detail::cost_at_cutoff(result.cost_history, cutoff));
  }
  return outcome;
}

/// Full benchmark: every (variant x trial) cell with per-trial seeds
/// derived from the master seed. Trials may run concurrently; aggregation
/// is by fixed cell order, independent of completion order.
inline BenchResult run_benchmark(const BenchmarkSpec& spec, int threads = 1) {
  BenchResult result;
  result.spec = spec;
  for (std::size_t v = 0; v < spec.variants.size(); ++v) {
    BenchCell cell;
    cell.variant = spec.variants[v];
    cell.trials = spec.trials;
    cell.outcomes.resize(spec.trials);
    if (threads <= 1) {
      for (int t = 0; t < spec.trials; ++t) {
        cell.outcomes[t] = run_bench_trial(spec, v, t);
      }
    } else {
      std::vector<std::future<void>> futures;
      std::atomic<int> next{0};
      for (int w = 0; w < threads; ++w) {
        futures.push_back(std::async(std::launch::async, [&] {
          for (int t = next.fetch_add(1); t < spec.trials;
               t = next.fetch_add(1)) {
            cell.outcomes[t] = run_bench_trial(spec, v, t);
          }
        }));
      }
      for (auto& f : futures) f.get();
    }
    std::vector<double> first_iters, first_costs, first_times;
    std::vector<std::vector<double>> cutoff_costs(spec.cutoffs.size());
    for (const auto& outcome : cell.outcomes) {
      if (!outcome.solved) {
        ++cell.censored;
        continue;
      }
      ++cell.solved;
      first_iters.push_back(static_cast<double>(outcome.first_iteration));
      first_costs.push_back(outcome.first_cost);
      first_times.push_back(outcome.first_time_s);
      for (std::size_t c = 0; c < spec.cutoffs.size(); ++c) {
        if (!std::isnan(outcome.cost_at_cutoff[c])) {
          cutoff_costs[c].push_back(outcome.cost_at_cutoff[c]);
        }
      }
    }
    const auto fi = detail::mean_and_se(first_iters);
    cell.first_iteration_mean = fi.mean;
    cell.first_iteration_se = fi.se;
    const auto fc = detail::mean_and_se(first_costs);
    cell.first_cost_mean = fc.mean;
    cell.first_cost_se = fc.se;
    const auto ft = detail::mean_and_se(first_times);
    cell.wallclock_first_time_mean = ft.mean;
    cell.wallclock_first_time_se = ft.se;
    for (std::size_t c = 0; c < spec.cutoffs.size(); ++c) {
      const auto cc = detail::mean_and_se(cutoff_costs[c]);
      cell.cutoff_cost_mean.push_back(cc.mean);
      cell.cutoff_cost_se.push_back(cc.se);
      cell.cutoff_solved.push_back(static_cast<int>(cutoff_costs[c].size()));
    }
    result.cells.push_back(std::move(cell));
  }
  return result;
}

inline std::string algo_name(PlannerAlgo algo) {
  return algo == PlannerAlgo::kBeliefSst ? "sst" : "rrt";
}

inline std::string metric_name(MetricKind metric) {
  return metric == MetricKind::kWasserstein2 ? "w2" : "l2";
}

/// CSV emission, one row per cell. Wall-clock derived columns carry the
/// `wallclock_` prefix; everything else is deterministic for a fixed
/// master seed and iteration-based budgets/cutoffs.
inline void write_bench_csv(const BenchResult& result, std::ostream& out) {
  out << "environment,system,planner,metric,p_bias,trials,solved,censored,"
         "first_iterations_mean,first_iterations_se,first_cost_mean,"
         "first_cost_se";
  for (const auto& cutoff : result.spec.cutoffs) {
    const std::string label = cutoff.label();
    out << ",cost_at_" << label << "_mean,cost_at_" << label
        << "_se,cost_at_" << label << "_solved";
  }
  out << ",wallclock_first_time_mean,wallclock_first_time_se\n";
  for (const auto& cell : result.cells) {
    out << result.spec.environment_name << "," << result.spec.system_name
        << "," << algo_name(cell.variant.algo) << ","
        << metric_name(cell.variant.metric) << ","
        << detail::format_double(cell.variant.p_bias) << "," << cell.trials
        << "," << cell.solved << "," << cell.censored << ","
        << detail::format_double(cell.first_iteration_mean) << ","
        << detail::format_double(cell.first_iteration_se) << ","
        << detail::format_double(cell.first_cost_mean) << ","
        << detail::format_double(cell.first_cost_se);
    for (std::size_t c = 0; c < result.spec.cutoffs.size(); ++c) {
      out << "," << detail::format_double(cell.cutoff_cost_mean[c]) << ","
          << detail::format_double(cell.cutoff_cost_se[c]) << ","
          << cell.cutoff_solved[c];
    }
    out << "," << detail::format_double(cell.wallclock_first_time_mean) << ","
        << detail::format_double(cell.wallclock_first_time_se) << "\n";
  }
}

inline void write_bench_csv(const BenchResult& result,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_bench_csv(result, out);
}

}  // namespace bp

#endif  // BELIEFPLAN_BENCH_HPP_
