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

#ifndef BELIEFPLAN_CONFIG_HPP_
#define BELIEFPLAN_CONFIG_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "beliefplan/environment.hpp"
#include "beliefplan/errors.hpp"
#include "beliefplan/executor.hpp"
#include "beliefplan/linear_system.hpp"
#include "beliefplan/planner.hpp"
#include "beliefplan/sampling.hpp"

namespace bp {

/// Everything one planning run needs, as loaded from a config file.
struct RunConfig {
  Environment environment;
  LinearSystem system;
  PlannerParams params;
  PlannerAlgo algo = PlannerAlgo::kBeliefSst;
  GaussianBelief b_init;
};

/// Either a wall-clock or an iteration budget (or both).
struct Budget {
  double time_s = std::numeric_limits<double>::infinity();
  std::uint64_t iterations = std::numeric_limits<std::uint64_t>::max();
};

struct Cutoff {
  enum class Kind { kTime, kIterations };
  Kind kind = Kind::kTime;
  double time_s = 0.0;
  std::uint64_t iterations = 0;

  std::string label() const {
    if (kind == Kind::kTime) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%gs", time_s);
      return buf;
    }
    return std::to_string(iterations) + "it";
  }
};

struct BenchVariant {
  PlannerAlgo algo = PlannerAlgo::kBeliefSst;
  MetricKind metric = MetricKind::kWasserstein2;
  double p_bias = 0.0;
};

struct BenchmarkSpec {
  Environment environment;
  LinearSystem system;
  GaussianBelief b_init;
  PlannerParams base_params;
  std::vector<BenchVariant> variants;
  int trials = 100;
  Budget budget;
  std::vector<Cutoff> cutoffs;
  std::uint64_t master_seed = 0;
  std::string environment_name;
  std::string system_name;
};

namespace config_detail {

inline std::string where(const YAML::Node& node) {
  if (node.Mark().is_null()) return "";
  return " (line " + std::to_string(node.Mark().line + 1) + ")";
}

[[noreturn]] inline void fail(const YAML::Node& node, const std::string& msg) {
  throw ParseError(msg + where(node));
}

inline YAML::Node require(const YAML::Node& map, const std::string& key) {
  const YAML::Node child = map[key];
  if (!child.IsDefined()) {
    fail(map, "missing required key '" + key + "'");
  }
  return child;
}

inline double as_double(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(node, "'" + key + "' must be a number");
  }
}

inline std::int64_t as_int(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<std::int64_t>();
  } catch (const YAML::Exception&) {
    fail(node, "'" + key + "' must be an integer");
  }
}

inline Eigen::VectorXd parse_vector(const YAML::Node& node,
                                    const std::string& key) {
  if (!node.IsSequence()) fail(node, "'" + key + "' must be a list");
  Eigen::VectorXd v(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    v(i) = as_double(node[i], key);
  }
  return v;
}

/// A matrix entry is either a scalar s (meaning s * I) or a list of rows.
inline Eigen::MatrixXd parse_matrix(const YAML::Node& node,
                                    const std::string& key,
                                    Eigen::Index square_dim_if_scalar) {
  if (node.IsScalar()) {
    if (square_dim_if_scalar <= 0) {
      fail(node, "'" + key + "' cannot be scalar here");
    }
    return as_double(node, key) *
           Eigen::MatrixXd::Identity(square_dim_if_scalar,
                                     square_dim_if_scalar);
  }
  if (!node.IsSequence() || node.size() == 0 || !node[0].IsSequence()) {
    fail(node, "'" + key + "' must be a scalar or a list of rows");
  }
  const std::size_t rows = node.size();
  const std::size_t cols = node[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!node[i].IsSequence() || node[i].size() != cols) {
      fail(node[i], "'" + key + "' rows have inconsistent lengths");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(i, j) = as_double(node[i][j], key);
    }
  }
  return m;
}

inline AxisBox parse_box(const YAML::Node& node, const std::string& key) {
  if (!node.IsMap()) fail(node, "'" + key + "' must be a {min, max} mapping");
  AxisBox box;
  box.min = parse_vector(require(node, "min"), key + ".min");
  box.max = parse_vector(require(node, "max"), key + ".max");
  return box;
}

inline ConvexPolygon parse_polygon(const YAML::Node& node,
                                   const std::string& key) {
  if (!node.IsSequence()) {
    fail(node, "'" + key + "' must be a list of [x, y] vertices");
  }
  std::vector<Eigen::Vector2d> vertices;
  vertices.reserve(node.size());
  for (const auto& v : node) {
    if (!v.IsSequence() || v.size() != 2) {
      fail(v, "'" + key + "' vertices must be [x, y] pairs");
    }
    vertices.emplace_back(as_double(v[0], key), as_double(v[1], key));
  }
  try {
    return ConvexPolygon::from_vertices(std::move(vertices));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + " in '" + key + "'" +
                          where(node));
  }
}

/// Loads a YAML node that is either an inline mapping or {file: path},
/// resolved relative to the referencing file.
inline YAML::Node resolve_section(const YAML::Node& node,
                                  const std::filesystem::path& base_dir,
                                  std::filesystem::path* section_dir,
                                  std::string* name) {
  if (node.IsMap() && node["file"].IsDefined()) {
    const std::filesystem::path ref = node["file"].as<std::string>();
    const std::filesystem::path path =
        ref.is_absolute() ? ref : base_dir / ref;
    if (!std::filesystem::exists(path)) {
      fail(node, "referenced file not found: " + path.string());
    }
    *section_dir = path.parent_path();
    if (name != nullptr) *name = path.stem().string();
    try {
      return YAML::LoadFile(path.string());
    } catch (const YAML::Exception& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }
  *section_dir = base_dir;
  return node;
}

inline Environment parse_environment(const YAML::Node& node) {
  if (!node.IsMap()) fail(node, "environment must be a mapping");
  Environment env;
  env.bounds = parse_box(require(node, "bounds"), "bounds");
  env.position_dim =
      node["position_dim"].IsDefined()
          ? static_cast<Eigen::Index>(as_int(node["position_dim"], "position_dim"))
          : env.bounds.dim();
  env.delta = as_double(require(node, "delta"), "delta");
  const YAML::Node goal = require(node, "goal");
  if (goal["box"].IsDefined()) {
    env.goal.shape = GoalRegion::Shape::kBox;
    env.goal.box = parse_box(goal["box"], "goal.box");
  } else if (goal["disc"].IsDefined()) {
    env.goal.shape = GoalRegion::Shape::kDisc;
    env.goal.center = parse_vector(require(goal["disc"], "center"), "goal.disc.center");
    env.goal.radius = as_double(require(goal["disc"], "radius"), "goal.disc.radius");
  } else {
    fail(goal, "goal must contain 'box' or 'disc'");
  }
  if (node["obstacles"].IsDefined()) {
    for (const auto& obs : node["obstacles"]) {
      env.obstacles.push_back(parse_polygon(obs, "obstacles"));
    }
  }
  if (node["measurement_regions"].IsDefined()) {
    for (const auto& mr : node["measurement_regions"]) {
      MeasurementRegion region;
      region.region =
          parse_polygon(require(mr, "polygon"), "measurement_regions.polygon");
      const YAML::Node noise = require(mr, "r");
      if (noise.IsScalar()) {
        // Scalar r expands to r * I once the measurement dimension is known.
        region.noise = Eigen::MatrixXd::Constant(1, 1, as_double(noise, "r"));
      } else {
        region.noise = parse_matrix(noise, "r", -1);
      }
      env.measurement_regions.push_back(std::move(region));
    }
  }
  try {
    env.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + where(node));
  }
  return env;
}

/// Expands scalar measurement covariances to p x p and validates PSD-ness.
inline void finalize_measurement_noise(Environment* env, Eigen::Index p) {
  for (auto& mr : env->measurement_regions) {
    if (mr.noise.rows() == 1 && mr.noise.cols() == 1 && p != 1) {
      mr.noise = mr.noise(0, 0) * Eigen::MatrixXd::Identity(p, p);
    }
    if (mr.noise.rows() != p || mr.noise.cols() != p) {
      throw ValidationError("measurement region covariance must be p x p");
    }
    if (min_eigenvalue(mr.noise) < -kPsdTolerance) {
      throw ValidationError("measurement region covariance is not PSD");
    }
  }
}

inline LinearSystem parse_system(const YAML::Node& node) {
  if (!node.IsMap()) fail(node, "system must be a mapping");
  LinearSystem sys;
  sys.a = parse_matrix(require(node, "a"), "a", -1);
  const Eigen::Index n = sys.a.rows();
  sys.b = parse_matrix(require(node, "b"), "b", n);
  sys.c = parse_matrix(require(node, "c"), "c", n);
  sys.q = parse_matrix(require(node, "q"), "q", n);
  const YAML::Node bounds = require(node, "control_bounds");
  sys.u_min = parse_vector(require(bounds, "min"), "control_bounds.min");
  sys.u_max = parse_vector(require(bounds, "max"), "control_bounds.max");
  if (node["duration_steps"].IsDefined()) {
    sys.t_min = static_cast<int>(
        as_int(require(node["duration_steps"], "min"), "duration_steps.min"));
    sys.t_max = static_cast<int>(
        as_int(require(node["duration_steps"], "max"), "duration_steps.max"));
  }
  if (node["aux_state_bounds"].IsDefined()) {
    const YAML::Node aux = node["aux_state_bounds"];
    sys.aux_min = parse_vector(require(aux, "min"), "aux_state_bounds.min");
    sys.aux_max = parse_vector(require(aux, "max"), "aux_state_bounds.max");
  }
  if (node["k"].IsDefined()) {
    sys.k = parse_matrix(node["k"], "k", -1);
  } else {
    // Fixed tracking gain from an identity-weight LQR when not supplied.
    try {
      sys.k = lqr_gain(sys.a, sys.b, Eigen::MatrixXd::Identity(n, n),
                       Eigen::MatrixXd::Identity(sys.b.cols(), sys.b.cols()));
    } catch (const NoConvergenceError& e) {
      throw ValidationError(std::string("system: cannot derive gain: ") +
                            e.what() + where(node));
    }
  }
  try {
    validate_system(sys);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + where(node));
  }
  return sys;
}

inline PlannerAlgo parse_algo(const YAML::Node& node) {
  const std::string value = node.as<std::string>();
  if (value == "sst") return PlannerAlgo::kBeliefSst;
  if (value == "rrt") return PlannerAlgo::kBeliefRrt;
  fail(node, "algorithm must be 'sst' or 'rrt'");
}

inline MetricKind parse_metric(const YAML::Node& node) {
  const std::string value = node.as<std::string>();
  if (value == "w2") return MetricKind::kWasserstein2;
  if (value == "l2") return MetricKind::kEuclideanMean;
  fail(node, "metric must be 'w2' or 'l2'");
}

inline IndexKind parse_index(const YAML::Node& node) {
  const std::string value = node.as<std::string>();
  if (value == "linear") return IndexKind::kLinear;
  if (value == "vptree") return IndexKind::kVpTree;
  fail(node, "nn_index must be 'linear' or 'vptree'");
}

inline Budget parse_budget(const YAML::Node& node) {
  Budget budget;
  if (node["time_s"].IsDefined()) {
    budget.time_s = as_double(node["time_s"], "time_s");
  }
  if (node["iterations"].IsDefined()) {
    budget.iterations =
        static_cast<std::uint64_t>(as_int(node["iterations"], "iterations"));
  }
  if (std::isinf(budget.time_s) &&
      budget.iterations == std::numeric_limits<std::uint64_t>::max()) {
    fail(node, "budget needs 'time_s' or 'iterations'");
  }
  return budget;
}

inline void apply_budget(const Budget& budget, PlannerParams* params) {
  params->time_budget_s = budget.time_s;
  params->iteration_budget = budget.iterations;
}

/// Planner section; lambda_max falls back to the environment-derived caps.
/// `fallback_budget` fills in the budgets when the section has none (the
/// benchmark spec carries them at the top level).
inline PlannerParams parse_planner(const YAML::Node& node,
                                   const Environment& env,
                                   const LinearSystem& sys, PlannerAlgo* algo,
                                   const Budget* fallback_budget = nullptr) {
  PlannerParams params;
  const Eigen::Index n = sys.state_dim();
  if (!node.IsMap()) fail(node, "planner must be a mapping");
  *algo = node["algorithm"].IsDefined() ? parse_algo(node["algorithm"])
                                        : PlannerAlgo::kBeliefSst;
  if (node["metric"].IsDefined()) params.metric = parse_metric(node["metric"]);
  if (node["nn_index"].IsDefined()) {
    params.nn_index = parse_index(node["nn_index"]);
  }
  if (node["seed"].IsDefined()) {
    params.sampler.seed =
        static_cast<std::uint64_t>(as_int(node["seed"], "seed"));
  }
  if (node["p_bias"].IsDefined()) {
    params.sampler.p_bias = as_double(node["p_bias"], "p_bias");
  }
  if (node["p_goal"].IsDefined()) {
    params.sampler.p_goal = as_double(node["p_goal"], "p_goal");
  }
  if (node["lambda_max"].IsDefined()) {
    const YAML::Node lm = node["lambda_max"];
    params.sampler.lambda_max =
        lm.IsScalar() ? Eigen::VectorXd::Constant(n, as_double(lm, "lambda_max"))
                      : parse_vector(lm, "lambda_max").eval();
  } else {
    try {
      params.sampler.lambda_max = compute_lambda_max(env, n);
    } catch (const UnboundedError& e) {
      throw ValidationError(
          std::string("planner: lambda_max must be supplied explicitly: ") +
          e.what());
    }
  }
  if (node["lambda_low"].IsDefined()) {
    const YAML::Node ll = node["lambda_low"];
    params.sampler.lambda_low =
        ll.IsScalar() ? Eigen::VectorXd::Constant(n, as_double(ll, "lambda_low"))
                      : parse_vector(ll, "lambda_low").eval();
  } else {
    params.sampler.lambda_low = 0.05 * params.sampler.lambda_max;
  }
  if (node["sst_delta_bn"].IsDefined()) {
    params.sst_delta_bn = as_double(node["sst_delta_bn"], "sst_delta_bn");
  }
  if (node["sst_delta_s"].IsDefined()) {
    params.sst_delta_s = as_double(node["sst_delta_s"], "sst_delta_s");
  }
  if (node["extend_candidates"].IsDefined()) {
    params.extend_candidates = static_cast<int>(
        as_int(node["extend_candidates"], "extend_candidates"));
  }
  if (node["time_budget_s"].IsDefined()) {
    params.time_budget_s = as_double(node["time_budget_s"], "time_budget_s");
  }
  if (node["iteration_budget"].IsDefined()) {
    params.iteration_budget = static_cast<std::uint64_t>(
        as_int(node["iteration_budget"], "iteration_budget"));
  }
  if (fallback_budget != nullptr && std::isinf(params.time_budget_s) &&
      params.iteration_budget == std::numeric_limits<std::uint64_t>::max()) {
    apply_budget(*fallback_budget, &params);
  }
  try {
    validate_planner_params(params, n);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + where(node));
  }
  return params;
}

inline GaussianBelief parse_initial_belief(const YAML::Node& node,
                                           Eigen::Index n) {
  if (!node.IsMap()) fail(node, "initial_belief must be a mapping");
  const Eigen::VectorXd mean = parse_vector(require(node, "mean"), "mean");
  if (mean.size() != n) {
    fail(node, "initial_belief.mean must have the state dimension");
  }
  const Eigen::MatrixXd sigma =
      parse_matrix(require(node, "sigma"), "sigma", n);
  const Eigen::MatrixXd lambda =
      node["lambda"].IsDefined() ? parse_matrix(node["lambda"], "lambda", n)
                                 : Eigen::MatrixXd::Zero(n, n).eval();
  try {
    return make_belief(mean, sigma, lambda);
  } catch (const Error& e) {
    throw ValidationError(std::string("initial_belief: ") + e.what() +
                          where(node));
  }
}

}  // namespace config_detail

/// Loads a full run configuration (environment, system, planner, initial
/// belief). Sections may be inline or `{file: path}` references resolved
/// relative to the referencing file.
inline RunConfig load_config(const std::string& path) {
  namespace cd = config_detail;
  if (!std::filesystem::exists(path)) {
    throw IoError("config file not found: " + path);
  }
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  const std::filesystem::path base_dir =
      std::filesystem::path(path).parent_path();
  RunConfig config;
  std::filesystem::path section_dir;
  const YAML::Node env_node = cd::resolve_section(
      cd::require(root, "environment"), base_dir, &section_dir, nullptr);
  config.environment = cd::parse_environment(env_node);
  const YAML::Node sys_node = cd::resolve_section(
      cd::require(root, "system"), base_dir, &section_dir, nullptr);
  config.system = cd::parse_system(sys_node);
  cd::finalize_measurement_noise(&config.environment,
                                 config.system.measurement_dim());
  config.params = cd::parse_planner(cd::require(root, "planner"),
                                    config.environment, config.system,
                                    &config.algo);
  config.b_init = cd::parse_initial_belief(cd::require(root, "initial_belief"),
                                           config.system.state_dim());
  return config;
}

/// Loads a benchmark specification referencing environment/system files.
inline BenchmarkSpec load_bench_spec(const std::string& path) {
  namespace cd = config_detail;
  if (!std::filesystem::exists(path)) {
    throw IoError("bench spec not found: " + path);
  }
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  const std::filesystem::path base_dir =
      std::filesystem::path(path).parent_path();
  BenchmarkSpec spec;
  std::filesystem::path section_dir;
  const YAML::Node env_node =
      cd::resolve_section(cd::require(root, "environment"), base_dir,
                          &section_dir, &spec.environment_name);
  spec.environment = cd::parse_environment(env_node);
  const YAML::Node sys_node =
      cd::resolve_section(cd::require(root, "system"), base_dir, &section_dir,
                          &spec.system_name);
  spec.system = cd::parse_system(sys_node);
  cd::finalize_measurement_noise(&spec.environment,
                                 spec.system.measurement_dim());
  spec.budget = cd::parse_budget(cd::require(root, "budget"));
  PlannerAlgo base_algo;
  spec.base_params = cd::parse_planner(cd::require(root, "planner"),
                                       spec.environment, spec.system,
                                       &base_algo, &spec.budget);
  spec.b_init = cd::parse_initial_belief(cd::require(root, "initial_belief"),
                                         spec.system.state_dim());
  const YAML::Node variants = cd::require(root, "variants");
  if (!variants.IsSequence() || variants.size() == 0) {
    cd::fail(variants, "variants must be a non-empty list");
  }
  for (const auto& vn : variants) {
    BenchVariant v;
    v.algo = cd::parse_algo(cd::require(vn, "algorithm"));
    if (vn["metric"].IsDefined()) v.metric = cd::parse_metric(vn["metric"]);
    if (vn["p_bias"].IsDefined()) {
      v.p_bias = cd::as_double(vn["p_bias"], "p_bias");
    }
    spec.variants.push_back(v);
  }
  if (root["trials"].IsDefined()) {
    spec.trials = static_cast<int>(cd::as_int(root["trials"], "trials"));
  }
  if (spec.trials < 1) cd::fail(root, "trials must be >= 1");
  if (root["cutoffs"].IsDefined()) {
    double last = -1.0;
    for (const auto& cn : root["cutoffs"]) {
      Cutoff cutoff;
      if (cn["time_s"].IsDefined()) {
        cutoff.kind = Cutoff::Kind::kTime;
        cutoff.time_s = cd::as_double(cn["time_s"], "cutoffs.time_s");
        if (cutoff.time_s <= last) cd::fail(cn, "cutoffs must be ascending");
        last = cutoff.time_s;
      } else if (cn["iterations"].IsDefined()) {
        cutoff.kind = Cutoff::Kind::kIterations;
        cutoff.iterations = static_cast<std::uint64_t>(
            cd::as_int(cn["iterations"], "cutoffs.iterations"));
        if (static_cast<double>(cutoff.iterations) <= last) {
          cd::fail(cn, "cutoffs must be ascending");
        }
        last = static_cast<double>(cutoff.iterations);
      } else {
        cd::fail(cn, "cutoff needs 'time_s' or 'iterations'");
      }
      spec.cutoffs.push_back(cutoff);
    }
  }
  if (root["master_seed"].IsDefined()) {
    spec.master_seed = static_cast<std::uint64_t>(
        cd::as_int(root["master_seed"], "master_seed"));
  }
  return spec;
}

/// Scenario script: a base run config plus timed environment updates.
struct ScenarioConfig {
  RunConfig run;
  double initial_budget_s = 5.0;
  double replan_budget_s = 1.0;
  std::vector<std::pair<int, Environment>> updates;
};

inline ScenarioConfig load_scenario(const std::string& path) {
  namespace cd = config_detail;
  if (!std::filesystem::exists(path)) {
    throw IoError("scenario file not found: " + path);
  }
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  const std::filesystem::path base_dir =
      std::filesystem::path(path).parent_path();
  ScenarioConfig scenario;
  const YAML::Node run_node = cd::require(root, "run");
  if (run_node.IsScalar()) {
    const std::filesystem::path ref = run_node.as<std::string>();
    scenario.run =
        load_config((ref.is_absolute() ? ref : base_dir / ref).string());
  } else {
    cd::fail(run_node, "run must be a path to a run config");
  }
  if (root["initial_budget_s"].IsDefined()) {
    scenario.initial_budget_s =
        cd::as_double(root["initial_budget_s"], "initial_budget_s");
  }
  if (root["replan_budget_s"].IsDefined()) {
    scenario.replan_budget_s =
        cd::as_double(root["replan_budget_s"], "replan_budget_s");
  }
  int last_step = -1;
  for (const auto& un : root["updates"]) {
    const int at_step =
        static_cast<int>(cd::as_int(cd::require(un, "at_step"), "at_step"));
    if (at_step <= last_step) cd::fail(un, "updates must be ascending");
    last_step = at_step;
    std::filesystem::path section_dir;
    const YAML::Node env_node = cd::resolve_section(
        cd::require(un, "environment"), base_dir, &section_dir, nullptr);
    Environment env = cd::parse_environment(env_node);
    cd::finalize_measurement_noise(&env, scenario.run.system.measurement_dim());
    scenario.updates.emplace_back(at_step, std::move(env));
  }
  return scenario;
}

}  // namespace bp

#endif  // BELIEFPLAN_CONFIG_HPP_
