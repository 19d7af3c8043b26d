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

#ifndef BELIEFPLAN_ARTIFACTS_HPP_
#define BELIEFPLAN_ARTIFACTS_HPP_

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beliefplan/environment.hpp"
#include "beliefplan/errors.hpp"
#include "beliefplan/propagation.hpp"

namespace bp {

namespace detail {

/// Shortest round-tripping decimal representation of a double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Writes a plan as CSV: per step the nominal state, the control applied
/// at that step (blank on the final row), the belief mean, and the upper
/// triangle of the total covariance. Values round-trip exactly.
inline void write_plan_csv(const MotionPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  const Eigen::Index n = plan.nominal_states.front().size();
  const Eigen::Index m =
      plan.controls.empty() ? 0 : plan.controls.front().size();
  out << "step";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << i;
  for (Eigen::Index i = 0; i < m; ++i) out << ",u_" << i;
  for (Eigen::Index i = 0; i < n; ++i) out << ",mean_" << i;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) out << ",cov_" << i << "_" << j;
  }
  out << "\n";
  for (std::size_t k = 0; k < plan.nominal_states.size(); ++k) {
    out << k;
    for (Eigen::Index i = 0; i < n; ++i) {
      out << "," << detail::format_double(plan.nominal_states[k](i));
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      if (k < plan.controls.size()) {
        out << "," << detail::format_double(plan.controls[k](i));
      } else {
        out << ",";
      }
    }
    const GaussianBelief& b = plan.beliefs[k];
    for (Eigen::Index i = 0; i < n; ++i) {
      out << "," << detail::format_double(b.mean(i));
    }
    const Eigen::MatrixXd total = b.sigma + b.lambda;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        out << "," << detail::format_double(total(i, j));
      }
    }
    out << "\n";
  }
}

/// Raw contents of a plan CSV. The covariance at step 0 is the initial
/// sigma (plans always start with zero dispersion), so a file can be
/// re-propagated into a full MotionPlan.
struct PlanFile {
  std::vector<Eigen::VectorXd> controls;
  std::vector<Eigen::VectorXd> nominal_states;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> total_covariances;
};

inline PlanFile read_plan_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string header;
  if (!std::getline(in, header)) throw ParseError(path + ": empty file");
  // Infer dimensions from the header layout.
  Eigen::Index n = 0, m = 0;
  {
    std::stringstream ss(header);
    std::string col;
    while (std::getline(ss, col, ',')) {
      if (col.rfind("x_", 0) == 0) ++n;
      if (col.rfind("u_", 0) == 0) ++m;
    }
  }
  if (n == 0) throw ParseError(path + ": no state columns in header");
  PlanFile file;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    // A trailing empty control cell is dropped by getline; restore it.
    const std::size_t expected = 1 + n + m + n + n * (n + 1) / 2;
    while (cells.size() < expected) cells.push_back("");
    auto value = [&](std::size_t idx) {
      try {
        return std::stod(cells.at(idx));
      } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": bad numeric cell");
      }
    };
    std::size_t at = 1;
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = value(at++);
    bool has_control = m > 0 && !cells.at(at).empty();
    Eigen::VectorXd u(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (has_control) {
        u(i) = value(at);
      }
      ++at;
    }
    Eigen::VectorXd mean(n);
    for (Eigen::Index i = 0; i < n; ++i) mean(i) = value(at++);
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) {
        cov(i, j) = value(at++);
        cov(j, i) = cov(i, j);
      }
    }
    file.nominal_states.push_back(std::move(x));
    if (has_control) file.controls.push_back(std::move(u));
    file.means.push_back(std::move(mean));
    file.total_covariances.push_back(std::move(cov));
  }
  if (file.nominal_states.size() != file.controls.size() + 1) {
    throw ParseError(path + ": expected one more state row than controls");
  }
  return file;
}

/// Re-propagates a plan file into a full MotionPlan using the stored
/// initial covariance (zero dispersion) and control sequence.
inline MotionPlan replay_plan(const PlanFile& file, const LinearSystem& sys,
                              const Environment& env) {
  const Eigen::Index n = file.means.front().size();
  const GaussianBelief b0 =
      make_belief(file.means.front(), file.total_covariances.front(),
                  Eigen::MatrixXd::Zero(n, n));
  return make_plan(b0, file.controls, sys, env);
}

namespace detail {

inline void svg_polygon(std::ostream& out, const ConvexPolygon& poly,
                        const std::string& style) {
  out << "  <polygon points=\"";
  for (const auto& v : poly.vertices()) {
    out << v.x() << "," << v.y() << " ";
  }
  out << "\" " << style << "/>\n";
}

inline void svg_covariance_ellipse(std::ostream& out,
                                   const Eigen::VectorXd& mean,
                                   const Eigen::MatrixXd& total,
                                   const std::string& style) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es;
  es.computeDirect(total.topLeftCorner<2, 2>());
  const double rx = 2.0 * std::sqrt(std::max(0.0, es.eigenvalues()(1)));
  const double ry = 2.0 * std::sqrt(std::max(0.0, es.eigenvalues()(0)));
  const Eigen::Vector2d axis = es.eigenvectors().col(1);
  const double angle_deg = std::atan2(axis.y(), axis.x()) * 180.0 / M_PI;
  out << "  <ellipse cx=\"0\" cy=\"0\" rx=\"" << rx << "\" ry=\"" << ry
      << "\" transform=\"translate(" << mean(0) << " " << mean(1)
      << ") rotate(" << angle_deg << ")\" " << style << "/>\n";
}

}  // namespace detail

/// Renders the environment and a plan (possibly zero-length) as SVG with
/// 2-sigma covariance ellipses along the nominal path.
inline void write_plan_svg(const MotionPlan& plan, const Environment& env,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  const double x0 = env.bounds.min(0);
  const double y0 = env.bounds.min(1);
  const double w = env.bounds.max(0) - x0;
  const double h = env.bounds.max(1) - y0;
  const double margin = 0.02 * std::max(w, h);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
         "height=\"800\" viewBox=\""
      << x0 - margin << " " << y0 - margin << " " << w + 2 * margin << " "
      << h + 2 * margin << "\">\n";
  // Flip the y axis so the world is drawn y-up.
  out << "<g transform=\"translate(0 " << (2 * y0 + h) << ") scale(1 -1)\">\n";
  out << "  <rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << w
      << "\" height=\"" << h
      << "\" fill=\"#b8b8b8\" stroke=\"#333\" stroke-width=\""
      << 0.004 * std::max(w, h) << "\"/>\n";
  for (const auto& mr : env.measurement_regions) {
    detail::svg_polygon(out, mr.region, "fill=\"#ffffff\"");
  }
  for (const auto& obs : env.obstacles) {
    detail::svg_polygon(out, obs, "fill=\"#c0392b\"");
  }
  if (env.goal.shape == GoalRegion::Shape::kBox) {
    out << "  <rect x=\"" << env.goal.box.min(0) << "\" y=\""
        << env.goal.box.min(1) << "\" width=\""
        << env.goal.box.max(0) - env.goal.box.min(0) << "\" height=\""
        << env.goal.box.max(1) - env.goal.box.min(1)
        << "\" fill=\"#27ae60\" fill-opacity=\"0.8\"/>\n";
  } else {
    out << "  <circle cx=\"" << env.goal.center(0) << "\" cy=\""
        << env.goal.center(1) << "\" r=\"" << env.goal.radius
        << "\" fill=\"#27ae60\" fill-opacity=\"0.8\"/>\n";
  }
  const std::string ellipse_style =
      "fill=\"none\" stroke=\"#2980d9\" stroke-width=\"" +
      detail::format_double(0.0025 * std::max(w, h)) + "\"";
  for (std::size_t k = 0; k < plan.beliefs.size(); ++k) {
    const GaussianBelief& b = plan.beliefs[k];
    detail::svg_covariance_ellipse(
        out, b.mean, b.sigma + b.lambda,
        k == 0 ? "fill=\"#2980d9\" fill-opacity=\"0.5\"" : ellipse_style);
  }
  if (plan.nominal_states.size() > 1) {
    out << "  <polyline points=\"";
    for (const auto& x : plan.nominal_states) {
      out << x(0) << "," << x(1) << " ";
    }
    out << "\" fill=\"none\" stroke=\"#1a5276\" stroke-width=\""
        << 0.004 * std::max(w, h) << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
}

}  // namespace bp

#endif  // BELIEFPLAN_ARTIFACTS_HPP_
