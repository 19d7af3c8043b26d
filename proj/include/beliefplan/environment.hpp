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

#ifndef BELIEFPLAN_ENVIRONMENT_HPP_
#define BELIEFPLAN_ENVIRONMENT_HPP_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "beliefplan/errors.hpp"
#include "beliefplan/geometry.hpp"

namespace bp {

/// Workspace area that provides measurements with the given noise
/// covariance; outside every region no measurement is available.
struct MeasurementRegion {
  ConvexPolygon region;
  Eigen::MatrixXd noise;  // p x p PSD measurement covariance R
};

/// Planning world: workspace bounds, convex obstacles, goal, measurement
/// regions, and the per-step chance bound.
struct Environment {
  AxisBox bounds;  // position-space box
  Eigen::Index position_dim = 2;
  std::vector<ConvexPolygon> obstacles;
  GoalRegion goal;
  std::vector<MeasurementRegion> measurement_regions;
  double delta = 0.05;  // max allowed collision probability per step

  Eigen::VectorXd position_of(const Eigen::VectorXd& state) const {
    return state.head(position_dim);
  }

  /// Measurement covariance available at a position, or nullptr when the
  /// position lies in no region. First listed region wins on overlap.
  /// Polygons live on the first two position coordinates.
  const Eigen::MatrixXd* measurement_at(const Eigen::VectorXd& position) const {
    const int idx = measurement_region_index(position);
    return idx >= 0 ? &measurement_regions[idx].noise : nullptr;
  }

  int measurement_region_index(const Eigen::VectorXd& position) const {
    if (position.size() < 2) return -1;
    const Eigen::Vector2d p(position(0), position(1));
    for (std::size_t i = 0; i < measurement_regions.size(); ++i) {
      if (measurement_regions[i].region.contains(p)) {
        return static_cast<int>(i);
      }
    }
    return -1;
  }

  bool in_any_obstacle(const Eigen::VectorXd& position) const {
    if (position.size() < 2) return false;
    const Eigen::Vector2d p(position(0), position(1));
    for (const auto& obs : obstacles) {
      if (obs.contains(p)) return true;
    }
    return false;
  }

  void validate() const {
    bounds.validate("workspace bounds");
    if (position_dim != bounds.dim()) {
      throw ValidationError("bounds dimension != position dimension");
    }
    if (position_dim < 1 || position_dim > 3) {
      throw ValidationError("position dimension must be 1, 2, or 3");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
      throw ValidationError("delta must lie in (0, 1)");
    }
    if (position_dim < 2 &&
        (!obstacles.empty() || !measurement_regions.empty())) {
      throw ValidationError(
          "polygonal obstacles/regions require at least 2 position dims");
    }
    goal.validate(position_dim);
    // The goal must be reachable inside the workspace at all.
    if (!bounds.contains(goal.centroid())) {
      bool intersects = false;
      if (goal.shape == GoalRegion::Shape::kBox) {
        Eigen::VectorXd clamped = goal.box.center();
        for (Eigen::Index i = 0; i < bounds.dim(); ++i) {
          clamped(i) = std::min(std::max(clamped(i), bounds.min(i)), bounds.max(i));
        }
        intersects = goal.box.contains(clamped);
      } else {
        Eigen::VectorXd clamped = goal.center;
        for (Eigen::Index i = 0; i < bounds.dim(); ++i) {
          clamped(i) = std::min(std::max(clamped(i), bounds.min(i)), bounds.max(i));
        }
        intersects = (clamped - goal.center).norm() <= goal.radius;
      }
      if (!intersects) {
        throw ValidationError("goal region does not intersect workspace bounds");
      }
    }
  }
};

}  // namespace bp

#endif  // BELIEFPLAN_ENVIRONMENT_HPP_
