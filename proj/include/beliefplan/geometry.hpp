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

#ifndef BELIEFPLAN_GEOMETRY_HPP_
#define BELIEFPLAN_GEOMETRY_HPP_

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "beliefplan/errors.hpp"

namespace bp {

/// Axis-aligned box, any dimension.
struct AxisBox {
  Eigen::VectorXd min;
  Eigen::VectorXd max;

  Eigen::Index dim() const { return min.size(); }

  bool contains(const Eigen::VectorXd& p) const {
    for (Eigen::Index i = 0; i < dim(); ++i) {
      if (p(i) < min(i) || p(i) > max(i)) return false;
    }
    return true;
  }

  Eigen::VectorXd center() const { return 0.5 * (min + max); }

  void validate(const char* what) const {
    if (min.size() != max.size() || min.size() == 0) {
      throw ValidationError(std::string(what) + ": malformed box extents");
    }
    for (Eigen::Index i = 0; i < dim(); ++i) {
      if (!(min(i) <= max(i))) {
        throw ValidationError(std::string(what) + ": min exceeds max on axis " +
                              std::to_string(i));
      }
    }
  }
};

/// Convex polygon in the plane. Vertices are stored counterclockwise; each
/// edge carries the inward-facing unit normal and offset, so the polygon is
/// the intersection of the half-planes {x : n.x >= offset}.
class ConvexPolygon {
 public:
  struct Face {
    Eigen::Vector2d inward_normal;  // unit length
    double offset;                  // inward_normal . vertex
  };

  static ConvexPolygon from_vertices(std::vector<Eigen::Vector2d> vertices) {
    if (vertices.size() < 3) {
      throw ValidationError("polygon needs at least 3 vertices");
    }
    // Signed area: positive for CCW input. CW input is reversed.
    double twice_area = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const auto& p = vertices[i];
      const auto& q = vertices[(i + 1) % vertices.size()];
      twice_area += p.x() * q.y() - q.x() * p.y();
    }
    if (std::abs(twice_area) < 1e-12) {
      throw ValidationError("polygon is degenerate (zero area)");
    }
    if (twice_area < 0.0) {
      std::reverse(vertices.begin(), vertices.end());
      twice_area = -twice_area;
    }
    ConvexPolygon poly;
    poly.vertices_ = std::move(vertices);
    poly.area_ = 0.5 * twice_area;
    const std::size_t m = poly.vertices_.size();
    poly.faces_.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      const Eigen::Vector2d& p = poly.vertices_[i];
      const Eigen::Vector2d& q = poly.vertices_[(i + 1) % m];
      const Eigen::Vector2d edge = q - p;
      const double len = edge.norm();
      if (len < 1e-12) {
        throw ValidationError("polygon has a repeated vertex");
      }
      // For CCW order the interior is to the left of each edge.
      const Eigen::Vector2d inward(-edge.y() / len, edge.x() / len);
      poly.faces_.push_back({inward, inward.dot(p)});
    }
    // Convexity: every vertex must satisfy every face constraint.
    for (const auto& v : poly.vertices_) {
      for (const auto& f : poly.faces_) {
        if (f.inward_normal.dot(v) < f.offset - 1e-9) {
          throw ValidationError("polygon is not convex");
        }
      }
    }
    return poly;
  }

  const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  double area() const { return area_; }

  bool contains(const Eigen::Vector2d& p) const {
    for (const auto& f : faces_) {
      if (f.inward_normal.dot(p) < f.offset) return false;
    }
    return true;
  }

  Eigen::Vector2d centroid() const {
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    double a6 = 0.0;
    const std::size_t m = vertices_.size();
    for (std::size_t i = 0; i < m; ++i) {
      const auto& p = vertices_[i];
      const auto& q = vertices_[(i + 1) % m];
      const double cross = p.x() * q.y() - q.x() * p.y();
      c += (p + q) * cross;
      a6 += cross;
    }
    return c / (3.0 * a6);
  }

 private:
  std::vector<Eigen::Vector2d> vertices_;
  std::vector<Face> faces_;
  double area_ = 0.0;
};

/// Goal region: axis-aligned box or disc, in position coordinates.
struct GoalRegion {
  enum class Shape { kBox, kDisc };

  Shape shape = Shape::kBox;
  AxisBox box;                // when kBox
  Eigen::VectorXd center;     // when kDisc
  double radius = 0.0;        // when kDisc

  bool contains(const Eigen::VectorXd& position) const {
    if (shape == Shape::kBox) return box.contains(position);
    return (position - center).norm() <= radius;
  }

  Eigen::VectorXd centroid() const {
    return shape == Shape::kBox ? box.center() : center;
  }

  void validate(Eigen::Index position_dim) const {
    if (shape == Shape::kBox) {
      box.validate("goal box");
      if (box.dim() != position_dim) {
        throw ValidationError("goal box dimension != position dimension");
      }
    } else {
      if (center.size() != position_dim) {
        throw ValidationError("goal disc dimension != position dimension");
      }
      if (!(radius > 0.0)) {
        throw ValidationError("goal disc radius must be positive");
      }
    }
  }
};

}  // namespace bp

#endif  // BELIEFPLAN_GEOMETRY_HPP_
