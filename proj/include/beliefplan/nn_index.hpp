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

#ifndef BELIEFPLAN_NN_INDEX_HPP_
#define BELIEFPLAN_NN_INDEX_HPP_

#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "beliefplan/gaussian.hpp"
#include "beliefplan/metric.hpp"

namespace bp {

enum class IndexKind { kLinear, kVpTree };

/// Near-neighbor set over beliefs with lazy removal.
///
/// Entries are packed flat (mean, then the upper triangle of the total
/// covariance) so linear scans stay cache-friendly; the optional VP-tree
/// accelerates queries using the rooted (true-metric) distance while all
/// candidate comparisons use the raw metric value, which keeps results
/// identical to a linear scan, including lowest-id tie-breaking.
class NeighborIndex {
 public:
  NeighborIndex(MetricKind metric, Eigen::Index dim,
                IndexKind kind = IndexKind::kLinear)
      : metric_(metric),
        kind_(kind),
        dim_(dim),
        stride_(dim + dim * (dim + 1) / 2) {}

  std::size_t size() const { return alive_count_; }

  void add(int id, const GaussianBelief& b) {
    if (id >= static_cast<int>(id_to_entry_.size())) {
      id_to_entry_.resize(id + 1, -1);
    }
    id_to_entry_[id] = static_cast<int>(ids_.size());
    ids_.push_back(id);
    alive_.push_back(1);
    pack(b);
    ++alive_count_;
    if (kind_ == IndexKind::kVpTree) {
      pending_.push_back(static_cast<int>(ids_.size()) - 1);
      maybe_rebuild();
    }
  }

  void remove(int id) {
    const int entry = id_to_entry_[id];
    if (entry < 0 || !alive_[entry]) return;
    alive_[entry] = 0;
    --alive_count_;
    ++dead_count_;
    if (kind_ == IndexKind::kVpTree) maybe_rebuild();
  }

  /// Id of the alive entry with minimal (raw distance, id); -1 when empty.
  int nearest(const GaussianBelief& q) const {
    const std::vector<double> packed = pack_query(q);
    double best_raw = std::numeric_limits<double>::infinity();
    int best_id = -1;
    if (kind_ == IndexKind::kLinear) {
      scan_all(packed.data(), &best_raw, &best_id);
    } else {
      search_node(root_, packed.data(), &best_raw, &best_id);
      scan_list(pending_, packed.data(), &best_raw, &best_id);
    }
    return best_id;
  }

  /// Ids of alive entries with raw distance <= raw_radius, ascending.
  std::vector<int> within(const GaussianBelief& q, double raw_radius) const {
    const std::vector<double> packed = pack_query(q);
    std::vector<int> out;
    if (kind_ == IndexKind::kLinear) {
      for (std::size_t e = 0; e < ids_.size(); ++e) {
        if (alive_[e] && raw_distance(packed.data(), e) <= raw_radius) {
          out.push_back(ids_[e]);
        }
      }
    } else {
      const double rooted_radius = Metric(metric_).rooted(raw_radius);
      collect_node(root_, packed.data(), raw_radius, rooted_radius, &out);
      for (int e : pending_) {
        if (alive_[e] && raw_distance(packed.data(), e) <= raw_radius) {
          out.push_back(ids_[e]);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  struct Node {
    int entry = -1;
    double radius = 0.0;  // median rooted distance to the vantage
    int inner = -1;
    int outer = -1;
  };

  void pack(const GaussianBelief& b) {
    const std::size_t base = data_.size();
    data_.resize(base + stride_);
    double* out = data_.data() + base;
    for (Eigen::Index i = 0; i < dim_; ++i) out[i] = b.mean(i);
    double* cov = out + dim_;
    std::size_t t = 0;
    for (Eigen::Index i = 0; i < dim_; ++i) {
      for (Eigen::Index j = i; j < dim_; ++j) {
        cov[t++] = b.sigma(i, j) + b.lambda(i, j);
      }
    }
  }

  std::vector<double> pack_query(const GaussianBelief& b) const {
    std::vector<double> out(stride_);
    for (Eigen::Index i = 0; i < dim_; ++i) out[i] = b.mean(i);
    std::size_t t = dim_;
    for (Eigen::Index i = 0; i < dim_; ++i) {
      for (Eigen::Index j = i; j < dim_; ++j) {
        out[t++] = b.sigma(i, j) + b.lambda(i, j);
      }
    }
    return out;
  }

  double raw_distance(const double* q, std::size_t entry) const {
    return packed_distance(q, data_.data() + entry * stride_);
  }

  double packed_distance(const double* x, const double* y) const {
    double mean_sq = 0.0;
    for (Eigen::Index i = 0; i < dim_; ++i) {
      const double d = x[i] - y[i];
      mean_sq += d * d;
    }
    if (metric_ == MetricKind::kEuclideanMean) return std::sqrt(mean_sq);
    const double* s1 = x + dim_;
    const double* s2 = y + dim_;
    if (dim_ == 1) {
      const double cross = std::sqrt(std::max(0.0, s1[0] * s2[0]));
      return std::max(0.0, mean_sq + s1[0] + s2[0] - 2.0 * cross);
    }
    if (dim_ == 2) {
      const double tr =
          s1[0] * s2[0] + 2.0 * s1[1] * s2[1] + s1[2] * s2[2];
      const double det = std::max(0.0, s1[0] * s1[2] - s1[1] * s1[1]) *
                         std::max(0.0, s2[0] * s2[2] - s2[1] * s2[1]);
      const double cross = std::sqrt(std::max(0.0, tr + 2.0 * std::sqrt(det)));
      const double trace_term =
          (s1[0] + s1[2]) + (s2[0] + s2[2]) - 2.0 * cross;
      return std::max(0.0, mean_sq + trace_term);
    }
    const Eigen::MatrixXd m1 = unpack(s1);
    const Eigen::MatrixXd m2 = unpack(s2);
    const double trace_term =
        m1.trace() + m2.trace() - 2.0 * detail::wasserstein_cross_trace(m1, m2);
    return std::max(0.0, mean_sq + trace_term);
  }

  Eigen::MatrixXd unpack(const double* cov) const {
    Eigen::MatrixXd m(dim_, dim_);
    std::size_t t = 0;
    for (Eigen::Index i = 0; i < dim_; ++i) {
      for (Eigen::Index j = i; j < dim_; ++j) {
        m(i, j) = cov[t];
        m(j, i) = cov[t];
        ++t;
      }
    }
    return m;
  }

  double rooted(double raw) const { return Metric(metric_).rooted(raw); }

  void scan_all(const double* q, double* best_raw, int* best_id) const {
    for (std::size_t e = 0; e < ids_.size(); ++e) {
      if (!alive_[e]) continue;
      consider(q, e, best_raw, best_id);
    }
  }

  void scan_list(const std::vector<int>& entries, const double* q,
                 double* best_raw, int* best_id) const {
    for (int e : entries) {
      if (!alive_[e]) continue;
      consider(q, e, best_raw, best_id);
    }
  }

  void consider(const double* q, std::size_t e, double* best_raw,
                int* best_id) const {
    const double d = raw_distance(q, e);
    if (d < *best_raw || (d == *best_raw && ids_[e] < *best_id)) {
      *best_raw = d;
      *best_id = ids_[e];
    }
  }

  void search_node(int node_idx, const double* q, double* best_raw,
                   int* best_id) const {
    if (node_idx < 0) return;
    const Node& node = nodes_[node_idx];
    const double d_raw = raw_distance(q, node.entry);
    if (alive_[node.entry]) {
      if (d_raw < *best_raw ||
          (d_raw == *best_raw && ids_[node.entry] < *best_id)) {
        *best_raw = d_raw;
        *best_id = ids_[node.entry];
      }
    }
    if (node.inner < 0 && node.outer < 0) return;
    const double d = rooted(d_raw);
    const int near_side = d <= node.radius ? node.inner : node.outer;
    const int far_side = d <= node.radius ? node.outer : node.inner;
    search_node(near_side, q, best_raw, best_id);
    const double best_rooted = rooted(*best_raw);
    // Inclusive bounds so equal-distance candidates survive for the id
    // tie-break.
    if (far_side == node.outer) {
      if (d + best_rooted >= node.radius) {
        search_node(far_side, q, best_raw, best_id);
      }
    } else {
      if (d - best_rooted <= node.radius) {
        search_node(far_side, q, best_raw, best_id);
      }
    }
  }

  void collect_node(int node_idx, const double* q, double raw_radius,
                    double rooted_radius, std::vector<int>* out) const {
    if (node_idx < 0) return;
    const Node& node = nodes_[node_idx];
    const double d_raw = raw_distance(q, node.entry);
    if (alive_[node.entry] && d_raw <= raw_radius) {
      out->push_back(ids_[node.entry]);
    }
    if (node.inner < 0 && node.outer < 0) return;
    const double d = rooted(d_raw);
    if (d - rooted_radius <= node.radius) {
      collect_node(node.inner, q, raw_radius, rooted_radius, out);
    }
    if (d + rooted_radius >= node.radius) {
      collect_node(node.outer, q, raw_radius, rooted_radius, out);
    }
  }

  void maybe_rebuild() {
    const std::size_t built = ids_.size() - pending_.size();
    const bool too_many_pending =
        pending_.size() > 128 && pending_.size() * 4 > built;
    const bool too_many_dead = dead_count_ > 16 && dead_count_ * 2 > alive_count_;
    if (too_many_pending || too_many_dead) rebuild();
  }

  void rebuild() {
    nodes_.clear();
    pending_.clear();
    std::vector<int> entries;
    entries.reserve(alive_count_);
    for (std::size_t e = 0; e < ids_.size(); ++e) {
      if (alive_[e]) entries.push_back(static_cast<int>(e));
    }
    dead_count_ = 0;
    root_ = build(entries.begin(), entries.end());
  }

  int build(std::vector<int>::iterator begin, std::vector<int>::iterator end) {
    if (begin == end) return -1;
    const int vantage = *begin;
    Node node;
    node.entry = vantage;
    ++begin;
    if (begin == end) {
      nodes_.push_back(node);
      return static_cast<int>(nodes_.size()) - 1;
    }
    const double* vdata = data_.data() + std::size_t(vantage) * stride_;
    auto dist_of = [&](int e) {
      return rooted(packed_distance(vdata, data_.data() + std::size_t(e) * stride_));
    };
    const auto mid = begin + (end - begin) / 2;
    std::nth_element(begin, mid, end, [&](int lhs, int rhs) {
      const double dl = dist_of(lhs);
      const double dr = dist_of(rhs);
      return dl < dr || (dl == dr && ids_[lhs] < ids_[rhs]);
    });
    node.radius = dist_of(*mid);
    const int node_idx = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    // Children partition: [begin, mid] inner (distance <= radius due to
    // nth_element), (mid, end) outer.
    const int inner = build(begin, mid + 1);
    const int outer = build(mid + 1, end);
    nodes_[node_idx].inner = inner;
    nodes_[node_idx].outer = outer;
    return node_idx;
  }

  MetricKind metric_;
  IndexKind kind_;
  Eigen::Index dim_;
  Eigen::Index stride_;
  std::vector<int> ids_;
  std::vector<char> alive_;
  std::vector<double> data_;
  std::vector<int> id_to_entry_;
  std::size_t alive_count_ = 0;
  std::size_t dead_count_ = 0;
  // VP-tree state.
  std::vector<Node> nodes_;
  std::vector<int> pending_;
  int root_ = -1;
};

}  // namespace bp

#endif  // BELIEFPLAN_NN_INDEX_HPP_
