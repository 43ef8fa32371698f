#pragma once

#include <cstdint>
#include <vector>

#include "xicp/geometry.hpp"

namespace xicp {

/// Exact axis-aligned space-partitioning tree over 3D points. Queries are
/// deterministic: equal distances are resolved toward the lowest point index.
/// The tree is immutable after construction; concurrent queries are safe.
class KdTree {
 public:
  explicit KdTree(const std::vector<Vec3>& points);

  /// Index of the nearest point within max_dist, or -1 if none qualifies.
  int nearest(const Vec3& query, double max_dist) const;

  /// Indices of the k nearest points, ordered by ascending (distance, index).
  /// Returns fewer than k entries only when the tree holds fewer points.
  void knn(const Vec3& query, int k, std::vector<int>& out) const;

  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    int left = -1;
    int right = -1;
    int begin = 0;   // leaf payload range into order_
    int end = 0;
    std::uint8_t axis = 0;
    double split = 0.0;
  };

  int build(int begin, int end, int depth);

  struct NearestState {
    double best_dist2;
    int best_index;
  };
  void nearest_recurse(int node, const Vec3& query, NearestState& state) const;

  struct KnnEntry {
    double dist2;
    int index;
    bool operator<(const KnnEntry& other) const {
      return dist2 < other.dist2 ||
             (dist2 == other.dist2 && index < other.index);
    }
  };
  void knn_recurse(int node, const Vec3& query, int k,
                   std::vector<KnnEntry>& heap) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace xicp
