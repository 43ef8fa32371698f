#include "xicp/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace xicp {

namespace {
constexpr int kLeafSize = 16;
}

KdTree::KdTree(const std::vector<Vec3>& points) : points_(points) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!order_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    root_ = build(0, static_cast<int>(order_.size()), 0);
  }
}

int KdTree::build(int begin, int end, int depth) {
  const int node_index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kLeafSize) {
    // Leaf payload sorted by index so traversal order is reproducible.
    std::sort(order_.begin() + begin, order_.begin() + end);
    nodes_[node_index].begin = begin;
    nodes_[node_index].end = end;
    return node_index;
  }

  // Split on the widest dimension of the bounding box.
  Vec3 lo = points_[order_[begin]];
  Vec3 hi = lo;
  for (int i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](int a, int b) {
                     const double ca = points_[a][axis];
                     const double cb = points_[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const double split = points_[order_[mid]][axis];

  nodes_[node_index].axis = static_cast<std::uint8_t>(axis);
  nodes_[node_index].split = split;
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[node_index].left = left;
  nodes_[node_index].right = right;
  return node_index;
}

void KdTree::nearest_recurse(int node_index, const Vec3& query,
                             NearestState& state) const {
  const Node& node = nodes_[node_index];
  if (node.left < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      const double d2 = (points_[idx] - query).squaredNorm();
      if (d2 < state.best_dist2 ||
          (d2 == state.best_dist2 && idx < state.best_index)) {
        state.best_dist2 = d2;
        state.best_index = idx;
      }
    }
    return;
  }
  const double delta = query[node.axis] - node.split;
  const int near_child = delta < 0.0 ? node.left : node.right;
  const int far_child = delta < 0.0 ? node.right : node.left;
  nearest_recurse(near_child, query, state);
  if (delta * delta <= state.best_dist2) {
    nearest_recurse(far_child, query, state);
  }
}

int KdTree::nearest(const Vec3& query, double max_dist) const {
  if (root_ < 0) {
    return -1;
  }
  NearestState state{max_dist * max_dist, static_cast<int>(points_.size())};
  nearest_recurse(root_, query, state);
  if (state.best_index >= static_cast<int>(points_.size())) {
    return -1;
  }
  // max_dist is inclusive.
  return state.best_index;
}

void KdTree::knn_recurse(int node_index, const Vec3& query, int k,
                         std::vector<KnnEntry>& heap) const {
  const Node& node = nodes_[node_index];
  if (node.left < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      const KnnEntry entry{(points_[idx] - query).squaredNorm(), idx};
      if (static_cast<int>(heap.size()) < k) {
        heap.push_back(entry);
        std::push_heap(heap.begin(), heap.end());
      } else if (entry < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = entry;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }
  const double delta = query[node.axis] - node.split;
  const int near_child = delta < 0.0 ? node.left : node.right;
  const int far_child = delta < 0.0 ? node.right : node.left;
  knn_recurse(near_child, query, k, heap);
  if (static_cast<int>(heap.size()) < k ||
      delta * delta <= heap.front().dist2) {
    knn_recurse(far_child, query, k, heap);
  }
}

void KdTree::knn(const Vec3& query, int k, std::vector<int>& out) const {
  out.clear();
  if (root_ < 0 || k <= 0) {
    return;
  }
  std::vector<KnnEntry> heap;
  heap.reserve(static_cast<std::size_t>(k) + 1);
  knn_recurse(root_, query, k, heap);
  std::sort_heap(heap.begin(), heap.end());
  out.reserve(heap.size());
  for (const KnnEntry& entry : heap) {
    out.push_back(entry.index);
  }
}

}  // namespace xicp
