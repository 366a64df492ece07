#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "scan2map/errors.hpp"
#include "scan2map/point_cloud.hpp"

namespace scan2map {

/// Immutable k-d tree over a point set. Queries return exactly what a linear
/// scan would: nearest by squared distance, ties broken by lowest point index.
class SpatialIndex {
 public:
  struct Neighbor {
    std::size_t index = 0;
    double distance = std::numeric_limits<double>::infinity();
  };

  SpatialIndex() = default;

  explicit SpatialIndex(std::vector<Eigen::Vector3d> points) : points_(std::move(points)) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (!points_.empty()) {
      nodes_.reserve(2 * points_.size() / kLeafSize + 2);
      root_ = build(0, points_.size());
    }
  }

  explicit SpatialIndex(const PointCloud& cloud) : SpatialIndex(cloud.points) {}

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Eigen::Vector3d& point(std::size_t i) const { return points_[i]; }

  /// Globally nearest point to the query. Throws EmptyInputError on an empty
  /// index.
  Neighbor nearest(const Eigen::Vector3d& query) const {
    if (points_.empty()) {
      throw EmptyInputError("SpatialIndex::nearest: empty index");
    }
    Best best;
    search_nearest(root_, query, best);
    return {best.index, std::sqrt(best.dist2)};
  }

  /// The k nearest points, sorted by (distance, index) ascending. Returns
  /// fewer than k when the index is smaller than k.
  std::vector<Neighbor> knn(const Eigen::Vector3d& query, std::size_t k) const {
    if (points_.empty()) {
      throw EmptyInputError("SpatialIndex::knn: empty index");
    }
    k = std::min(k, points_.size());
    KnnHeap heap(k);
    search_knn(root_, query, heap);
    std::vector<Neighbor> out(heap.entries.size());
    std::sort(heap.entries.begin(), heap.entries.end(), EntryLess{});
    for (std::size_t i = 0; i < heap.entries.size(); ++i) {
      out[i] = {heap.entries[i].index, std::sqrt(heap.entries[i].dist2)};
    }
    return out;
  }

 private:
  static constexpr std::size_t kLeafSize = 16;
  static constexpr int kInvalid = -1;

  struct Node {
    int left = kInvalid;
    int right = kInvalid;
    std::size_t begin = 0;
    std::size_t end = 0;  // leaf range in order_ when left == kInvalid
    int axis = 0;
    double split = 0.0;
  };

  struct Best {
    std::size_t index = 0;
    double dist2 = std::numeric_limits<double>::infinity();
  };

  struct Entry {
    std::size_t index;
    double dist2;
  };

  struct EntryLess {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
    }
  };

  // Fixed-capacity max-heap on (dist2, index); worst element at front.
  struct KnnHeap {
    explicit KnnHeap(std::size_t cap) : capacity(cap) { entries.reserve(cap); }

    bool would_accept(double dist2) const {
      return entries.size() < capacity || dist2 < worst().dist2 ||
             (dist2 == worst().dist2);  // equal distance may still win on index
    }

    void offer(std::size_t index, double dist2) {
      const Entry e{index, dist2};
      if (entries.size() < capacity) {
        entries.push_back(e);
        std::push_heap(entries.begin(), entries.end(), EntryLess{});
        return;
      }
      if (EntryLess{}(e, worst())) {
        std::pop_heap(entries.begin(), entries.end(), EntryLess{});
        entries.back() = e;
        std::push_heap(entries.begin(), entries.end(), EntryLess{});
      }
    }

    const Entry& worst() const { return entries.front(); }
    bool full() const { return entries.size() == capacity; }

    std::size_t capacity;
    std::vector<Entry> entries;
  };

  int build(std::size_t begin, std::size_t end) {
    Node node;
    node.begin = begin;
    node.end = end;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= kLeafSize) {
      return id;
    }
    Eigen::Vector3d lo = points_[order_[begin]];
    Eigen::Vector3d hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
      lo = lo.cwiseMin(points_[order_[i]]);
      hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                       return points_[a][axis] < points_[b][axis] ||
                              (points_[a][axis] == points_[b][axis] && a < b);
                     });
    const double split = points_[order_[mid]][axis];
    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    return id;
  }

  void search_nearest(int id, const Eigen::Vector3d& q, Best& best) const {
    const Node& node = nodes_[id];
    if (node.left == kInvalid) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t idx = order_[i];
        const double d2 = (points_[idx] - q).squaredNorm();
        if (d2 < best.dist2 || (d2 == best.dist2 && idx < best.index)) {
          best.dist2 = d2;
          best.index = idx;
        }
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    search_nearest(near, q, best);
    // Equality kept: an equal-distance point with a lower index may sit on
    // the far side of the splitting plane.
    if (diff * diff <= best.dist2) {
      search_nearest(far, q, best);
    }
  }

  void search_knn(int id, const Eigen::Vector3d& q, KnnHeap& heap) const {
    const Node& node = nodes_[id];
    if (node.left == kInvalid) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t idx = order_[i];
        heap.offer(idx, (points_[idx] - q).squaredNorm());
      }
      return;
    }
    const double diff = q[node.axis] - node.split;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    search_knn(near, q, heap);
    if (!heap.full() || diff * diff <= heap.worst().dist2) {
      search_knn(far, q, heap);
    }
  }

  std::vector<Eigen::Vector3d> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  int root_ = kInvalid;
};

/// Convenience wrapper matching the one-shot query contract.
inline SpatialIndex::Neighbor nearest_neighbor(const SpatialIndex& index,
                                               const Eigen::Vector3d& query) {
  return index.nearest(query);
}

}  // namespace scan2map
