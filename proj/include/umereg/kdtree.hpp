#pragma once

#include "umereg/geom.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace umereg {

/// Exact nearest-neighbour index over a fixed set of points.
///
/// Median-split kd-tree with small leaf buckets. Queries are const and may
/// run concurrently once the tree is built. Among equidistant points the one
/// with the lowest index wins.
class KdTree {
 public:
  struct Hit {
    std::size_t index;
    double squared_distance;
  };

  explicit KdTree(std::span<const Vec3> points);
  explicit KdTree(const PointCloud& cloud) : KdTree(cloud.points()) {}

  Hit nearest(const Vec3& query) const;
  std::size_t size() const noexcept { return points_.size(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }

 private:
  struct Node {
    // Leaf when axis < 0: order_[begin, end) are the bucket members.
    int axis = -1;
    double split = 0.0;
    std::uint32_t begin = 0, end = 0;
    std::uint32_t left = 0, right = 0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::uint32_t node, const Vec3& q, Hit& best) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace umereg
