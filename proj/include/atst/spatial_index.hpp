#pragma once

#include "atst/types.hpp"

#include <vector>

namespace atst {

// Static kd-tree over the columns of a point matrix.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(PointSet points);

  Index size() const { return pts_.cols(); }
  const PointSet& points() const { return pts_; }

  // Indices (ascending) with squared distance <= r2 (inclusive) or < r2 (strict).
  std::vector<Index> radius_search(const Point& q, double r2, bool inclusive = true) const;
  // Nearest point; ties go to the lowest index. Returns (index, squared distance).
  std::pair<Index, double> nearest(const Point& q) const;

 private:
  struct Node {
    Index begin, end;  // range in perm_
    int axis;          // -1 for leaf
    double split;
    Index left, right;
  };
  Index build(Index begin, Index end);
  void radius_rec(Index node, const Point& q, double r2, bool inclusive, std::vector<Index>& out) const;
  void nearest_rec(Index node, const Point& q, Index& best, double& best_d2) const;

  PointSet pts_;
  std::vector<Index> perm_;
  std::vector<Node> nodes_;
};

}  // namespace atst
