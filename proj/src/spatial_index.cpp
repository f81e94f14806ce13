#include "atst/spatial_index.hpp"

#include <algorithm>
#include <limits>

namespace atst {

namespace {
constexpr Index kLeafSize = 12;
}

KdTree::KdTree(PointSet points) : pts_(std::move(points)) {
  perm_.resize(static_cast<std::size_t>(pts_.cols()));
  for (Index i = 0; i < pts_.cols(); ++i) perm_[i] = i;
  if (pts_.cols() > 0) build(0, pts_.cols());
}

Index KdTree::build(Index begin, Index end) {
  Index id = static_cast<Index>(nodes_.size());
  nodes_.push_back({begin, end, -1, 0.0, -1, -1});
  if (end - begin <= kLeafSize) return id;
  // split on the widest coordinate
  const Index d = pts_.rows();
  int axis = 0;
  double widest = -1.0;
  for (Index k = 0; k < d; ++k) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Index i = begin; i < end; ++i) {
      double x = pts_(k, perm_[i]);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = static_cast<int>(k);
    }
  }
  if (widest <= 0.0) return id;
  Index mid = begin + (end - begin) / 2;
  std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                   [&](Index a, Index b) { return pts_(axis, a) < pts_(axis, b); });
  double split = pts_(axis, perm_[mid]);
  Index l = build(begin, mid);
  Index r = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = l;
  nodes_[id].right = r;
  return id;
}

std::vector<Index> KdTree::radius_search(const Point& q, double r2, bool inclusive) const {
  std::vector<Index> out;
  if (!nodes_.empty()) radius_rec(0, q, r2, inclusive, out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree::radius_rec(Index id, const Point& q, double r2, bool inclusive, std::vector<Index>& out) const {
  const Node& n = nodes_[id];
  if (n.axis < 0) {
    for (Index i = n.begin; i < n.end; ++i) {
      double d2 = (pts_.col(perm_[i]) - q).squaredNorm();
      if (inclusive ? d2 <= r2 : d2 < r2) out.push_back(perm_[i]);
    }
    return;
  }
  // left holds values <= split, right holds values >= split
  double diff = q(n.axis) - n.split;
  double diff2 = diff * diff;
  if (diff <= 0.0 || diff2 <= r2) radius_rec(n.left, q, r2, inclusive, out);
  if (diff >= 0.0 || diff2 <= r2) radius_rec(n.right, q, r2, inclusive, out);
}

std::pair<Index, double> KdTree::nearest(const Point& q) const {
  Index best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  if (!nodes_.empty()) nearest_rec(0, q, best, best_d2);
  return {best, best_d2};
}

void KdTree::nearest_rec(Index id, const Point& q, Index& best, double& best_d2) const {
  const Node& n = nodes_[id];
  if (n.axis < 0) {
    for (Index i = n.begin; i < n.end; ++i) {
      Index p = perm_[i];
      double d2 = (pts_.col(p) - q).squaredNorm();
      if (d2 < best_d2 || (d2 == best_d2 && p < best)) {
        best_d2 = d2;
        best = p;
      }
    }
    return;
  }
  double diff = q(n.axis) - n.split;
  Index near = diff <= 0.0 ? n.left : n.right;
  Index far = diff <= 0.0 ? n.right : n.left;
  nearest_rec(near, q, best, best_d2);
  // <= keeps equal-distance candidates reachable for the index tie-break
  if (diff * diff <= best_d2) nearest_rec(far, q, best, best_d2);
}

}  // namespace atst
