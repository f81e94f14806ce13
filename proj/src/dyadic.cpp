#include "atst/dyadic.hpp"

#include "atst/beta.hpp"
#include "atst/summation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace atst {

namespace {

// Liang-Barsky: parameter range of p + s (q - p), s in [0,1], inside the box.
bool clip_segment(const Point& p, const Point& q, const Point& lo, const Point& hi, double& s0, double& s1) {
  s0 = 0.0;
  s1 = 1.0;
  for (Index i = 0; i < p.size(); ++i) {
    double d = q(i) - p(i);
    if (d == 0.0) {
      if (p(i) < lo(i) || p(i) > hi(i)) return false;
      continue;
    }
    double a = (lo(i) - p(i)) / d, b = (hi(i) - p(i)) / d;
    if (a > b) std::swap(a, b);
    s0 = std::max(s0, a);
    s1 = std::min(s1, b);
    if (s0 > s1) return false;
  }
  return true;
}

}  // namespace

PointSet clip_points_box(const Curve& c, const Point& lo, const Point& hi) {
  std::vector<Point> out;
  for (Index i = 0; i < c.num_segments(); ++i) {
    Point p = c.vertex(i), q = c.vertex(i + 1);
    double s0, s1;
    if (!clip_segment(p, q, lo, hi, s0, s1)) continue;
    out.push_back(p + s0 * (q - p));
    if (s1 > s0) out.push_back(p + s1 * (q - p));
  }
  PointSet m(c.dim(), static_cast<Index>(out.size()));
  for (std::size_t i = 0; i < out.size(); ++i) m.col(static_cast<Index>(i)) = out[i];
  return m;
}

DyadicReport dyadic_beta_sum(const Curve& c, int k_lo, int k_hi, double lambda) {
  const Index d = c.dim();
  if (d > 3) throw Error(ErrorKind::DimensionMismatch, "dyadic cubes are only supported for d <= 3");
  if (k_hi < k_lo) throw Error(ErrorKind::InvalidArgument, "empty scale range");
  DyadicReport rep;
  rep.lambda = lambda;
  ExactSum total;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double side = std::ldexp(1.0, -k);
    std::set<std::vector<long>> cells;
    for (Index i = 0; i < c.num_segments(); ++i) {
      Point p = c.vertex(i), q = c.vertex(i + 1);
      std::vector<long> lo(d), hi(d);
      for (Index a = 0; a < d; ++a) {
        lo[a] = static_cast<long>(std::floor(std::min(p(a), q(a)) / side));
        hi[a] = static_cast<long>(std::floor(std::max(p(a), q(a)) / side));
      }
      std::vector<long> idx = lo;
      for (;;) {
        Point blo(d), bhi(d);
        for (Index a = 0; a < d; ++a) {
          blo(a) = idx[a] * side;
          bhi(a) = (idx[a] + 1) * side;
        }
        double s0, s1;
        if (clip_segment(p, q, blo, bhi, s0, s1)) cells.insert(idx);
        Index a = 0;
        while (a < d && ++idx[a] > hi[a]) {
          idx[a] = lo[a];
          ++a;
        }
        if (a == d) break;
      }
    }
    DyadicScale sc;
    sc.k = k;
    ExactSum sum;
    const double diamQ = side * std::sqrt(static_cast<double>(d));
    for (const auto& idx : cells) {
      Point blo(d), bhi(d);
      for (Index a = 0; a < d; ++a) {
        double mid = (idx[a] + 0.5) * side;
        blo(a) = mid - 0.5 * lambda * side;
        bhi(a) = mid + 0.5 * lambda * side;
      }
      PointSet pts = clip_points_box(c, blo, bhi);
      if (pts.cols() == 0) continue;
      double beta = fit_line(pts).max_dist / (0.5 * lambda * diamQ);
      sum.add(beta * beta * diamQ);
      ++sc.cubes;
    }
    sc.sum = sum.value();
    total.add(sc.sum);
    rep.scales.push_back(sc);
  }
  rep.total = total.value();
  return rep;
}

}  // namespace atst
