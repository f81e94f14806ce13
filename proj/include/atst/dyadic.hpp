#pragma once

#include "atst/curve.hpp"

#include <vector>

namespace atst {

struct DyadicScale {
  int k = 0;  // side 2^-k
  Index cubes = 0;
  double sum = 0.0;  // beta(lambda Q)^2 diam(Q)
};

struct DyadicReport {
  double lambda = 3.0;
  std::vector<DyadicScale> scales;
  double total = 0.0;
};

// Vertices inside the closed box plus the clip endpoints of every segment piece.
PointSet clip_points_box(const Curve& c, const Point& lo, const Point& hi);

// Beta sum over literal dyadic cubes meeting the curve, d <= 3. beta(lambda Q)
// is the best line fit of the curve in the inflated cube over half its diameter.
DyadicReport dyadic_beta_sum(const Curve& c, int k_lo, int k_hi, double lambda = 3.0);

}  // namespace atst
