#pragma once

#include "atst/curve.hpp"
#include "atst/nets.hpp"

#include <cstdint>
#include <vector>

namespace atst {

enum class FitMethod { Trivial, Exact2d, Optimized, SampledOracle };
const char* to_string(FitMethod m);

struct LineFit {
  Point anchor;
  Point direction;
  double max_dist = 0.0;
  FitMethod method = FitMethod::Trivial;
  double certified_gap = 0.0;
};

struct BetaValue {
  double value = 0.0;
  LineFit fit;
  int scale = 0;
  Index index = 0;
  double radius = 0.0;
  Index point_count = 0;
  bool empty = false;  // no points to fit
};

// Vertices inside the closed ball plus the clip endpoints of every component.
PointSet clip_points(const Curve& c, const Point& center, double radius);
inline PointSet clip_points(const Curve& c, const Ball& q) { return clip_points(c, q.center, q.radius); }

Index distinct_count(const PointSet& pts, Index stop_at = 3);

double max_dist_to_line(const PointSet& pts, const Point& anchor, const Point& dir);

// Min-max line fit. Exact in d <= 2, multi-start search in d >= 3.
LineFit fit_line(const PointSet& pts, double tol = 1e-9, std::uint64_t seed = 0);

// Reference fit: best of n_dirs sampled line directions (uniform angles in 2D,
// a Fibonacci hemisphere in 3D, seeded random directions above) plus the pair
// directions. refine (d >= 3) adds a pattern search around the three best.
// Never better than the true optimum.
LineFit fit_line_sampled(const PointSet& pts, int n_dirs = 2000, bool refine = false);

// Minimum enclosing ball of the columns (move-to-front). Returns (center, radius).
std::pair<Point, double> min_enclosing_ball(const PointSet& pts);

// Width of the best slab with the given unit direction inside the line: the
// radius of the enclosing ball of the projections onto dir's complement.
double fixed_direction_radius(const PointSet& pts, const Point& dir, Point* anchor = nullptr);

BetaValue beta_of_points(const PointSet& pts, double radius, double tol = 1e-9, std::uint64_t seed = 0);
BetaValue beta_ball(const Curve& c, const Ball& q, double tol = 1e-9);
BetaValue beta_restricted(const Curve& c, const Ball& q, const std::vector<Subarc>& arcs, double tol = 1e-9);

// Max pairwise distance of a point set (hull-based in 2D).
double point_set_diameter(const PointSet& pts);

double beta_tilde(const Curve& c, const Subarc& s);

struct FlatSplit {
  std::vector<Subarc> flat;  // S_Q
  std::vector<Subarc> rest;
  std::vector<double> flat_beta_tilde, rest_beta_tilde;
};

FlatSplit partition_flat(const Curve& c, const std::vector<Subarc>& arcs, double eps2, double beta);
FlatSplit almost_flat_set(const Curve& c, const Ball& q, double eps2, const BetaValue& beta);

}  // namespace atst
