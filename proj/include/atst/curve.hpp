#pragma once

#include "atst/types.hpp"

#include <string>
#include <vector>

namespace atst {

// Polygonal arc with arc-length parameterization. Immutable.
class Curve {
 public:
  explicit Curve(PointSet vertices);

  Index dim() const { return vertices_.rows(); }
  Index num_vertices() const { return vertices_.cols(); }
  Index num_segments() const { return vertices_.cols() - 1; }
  const PointSet& vertices() const { return vertices_; }
  Point vertex(Index i) const { return vertices_.col(i); }
  const std::vector<double>& cum_length() const { return cum_; }
  double param_of_vertex(Index i) const { return cum_[static_cast<std::size_t>(i)]; }
  double segment_length(Index i) const { return cum_[i + 1] - cum_[i]; }

  double length() const { return cum_.back(); }
  double chord() const;

  // Index i of the segment with cum[i] <= t <= cum[i+1] (last one on ties at the end).
  Index segment_at(double t) const;
  Point point_at(double t) const;
  // First coordinate of point_at(t), without building the vector.
  double x1_at(double t) const;

 private:
  PointSet vertices_;
  std::vector<double> cum_;
};

Curve load_curve(const std::string& json_text);
Curve load_curve_file(const std::string& path);
std::string curve_to_json(const Curve& c);

double deficit(const Curve& c);
double diameter(const Curve& c);

// 2D only: true iff no two non-adjacent segments meet and adjacent ones do not fold back.
bool is_simple(const Curve& c);

struct NormalizationReport {
  double scale_factor = 1.0;
  Point translation;                    // subtracted before scaling
  std::vector<Point> householder;       // reflection vectors, applied in order
  double normalized_length = 0.0;
  double normalized_chord = 0.0;

  Point apply(const Point& x) const;
  bool is_identity() const;
};

std::pair<Curve, NormalizationReport> normalize(const Curve& c);
bool is_normalized(const Curve& c, double tol = 1e-10);

// Components of the preimage of the closed ball B(center, radius), sorted.
// Tangential touches (zero-length components) are dropped.
std::vector<Subarc> maximal_subarcs(const Curve& c, const Point& center, double radius);
// Same, restricted to the parameter window [t_lo, t_hi].
std::vector<Subarc> maximal_subarcs(const Curve& c, const Point& center, double radius,
                                    double t_lo, double t_hi);

// Points where a segment of the arc family crosses or ends; vertices strictly
// inside each arc plus both arc endpoints.
PointSet arc_support(const Curve& c, const std::vector<Subarc>& arcs);

// Distance from x to the closed segment [p, q].
double dist_to_segment(const Point& x, const Point& p, const Point& q);

}  // namespace atst
