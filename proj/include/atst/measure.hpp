#pragma once

#include "atst/curve.hpp"

#include <string>
#include <utility>
#include <vector>

namespace atst {

// Per-segment density 1 - dx1/ds. Requires a normalized curve.
std::vector<double> rho(const Curve& c);

// Integral of the density over [t1, t2]; throws Internal if the closed form
// (t2 - t1) - (x1(t2) - x1(t1)) disagrees beyond 1e-12 * (t2 - t1).
double mu(const Curve& c, double t1, double t2);

enum class PieceKind { Increasing, Decreasing, Constant };

struct MonotonePiece {
  double t_lo = 0, t_hi = 0;
  double x_lo = 0, x_hi = 0;  // first coordinate at t_lo and at t_hi
  PieceKind kind = PieceKind::Increasing;
  Index seg_begin = 0, seg_end = 0;  // segments [seg_begin, seg_end)
  double v_min() const { return std::min(x_lo, x_hi); }
  double v_max() const { return std::max(x_lo, x_hi); }
};

using ValueInterval = std::pair<double, double>;  // closed [lo, hi] on the first axis

class Multiplicity {
 public:
  Multiplicity() = default;
  explicit Multiplicity(std::vector<MonotonePiece> pieces);
  // Number of parameters with x1 = v; infinity on plateau values.
  double at(double v) const;
  // Closure of the value set with multiplicity >= 2, merged; plateau values
  // appear as degenerate intervals.
  const std::vector<ValueInterval>& at_least_two() const { return multi_; }
  const std::vector<MonotonePiece>& pieces() const { return pieces_; }

 private:
  std::vector<MonotonePiece> pieces_;
  std::vector<ValueInterval> multi_;
};

std::vector<MonotonePiece> monotone_pieces(const Curve& c);
Multiplicity multiplicity_decomposition(const Curve& c);

// Parameter set whose first coordinate lies in the union of the closed value
// intervals, as merged intervals of positive length.
std::vector<Subarc> value_preimage(const Curve& c, const std::vector<MonotonePiece>& pieces,
                                   const std::vector<ValueInterval>& values);

// Parameters on a monotone piece where x1 = v (one per strictly monotone piece
// whose range holds v).
std::vector<double> parameters_at_value(const Curve& c, const std::vector<MonotonePiece>& pieces, double v);

struct Bend {
  double t_lo = 0, t_hi = 0;
  double length = 0;
  double pi_lo = 0, pi_hi = 0;
};

std::vector<Bend> bends(const Curve& c);
std::pair<double, double> value_range(const Curve& c, double t_lo, double t_hi);

// Piecewise-constant density on the parameter axis.
struct DensityMeasure {
  std::vector<double> breakpoints;  // increasing, from 0 to length
  std::vector<double> density;      // one value per interval
  std::vector<Subarc> arcs;         // density-2 arcs (bends or the arc family)
  std::vector<ValueInterval> windows;  // merged projection windows
  double window_length = 0.0;          // parameter length with density from the window rule

  double measure(double a, double b) const;
  double total() const { return measure(breakpoints.front(), breakpoints.back()); }
  double density_at(double t) const;
  double window_fraction() const { return window_length / (breakpoints.back() - breakpoints.front()); }
  std::string to_json() const;
};

DensityMeasure mu_measure(const Curve& c);
DensityMeasure mu_tilde(const Curve& c, const std::vector<Bend>& b);
// Density 2 on the arcs, 1 on the preimage of the 100*length windows around
// their projections, rho elsewhere. Arcs must be pairwise disjoint.
DensityMeasure augment_with_arcs(const Curve& c, const std::vector<Subarc>& arcs);

// Density ratio of the subarc [t1, t2] and of the straight segment between
// its endpoints under the same rules (window membership by projection, rho
// of the segment otherwise). Requires x1(t1) < x1(t2).
std::pair<double, double> arc_vs_segment_ratio(const Curve& c, const DensityMeasure& m, double t1, double t2);

std::string bends_to_json(const std::vector<Bend>& b);

}  // namespace atst
