#pragma once

#include "atst/curve.hpp"
#include "atst/spatial_index.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace atst {

struct NetLevel {
  int n = 0;
  std::vector<Index> samples;  // indices into the dense sample, in insertion order
};

class NetHierarchy {
 public:
  NetHierarchy(std::vector<double> params, PointSet points, double spacing, std::vector<NetLevel> levels);

  int n0() const { return levels_.front().n; }
  int n_max() const { return levels_.back().n; }
  bool has_level(int n) const { return n >= n0() && n <= n_max(); }
  const NetLevel& level(int n) const;
  Index level_size(int n) const { return static_cast<Index>(level(n).samples.size()); }
  Point point(int n, Index k) const { return points_.col(level(n).samples[k]); }
  double param(int n, Index k) const { return params_[level(n).samples[k]]; }
  PointSet level_points(int n) const;
  std::vector<double> level_params(int n) const;

  double sample_spacing() const { return spacing_; }
  const std::vector<double>& sample_params() const { return params_; }
  const PointSet& sample_points() const { return points_; }
  const std::vector<NetLevel>& levels() const { return levels_; }

  // Lets tests inject faults.
  std::vector<NetLevel>& mutable_levels() { return levels_; }

 private:
  std::vector<double> params_;
  PointSet points_;
  double spacing_;
  std::vector<NetLevel> levels_;
};

// Dense sample t_i = i * spacing plus the endpoint.
std::pair<std::vector<double>, PointSet> dense_sample(const Curve& c, double spacing);

NetHierarchy build_nets(const Curve& c, int n0, int n_max, double spacing);
int default_n0(const Curve& c, double A);

struct NetCheck {
  bool separated = true;
  bool covering = true;
  bool nested = true;
  int bad_level = 0;
  Index bad_i = -1, bad_j = -1;  // violating pair (separation) or sample (covering)
  double worst_cover = 0.0;      // max over levels of covering radius / 2^-n
  bool ok() const { return separated && covering && nested; }
};

// Independent check of separation, covering and nesting.
NetCheck check_nets(const NetHierarchy& nets);

std::string nets_to_json(const NetHierarchy& nets);

struct Ball {
  int scale = 0;
  Index index = 0;
  Point center;
  double center_param = 0.0;
  double radius = 0.0;

  Ball inflated(double lambda) const {
    Ball b = *this;
    b.radius *= lambda;
    return b;
  }
  double diam() const { return 2.0 * radius; }
};

inline double scale_radius(double A, int n) { return std::ldexp(A, -n); }

std::vector<Ball> multiresolution_family(const NetHierarchy& nets, double A);

}  // namespace atst
