#pragma once

#include "atst/curve.hpp"
#include "atst/nets.hpp"

#include <string>
#include <vector>

namespace atst {

struct VoronoiCell {
  Index owner = 0;  // index into the net level
  Point center;
  std::vector<Subarc> pieces;  // sorted parameter intervals
  double diam = 0.0;
};

// Cells of the net level n*J over the curve, computed on the dense sample with
// exact bisector crossings between consecutive samples of different owners.
// Ties go to the lower net index. Every owner gets a cell (possibly empty).
std::vector<VoronoiCell> voronoi_cells(const Curve& c, const NetHierarchy& nets, int n, int J);

// 1 = flat: beta of the ball B(x, 10 * 2^-nJ) is below eps.
std::vector<char> flat_classification(const Curve& c, const NetHierarchy& nets, int n, int J, double eps);

struct GenerationReport {
  int n = 0;
  int scale = 0;  // n*J
  double sum_diam = 0.0;
  Index n_cells = 0, n_flat = 0, n_nonflat = 0;
  double beta_sum_cumulative = 0.0;
  Index lower_violations = 0, upper_violations = 0;  // diam outside [u/2, 2u)
  double min_ratio = 0.0, max_ratio = 0.0;            // diam / 2^-nJ
  bool coverage_ok = true;
};

struct GenerationSummary {
  int J = 10;
  double eps = 0.0;
  bool eps_warning = false;  // eps >= 2^-2J
  double length = 0.0, diam = 0.0;
  std::vector<GenerationReport> gens;
  double C_fit = 0.0;
  bool monotone = true;
  bool bounded = true;  // every sum <= length (+1e-9)
  double convergence_gap = 0.0;
};

// beta_sum_by_scale[s - nets.n0()] is the beta^2 diam sum of the balls at scale s.
// Generations n with n*J in [nets.n0(), nets.n_max()] and n in [n_lo, n_hi].
GenerationSummary generation_sums(const Curve& c, const NetHierarchy& nets, int J, int n_lo, int n_hi,
                                  const std::vector<double>& beta_sum_by_scale, double eps, int threads = 1);

std::string generation_csv(const GenerationSummary& s);

}  // namespace atst
