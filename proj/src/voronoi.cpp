#include "atst/voronoi.hpp"

#include "atst/beta.hpp"
#include "atst/parallel.hpp"
#include "atst/report.hpp"
#include "atst/spatial_index.hpp"
#include "atst/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace atst {

namespace {

// Parameter in [t0, t1] where the point stops being closer to a than to b.
// f(t) = |x - a|^2 - |x - b|^2 is affine in x, hence piecewise linear in t.
double bisector_crossing(const Curve& c, const Point& a, const Point& b, double t0, double t1) {
  auto f = [&](double t) {
    Point x = c.point_at(t);
    return (x - a).squaredNorm() - (x - b).squaredNorm();
  };
  std::vector<double> knots{t0};
  const auto& cum = c.cum_length();
  for (auto it = std::upper_bound(cum.begin(), cum.end(), t0); it != cum.end() && *it < t1; ++it) knots.push_back(*it);
  knots.push_back(t1);
  double flo = f(knots[0]);
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    double fhi = f(knots[k + 1]);
    if (fhi >= 0.0 && flo <= 0.0 && fhi > flo) {
      double s = flo == fhi ? 0.0 : -flo / (fhi - flo);
      return knots[k] + std::clamp(s, 0.0, 1.0) * (knots[k + 1] - knots[k]);
    }
    flo = fhi;
  }
  return 0.5 * (t0 + t1);  // equidistant along the whole step: split evenly
}

}  // namespace

std::vector<VoronoiCell> voronoi_cells(const Curve& c, const NetHierarchy& nets, int n, int J) {
  const int s = n * J;
  if (!nets.has_level(s))
    throw Error(ErrorKind::MissingEntry, "net level " + std::to_string(s) + " not built");
  PointSet owners = nets.level_points(s);
  KdTree tree(owners);
  const auto& tp = nets.sample_params();
  const PointSet& sp = nets.sample_points();
  std::vector<VoronoiCell> cells(static_cast<std::size_t>(owners.cols()));
  for (Index k = 0; k < owners.cols(); ++k) {
    cells[k].owner = k;
    cells[k].center = owners.col(k);
  }
  std::vector<Index> own(tp.size());
  for (std::size_t i = 0; i < tp.size(); ++i) own[i] = tree.nearest(sp.col(static_cast<Index>(i))).first;

  double start = tp.front();
  for (std::size_t i = 0; i + 1 < tp.size(); ++i) {
    Index a = own[i], b = own[i + 1];
    if (a == b) continue;
    double t = bisector_crossing(c, owners.col(a), owners.col(b), tp[i], tp[i + 1]);
    if (t > start) cells[a].pieces.push_back({start, t});
    start = t;
  }
  if (tp.back() > start) cells[own.back()].pieces.push_back({start, tp.back()});

  for (VoronoiCell& cell : cells) {
    // merge abutting pieces of one owner
    std::vector<Subarc> merged;
    for (const Subarc& p : cell.pieces) {
      if (!merged.empty() && merged.back().b == p.a)
        merged.back().b = p.b;
      else
        merged.push_back(p);
    }
    cell.pieces = std::move(merged);
    if (!cell.pieces.empty()) cell.diam = point_set_diameter(arc_support(c, cell.pieces));
  }
  return cells;
}

std::vector<char> flat_classification(const Curve& c, const NetHierarchy& nets, int n, int J, double eps) {
  const int s = n * J;
  if (!nets.has_level(s))
    throw Error(ErrorKind::MissingEntry, "net level " + std::to_string(s) + " not built");
  const double r = 10.0 * std::ldexp(1.0, -s);
  std::vector<char> flat(static_cast<std::size_t>(nets.level_size(s)));
  for (Index k = 0; k < nets.level_size(s); ++k) {
    Point x = nets.point(s, k);
    BetaValue b = beta_of_points(clip_points(c, x, r), r);
    flat[k] = b.value < eps ? 1 : 0;
  }
  return flat;
}

GenerationSummary generation_sums(const Curve& c, const NetHierarchy& nets, int J, int n_lo, int n_hi,
                                  const std::vector<double>& beta_sum_by_scale, double eps, int threads) {
  if (J < 1) throw Error(ErrorKind::InvalidArgument, "J must be positive");
  GenerationSummary out;
  out.J = J;
  out.eps = eps;
  out.eps_warning = !(eps < std::ldexp(1.0, -2 * J));
  out.length = c.length();
  out.diam = diameter(c);
  std::vector<int> ns;
  for (int n = std::max(n_lo, 0); n <= n_hi; ++n)
    if (nets.has_level(n * J)) ns.push_back(n);
  if (ns.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two generations");

  out.gens.resize(ns.size());
  parallel_for(ns.size(), threads, [&](std::size_t g) {
    GenerationReport& r = out.gens[g];
    r.n = ns[g];
    r.scale = ns[g] * J;
    const double unit = std::ldexp(1.0, -r.scale);
    auto cells = voronoi_cells(c, nets, r.n, J);
    ExactSum sum;
    r.min_ratio = std::numeric_limits<double>::infinity();
    double prev_end = 0.0;
    std::vector<Subarc> all;
    for (const VoronoiCell& cell : cells) {
      if (cell.pieces.empty()) continue;
      ++r.n_cells;
      sum.add(cell.diam);
      double ratio = cell.diam / unit;
      r.min_ratio = std::min(r.min_ratio, ratio);
      r.max_ratio = std::max(r.max_ratio, ratio);
      if (cell.diam < 0.5 * unit) ++r.lower_violations;
      if (!(cell.diam < 2.0 * unit)) ++r.upper_violations;
      all.insert(all.end(), cell.pieces.begin(), cell.pieces.end());
    }
    std::sort(all.begin(), all.end(), [](const Subarc& a, const Subarc& b) { return a.a < b.a; });
    for (const Subarc& p : all) {
      if (p.a != prev_end) r.coverage_ok = false;
      prev_end = p.b;
    }
    if (prev_end != c.length()) r.coverage_ok = false;
    r.sum_diam = sum.value();
    auto flat = flat_classification(c, nets, r.n, J, eps);
    for (char f : flat) (f ? r.n_flat : r.n_nonflat)++;
    ExactSum bs;
    for (int s = nets.n0(); s <= std::min(r.scale, nets.n_max()); ++s) bs.add(beta_sum_by_scale.at(s - nets.n0()));
    r.beta_sum_cumulative = bs.value();
  });

  for (std::size_t g = 0; g < out.gens.size(); ++g) {
    const GenerationReport& r = out.gens[g];
    if (g && r.sum_diam < out.gens[g - 1].sum_diam - 1e-6) out.monotone = false;
    if (r.sum_diam > out.length + 1e-9) out.bounded = false;
    double excess = r.sum_diam - out.diam;
    if (excess > 1e-12) {
      double C = r.beta_sum_cumulative > 0 ? excess / r.beta_sum_cumulative : std::numeric_limits<double>::infinity();
      out.C_fit = std::max(out.C_fit, C);
    }
  }
  out.convergence_gap = std::fabs(out.gens.back().sum_diam - out.length);
  return out;
}

std::string generation_csv(const GenerationSummary& s) {
  CsvWriter w({"n", "scale", "sum_diam", "n_cells", "n_flat", "n_nonflat", "beta_sum_cumulative", "C_fit",
               "lower_violations", "upper_violations", "min_ratio", "max_ratio", "J"});
  for (const GenerationReport& r : s.gens)
    w.row({std::to_string(r.n), std::to_string(r.scale), fmt_num(r.sum_diam), std::to_string(r.n_cells),
           std::to_string(r.n_flat), std::to_string(r.n_nonflat), fmt_num(r.beta_sum_cumulative), fmt_num(s.C_fit),
           std::to_string(r.lower_violations), std::to_string(r.upper_violations), fmt_num(r.min_ratio),
           fmt_num(r.max_ratio), std::to_string(s.J)});
  return w.text();
}

}  // namespace atst
