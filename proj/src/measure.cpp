#include "atst/measure.hpp"

#include "atst/report.hpp"
#include "atst/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace atst {

namespace {

constexpr double kFlat = 1e-12;  // |dx1| <= kFlat * ds counts as a plateau

std::vector<double> raw_rho(const Curve& c) {
  std::vector<double> out(static_cast<std::size_t>(c.num_segments()));
  const PointSet& v = c.vertices();
  for (Index i = 0; i < c.num_segments(); ++i) out[i] = 1.0 - (v(0, i + 1) - v(0, i)) / c.segment_length(i);
  return out;
}

std::vector<Subarc> merge_intervals(std::vector<Subarc> xs, double tol) {
  std::sort(xs.begin(), xs.end(), [](const Subarc& a, const Subarc& b) { return a.a < b.a; });
  std::vector<Subarc> out;
  for (const Subarc& s : xs) {
    if (!out.empty() && s.a <= out.back().b + tol)
      out.back().b = std::max(out.back().b, s.b);
    else
      out.push_back(s);
  }
  std::erase_if(out, [](const Subarc& s) { return !(s.b > s.a); });
  return out;
}

std::vector<ValueInterval> merge_values(std::vector<ValueInterval> xs) {
  std::sort(xs.begin(), xs.end());
  std::vector<ValueInterval> out;
  for (const auto& s : xs) {
    if (!out.empty() && s.first <= out.back().second)
      out.back().second = std::max(out.back().second, s.second);
    else
      out.push_back(s);
  }
  return out;
}

double invert(const Curve& c, const MonotonePiece& p, double v) {
  if (v == p.x_lo) return p.t_lo;
  if (v == p.x_hi) return p.t_hi;
  const PointSet& x = c.vertices();
  for (Index i = p.seg_begin; i < p.seg_end; ++i) {
    double a = x(0, i), b = x(0, i + 1);
    if ((v - a) * (v - b) <= 0.0) {
      double lam = (v - a) / (b - a);
      return c.param_of_vertex(i) + std::clamp(lam, 0.0, 1.0) * c.segment_length(i);
    }
  }
  bool below = v <= p.v_min();
  bool inc = p.kind == PieceKind::Increasing;
  return below == inc ? p.t_lo : p.t_hi;
}

DensityMeasure build_density(const Curve& c, const std::vector<Subarc>& arcs, std::vector<ValueInterval> windows) {
  DensityMeasure m;
  m.arcs = arcs;
  m.windows = merge_values(std::move(windows));
  std::vector<double> r = raw_rho(c);
  std::vector<Subarc> in_window = value_preimage(c, monotone_pieces(c), m.windows);
  std::vector<double> bp(c.cum_length().begin(), c.cum_length().end());
  for (const Subarc& s : arcs) {
    bp.push_back(s.a);
    bp.push_back(s.b);
  }
  for (const Subarc& s : in_window) {
    bp.push_back(s.a);
    bp.push_back(s.b);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  auto inside = [](const std::vector<Subarc>& xs, double t) {
    auto it = std::upper_bound(xs.begin(), xs.end(), t, [](double v, const Subarc& s) { return v < s.a; });
    return it != xs.begin() && std::prev(it)->contains(t);
  };
  m.breakpoints.push_back(bp.front());
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    double a = bp[i], b = bp[i + 1], mid = 0.5 * (a + b);
    double d;
    if (inside(arcs, mid)) {
      d = 2.0;
    } else if (inside(in_window, mid)) {
      d = 1.0;
      m.window_length += b - a;
    } else {
      d = r[static_cast<std::size_t>(c.segment_at(mid))];
    }
    if (!m.density.empty() && m.density.back() == d) {
      m.breakpoints.back() = b;
    } else {
      m.density.push_back(d);
      m.breakpoints.push_back(b);
    }
  }
  return m;
}

}  // namespace

std::vector<double> rho(const Curve& c) {
  if (!is_normalized(c)) throw Error(ErrorKind::InvalidArgument, "density needs a normalized curve");
  return raw_rho(c);
}

double mu(const Curve& c, double t1, double t2) {
  if (!(t1 < t2)) throw Error(ErrorKind::InvalidArgument, "mu needs t1 < t2");
  if (t1 < 0.0 || t2 > c.length()) throw Error(ErrorKind::OutOfRange, "mu interval outside the curve");
  std::vector<double> r = raw_rho(c);
  const auto& cum = c.cum_length();
  ExactSum s;
  for (Index i = c.segment_at(t1); i < c.num_segments() && cum[i] < t2; ++i) {
    double lo = std::max(t1, cum[i]), hi = std::min(t2, cum[i + 1]);
    if (hi > lo) s.add(r[i] * (hi - lo));
  }
  double piecewise = s.value();
  double closed = (t2 - t1) - (c.x1_at(t2) - c.x1_at(t1));
  if (std::fabs(piecewise - closed) > 1e-12 * (t2 - t1))
    throw Error(ErrorKind::Internal, "measure identity violated: " + fmt_num(piecewise) + " vs " + fmt_num(closed));
  return piecewise;
}

std::vector<MonotonePiece> monotone_pieces(const Curve& c) {
  std::vector<MonotonePiece> out;
  const PointSet& v = c.vertices();
  for (Index i = 0; i < c.num_segments(); ++i) {
    double dx = v(0, i + 1) - v(0, i), ds = c.segment_length(i);
    PieceKind k = dx > kFlat * ds ? PieceKind::Increasing : dx < -kFlat * ds ? PieceKind::Decreasing : PieceKind::Constant;
    if (!out.empty() && out.back().kind == k) {
      out.back().t_hi = c.param_of_vertex(i + 1);
      out.back().x_hi = v(0, i + 1);
      out.back().seg_end = i + 1;
    } else {
      out.push_back({c.param_of_vertex(i), c.param_of_vertex(i + 1), v(0, i), v(0, i + 1), k, i, i + 1});
    }
  }
  return out;
}

Multiplicity::Multiplicity(std::vector<MonotonePiece> pieces) : pieces_(std::move(pieces)) {
  std::vector<double> vals;
  for (const auto& p : pieces_)
    if (p.kind != PieceKind::Constant) {
      vals.push_back(p.v_min());
      vals.push_back(p.v_max());
    }
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  std::vector<int> diff(vals.size() + 1, 0);
  for (const auto& p : pieces_) {
    if (p.kind == PieceKind::Constant) continue;
    auto lo = std::lower_bound(vals.begin(), vals.end(), p.v_min()) - vals.begin();
    auto hi = std::lower_bound(vals.begin(), vals.end(), p.v_max()) - vals.begin();
    diff[lo] += 1;
    diff[hi] -= 1;
  }
  std::vector<ValueInterval> multi;
  int count = 0;
  for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
    count += diff[k];
    if (count >= 2) multi.push_back({vals[k], vals[k + 1]});
  }
  for (const auto& p : pieces_)
    if (p.kind == PieceKind::Constant) multi.push_back({p.x_lo, p.x_lo});
  multi_ = merge_values(std::move(multi));
}

double Multiplicity::at(double v) const {
  double count = 0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    bool last = i + 1 == pieces_.size();
    if (p.kind == PieceKind::Constant) {
      if (v == p.x_lo) return std::numeric_limits<double>::infinity();
      continue;
    }
    // half-open in the parameter: the end value belongs to the next piece
    bool hit = p.kind == PieceKind::Increasing ? (v >= p.x_lo && (v < p.x_hi || (last && v == p.x_hi)))
                                               : (v <= p.x_lo && (v > p.x_hi || (last && v == p.x_hi)));
    if (hit) count += 1;
  }
  return count;
}

Multiplicity multiplicity_decomposition(const Curve& c) { return Multiplicity(monotone_pieces(c)); }

std::vector<Subarc> value_preimage(const Curve& c, const std::vector<MonotonePiece>& pieces,
                                   const std::vector<ValueInterval>& values) {
  std::vector<ValueInterval> vs = merge_values(values);
  std::vector<Subarc> out;
  for (const auto& p : pieces) {
    for (const auto& [a, b] : vs) {
      if (p.kind == PieceKind::Constant) {
        if (a <= p.x_lo && p.x_lo <= b) out.push_back({p.t_lo, p.t_hi});
        continue;
      }
      double lo = std::max(a, p.v_min()), hi = std::min(b, p.v_max());
      if (!(hi > lo)) continue;
      double t1 = invert(c, p, lo), t2 = invert(c, p, hi);
      out.push_back({std::min(t1, t2), std::max(t1, t2)});
    }
  }
  return merge_intervals(std::move(out), 1e-12);
}

std::vector<double> parameters_at_value(const Curve& c, const std::vector<MonotonePiece>& pieces, double v) {
  std::vector<double> out;
  for (const auto& p : pieces) {
    if (p.kind == PieceKind::Constant) continue;
    if (v < p.v_min() || v > p.v_max()) continue;
    double t = invert(c, p, v);
    if (out.empty() || out.back() != t) out.push_back(t);
  }
  return out;
}

std::pair<double, double> value_range(const Curve& c, double t_lo, double t_hi) {
  double lo = std::min(c.x1_at(t_lo), c.x1_at(t_hi)), hi = std::max(c.x1_at(t_lo), c.x1_at(t_hi));
  const auto& cum = c.cum_length();
  for (auto it = std::upper_bound(cum.begin(), cum.end(), t_lo); it != cum.end() && *it < t_hi; ++it) {
    double x = c.vertices()(0, it - cum.begin());
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return {lo, hi};
}

std::vector<Bend> bends(const Curve& c) {
  Multiplicity m = multiplicity_decomposition(c);
  std::vector<Bend> out;
  for (const Subarc& s : value_preimage(c, m.pieces(), m.at_least_two())) {
    auto [lo, hi] = value_range(c, s.a, s.b);
    out.push_back({s.a, s.b, s.b - s.a, lo, hi});
  }
  return out;
}

double DensityMeasure::measure(double a, double b) const {
  if (!(b > a)) return 0.0;
  ExactSum s;
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), a);
  std::size_t i = it == breakpoints.begin() ? 0 : static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  for (; i < density.size() && breakpoints[i] < b; ++i) {
    double lo = std::max(a, breakpoints[i]), hi = std::min(b, breakpoints[i + 1]);
    if (hi > lo) s.add(density[i] * (hi - lo));
  }
  return s.value();
}

double DensityMeasure::density_at(double t) const {
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  std::size_t i = it == breakpoints.begin() ? 0 : static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  return density[std::min(i, density.size() - 1)];
}

std::string DensityMeasure::to_json() const {
  return JsonObject().nums("breakpoints", breakpoints).nums("density", density).num("total", total()).done();
}

DensityMeasure mu_measure(const Curve& c) { return build_density(c, {}, {}); }

DensityMeasure mu_tilde(const Curve& c, const std::vector<Bend>& b) {
  std::vector<Subarc> arcs;
  std::vector<ValueInterval> windows;
  for (const Bend& x : b) {
    arcs.push_back({x.t_lo, x.t_hi});
    windows.push_back({x.pi_lo - 100.0 * x.length, x.pi_hi + 100.0 * x.length});
  }
  return build_density(c, arcs, std::move(windows));
}

DensityMeasure augment_with_arcs(const Curve& c, const std::vector<Subarc>& arcs) {
  std::vector<Subarc> sorted = arcs;
  std::sort(sorted.begin(), sorted.end(), [](const Subarc& a, const Subarc& b) { return a.a < b.a; });
  std::vector<ValueInterval> windows;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!(sorted[i].b > sorted[i].a)) throw Error(ErrorKind::InvalidArgument, "arc of zero length");
    if (i && sorted[i].a <= sorted[i - 1].b) throw Error(ErrorKind::InvalidArgument, "overlapping arcs");
    auto [lo, hi] = value_range(c, sorted[i].a, sorted[i].b);
    double L = sorted[i].length();
    windows.push_back({lo - 100.0 * L, hi + 100.0 * L});
  }
  return build_density(c, sorted, std::move(windows));
}

std::pair<double, double> arc_vs_segment_ratio(const Curve& c, const DensityMeasure& m, double t1, double t2) {
  double arc = m.measure(t1, t2) / (t2 - t1);
  Point x = c.point_at(t1), y = c.point_at(t2);
  double L = (y - x).norm();
  double p1 = x(0), p2 = y(0), dp = p2 - p1;
  if (!(dp > 0.0)) throw Error(ErrorKind::InvalidArgument, "segment must advance along the chord");
  double covered = 0.0;
  for (const auto& [a, b] : m.windows) covered += std::max(0.0, std::min(b, p2) - std::max(a, p1));
  double L_in = L * covered / dp;
  double seg = (L_in + (L - L_in) * (1.0 - dp / L)) / L;
  return {arc, seg};
}

std::string bends_to_json(const std::vector<Bend>& b) {
  std::vector<std::string> items;
  for (const Bend& x : b)
    items.push_back(JsonObject()
                        .num("t_lo", x.t_lo)
                        .num("t_hi", x.t_hi)
                        .num("length", x.length)
                        .num("pi_lo", x.pi_lo)
                        .num("pi_hi", x.pi_hi)
                        .done());
  return json_array(items);
}

}  // namespace atst
