#include "atst/classifier.hpp"

#include "atst/parallel.hpp"
#include "atst/report.hpp"
#include "atst/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace atst {

namespace {

constexpr double kZeroBeta = 1e-12;

// First parameter in [lo, hi] where the first coordinate equals v, or NaN.
double param_with_value(const Curve& c, double lo, double hi, double v) {
  const auto& cum = c.cum_length();
  Index s0 = c.segment_at(lo), s1 = c.segment_at(hi);
  for (Index s = s0; s <= s1; ++s) {
    double ta = std::max(lo, cum[s]), tb = std::min(hi, cum[s + 1]);
    if (tb < ta) continue;
    double xa = c.x1_at(ta), xb = c.x1_at(tb);
    if (v < std::min(xa, xb) || v > std::max(xa, xb)) continue;
    if (xa == xb) return ta;
    return ta + (v - xa) / (xb - xa) * (tb - ta);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::vector<Subarc> intersect(const std::vector<Subarc>& a, const std::vector<Subarc>& b) {
  std::vector<Subarc> out;
  for (const Subarc& x : a)
    for (const Subarc& y : b) {
      double lo = std::max(x.a, y.a), hi = std::min(x.b, y.b);
      if (hi > lo) out.push_back({lo, hi});
    }
  std::sort(out.begin(), out.end(), [](const Subarc& p, const Subarc& q) { return p.a < q.a; });
  return out;
}

// Distance from x to the line through `center` parallel to the first axis.
double dist_to_eta(const Point& x, const Point& center) {
  Point d = x - center;
  d(0) = 0.0;
  return d.norm();
}

double interval_gap(double v, double lo, double hi) {
  if (v < lo) return lo - v;
  if (v > hi) return v - hi;
  return 0.0;
}

std::string region_id(RegionKind k, int r) {
  if (k == RegionKind::Bend) return "b" + std::to_string(r);
  if (k == RegionKind::Arc) return "d" + std::to_string(r);
  return "";
}

}  // namespace

void ClassifierParams::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::InvalidArgument, m); };
  if (!(A > 0) || !(eps1 > 0) || !(eps2 > 0) || !(eps3 > 0) || !(delta > 0) || !(c_littlec > 0))
    bad("classifier parameters must be positive");
  if (J < 1) bad("J must be positive");
  if (!(eps2 < eps1) || !(eps1 < 1.0)) bad("need eps2 < eps1 < 1");
  if (!(C_U > 1.0)) bad("need C_U > 1");
  if (!(eps3 * eps3 < delta * delta * delta / 4.0)) bad("need eps3^2 < delta^3/4");
}

const char* to_string(Leaf l) {
  switch (l) {
    case Leaf::G_L: return "G_L";
    case Leaf::G1: return "G1";
    case Leaf::G3: return "G3";
    case Leaf::D1: return "D1";
    case Leaf::D2_2: return "D2_2";
    case Leaf::D2_1_1: return "D2_1_1";
    case Leaf::D2_1_2_i_c: return "D2_1_2_i_c";
    case Leaf::D2_1_2_i_f: return "D2_1_2_i_f";
    case Leaf::D2_1_2_ii_c: return "D2_1_2_ii_c";
    case Leaf::D2_1_2_ii_f: return "D2_1_2_ii_f";
  }
  return "?";
}

Leaf FamilyLabel::leaf() const {
  switch (top) {
    case TopFamily::G_L: return Leaf::G_L;
    case TopFamily::G1: return Leaf::G1;
    case TopFamily::G3: return Leaf::G3;
    case TopFamily::G2: break;
  }
  if (delta == DeltaBranch::D1) return Leaf::D1;
  if (delta == DeltaBranch::D2_2) return Leaf::D2_2;
  switch (deep) {
    case DeepFamily::D2_1_1: return Leaf::D2_1_1;
    case DeepFamily::D2_1_2_i_c: return Leaf::D2_1_2_i_c;
    case DeepFamily::D2_1_2_i_f: return Leaf::D2_1_2_i_f;
    case DeepFamily::D2_1_2_ii_c: return Leaf::D2_1_2_ii_c;
    case DeepFamily::D2_1_2_ii_f: return Leaf::D2_1_2_ii_f;
    case DeepFamily::None: break;
  }
  throw Error(ErrorKind::Internal, "incomplete family label");
}

std::string FamilyLabel::path() const {
  switch (leaf()) {
    case Leaf::G_L: return large_top ? "G_L/top" : "G_L";
    case Leaf::G1: return "G/G1";
    case Leaf::G3: return "G/G3";
    case Leaf::D1: return "G/G2/D1";
    case Leaf::D2_2: return "G/G2/D2/D2_2";
    case Leaf::D2_1_1: return "G/G2/D2/D2_1/D2_1_1";
    case Leaf::D2_1_2_i_c: return "G/G2/D2/D2_1/D2_1_2/i/c";
    case Leaf::D2_1_2_i_f: return "G/G2/D2/D2_1/D2_1_2/i/f";
    case Leaf::D2_1_2_ii_c: return "G/G2/D2/D2_1/D2_1_2/ii/c";
    case Leaf::D2_1_2_ii_f: return "G/G2/D2/D2_1/D2_1_2/ii/f";
  }
  return "?";
}

Subarc gamma_Q(const Curve& c, const Ball& q, int j) {
  Ball b = q.inflated(std::ldexp(1.0, j));
  auto arcs = maximal_subarcs(c, b.center, b.radius);
  for (const Subarc& s : arcs)
    if (s.contains(q.center_param)) return s;
  // The center is on the curve; only rounding can land here.
  Subarc best{q.center_param, q.center_param};
  double gap = std::numeric_limits<double>::infinity();
  for (const Subarc& s : arcs) {
    double g = interval_gap(q.center_param, s.a, s.b);
    if (g < gap) {
      gap = g;
      best = s;
    }
  }
  return best;
}

namespace {

BallView view_impl(const Curve& c, const Ball& q, int j, double eps2, const BetaValue* known) {
  BallView v;
  v.ball = q.inflated(std::ldexp(1.0, j));
  v.arcs = maximal_subarcs(c, v.ball.center, v.ball.radius);
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.arcs.size(); ++i) {
    double g = interval_gap(q.center_param, v.arcs[i].a, v.arcs[i].b);
    if (g < gap) {
      gap = g;
      v.gamma = static_cast<int>(i);
    }
  }
  v.beta = known ? known->value : beta_ball(c, v.ball).value;
  FlatSplit fs = partition_flat(c, v.arcs, eps2, v.beta);
  v.flat.assign(v.arcs.size(), 0);
  std::size_t fi = 0;
  for (std::size_t i = 0; i < v.arcs.size(); ++i) {
    if (fi < fs.flat.size() && fs.flat[fi].a == v.arcs[i].a && fs.flat[fi].b == v.arcs[i].b) {
      v.flat[i] = 1;
      if (static_cast<int>(i) == v.gamma) v.beta_tilde_gamma = fs.flat_beta_tilde[fi];
      ++fi;
    }
  }
  if (v.gamma >= 0 && !v.flat[v.gamma]) v.beta_tilde_gamma = beta_tilde(c, v.arcs[v.gamma]);
  v.S = fs.flat;
  v.beta_S = v.S.empty() ? 0.0 : beta_restricted(c, v.ball, v.S).value;
  return v;
}

double pair_beta(const Curve& c, const Ball& q, const Subarc& x, const Subarc& y) {
  std::vector<Subarc> arcs{x, y};
  if (arcs[1].a < arcs[0].a) std::swap(arcs[0], arcs[1]);
  return beta_restricted(c, q, arcs).value;
}

GResult classify_G_impl(const Ball& q, const Curve& c, const ClassifierParams& p, const BetaValue* known,
                        BallView* view0) {
  GResult g;
  for (int j = 0; j < 3; ++j) {
    BallView v = view_impl(c, q, j, p.eps2, j == 0 ? known : nullptr);
    g.beta[j] = v.beta;
    g.beta_tilde_gamma[j] = v.beta_tilde_gamma;
    g.beta_S[j] = v.beta_S;
    if (j == 0) {
      if (view0) *view0 = v;
      if (v.beta <= kZeroBeta) {
        g.top = TopFamily::G3;
        return g;
      }
    }
  }
  g.top = TopFamily::G3;
  for (int j = 0; j < 3 && g.top == TopFamily::G3; ++j)
    if (g.beta_tilde_gamma[j] > p.eps2 * g.beta[j]) {
      g.top = TopFamily::G1;
      g.j = j;
    }
  for (int j = 0; j < 3 && g.top == TopFamily::G3; ++j)
    if (g.beta_S[j] > p.eps1 * g.beta[j]) {
      g.top = TopFamily::G2;
      g.j = j;
    }
  if (g.top == TopFamily::G3)
    for (int j = 0; j < 3; ++j)
      if (g.beta_tilde_gamma[j] > p.eps2 * g.beta[j] || g.beta_S[j] > p.eps1 * g.beta[j]) g.dichotomy_ok = false;
  return g;
}

DeltaResult classify_Delta_impl(const BallView& v, const Curve& c, const CoreSystems& cores,
                                const ClassifierParams& p) {
  DeltaResult d;
  d.beta_S_Q = v.beta_S;
  const CoreSet& ux = cores.ux.core(v.ball.scale, v.ball.index);
  const double half = ux.diameter / 2.0;
  std::vector<Subarc> in_core = clip_to_core(c, ux);
  std::vector<Subarc> pieces = intersect(v.S, in_core);
  if (!pieces.empty() && half > 0.0) d.beta_S_Ux = fit_line(arc_support(c, pieces)).max_dist / half;
  if (!in_core.empty() && half > 0.0) d.beta_Ux = fit_line(arc_support(c, in_core)).max_dist / half;
  if (p.C_U * d.beta_S_Ux > d.beta_S_Q) {
    d.branch = DeltaBranch::D1;
    return d;
  }
  for (std::size_t i = 0; i < v.arcs.size(); ++i) {
    if (v.flat[i]) continue;
    PointSet pts = arc_support(c, {v.arcs[i]});
    for (Index k = 0; k + 1 < pts.cols(); ++k)
      if (ux.meets_segment(pts.col(k), pts.col(k + 1))) {
        d.branch = DeltaBranch::D2_2;
        return d;
      }
  }
  d.branch = DeltaBranch::D2_1;
  return d;
}

}  // namespace

BallView make_view(const Curve& c, const Ball& q, int j, double eps2) { return view_impl(c, q, j, eps2, nullptr); }

LargeSplit split_large(const std::vector<Ball>& balls, const Curve& c, double A) {
  LargeSplit out;
  const double dgamma = diameter(c);
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const Ball& q = balls[i];
    double far2 = 0.0;
    for (Index k = 0; k < c.num_vertices(); ++k) far2 = std::max(far2, (c.vertices().col(k) - q.center).squaredNorm());
    double lim = 4.0 * q.radius;
    if (far2 <= lim * lim) {
      out.large.push_back(i);
      out.large_top.push_back(q.diam() > 8.0 * A ? 1 : 0);
      if (q.diam() < dgamma / 4.0) ++out.floor_violations;
    } else {
      out.rest.push_back(i);
    }
  }
  return out;
}

GResult classify_G(const Ball& q, const Curve& c, const ClassifierParams& p) {
  return classify_G_impl(q, c, p, nullptr, nullptr);
}

DeltaResult classify_Delta(const Ball& q, const Curve& c, const CoreSystems& cores, const ClassifierParams& p) {
  return classify_Delta_impl(view_impl(c, q, 0, p.eps2, nullptr), c, cores, p);
}

namespace {

struct DeepCase {
  bool case_i = false;
  int bend = -1;
  Subarc witness;
  bool has_witness = false;
  Subarc psi;
  bool has_psi = false;
  bool cap_ok = true;
  bool in_tube = true;
  bool bend_found = true;
};

DeepCase analyse_deep(const Curve& c, const BallView& v, const std::vector<Bend>& bs, const ClassifierParams& p) {
  DeepCase out;
  const Ball& q = v.ball;
  const Subarc g = v.arcs[v.gamma];
  const double diam = q.diam();
  const double tube = 4.0 * p.eps3 * diam;

  PointSet gp = arc_support(c, {g});
  double gx_lo = std::numeric_limits<double>::infinity(), gx_hi = -gx_lo;
  for (Index k = 0; k < gp.cols(); ++k) {
    if (dist_to_eta(gp.col(k), q.center) >= tube) out.in_tube = false;
    gx_lo = std::min(gx_lo, gp(0, k));
    gx_hi = std::max(gx_hi, gp(0, k));
  }
  double e0 = c.x1_at(g.a), e1 = c.x1_at(g.b);
  if (!(std::min(e0, e1) < q.center(0) && q.center(0) < std::max(e0, e1))) out.in_tube = false;

  struct Cand {
    std::size_t i;
    double b;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < v.arcs.size(); ++i) {
    if (static_cast<int>(i) == v.gamma) continue;
    cands.push_back({i, pair_beta(c, q, g, v.arcs[i])});
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.b > b.b; });

  // case (i): flat witness whose projection meets that of gamma
  for (const Cand& k : cands) {
    if (!v.flat[k.i] || !(k.b > 0.5 * v.beta_S)) continue;
    const Subarc& xi = v.arcs[k.i];
    auto [xlo, xhi] = value_range(c, xi.a, xi.b);
    double lo = std::max(xlo, gx_lo), hi = std::min(xhi, gx_hi);
    if (lo > hi) continue;
    out.case_i = true;
    out.witness = xi;
    out.has_witness = true;
    double val = 0.5 * (lo + hi);
    double t1 = param_with_value(c, g.a, g.b, val), t2 = param_with_value(c, xi.a, xi.b, val);
    out.bend_found = false;
    for (std::size_t b = 0; b < bs.size(); ++b) {
      const double tol = 1e-9;
      if (t1 >= bs[b].t_lo - tol && t1 <= bs[b].t_hi + tol && t2 >= bs[b].t_lo - tol && t2 <= bs[b].t_hi + tol) {
        out.bend = static_cast<int>(b);
        out.bend_found = true;
        break;
      }
    }
    return out;
  }

  // case (ii): any arc of Lambda(Q) carrying half of beta_S together with gamma
  for (const Cand& k : cands) {
    if (!(k.b > 0.5 * v.beta_S)) continue;
    const Subarc& z = v.arcs[k.i];
    out.witness = z;
    out.has_witness = true;
    const double trunc = q.radius * std::sqrt(1.0 - 16.0 * p.eps3 * p.eps3);
    PointSet zp = arc_support(c, {z});
    for (Index m = 0; m < zp.cols(); ++m) {
      Point x = zp.col(m);
      if (dist_to_eta(x, q.center) >= tube || !(std::fabs(x(0) - q.center(0)) > trunc)) out.cap_ok = false;
    }
    out.psi = z.b > g.b ? Subarc{g.b, z.b} : Subarc{z.a, g.a};
    out.has_psi = out.psi.b > out.psi.a;
    break;
  }
  return out;
}

// Projection of the half-scaled core onto the first axis, merged.
std::vector<std::pair<double, double>> half_core_projection(const CoreSet& u, const Point& center) {
  std::vector<std::pair<double, double>> iv;
  for (Index i = 0; i < u.centers.cols(); ++i) {
    double x = center(0) + 0.5 * (u.centers(0, i) - center(0));
    double r = 0.5 * u.radii[i];
    iv.push_back({x - r, x + r});
  }
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<double, double>> out;
  for (auto& s : iv) {
    if (!out.empty() && s.first <= out.back().second)
      out.back().second = std::max(out.back().second, s.second);
    else
      out.push_back(s);
  }
  return out;
}

bool projections_meet(const std::vector<std::pair<double, double>>& a, const std::vector<std::pair<double, double>>& b) {
  for (auto& x : a)
    for (auto& y : b)
      if (std::min(x.second, y.second) > std::max(x.first, y.first)) return true;
  return false;
}

}  // namespace

Classification classify_all(const Curve& c, const std::vector<Ball>& balls, const std::vector<BetaValue>& betas,
                            const CoreSystems& cores, const ClassifierParams& p, int threads) {
  p.validate();
  if (betas.size() != balls.size()) throw Error(ErrorKind::DimensionMismatch, "one beta per ball required");
  Classification cl;
  cl.records.resize(balls.size());
  cl.bends = bends(c);
  cl.mu_tilde = mu_tilde(c, cl.bends);
  Diagnostics& dg = cl.diag;

  for (std::size_t i = 0; i < balls.size(); ++i) {
    cl.records[i].beta = betas[i].value;
    cl.records[i].contribution = betas[i].value * betas[i].value * balls[i].diam();
  }

  LargeSplit ls = split_large(balls, c, p.A);
  dg.large_floor_violations = ls.floor_violations;
  for (std::size_t k = 0; k < ls.large.size(); ++k) {
    FamilyLabel& l = cl.records[ls.large[k]].label;
    l.top = TopFamily::G_L;
    l.large_top = ls.large_top[k] != 0;
  }

  // top split and Delta split, per ball
  parallel_for(ls.rest.size(), threads, [&](std::size_t k) {
    std::size_t i = ls.rest[k];
    BallRecord& r = cl.records[i];
    BallView v0;
    r.g = classify_G_impl(balls[i], c, p, &betas[i], &v0);
    r.label.top = r.g.top;
    r.label.j = r.g.j;
    if (v0.gamma >= 0) r.gamma = v0.arcs[v0.gamma];
    if (r.g.top == TopFamily::G2) {
      r.d = classify_Delta_impl(v0, c, cores, p);
      r.label.delta = r.d.branch;
    }
  });
  for (std::size_t i : ls.rest)
    if (!cl.records[i].g.dichotomy_ok) ++dg.dichotomy_failures;

  // Delta_1 slices by beta(U^x) and radius class
  for (std::size_t i : ls.rest) {
    const BallRecord& r = cl.records[i];
    if (r.label.delta != DeltaBranch::D1 || !(r.d.beta_Ux > 0.0)) continue;
    int M = static_cast<int>(std::ceil(-std::log2(r.d.beta_Ux)));
    if (std::ldexp(1.0, -M) > r.d.beta_Ux) ++M;
    if (M < 1) M = 1;
    int period = M * p.J;
    int K = ((-balls[i].scale) % period + period) % period;
    ++dg.delta1_slices[{M, K}];
  }

  // Delta_2.1: core trees over the c0 system
  std::vector<std::size_t> d21;
  for (std::size_t i : ls.rest)
    if (cl.records[i].label.delta == DeltaBranch::D2_1) d21.push_back(i);
  std::vector<Ball> d21_balls;
  for (std::size_t i : d21) d21_balls.push_back(balls[i]);
  std::vector<CoreTree> trees = core_trees(d21_balls, cores.u);
  const double thresh = p.c_littlec * p.eps3 * p.eps3;
  std::vector<std::size_t> d212;
  for (const CoreTree& t : trees) {
    const Ball& root = d21_balls[t.root_ball()];
    const CoreSet& u = cores.u.core(root.scale, root.index);
    ExactSum m, len;
    for (const Subarc& s : clip_to_core(c, u)) {
      m.add(cl.mu_tilde.measure(s.a, s.b));
      len.add(s.length());
    }
    bool heavy = m.value() >= thresh * len.value();
    for (std::size_t node : t.nodes) {
      BallRecord& r = cl.records[d21[node]];
      r.core_mu_tilde = m.value();
      r.core_length = len.value();
      if (heavy)
        r.label.deep = DeepFamily::D2_1_1;
      else
        d212.push_back(d21[node]);
    }
  }
  std::sort(d212.begin(), d212.end());

  // Delta_2.1.2: case analysis
  std::vector<DeepCase> cases(d212.size());
  parallel_for(d212.size(), threads, [&](std::size_t k) {
    std::size_t i = d212[k];
    BallView v = view_impl(c, balls[i], 0, p.eps2, &betas[i]);
    cases[k] = analyse_deep(c, v, cl.bends, p);
  });

  std::vector<Subarc> psis;
  for (const DeepCase& dc : cases)
    if (!dc.case_i && dc.has_psi) psis.push_back(dc.psi);
  std::sort(psis.begin(), psis.end(), [](const Subarc& a, const Subarc& b) { return a.a < b.a; });
  for (const Subarc& s : psis) {
    if (!cl.arc_family.empty() && s.a <= cl.arc_family.back().b)
      cl.arc_family.back().b = std::max(cl.arc_family.back().b, s.b);
    else
      cl.arc_family.push_back(s);
  }
  cl.mu_star = augment_with_arcs(c, cl.arc_family);
  dg.arc_mass_min_ratio = std::numeric_limits<double>::infinity();
  for (const Subarc& d : cl.arc_family) {
    double ratio = cl.mu_tilde.measure(d.a, d.b) / d.length();
    dg.arc_mass_min_ratio = std::min(dg.arc_mass_min_ratio, ratio);
    if (ratio < 0.25) ++dg.arc_mass_violations;
  }
  if (cl.arc_family.empty()) dg.arc_mass_min_ratio = 0.0;

  for (std::size_t k = 0; k < d212.size(); ++k) {
    const DeepCase& dc = cases[k];
    std::size_t i = d212[k];
    BallRecord& r = cl.records[i];
    const Ball& q = balls[i];
    if (!dc.in_tube) ++dg.tube_violations;
    r.has_witness = dc.has_witness;
    if (dc.has_witness) r.witness = dc.witness;
    const double bd = r.beta * q.diam();
    if (dc.case_i) {
      if (!dc.bend_found) {
        ++dg.bend_lookup_failures;
        r.label.deep = DeepFamily::D2_1_2_i_f;
        continue;
      }
      const Bend& b = cl.bends[dc.bend];
      r.label.region_kind = RegionKind::Bend;
      r.label.region = dc.bend;
      bool close = interval_gap(q.center(0), b.pi_lo, b.pi_hi) <= 100.0 * b.length;
      r.label.deep = close ? DeepFamily::D2_1_2_i_c : DeepFamily::D2_1_2_i_f;
      if (close) dg.i_c_empty = false;
      dg.K_bend = std::max(dg.K_bend, bd / b.length);
      continue;
    }
    if (!dc.has_witness) ++dg.missing_witness;
    else if (!dc.cap_ok) ++dg.cap_violations;
    if (!dc.has_psi) {
      r.label.deep = DeepFamily::D2_1_2_ii_f;
      continue;
    }
    int idx = -1;
    for (std::size_t d = 0; d < cl.arc_family.size(); ++d)
      if (cl.arc_family[d].a <= dc.psi.a && dc.psi.b <= cl.arc_family[d].b) idx = static_cast<int>(d);
    if (idx < 0) throw Error(ErrorKind::Internal, "arc not covered by its component");
    const Subarc& d = cl.arc_family[idx];
    auto [lo, hi] = value_range(c, d.a, d.b);
    r.label.region_kind = RegionKind::Arc;
    r.label.region = idx;
    bool close = interval_gap(q.center(0), lo, hi) <= 100.0 * d.length();
    r.label.deep = close ? DeepFamily::D2_1_2_ii_c : DeepFamily::D2_1_2_ii_f;
    dg.K_arc = std::max(dg.K_arc, bd / d.length());
  }

  // far families and their growth
  std::map<std::tuple<int, int, int>, std::vector<std::pair<double, std::size_t>>> groups;
  for (std::size_t i : d212) {
    const FamilyLabel& l = cl.records[i].label;
    if ((l.deep != DeepFamily::D2_1_2_i_f && l.deep != DeepFamily::D2_1_2_ii_f) || l.region < 0) continue;
    double lo, hi;
    if (l.region_kind == RegionKind::Bend) {
      lo = cl.bends[l.region].pi_lo;
      hi = cl.bends[l.region].pi_hi;
    } else {
      std::tie(lo, hi) = value_range(c, cl.arc_family[l.region].a, cl.arc_family[l.region].b);
    }
    double x = balls[i].center(0);
    int side = x < lo ? -1 : 1;
    groups[{static_cast<int>(l.region_kind), l.region, side}].push_back({interval_gap(x, lo, hi), i});
  }
  for (auto& [key, v] : groups) {
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    FarFamily f;
    f.kind = static_cast<RegionKind>(std::get<0>(key));
    f.region = std::get<1>(key);
    f.side = std::get<2>(key);
    double growth = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < v.size(); ++k) {
      f.balls.push_back(v[k].second);
      if (k) {
        double prev = balls[v[k - 1].second].diam(), cur = balls[v[k].second].diam();
        if (!(cur > prev)) f.strictly_increasing = false;
        growth = std::min(growth, cur / prev - 1.0);
      }
    }
    f.min_growth = v.size() > 1 ? growth : 0.0;
    if (!f.strictly_increasing) dg.far_growth_ok = false;
    if (v.size() > 1) dg.far_min_growth = dg.far_min_growth < 0 ? f.min_growth : std::min(dg.far_min_growth, f.min_growth);
    dg.far_families.push_back(std::move(f));
  }

  // half-core projections of distinct D2_1_2 balls are disjoint
  std::vector<std::vector<std::pair<double, double>>> proj;
  for (std::size_t i : d212) proj.push_back(half_core_projection(cores.u.core(balls[i].scale, balls[i].index), balls[i].center));
  for (std::size_t a = 0; a < proj.size(); ++a)
    for (std::size_t b = a + 1; b < proj.size(); ++b) {
      ++dg.proj_pairs_checked;
      if (projections_meet(proj[a], proj[b])) ++dg.proj_overlaps;
    }
  return cl;
}

FamilySums family_sums(const Classification& cl) {
  FamilySums s;
  std::array<ExactSum, kLeafCount> acc;
  ExactSum total;
  for (const BallRecord& r : cl.records) {
    std::size_t k = static_cast<std::size_t>(r.label.leaf());
    acc[k].add(r.contribution);
    ++s.count[k];
    total.add(r.contribution);
  }
  for (std::size_t k = 0; k < kLeafCount; ++k) s.sum[k] = acc[k].value();
  s.total = total.value();
  s.balls = static_cast<Index>(cl.records.size());
  return s;
}

std::string ball_record_json(const Ball& q, const BallRecord& r) {
  JsonObject o;
  o.integer("n", q.scale).integer("k", q.index).str("label_path", r.label.path()).str("leaf", to_string(r.label.leaf()));
  o.num("beta", r.beta).num("contribution", r.contribution).num("radius", q.radius);
  o.integer("j", r.label.j);
  if (r.label.top != TopFamily::G_L) {
    o.nums("beta_j", {r.g.beta.begin(), r.g.beta.end()});
    o.nums("beta_tilde_gamma_j", {r.g.beta_tilde_gamma.begin(), r.g.beta_tilde_gamma.end()});
    o.nums("beta_S_j", {r.g.beta_S.begin(), r.g.beta_S.end()});
    o.nums("gamma", {r.gamma.a, r.gamma.b});
  }
  if (r.label.top == TopFamily::G2) o.num("beta_S_Ux", r.d.beta_S_Ux).num("beta_Ux", r.d.beta_Ux);
  if (r.label.delta == DeltaBranch::D2_1) o.num("core_mu_tilde", r.core_mu_tilde).num("core_length", r.core_length);
  if (r.has_witness) o.nums("witness", {r.witness.a, r.witness.b});
  o.str("assigned_region_id", region_id(r.label.region_kind, r.label.region));
  return o.done();
}

std::string diagnostics_json(const Diagnostics& d) {
  std::vector<std::string> slices;
  for (const auto& [mk, n] : d.delta1_slices)
    slices.push_back(JsonObject().integer("M", mk.first).integer("K", mk.second).integer("count", n).done());
  std::vector<std::string> fams;
  for (const FarFamily& f : d.far_families) {
    fams.push_back(JsonObject()
                       .str("region", region_id(f.kind, f.region))
                       .integer("side", f.side)
                       .integer("size", static_cast<std::int64_t>(f.balls.size()))
                       .boolean("strictly_increasing", f.strictly_increasing)
                       .num("min_growth", f.min_growth)
                       .done());
  }
  return JsonObject()
      .integer("dichotomy_failures", d.dichotomy_failures)
      .integer("large_floor_violations", d.large_floor_violations)
      .integer("tube_violations", d.tube_violations)
      .integer("cap_violations", d.cap_violations)
      .integer("missing_witness", d.missing_witness)
      .integer("bend_lookup_failures", d.bend_lookup_failures)
      .integer("arc_mass_violations", d.arc_mass_violations)
      .num("arc_mass_min_ratio", d.arc_mass_min_ratio)
      .integer("proj_pairs_checked", d.proj_pairs_checked)
      .integer("proj_overlaps", d.proj_overlaps)
      .boolean("i_c_empty", d.i_c_empty)
      .num("K_bend", d.K_bend)
      .num("K_arc", d.K_arc)
      .raw("delta1_slices", json_array(slices))
      .raw("far_families", json_array(fams))
      .boolean("far_growth_ok", d.far_growth_ok)
      .num("far_min_growth", d.far_min_growth)
      .done();
}

std::string family_sums_json(const FamilySums& s) {
  JsonObject sums, counts;
  for (std::size_t k = 0; k < kLeafCount; ++k) {
    sums.num(to_string(static_cast<Leaf>(k)), s.sum[k]);
    counts.integer(to_string(static_cast<Leaf>(k)), s.count[k]);
  }
  return JsonObject().num("total", s.total).integer("balls", s.balls).raw("sums", sums.done()).raw("counts", counts.done()).done();
}

}  // namespace atst
