#include "atst/nets.hpp"

#include "atst/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace atst {

NetHierarchy::NetHierarchy(std::vector<double> params, PointSet points, double spacing,
                           std::vector<NetLevel> levels)
    : params_(std::move(params)), points_(std::move(points)), spacing_(spacing), levels_(std::move(levels)) {
  if (levels_.empty()) throw Error(ErrorKind::InvalidArgument, "net hierarchy without levels");
}

const NetLevel& NetHierarchy::level(int n) const {
  if (!has_level(n)) throw Error(ErrorKind::MissingEntry, "missing net level " + std::to_string(n));
  return levels_[static_cast<std::size_t>(n - n0())];
}

PointSet NetHierarchy::level_points(int n) const {
  const NetLevel& L = level(n);
  PointSet out(points_.rows(), static_cast<Index>(L.samples.size()));
  for (std::size_t k = 0; k < L.samples.size(); ++k) out.col(static_cast<Index>(k)) = points_.col(L.samples[k]);
  return out;
}

std::vector<double> NetHierarchy::level_params(int n) const {
  const NetLevel& L = level(n);
  std::vector<double> out;
  out.reserve(L.samples.size());
  for (Index s : L.samples) out.push_back(params_[s]);
  return out;
}

std::pair<std::vector<double>, PointSet> dense_sample(const Curve& c, double spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorKind::InvalidArgument, "sample spacing must be positive");
  const double L = c.length();
  std::vector<double> t;
  for (Index i = 0;; ++i) {
    double ti = static_cast<double>(i) * spacing;
    if (ti >= L) break;
    t.push_back(ti);
  }
  t.push_back(L);
  PointSet p(c.dim(), static_cast<Index>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) p.col(static_cast<Index>(i)) = c.point_at(t[i]);
  return {std::move(t), std::move(p)};
}

namespace {

// Largest distance to the net along the straight piece a + s*d, s in [0, len].
// Candidates are the only net points that can be nearest somewhere on it.
std::pair<double, double> piece_max(const Point& a, const Point& d, double len, const std::vector<Point>& cand) {
  auto f = [&](double s) {
    Point y = a + s * d;
    double best = std::numeric_limits<double>::infinity();
    for (const Point& x : cand) best = std::min(best, (y - x).squaredNorm());
    return best;
  };
  double best_s = 0.0, best_f = f(0.0);
  auto consider = [&](double s) {
    if (!(s > 0.0 && s < len)) return;
    double v = f(s);
    if (v > best_f) best_f = v, best_s = s;
  };
  if (f(len) > best_f) best_f = f(len), best_s = len;
  for (std::size_t j = 0; j < cand.size(); ++j) {
    Point aj = cand[j] - a;
    for (std::size_t k = j + 1; k < cand.size(); ++k) {
      Point ak = cand[k] - a;
      double den = 2.0 * d.dot(ak - aj);
      if (den == 0.0) continue;
      consider((ak.squaredNorm() - aj.squaredNorm()) / den);
    }
  }
  return {best_s, std::sqrt(best_f)};
}

}  // namespace

NetHierarchy build_nets(const Curve& c, int n0, int n_max, double spacing) {
  if (n0 > n_max) throw Error(ErrorKind::InvalidArgument, "n0 > n_max");
  if (!(spacing > 0.0) || spacing > std::ldexp(1.0, -n_max) / 8.0)
    throw Error(ErrorKind::InvalidArgument, "sample spacing too coarse: need <= 2^-n_max/8");
  auto [t, p] = dense_sample(c, spacing);
  KdTree tree(p);
  const Index S = p.cols();

  // Net points that are not grid samples get ids S, S+1, ...
  std::vector<double> extra_t;
  std::vector<Point> extra_p;
  auto pt = [&](Index id) -> Point { return id < S ? Point(p.col(id)) : extra_p[static_cast<std::size_t>(id - S)]; };

  // Breakpoints of the sample polyline refined by the curve's vertices.
  std::vector<double> brk(t.begin(), t.end());
  for (Index v = 1; v + 1 < c.num_vertices(); ++v) brk.push_back(c.param_of_vertex(v));
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end()), brk.end());

  std::vector<NetLevel> levels;
  std::vector<char> covered(static_cast<std::size_t>(S));
  std::vector<Index> chosen;
  for (int n = n0; n <= n_max; ++n) {
    const double eps = std::ldexp(1.0, -n);
    const double eps2 = eps * eps;
    std::fill(covered.begin(), covered.end(), 0);
    auto mark = [&](Index id) {
      for (Index j : tree.radius_search(pt(id), eps2, true)) covered[j] = 1;
    };
    for (Index s : chosen) mark(s);
    for (Index s = 0; s < S; ++s) {
      if (covered[s]) continue;
      chosen.push_back(s);
      mark(s);
    }

    // The greedy pass only covers the samples. Between samples the distance to
    // the net can still exceed 2^-n; add the farthest curve point until it does not.
    PointSet np(c.dim(), static_cast<Index>(chosen.size()));
    for (std::size_t k = 0; k < chosen.size(); ++k) np.col(static_cast<Index>(k)) = pt(chosen[k]);
    KdTree ntree(np);
    std::vector<Point> fresh;
    auto dist = [&](const Point& y) {
      double d2 = ntree.nearest(y).second;
      for (const Point& x : fresh) d2 = std::min(d2, (y - x).squaredNorm());
      return std::sqrt(d2);
    };
    double fa = dist(c.point_at(brk[0]));
    for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
      const double ta = brk[i], tb = brk[i + 1];
      const Point a = c.point_at(ta), b = c.point_at(tb);
      const double len = (b - a).norm();
      double fb = dist(b);
      for (int guard = 0; guard < 8 && len > 0.0 && (fa + fb + len) / 2.0 > eps; ++guard) {
        const Point mid = 0.5 * (a + b);
        const double reach = (fa + fb + len) / 2.0 + len / 2.0;
        std::vector<Point> cand;
        for (Index j : ntree.radius_search(mid, reach * reach, true)) cand.push_back(np.col(j));
        for (const Point& x : fresh)
          if ((x - mid).norm() <= reach) cand.push_back(x);
        if (cand.empty()) break;
        auto [s, fmax] = piece_max(a, (b - a) / len, len, cand);
        if (!(fmax > eps)) break;
        const double ty = std::min(tb, ta + s * (tb - ta) / len);
        const Point y = c.point_at(ty);
        if (!(dist(y) > eps)) break;
        const Index id = S + static_cast<Index>(extra_t.size());
        extra_t.push_back(ty);
        extra_p.push_back(y);
        fresh.push_back(y);
        chosen.push_back(id);
        fa = dist(a);
        fb = dist(b);
      }
      fa = fb;
    }
    levels.push_back({n, chosen});
  }

  // Merge the extra points into the sample, keeping it ordered by parameter.
  if (!extra_t.empty()) {
    const Index E = static_cast<Index>(extra_t.size());
    std::vector<double> all(t);
    all.insert(all.end(), extra_t.begin(), extra_t.end());
    std::vector<Index> order(static_cast<std::size_t>(S + E));
    for (Index i = 0; i < S + E; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return all[x] < all[y]; });
    std::vector<Index> where(order.size());
    std::vector<double> t2(order.size());
    PointSet p2(c.dim(), S + E);
    for (std::size_t k = 0; k < order.size(); ++k) {
      where[static_cast<std::size_t>(order[k])] = static_cast<Index>(k);
      t2[k] = all[static_cast<std::size_t>(order[k])];
      p2.col(static_cast<Index>(k)) = pt(order[k]);
    }
    for (NetLevel& L : levels)
      for (Index& s : L.samples) s = where[static_cast<std::size_t>(s)];
    t = std::move(t2);
    p = std::move(p2);
  }

  NetHierarchy nets(std::move(t), std::move(p), spacing, std::move(levels));
  NetCheck chk = check_nets(nets);
  if (!chk.covering)
    throw Error(ErrorKind::CoveringViolation, "covering violated at level " + std::to_string(chk.bad_level));
  if (!chk.ok()) throw Error(ErrorKind::Internal, "net construction produced an invalid net");
  return nets;
}

int default_n0(const Curve& c, double A) {
  double d = diameter(c);
  return static_cast<int>(std::floor(std::log2(A / d)));
}

NetCheck check_nets(const NetHierarchy& nets) {
  NetCheck out;
  const PointSet& samples = nets.sample_points();
  const NetLevel* prev = nullptr;
  for (const NetLevel& L : nets.levels()) {
    const double eps = std::ldexp(1.0, -L.n);
    const double eps2 = eps * eps;
    PointSet pts = nets.level_points(L.n);
    KdTree tree(pts);
    for (Index k = 0; k < pts.cols() && out.separated; ++k) {
      for (Index j : tree.radius_search(pts.col(k), eps2, true)) {
        if (j != k) {
          out.separated = false;
          out.bad_level = L.n;
          out.bad_i = std::min(j, k);
          out.bad_j = std::max(j, k);
          break;
        }
      }
    }
    double worst = 0.0;
    for (Index s = 0; s < samples.cols(); ++s) {
      double d2 = tree.nearest(samples.col(s)).second;
      worst = std::max(worst, d2);
      if (d2 > eps2 && out.covering) {
        out.covering = false;
        out.bad_level = L.n;
        out.bad_i = s;
      }
    }
    out.worst_cover = std::max(out.worst_cover, std::sqrt(worst) / eps);
    if (prev) {
      std::vector<Index> a = prev->samples, b = L.samples;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (!std::includes(b.begin(), b.end(), a.begin(), a.end()) && out.nested) {
        out.nested = false;
        out.bad_level = L.n;
      }
    }
    prev = &L;
  }
  return out;
}

std::string nets_to_json(const NetHierarchy& nets) {
  std::string out;
  for (const NetLevel& L : nets.levels()) {
    std::vector<std::string> rows;
    for (Index s : L.samples) {
      std::vector<std::string> row{fmt_num(nets.sample_params()[s])};
      for (Index k = 0; k < nets.sample_points().rows(); ++k) row.push_back(fmt_num(nets.sample_points()(k, s)));
      rows.push_back(json_array(row));
    }
    out += JsonObject().integer("n", L.n).raw("points", json_array(rows)).done() + "\n";
  }
  return out;
}

std::vector<Ball> multiresolution_family(const NetHierarchy& nets, double A) {
  if (!(A > 1.0)) throw Error(ErrorKind::InvalidArgument, "A must exceed 1");
  std::vector<Ball> out;
  for (const NetLevel& L : nets.levels()) {
    double r = scale_radius(A, L.n);
    for (std::size_t k = 0; k < L.samples.size(); ++k) {
      Index s = L.samples[k];
      out.push_back({L.n, static_cast<Index>(k), nets.sample_points().col(s), nets.sample_params()[s], r});
    }
  }
  return out;
}

}  // namespace atst
