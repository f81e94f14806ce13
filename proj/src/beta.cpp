#include "atst/beta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <map>
#include <mutex>
#include <optional>
#include <random>

namespace atst {

const char* to_string(FitMethod m) {
  switch (m) {
    case FitMethod::Trivial: return "trivial";
    case FitMethod::Exact2d: return "exact2d";
    case FitMethod::Optimized: return "optimized";
    case FitMethod::SampledOracle: return "sampled-oracle";
  }
  return "unknown";
}

PointSet clip_points(const Curve& c, const Point& center, double radius) {
  return arc_support(c, maximal_subarcs(c, center, radius));
}

Index distinct_count(const PointSet& pts, Index stop_at) {
  std::vector<Index> reps;
  for (Index i = 0; i < pts.cols(); ++i) {
    bool seen = false;
    for (Index r : reps)
      if (pts.col(r) == pts.col(i)) {
        seen = true;
        break;
      }
    if (!seen) {
      reps.push_back(i);
      if (static_cast<Index>(reps.size()) >= stop_at) break;
    }
  }
  return static_cast<Index>(reps.size());
}

double max_dist_to_line(const PointSet& pts, const Point& anchor, const Point& dir) {
  double best = 0.0;
  for (Index i = 0; i < pts.cols(); ++i) {
    Point w = pts.col(i) - anchor;
    best = std::max(best, (w - w.dot(dir) * dir).squaredNorm());
  }
  return std::sqrt(best);
}

namespace {

using V2 = Eigen::Vector2d;

double cross(const V2& a, const V2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Andrew's monotone chain, counter-clockwise, collinear points dropped.
std::vector<V2> convex_hull(std::vector<V2> p) {
  std::sort(p.begin(), p.end(), [](const V2& a, const V2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() <= 2) return p;
  std::vector<V2> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

std::vector<V2> as_2d(const PointSet& pts) {
  std::vector<V2> out(static_cast<std::size_t>(pts.cols()));
  for (Index i = 0; i < pts.cols(); ++i) out[i] = V2(pts(0, i), pts(1, i));
  return out;
}

LineFit through_two(const PointSet& pts) {
  LineFit f;
  f.method = FitMethod::Trivial;
  f.anchor = pts.col(0);
  f.direction = Point::Zero(pts.rows());
  f.direction(0) = 1.0;
  for (Index i = 1; i < pts.cols(); ++i) {
    Point d = pts.col(i) - pts.col(0);
    if (d.squaredNorm() > 0.0) {
      f.direction = d.normalized();
      break;
    }
  }
  f.max_dist = 0.0;
  return f;
}

LineFit fit_exact_2d(const PointSet& pts) {
  std::vector<V2> h = convex_hull(as_2d(pts));
  LineFit f;
  f.method = FitMethod::Exact2d;
  if (h.size() <= 2) {
    f.anchor = Point(h[0]);
    V2 d = h.size() == 2 ? V2((h[1] - h[0]).normalized()) : V2(1, 0);
    f.direction = Point(d);
    f.max_dist = max_dist_to_line(pts, f.anchor, f.direction);
    return f;
  }
  const std::size_t n = h.size();
  std::size_t j = 1, best_i = 0;
  double best_w = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    V2 e = h[(i + 1) % n] - h[i];
    while (cross(e, h[(j + 1) % n] - h[i]) > cross(e, h[j] - h[i])) j = (j + 1) % n;
    double w = cross(e, h[j] - h[i]) / e.norm();
    if (w < best_w) {
      best_w = w;
      best_i = i;
    }
  }
  V2 e = (h[(best_i + 1) % n] - h[best_i]).normalized();
  V2 nrm(-e.y(), e.x());
  f.direction = Point(e);
  f.anchor = Point(V2(h[best_i] + 0.5 * best_w * nrm));
  f.max_dist = max_dist_to_line(pts, f.anchor, f.direction);
  return f;
}

// Orthonormal basis of the complement of unit u, as columns.
Eigen::MatrixXd complement_basis(const Point& u) {
  const Index d = u.size();
  Point v = u;
  double s = u(0) >= 0 ? 1.0 : -1.0;
  v(0) += s;  // reflection sending u to -s e1
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(d, d) - (2.0 / v.squaredNorm()) * v * v.transpose();
  return H.rightCols(d - 1);
}

struct Sphere {
  Point c;
  double r2 = -1.0;
};

Sphere circumsphere(const PointSet& p, const std::vector<Index>& B) {
  Sphere s;
  if (B.empty()) return s;
  const Point p0 = p.col(B[0]);
  if (B.size() == 1) {
    s.c = p0;
    s.r2 = 0.0;
    return s;
  }
  const Index m = static_cast<Index>(B.size()) - 1;
  Eigen::MatrixXd Q(p.rows(), m);
  for (Index i = 0; i < m; ++i) Q.col(i) = p.col(B[i + 1]) - p0;
  Eigen::MatrixXd G = Q.transpose() * Q;
  Eigen::VectorXd rhs = 0.5 * G.diagonal();
  Eigen::VectorXd lam = G.completeOrthogonalDecomposition().solve(rhs);
  s.c = p0 + Q * lam;
  s.r2 = 0.0;
  for (Index b : B) s.r2 = std::max(s.r2, (p.col(b) - s.c).squaredNorm());
  return s;
}

bool inside(const Sphere& s, const PointSet& p, Index i) {
  if (s.r2 < 0) return false;
  return (p.col(i) - s.c).squaredNorm() <= s.r2 * (1.0 + 1e-12) + 1e-300;
}

Sphere mtf(const PointSet& p, std::list<Index>& L, std::list<Index>::iterator end, std::vector<Index>& B) {
  Sphere s = circumsphere(p, B);
  if (static_cast<Index>(B.size()) == p.rows() + 1) return s;
  for (auto it = L.begin(); it != end;) {
    auto cur = it++;
    if (!inside(s, p, *cur)) {
      B.push_back(*cur);
      s = mtf(p, L, cur, B);
      B.pop_back();
      L.splice(L.begin(), L, cur);
    }
  }
  return s;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct DirectionGrid {
  Eigen::MatrixXd dirs;  // unit columns, one per antipodal pair
  double covering = 0.0; // chord covering radius (estimated)
};

const DirectionGrid& direction_grid(Index d) {
  static std::mutex mu;
  static std::map<Index, DirectionGrid> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(d);
  if (it != cache.end()) return it->second;
  DirectionGrid g;
  const Index N = 384;
  g.dirs.resize(d, N);
  if (d == 3) {
    // Fibonacci points on the upper hemisphere
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (Index i = 0; i < N; ++i) {
      double z = 1.0 - (i + 0.5) / N;
      double r = std::sqrt(1.0 - z * z);
      g.dirs.col(i) << r * std::cos(golden * i), r * std::sin(golden * i), z;
    }
  } else {
    std::mt19937_64 rng(12345 + d);
    std::normal_distribution<double> nd;
    for (Index i = 0; i < N; ++i) {
      Point v(d);
      for (Index k = 0; k < d; ++k) v(k) = nd(rng);
      g.dirs.col(i) = v.normalized();
    }
  }
  std::mt19937_64 rng(999 + d);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 4000; ++t) {
    Point v(d);
    for (Index k = 0; k < d; ++k) v(k) = nd(rng);
    v.normalize();
    Eigen::VectorXd dots = (g.dirs.transpose() * v).cwiseAbs();
    double c = std::sqrt(std::max(0.0, 2.0 - 2.0 * dots.maxCoeff()));
    g.covering = std::max(g.covering, c);
  }
  g.covering *= 1.1;
  return cache.emplace(d, std::move(g)).first->second;
}

// Enclosing radius of the projection onto the plane orthogonal to u, d = 3 only.
// Iterative Welzl over a fixed shuffled order; no allocation per call.
class PlaneRadius3 {
 public:
  PlaneRadius3(const PointSet& pts, std::uint64_t seed) : p_(static_cast<std::size_t>(pts.cols())), q_(p_.size()) {
    std::vector<Index> order(p_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Index>(i);
    std::shuffle(order.begin(), order.end(), std::mt19937_64(seed));
    for (std::size_t i = 0; i < p_.size(); ++i) p_[i] = pts.col(order[i]);
  }

  double operator()(const Point& dir) const {
    Eigen::Vector3d u = Eigen::Vector3d(dir).normalized();
    Eigen::Vector3d a = std::fabs(u.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    Eigen::Vector3d b1 = (a - a.dot(u) * u).normalized();
    Eigen::Vector3d b2 = u.cross(b1);
    for (std::size_t i = 0; i < p_.size(); ++i) q_[i] = {b1.dot(p_[i]), b2.dot(p_[i])};
    return std::sqrt(circle_r2());
  }

 private:
  using V = Eigen::Vector2d;
  static bool out(const V& c, double r2, const V& x) { return (x - c).squaredNorm() > r2 * (1.0 + 1e-12) + 1e-300; }

  static void circum(const V& a, const V& b, const V& e, V& c, double& r2) {
    V ab = b - a, ae = e - a;
    double den = 2.0 * (ab.x() * ae.y() - ab.y() * ae.x());
    double scale = ab.squaredNorm() * ae.squaredNorm();
    if (den * den <= 1e-24 * scale) {  // collinear: widest pair
      const V* pr[3][2] = {{&a, &b}, {&a, &e}, {&b, &e}};
      r2 = -1.0;
      for (auto& pq : pr) {
        double w = (*pq[0] - *pq[1]).squaredNorm() / 4.0;
        if (w > r2) {
          r2 = w;
          c = 0.5 * (*pq[0] + *pq[1]);
        }
      }
      return;
    }
    double ux = (ae.y() * ab.squaredNorm() - ab.y() * ae.squaredNorm()) / den;
    double uy = (ab.x() * ae.squaredNorm() - ae.x() * ab.squaredNorm()) / den;
    c = a + V(ux, uy);
    r2 = std::max({(a - c).squaredNorm(), (b - c).squaredNorm(), (e - c).squaredNorm()});
  }

  double circle_r2() const {
    const std::size_t n = q_.size();
    V c = q_[0];
    double r2 = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      if (!out(c, r2, q_[i])) continue;
      c = q_[i];
      r2 = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        if (!out(c, r2, q_[j])) continue;
        c = 0.5 * (q_[i] + q_[j]);
        r2 = (q_[i] - c).squaredNorm();
        for (std::size_t k = 0; k < j; ++k)
          if (out(c, r2, q_[k])) circum(q_[i], q_[j], q_[k], c, r2);
      }
    }
    double m = 0.0;
    for (const V& x : q_) m = std::max(m, (x - c).squaredNorm());
    return m;
  }

  std::vector<Eigen::Vector3d> p_;
  mutable std::vector<V> q_;
};

LineFit fit_optimized(const PointSet& pts, double tol, std::uint64_t seed) {
  const Index d = pts.rows();
  std::mt19937_64 rng(splitmix(seed));
  std::normal_distribution<double> nd;
  std::optional<PlaneRadius3> plane3;
  if (d == 3) plane3.emplace(pts, splitmix(seed ^ 0x5bd1e995ULL));
  auto F = [&](const Point& u) { return plane3 ? (*plane3)(u) : fixed_direction_radius(pts, u); };

  Point centroid = pts.rowwise().mean();
  double R = 0.0;
  for (Index i = 0; i < pts.cols(); ++i) R = std::max(R, (pts.col(i) - centroid).norm());

  std::vector<Point> starts;
  {
    Eigen::MatrixXd C = pts.colwise() - centroid;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C * C.transpose());
    starts.push_back(es.eigenvectors().col(d - 1));
  }
  Point chord = pts.col(pts.cols() - 1) - pts.col(0);
  if (chord.norm() > 0) starts.push_back(chord.normalized());
  for (int i = 0; i < 8; ++i) {
    Point v(d);
    for (Index k = 0; k < d; ++k) v(k) = nd(rng);
    starts.push_back(v.normalized());
  }
  const DirectionGrid& grid = direction_grid(d);
  std::vector<std::pair<double, Index>> gvals;
  gvals.reserve(static_cast<std::size_t>(grid.dirs.cols()));
  for (Index i = 0; i < grid.dirs.cols(); ++i) gvals.push_back({F(grid.dirs.col(i)), i});
  std::sort(gvals.begin(), gvals.end());
  for (int i = 0; i < 3 && i < static_cast<int>(gvals.size()); ++i) starts.push_back(grid.dirs.col(gvals[i].second));
  {
    // directions through pairs of points, on a thinned copy
    const Index N = pts.cols();
    const Index stride = std::max<Index>(1, N / 40);
    std::vector<std::pair<double, Point>> pvals;
    for (Index i = 0; i < N; i += stride)
      for (Index j = i + stride; j < N; j += stride) {
        Point v = pts.col(j) - pts.col(i);
        if (v.norm() > 0) pvals.push_back({F(v.normalized()), v.normalized()});
      }
    std::stable_sort(pvals.begin(), pvals.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < 3 && i < pvals.size(); ++i) starts.push_back(pvals[i].second);
  }

  const double min_step = std::max(1e-9, std::min(1e-6, tol));
  auto refine = [&](Point& u, double& f, double& step, double stop, int max_iter) {
    for (int iter = 0; iter < max_iter && step > stop; ++iter) {
      Eigen::MatrixXd B = complement_basis(u);
      Eigen::MatrixXd G(d - 1, d - 1);
      for (Index r = 0; r < d - 1; ++r)
        for (Index k = 0; k < d - 1; ++k) G(r, k) = nd(rng);
      Eigen::MatrixXd Rot = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
      B = B * Rot;
      bool improved = false;
      for (Index k = 0; k < d - 1 && !improved; ++k)
        for (double sgn : {1.0, -1.0}) {
          Point v = (u + sgn * step * B.col(k)).normalized();
          double fv = F(v);
          if (fv < f) {
            u = v;
            f = fv;
            improved = true;
            break;
          }
        }
      step *= improved ? 1.5 : 0.5;
    }
  };

  // coarse pass from every start, then full refinement of the three best
  struct Run {
    Point u;
    double f, step;
  };
  std::vector<Run> runs;
  for (const Point& u0 : starts) {
    Run r{u0, F(u0), 0.25};
    refine(r.u, r.f, r.step, 1e-3, 120);
    runs.push_back(r);
  }
  std::stable_sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) { return a.f < b.f; });
  Point best_u = runs.front().u;
  double best_f = runs.front().f;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, runs.size()); ++i) {
    Run& r = runs[i];
    r.step = std::max(r.step, 1e-3);
    refine(r.u, r.f, r.step, min_step, 600);
    if (r.f < best_f) {
      best_f = r.f;
      best_u = r.u;
    }
  }
  LineFit fit;
  fit.method = FitMethod::Optimized;
  fit.direction = best_u;
  fixed_direction_radius(pts, best_u, &fit.anchor);
  fit.max_dist = max_dist_to_line(pts, fit.anchor, fit.direction);
  double lower = gvals.front().first - 2.0 * R * grid.covering;
  fit.certified_gap = std::max(0.0, fit.max_dist - std::max(0.0, lower));
  return fit;
}

}  // namespace

std::pair<Point, double> min_enclosing_ball(const PointSet& pts) {
  if (pts.cols() == 0) return {Point::Zero(pts.rows()), 0.0};
  std::list<Index> L;
  for (Index i = 0; i < pts.cols(); ++i) L.push_back(i);
  std::vector<Index> B;
  Sphere s = mtf(pts, L, L.end(), B);
  double r2 = 0.0;
  for (Index i = 0; i < pts.cols(); ++i) r2 = std::max(r2, (pts.col(i) - s.c).squaredNorm());
  return {s.c, std::sqrt(r2)};
}

double fixed_direction_radius(const PointSet& pts, const Point& dir, Point* anchor) {
  Eigen::MatrixXd B = complement_basis(dir);
  PointSet y = B.transpose() * pts;
  auto [c, r] = min_enclosing_ball(y);
  if (anchor) *anchor = B * c;
  return r;
}

LineFit fit_line(const PointSet& pts, double tol, std::uint64_t seed) {
  if (pts.cols() == 0) throw Error(ErrorKind::EmptyIntersection, "line fit of an empty point set");
  if (pts.rows() == 1 || distinct_count(pts, 3) <= 2) return through_two(pts);
  if (pts.rows() == 2) return fit_exact_2d(pts);
  return fit_optimized(pts, tol, seed);
}

BetaValue beta_of_points(const PointSet& pts, double radius, double tol, std::uint64_t seed) {
  BetaValue b;
  b.radius = radius;
  b.point_count = pts.cols();
  if (pts.cols() == 0) {
    b.empty = true;
    b.fit.direction = Point::Zero(pts.rows());
    b.fit.anchor = Point::Zero(pts.rows());
    return b;
  }
  b.fit = fit_line(pts, tol, seed);
  b.value = b.fit.max_dist / radius;
  return b;
}

namespace {
std::uint64_t ball_seed(const Ball& q) {
  return splitmix((static_cast<std::uint64_t>(q.scale + 4096) << 40) ^ static_cast<std::uint64_t>(q.index));
}
}  // namespace

BetaValue beta_ball(const Curve& c, const Ball& q, double tol) {
  PointSet pts = clip_points(c, q);
  if (pts.cols() == 0) throw Error(ErrorKind::EmptyIntersection, "ball misses the curve");
  BetaValue b = beta_of_points(pts, q.radius, tol, ball_seed(q));
  b.scale = q.scale;
  b.index = q.index;
  return b;
}

BetaValue beta_restricted(const Curve& c, const Ball& q, const std::vector<Subarc>& arcs, double tol) {
  BetaValue b = beta_of_points(arc_support(c, arcs), q.radius, tol, ball_seed(q) ^ 0x5bd1e995ULL);
  b.scale = q.scale;
  b.index = q.index;
  return b;
}

double point_set_diameter(const PointSet& pts) {
  double best = 0.0;
  if (pts.rows() == 2) {
    std::vector<V2> h = convex_hull(as_2d(pts));
    for (std::size_t i = 0; i < h.size(); ++i)
      for (std::size_t j = i + 1; j < h.size(); ++j) best = std::max(best, (h[i] - h[j]).squaredNorm());
    return std::sqrt(best);
  }
  for (Index i = 0; i < pts.cols(); ++i)
    for (Index j = i + 1; j < pts.cols(); ++j) best = std::max(best, (pts.col(i) - pts.col(j)).squaredNorm());
  return std::sqrt(best);
}

double beta_tilde(const Curve& c, const Subarc& s) {
  PointSet pts = arc_support(c, {s});
  if (pts.cols() < 2) return 0.0;
  Point p = pts.col(0), q = pts.col(pts.cols() - 1);
  double sup = 0.0;
  for (Index i = 1; i + 1 < pts.cols(); ++i) sup = std::max(sup, dist_to_segment(pts.col(i), p, q));
  double diam = point_set_diameter(pts);
  if (!(diam > 0.0) || sup <= 1e-12 * diam) return 0.0;
  return sup / diam;
}

FlatSplit partition_flat(const Curve& c, const std::vector<Subarc>& arcs, double eps2, double beta) {
  FlatSplit out;
  const double thr = eps2 * beta;
  for (const Subarc& s : arcs) {
    double bt = beta_tilde(c, s);
    if (bt <= thr) {
      out.flat.push_back(s);
      out.flat_beta_tilde.push_back(bt);
    } else {
      out.rest.push_back(s);
      out.rest_beta_tilde.push_back(bt);
    }
  }
  return out;
}

FlatSplit almost_flat_set(const Curve& c, const Ball& q, double eps2, const BetaValue& beta) {
  return partition_flat(c, maximal_subarcs(c, q.center, q.radius), eps2, beta.value);
}

LineFit fit_line_sampled(const PointSet& pts, int n_dirs, bool refine) {
  if (pts.cols() == 0) throw Error(ErrorKind::EmptyIntersection, "line fit of an empty point set");
  const Index d = pts.rows();
  if (d == 1) return through_two(pts);
  std::vector<Point> dirs;
  if (d == 2) {
    for (int k = 0; k < n_dirs; ++k) {
      double a = M_PI * k / n_dirs;
      dirs.push_back((Point(2) << std::cos(a), std::sin(a)).finished());
    }
    for (Index i = 0; i < pts.cols(); ++i)
      for (Index j = i + 1; j < pts.cols(); ++j) {
        Point v = pts.col(j) - pts.col(i);
        if (v.norm() > 0) dirs.push_back(v.normalized());
      }
  } else if (d == 3) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n_dirs; ++i) {
      double z = 1.0 - (i + 0.5) / n_dirs;
      double r = std::sqrt(1.0 - z * z);
      dirs.push_back((Point(3) << r * std::cos(golden * i), r * std::sin(golden * i), z).finished());
    }
  } else {
    std::mt19937_64 rng(4242 + d);
    std::normal_distribution<double> nd;
    for (int i = 0; i < n_dirs; ++i) {
      Point v(d);
      for (Index k = 0; k < d; ++k) v(k) = nd(rng);
      dirs.push_back(v.normalized());
    }
  }
  if (d >= 3) {
    // Pair directions on a thinned copy when the set is large.
    const Index N = pts.cols();
    const Index stride = std::max<Index>(1, N / 150);
    for (Index i = 0; i < N; i += stride)
      for (Index j = i + stride; j < N; j += stride) {
        Point v = pts.col(j) - pts.col(i);
        if (v.norm() > 0) dirs.push_back(v.normalized());
      }
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(dirs.size());
  for (std::size_t k = 0; k < dirs.size(); ++k) scored.push_back({fixed_direction_radius(pts, dirs[k], nullptr), k});
  std::stable_sort(scored.begin(), scored.end());

  LineFit fit;
  fit.method = FitMethod::SampledOracle;
  fit.max_dist = scored.front().first;
  fit.direction = dirs[scored.front().second];
  if (d >= 3 && refine) {
    // Pattern search around the best few directions: the 8 neighbours on a
    // square of the tangent plane (pairs of axes above 3D), halving on failure.
    const double step0 = std::sqrt(4.0 * M_PI / std::max(n_dirs, 1));
    for (std::size_t k = 0; k < std::min<std::size_t>(3, scored.size()); ++k) {
      Point u = dirs[scored[k].second];
      double f = scored[k].first;
      double step = step0;
      for (int it = 0; it < 200 && step > 1e-9; ++it) {
        const Eigen::MatrixXd Q = complement_basis(u);
        bool moved = false;
        for (Index a = 0; a + 1 < d && !moved; ++a)
          for (Index b = std::min<Index>(a + 1, d - 2); b + 1 < d && !moved; ++b)
            for (int sa = -1; sa <= 1 && !moved; ++sa)
              for (int sb = -1; sb <= 1; ++sb) {
                if ((sa == 0 && sb == 0) || (a == b && sb != 0)) continue;
                Point v = (u + step * (sa * Q.col(a) + sb * Q.col(b))).normalized();
                double g = fixed_direction_radius(pts, v, nullptr);
                if (g < f) {
                  f = g, u = v, moved = true;
                  break;
                }
              }
        step *= moved ? 1.5 : 0.5;
      }
      if (f < fit.max_dist) fit.max_dist = f, fit.direction = u;
    }
  }
  fixed_direction_radius(pts, fit.direction, &fit.anchor);
  fit.max_dist = max_dist_to_line(pts, fit.anchor, fit.direction);
  return fit;
}

}  // namespace atst
