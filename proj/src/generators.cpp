#include "atst/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace atst {

namespace {

PointSet from_rows(const std::vector<std::array<double, 2>>& v) {
  PointSet p(2, static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p.col(static_cast<Index>(i)) << v[i][0], v[i][1];
  return p;
}

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

bool on_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& x) {
  return std::min(p.x(), q.x()) <= x.x() && x.x() <= std::max(p.x(), q.x()) && std::min(p.y(), q.y()) <= x.y() &&
         x.y() <= std::max(p.y(), q.y());
}

bool segments_meet(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                   const Eigen::Vector2d& q2) {
  double d1 = cross(q2 - q1, p1 - q1), d2 = cross(q2 - q1, p2 - q1);
  double d3 = cross(p2 - p1, q1 - p1), d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

double get(const GeneratorSpec& g, const std::string& key, double def) {
  auto it = g.params.find(key);
  return it == g.params.end() ? def : it->second;
}

int get_int(const GeneratorSpec& g, const std::string& key, int def) {
  double v = get(g, key, def);
  if (v != std::floor(v)) throw Error(ErrorKind::InvalidArgument, key + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

Curve make_segment() { return Curve(from_rows({{0, 0}, {1, 0}})); }

Curve make_vshape(double h) {
  if (!(h > 0) || !std::isfinite(h)) throw Error(ErrorKind::OutOfRange, "vshape height must be positive");
  return Curve(from_rows({{0, 0}, {0.5, h}, {1, 0}}));
}

Curve make_circular_arc(double sagitta, int n_seg) {
  if (!(sagitta > 0) || sagitta > 0.5) throw Error(ErrorKind::OutOfRange, "sagitta must be in (0, 0.5]");
  if (n_seg < 1) throw Error(ErrorKind::OutOfRange, "need at least one segment");
  const double R = (sagitta * sagitta + 0.25) / (2.0 * sagitta);
  const double cy = sagitta - R;
  const double phi = std::asin(0.5 / R);  // half opening angle; sagitta <= 0.5 keeps the center below
  PointSet p(2, n_seg + 1);
  for (int i = 0; i <= n_seg; ++i) {
    double a = -phi + 2.0 * phi * i / n_seg;  // angle from the top, left end first
    p.col(i) << 0.5 + R * std::sin(a), cy + R * std::cos(a);
  }
  p.col(0) << 0.0, 0.0;
  p.col(n_seg) << 1.0, 0.0;
  return Curve(p);
}

Curve make_hook(double depth, double overlap) {
  if (!(depth > 0)) throw Error(ErrorKind::OutOfRange, "hook depth must be positive");
  if (!(overlap > 0) || !(overlap < 1)) throw Error(ErrorKind::OutOfRange, "hook overlap must be in (0, 1)");
  return Curve(from_rows({{0, 0}, {1, 0}, {1 - overlap, depth}, {2 - overlap, depth}}));
}

Curve make_koch(double angle_deg, int depth) {
  if (!(angle_deg > 0) || !(angle_deg < 90)) throw Error(ErrorKind::OutOfRange, "koch angle must be in (0, 90)");
  if (depth < 0 || depth > 8) throw Error(ErrorKind::OutOfRange, "koch depth must be in [0, 8]");
  const double th = angle_deg * std::numbers::pi / 180.0;
  const double s = 1.0 / (2.0 + 2.0 * std::cos(th));
  Eigen::Matrix2d R;
  R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  std::vector<Eigen::Vector2d> pts{{0, 0}, {1, 0}};
  for (int d = 0; d < depth; ++d) {
    std::vector<Eigen::Vector2d> next;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      Eigen::Vector2d p = pts[i], v = pts[i + 1] - pts[i];
      next.push_back(p);
      next.push_back(p + s * v);
      next.push_back(p + s * v + s * (R * v));
      next.push_back(p + (1 - s) * v);
    }
    next.push_back(pts.back());
    pts = std::move(next);
  }
  PointSet out(2, static_cast<Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) out.col(static_cast<Index>(i)) = pts[i];
  return Curve(out);
}

Curve make_random_walk(double step, int n, double smoothing, std::uint64_t seed, int dim) {
  if (!(step > 0) || n < 1) throw Error(ErrorKind::OutOfRange, "random walk needs step > 0 and n >= 1");
  if (!(smoothing >= 0) || !(smoothing < 1)) throw Error(ErrorKind::OutOfRange, "smoothing must be in [0, 1)");
  if (dim < 2) throw Error(ErrorKind::OutOfRange, "random walk dimension must be at least 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma = 0.6, keep = std::sqrt(1.0 - smoothing * smoothing);

  if (dim > 2) {
    // generic position: simple almost surely
    PointSet p(dim, n + 1);
    p.col(0).setZero();
    Point dir = Point::Zero(dim);
    dir(0) = 1.0;
    Point drift = Point::Zero(dim);
    for (int i = 1; i <= n; ++i) {
      Point g(dim);
      for (Index k = 0; k < dim; ++k) g(k) = gauss(rng);
      drift = smoothing * drift + keep * sigma * g;
      dir = (dir + drift).normalized();
      p.col(i) = p.col(i - 1) + step * dir;
    }
    return Curve(p);
  }

  for (int attempt = 0; attempt < 50; ++attempt) {
    std::vector<Eigen::Vector2d> pts{{0, 0}};
    double heading = 0.0, turn = 0.0;
    bool stuck = false;
    for (int i = 1; i <= n && !stuck; ++i) {
      bool placed = false;
      for (int tries = 0; tries < 100 && !placed; ++tries) {
        double t = std::clamp(smoothing * turn + keep * sigma * gauss(rng), -2.5, 2.5);
        double h = heading + t;
        Eigen::Vector2d q = pts.back() + step * Eigen::Vector2d(std::cos(h), std::sin(h));
        bool ok = true;
        for (std::size_t k = 0; k + 2 < pts.size() && ok; ++k)
          if (segments_meet(pts[k], pts[k + 1], pts.back(), q)) ok = false;
        if (ok) {
          pts.push_back(q);
          heading = h;
          turn = t;
          placed = true;
        }
      }
      stuck = !placed;
    }
    if (stuck) continue;
    PointSet p(2, static_cast<Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) p.col(static_cast<Index>(i)) = pts[i];
    Curve c(p);
    if (is_simple(c)) return c;
  }
  throw Error(ErrorKind::OutOfRange, "random walk rejection sampling failed");
}

Curve make_helix3d(double pitch, double turns, int n_seg) {
  if (!(pitch > 0) || !(turns > 0) || n_seg < 1) throw Error(ErrorKind::OutOfRange, "helix needs pitch, turns > 0");
  PointSet p(3, n_seg + 1);
  for (int i = 0; i <= n_seg; ++i) {
    double a = 2.0 * std::numbers::pi * turns * i / n_seg;
    p.col(i) << std::cos(a), std::sin(a), pitch * turns * i / n_seg;
  }
  return Curve(p);
}

Curve embed(const Curve& c, int dim, std::uint64_t seed) {
  if (dim < c.dim()) throw Error(ErrorKind::DimensionMismatch, "cannot embed into a lower dimension");
  PointSet p = PointSet::Zero(dim, c.num_vertices());
  p.topRows(c.dim()) = c.vertices();
  if (dim == c.dim() && dim == 1) return Curve(p);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd Q = qr.householderQ();
  return Curve(Q * p);
}

GeneratorSpec parse_generator_spec(const std::string& text) {
  GeneratorSpec g;
  auto colon = text.find(':');
  g.shape = text.substr(0, colon);
  if (colon == std::string::npos) return g;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Parse, "expected key=value in generator spec: " + item);
    std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != val.size() || val.empty()) throw Error(ErrorKind::Parse, "bad number in generator spec: " + item);
    g.params[key] = v;
  }
  return g;
}

std::string to_string(const GeneratorSpec& g) {
  std::string s = g.shape;
  char sep = ':';
  for (const auto& [k, v] : g.params) {
    std::ostringstream o;
    o.precision(17);
    o << v;
    s += sep + k + "=" + o.str();
    sep = ',';
  }
  return s;
}

Curve generate(const GeneratorSpec& g, std::uint64_t seed) {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"segment", {}},
      {"vshape", {"h"}},
      {"circular_arc", {"sagitta", "n_seg"}},
      {"semicircle", {"n_seg"}},
      {"hook", {"depth", "overlap"}},
      {"koch", {"angle", "depth"}},
      {"random_walk", {"step", "n", "smoothing"}},
      {"helix3d", {"pitch", "turns", "n_seg"}},
  };
  auto it = keys.find(g.shape);
  if (it == keys.end()) throw Error(ErrorKind::InvalidArgument, "unknown shape: " + g.shape);
  for (const auto& [k, v] : g.params)
    if (k != "dim" && k != "seed" && std::find(it->second.begin(), it->second.end(), k) == it->second.end())
      throw Error(ErrorKind::InvalidArgument, "unknown parameter " + k + " for " + g.shape);

  if (g.params.count("seed")) seed = static_cast<std::uint64_t>(get(g, "seed", 0));
  Curve c = [&] {
    const std::string& s = g.shape;
    if (s == "segment") return make_segment();
    if (s == "vshape") return make_vshape(get(g, "h", 0.3));
    if (s == "circular_arc") return make_circular_arc(get(g, "sagitta", 0.125), get_int(g, "n_seg", 512));
    if (s == "semicircle") return make_circular_arc(0.5, get_int(g, "n_seg", 512));
    if (s == "hook") return make_hook(get(g, "depth", 0.2), get(g, "overlap", 0.5));
    if (s == "koch") return make_koch(get(g, "angle", 30), get_int(g, "depth", 3));
    if (s == "random_walk")
      return make_random_walk(get(g, "step", 0.05), get_int(g, "n", 60), get(g, "smoothing", 0.5), seed,
                              get_int(g, "dim", 2));
    return make_helix3d(get(g, "pitch", 0.5), get(g, "turns", 2), get_int(g, "n_seg", 256));
  }();
  int dim = get_int(g, "dim", static_cast<int>(c.dim()));
  if (dim != c.dim()) c = embed(c, dim, seed ^ 0x9e3779b97f4a7c15ULL);
  return c;
}

Curve generate(const std::string& spec, std::uint64_t seed) { return generate(parse_generator_spec(spec), seed); }

}  // namespace atst
