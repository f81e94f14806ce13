#include "atst/curve.hpp"

#include "atst/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace atst {

Curve::Curve(PointSet vertices) : vertices_(std::move(vertices)) {
  if (vertices_.cols() < 2) throw Error(ErrorKind::InvalidArgument, "curve needs at least 2 vertices");
  if (vertices_.rows() < 1) throw Error(ErrorKind::DimensionMismatch, "dimension must be >= 1");
  if (!vertices_.allFinite()) throw Error(ErrorKind::InvalidArgument, "non-finite coordinate");
  cum_.resize(static_cast<std::size_t>(vertices_.cols()));
  cum_[0] = 0.0;
  for (Index i = 0; i + 1 < vertices_.cols(); ++i) {
    double len = (vertices_.col(i + 1) - vertices_.col(i)).norm();
    if (!(len > 0.0))
      throw Error(ErrorKind::DegenerateSegment, "degenerate segment at vertex " + std::to_string(i));
    cum_[i + 1] = cum_[i] + len;
  }
}

double Curve::chord() const {
  return (vertices_.col(vertices_.cols() - 1) - vertices_.col(0)).norm();
}

Index Curve::segment_at(double t) const {
  auto it = std::upper_bound(cum_.begin(), cum_.end(), t);
  Index i = static_cast<Index>(it - cum_.begin()) - 1;
  return std::clamp<Index>(i, 0, num_segments() - 1);
}

Point Curve::point_at(double t) const {
  if (!(t >= 0.0 && t <= length()))
    throw Error(ErrorKind::OutOfRange, "parameter out of range: " + fmt_num(t));
  Index i = segment_at(t);
  double lam = (t - cum_[i]) / segment_length(i);
  if (lam <= 0.0) return vertices_.col(i);
  if (lam >= 1.0) return vertices_.col(i + 1);
  return vertices_.col(i) + lam * (vertices_.col(i + 1) - vertices_.col(i));
}

double Curve::x1_at(double t) const {
  Index i = segment_at(t);
  double lam = (t - cum_[i]) / segment_length(i);
  if (lam <= 0.0) return vertices_(0, i);
  if (lam >= 1.0) return vertices_(0, i + 1);
  return vertices_(0, i) + lam * (vertices_(0, i + 1) - vertices_(0, i));
}

Curve load_curve(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("curve json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array())
    throw Error(ErrorKind::Parse, "curve json: expected object with \"vertices\" array");
  const auto& vs = j["vertices"];
  if (vs.size() < 2) throw Error(ErrorKind::Parse, "curve json: need at least 2 vertices");
  if (!vs[0].is_array() || vs[0].empty()) throw Error(ErrorKind::Parse, "curve json: bad vertex");
  std::size_t d = vs[0].size();
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer()) throw Error(ErrorKind::Parse, "curve json: dim must be an integer");
    if (j["dim"].get<long long>() != static_cast<long long>(d))
      throw Error(ErrorKind::DimensionMismatch, "curve json: dim does not match vertex length");
  }
  PointSet v(static_cast<Index>(d), static_cast<Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (!vs[i].is_array()) throw Error(ErrorKind::Parse, "curve json: bad vertex");
    if (vs[i].size() != d)
      throw Error(ErrorKind::DimensionMismatch, "curve json: vertex " + std::to_string(i) + " has wrong dimension");
    for (std::size_t k = 0; k < d; ++k) {
      if (!vs[i][k].is_number()) throw Error(ErrorKind::Parse, "curve json: non-numeric coordinate");
      v(static_cast<Index>(k), static_cast<Index>(i)) = vs[i][k].get<double>();
    }
  }
  return Curve(std::move(v));
}

Curve load_curve_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_curve(ss.str());
}

std::string curve_to_json(const Curve& c) {
  std::string out = "{\"dim\":" + std::to_string(c.dim()) + ",\"vertices\":[";
  for (Index i = 0; i < c.num_vertices(); ++i) {
    if (i) out += ",";
    out += "[";
    for (Index k = 0; k < c.dim(); ++k) {
      if (k) out += ",";
      out += fmt_num(c.vertices()(k, i));
    }
    out += "]";
  }
  return out + "]}";
}

double deficit(const Curve& c) {
  double d = c.length() - c.chord();
  if (d < 0.0 && d > -1e-12) return 0.0;
  return d;
}

double diameter(const Curve& c) {
  // Farthest pair of a polyline is a pair of vertices.
  double best = 0.0;
  const PointSet& v = c.vertices();
  for (Index i = 0; i < v.cols(); ++i)
    for (Index j = i + 1; j < v.cols(); ++j) best = std::max(best, (v.col(i) - v.col(j)).squaredNorm());
  return std::sqrt(best);
}

namespace {

double orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool on_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r) {
  return std::min(p.x(), q.x()) <= r.x() && r.x() <= std::max(p.x(), q.x()) &&
         std::min(p.y(), q.y()) <= r.y() && r.y() <= std::max(p.y(), q.y());
}

bool segments_meet(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                   const Eigen::Vector2d& q2) {
  double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

}  // namespace

bool is_simple(const Curve& c) {
  if (c.dim() != 2) throw Error(ErrorKind::InvalidArgument, "simplicity check is 2D only");
  const PointSet& v = c.vertices();
  Index ns = c.num_segments();
  std::vector<Eigen::Vector2d> p(static_cast<std::size_t>(v.cols()));
  for (Index i = 0; i < v.cols(); ++i) p[i] = v.col(i);
  // bounding boxes to skip most pairs
  std::vector<Eigen::Vector4d> box(static_cast<std::size_t>(ns));
  for (Index i = 0; i < ns; ++i)
    box[i] << std::min(p[i].x(), p[i + 1].x()), std::max(p[i].x(), p[i + 1].x()),
        std::min(p[i].y(), p[i + 1].y()), std::max(p[i].y(), p[i + 1].y());
  for (Index i = 0; i < ns; ++i) {
    if (i + 1 < ns) {
      // adjacent: only the shared vertex may be common
      Eigen::Vector2d a = p[i] - p[i + 1], b = p[i + 2] - p[i + 1];
      if (orient(p[i], p[i + 1], p[i + 2]) == 0.0 && a.dot(b) > 0) return false;
    }
    for (Index j = i + 2; j < ns; ++j) {
      if (box[i][1] < box[j][0] || box[j][1] < box[i][0] || box[i][3] < box[j][2] || box[j][3] < box[i][2])
        continue;
      if (segments_meet(p[i], p[i + 1], p[j], p[j + 1])) return false;
    }
  }
  return true;
}

Point NormalizationReport::apply(const Point& x) const {
  Point y = scale_factor * (x - translation);
  for (const Point& h : householder) y -= (2.0 * h.dot(y) / h.squaredNorm()) * h;
  return y;
}

bool NormalizationReport::is_identity() const {
  return scale_factor == 1.0 && translation.isZero(0.0) && householder.empty();
}

std::pair<Curve, NormalizationReport> normalize(const Curve& c) {
  double crd = c.chord();
  if (!(crd > 0.0)) throw Error(ErrorKind::ClosedCurve, "chord length zero; a Jordan arc is required");
  NormalizationReport rep;
  int e = 0;
  std::frexp(c.length(), &e);  // length = m * 2^e, m in [0.5, 1)
  rep.scale_factor = std::ldexp(1.0, -(e - 1));
  rep.translation = c.vertex(0);

  const Index d = c.dim();
  Point w = c.vertex(c.num_vertices() - 1) - c.vertex(0);
  w /= w.norm();
  Point e1 = Point::Zero(d);
  e1(0) = 1.0;
  if ((w - e1).norm() > 1e-14) {
    if (w(0) <= 0.0) {
      rep.householder.push_back(w - e1);  // maps w to e1
      if (d >= 2) {
        Point h = Point::Zero(d);
        h(d - 1) = 1.0;  // fixes e1, restores orientation
        rep.householder.push_back(h);
      }
    } else {
      rep.householder.push_back(w + e1);  // maps w to -e1
      rep.householder.push_back(e1);      // then -e1 to e1
    }
  }

  PointSet v(d, c.num_vertices());
  for (Index i = 0; i < c.num_vertices(); ++i) v.col(i) = rep.apply(c.vertex(i));
  v.col(0).setZero();
  Index last = c.num_vertices() - 1;
  for (Index k = 1; k < d; ++k)
    if (std::fabs(v(k, last)) <= 1e-12 * std::fabs(v(0, last))) v(k, last) = 0.0;
  Curve out(std::move(v));
  rep.normalized_length = out.length();
  rep.normalized_chord = out.chord();
  return {std::move(out), std::move(rep)};
}

bool is_normalized(const Curve& c, double tol) {
  if (c.length() < 1.0 - tol || c.length() >= 2.0 + tol) return false;
  if (c.vertex(0).norm() > tol) return false;
  Point end = c.vertex(c.num_vertices() - 1);
  if (end(0) <= 0.0) return false;
  return end.tail(c.dim() - 1).norm() <= tol;
}

std::vector<Subarc> maximal_subarcs(const Curve& c, const Point& center, double radius) {
  return maximal_subarcs(c, center, radius, 0.0, c.length());
}

std::vector<Subarc> maximal_subarcs(const Curve& c, const Point& center, double radius, double t_lo,
                                    double t_hi) {
  std::vector<Subarc> out;
  if (!(radius >= 0.0) || t_hi <= t_lo) return out;
  const PointSet& v = c.vertices();
  const auto& cum = c.cum_length();
  const double r2 = radius * radius;
  Index first = c.segment_at(t_lo), last = c.segment_at(t_hi);
  double prev_in = (v.col(first) - center).squaredNorm();
  for (Index i = first; i <= last; ++i) {
    double L = c.segment_length(i);
    Point w = v.col(i) - center;
    double cc0 = prev_in - r2;
    double in1_d2 = (v.col(i + 1) - center).squaredNorm();
    prev_in = in1_d2;
    bool in0 = cc0 <= 0.0, in1 = in1_d2 <= r2;
    double lo, hi;
    if (in0 && in1) {
      lo = cum[i];
      hi = cum[i + 1];
    } else {
      Point u = (v.col(i + 1) - v.col(i)) / L;
      double b = u.dot(w);
      double disc = b * b - cc0;
      if (disc < 0.0) {
        if (!in0 && !in1) continue;
        disc = 0.0;
      }
      double sq = std::sqrt(disc);
      double q = b > 0 ? -(b + sq) : (-b + sq);
      double s1 = q, s2 = q != 0.0 ? cc0 / q : 0.0;
      if (s1 > s2) std::swap(s1, s2);
      if (in0) {
        lo = cum[i];
        hi = cum[i] + std::clamp(s2, 0.0, L);
      } else if (in1) {
        lo = cum[i] + std::clamp(s1, 0.0, L);
        hi = cum[i + 1];
      } else {
        s1 = std::clamp(s1, 0.0, L);
        s2 = std::clamp(s2, 0.0, L);
        if (!(s2 > s1)) continue;
        lo = cum[i] + s1;
        hi = cum[i] + s2;
      }
      hi = std::min(hi, cum[i + 1]);
      lo = std::max(lo, cum[i]);
    }
    lo = std::max(lo, t_lo);
    hi = std::min(hi, t_hi);
    if (hi < lo) continue;
    if (!out.empty() && lo <= out.back().b) {
      out.back().b = std::max(out.back().b, hi);
    } else {
      out.push_back({lo, hi});
    }
  }
  std::erase_if(out, [](const Subarc& s) { return !(s.b > s.a); });
  return out;
}

PointSet arc_support(const Curve& c, const std::vector<Subarc>& arcs) {
  std::vector<Point> pts;
  const auto& cum = c.cum_length();
  for (const Subarc& s : arcs) {
    pts.push_back(c.point_at(s.a));
    auto it = std::upper_bound(cum.begin(), cum.end(), s.a);
    for (; it != cum.end() && *it < s.b; ++it) pts.push_back(c.vertex(it - cum.begin()));
    if (s.b > s.a) pts.push_back(c.point_at(s.b));
  }
  PointSet out(c.dim(), static_cast<Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) out.col(static_cast<Index>(i)) = pts[i];
  return out;
}

double dist_to_segment(const Point& x, const Point& p, const Point& q) {
  Point d = q - p;
  double dd = d.squaredNorm();
  if (dd == 0.0) return (x - p).norm();
  double lam = std::clamp((x - p).dot(d) / dd, 0.0, 1.0);
  return (x - p - lam * d).norm();
}

}  // namespace atst
