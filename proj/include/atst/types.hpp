#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace atst {

using Point = Eigen::VectorXd;
using PointSet = Eigen::MatrixXd;  // one point per column
using Index = Eigen::Index;

enum class ErrorKind {
  Parse,
  DimensionMismatch,
  DegenerateSegment,
  OutOfRange,
  InvalidArgument,
  ClosedCurve,
  EmptyIntersection,
  CoveringViolation,
  MissingEntry,
  Internal,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Closed parameter interval [a, b] on the curve.
struct Subarc {
  double a = 0.0;
  double b = 0.0;
  double length() const { return b - a; }
  bool contains(double t) const { return a <= t && t <= b; }
};

inline double sq_dist(const Point& x, const Point& y) { return (x - y).squaredNorm(); }

}  // namespace atst
