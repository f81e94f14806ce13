#pragma once

#include "atst/curve.hpp"
#include "atst/nets.hpp"

#include <string>
#include <utility>
#include <vector>

namespace atst {

struct CoreMember {
  int scale;
  Index index;
  auto operator<=>(const CoreMember&) const = default;
};

// Finite union of balls c*Q over net points, closed under open-ball
// intersection with balls of the same family at deeper scales.
struct CoreSet {
  int family = 0;
  int base_scale = 0;
  Index base_index = 0;
  double c = 0.0;
  std::vector<CoreMember> members;  // sorted
  PointSet centers;                 // one column per member, same order
  std::vector<double> radii;
  double diameter = 0.0;
  bool truncated = false;  // deeper absorption scales were cut off by n_max
  int rounds = 0;          // deepest absorbed scale offset, in units of J

  bool contains_member(const CoreMember& m) const;
  bool includes(const CoreSet& other) const;  // member-set containment
  bool contains_point(const Point& x) const;
  // Open-ball union meets the closed segment [p, q].
  bool meets_segment(const Point& p, const Point& q) const;
};

double core_distance(const CoreSet& a, const CoreSet& b);

class CoreSystem {
 public:
  CoreSystem() = default;
  // Throws if c >= 1/(4A) unless allow_boundary and c == 1/(4A).
  static CoreSystem build(const NetHierarchy& nets, double A, double c, int J, bool allow_boundary = false);

  double A() const { return A_; }
  double c() const { return c_; }
  int J() const { return J_; }
  int n0() const { return n0_; }
  int n_max() const { return n_max_; }
  bool boundary() const { return boundary_; }
  int family_of(int scale) const { return ((scale % J_) + J_) % J_; }
  const CoreSet& core(int scale, Index k) const;
  const std::vector<CoreSet>& cores_at(int scale) const;

 private:
  double A_ = 0, c_ = 0;
  int J_ = 10, n0_ = 0, n_max_ = 0;
  bool boundary_ = false;
  std::vector<std::vector<CoreSet>> cores_;
};

struct CoreSystems {
  CoreSystem u, ux, uxx;  // c0, 8 c0, 16 c0 with c0 = 1/(64A)
  std::vector<std::string> warnings;
};

CoreSystems build_core_systems(const NetHierarchy& nets, double A, int J);

struct CoreTriple {
  const CoreSet* u = nullptr;
  const CoreSet* ux = nullptr;
  const CoreSet* uxx = nullptr;
};
CoreTriple cores_for_ball(const Ball& q, const CoreSystems& sys);

struct CoreTree {
  std::vector<std::size_t> nodes;  // indices into the ball list, root first
  std::vector<int> parent;         // per node, index into nodes; -1 for the root
  std::size_t root_ball() const { return nodes.front(); }
};

// Forest over the cores of the given balls, one forest per family, ordered by
// root ball. Throws Internal if two cores overlap without inclusion.
std::vector<CoreTree> core_trees(const std::vector<Ball>& balls, const CoreSystem& sys);

struct CoreCheck {
  Index cores = 0;
  Index uniqueness_violations = 0;
  Index gap_violations = 0;       // same-scale pairs closer than 2^-n-1
  double min_gap_ratio = 1e300;   // min over checked pairs of gap / 2^-n-1
  Index nesting_violations = 0;
  Index diam_lower_violations = 0;
  Index diam_upper_violations = 0;  // against (1+4*2^-J+1) * 2cA2^-n
  Index alt_convention_flags = 0; // diam above (1+4*2^-J+1) * cA2^-n
  Index rounds_violations = 0;
  Index truncated = 0;
  Index connectivity_violations = 0;
  double max_diam_ratio = 0.0;  // diam / (2cA2^-n)
};

CoreCheck check_core_system(const CoreSystem& sys);

// Parameter intervals of the curve inside the union of member balls.
std::vector<Subarc> clip_to_core(const Curve& c, const CoreSet& u);
double length_in_core(const Curve& c, const CoreSet& u);

std::string core_to_json(const CoreSet& u);

}  // namespace atst
