#include "atst/cores.hpp"

#include "atst/report.hpp"
#include "atst/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace atst {

bool CoreSet::contains_member(const CoreMember& m) const {
  return std::binary_search(members.begin(), members.end(), m);
}

bool CoreSet::includes(const CoreSet& other) const {
  return std::includes(members.begin(), members.end(), other.members.begin(), other.members.end());
}

bool CoreSet::contains_point(const Point& x) const {
  for (Index i = 0; i < centers.cols(); ++i)
    if ((centers.col(i) - x).squaredNorm() < radii[i] * radii[i]) return true;
  return false;
}

bool CoreSet::meets_segment(const Point& p, const Point& q) const {
  for (Index i = 0; i < centers.cols(); ++i)
    if (dist_to_segment(centers.col(i), p, q) < radii[i]) return true;
  return false;
}

double core_distance(const CoreSet& a, const CoreSet& b) {
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < a.centers.cols(); ++i)
    for (Index j = 0; j < b.centers.cols(); ++j)
      best = std::min(best, (a.centers.col(i) - b.centers.col(j)).norm() - a.radii[i] - b.radii[j]);
  return std::max(best, 0.0);
}

namespace {

double union_diameter(const PointSet& centers, const std::vector<double>& radii) {
  double best = 0.0;
  for (Index i = 0; i < centers.cols(); ++i) {
    best = std::max(best, 2.0 * radii[i]);
    for (Index j = i + 1; j < centers.cols(); ++j)
      best = std::max(best, (centers.col(i) - centers.col(j)).norm() + radii[i] + radii[j]);
  }
  return best;
}

}  // namespace

CoreSystem CoreSystem::build(const NetHierarchy& nets, double A, double c, int J, bool allow_boundary) {
  const double limit = 1.0 / (4.0 * A);
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidArgument, "core constant must be positive");
  if (c > limit || (c == limit && !allow_boundary))
    throw Error(ErrorKind::InvalidArgument, "core constant must satisfy c < 1/(4A)");
  if (J < 1) throw Error(ErrorKind::InvalidArgument, "J must be positive");
  CoreSystem sys;
  sys.A_ = A;
  sys.c_ = c;
  sys.J_ = J;
  sys.n0_ = nets.n0();
  sys.n_max_ = nets.n_max();
  sys.boundary_ = c == limit;

  std::vector<PointSet> pts;
  std::vector<KdTree> trees;
  for (int n = sys.n0_; n <= sys.n_max_; ++n) {
    pts.push_back(nets.level_points(n));
    trees.emplace_back(pts.back());
  }
  auto radius_of = [&](int s) { return c * scale_radius(A, s); };

  for (int m = sys.n0_; m <= sys.n_max_; ++m) {
    std::vector<CoreSet> level;
    const Index K = nets.level_size(m);
    for (Index k = 0; k < K; ++k) {
      std::set<CoreMember> seen{{m, k}};
      std::vector<CoreMember> queue{{m, k}};
      for (std::size_t head = 0; head < queue.size(); ++head) {
        CoreMember cur = queue[head];
        Point x = pts[cur.scale - sys.n0_].col(cur.index);
        double r = radius_of(cur.scale);
        for (int s = m + J; s <= sys.n_max_; s += J) {
          double rr = r + radius_of(s);
          for (Index j : trees[s - sys.n0_].radius_search(x, rr * rr, false)) {
            if (seen.insert({s, j}).second) queue.push_back({s, j});
          }
        }
      }
      CoreSet u;
      u.family = sys.family_of(m);
      u.base_scale = m;
      u.base_index = k;
      u.c = c;
      u.members.assign(seen.begin(), seen.end());
      u.centers.resize(nets.sample_points().rows(), static_cast<Index>(u.members.size()));
      for (std::size_t i = 0; i < u.members.size(); ++i) {
        const CoreMember& mm = u.members[i];
        u.centers.col(static_cast<Index>(i)) = pts[mm.scale - sys.n0_].col(mm.index);
        u.radii.push_back(radius_of(mm.scale));
        u.rounds = std::max(u.rounds, (mm.scale - m) / J);
      }
      u.diameter = union_diameter(u.centers, u.radii);
      u.truncated = m + J > sys.n_max_;
      level.push_back(std::move(u));
    }
    sys.cores_.push_back(std::move(level));
  }
  return sys;
}

const std::vector<CoreSet>& CoreSystem::cores_at(int scale) const {
  if (scale < n0_ || scale > n_max_) throw Error(ErrorKind::MissingEntry, "no cores at scale " + std::to_string(scale));
  return cores_[static_cast<std::size_t>(scale - n0_)];
}

const CoreSet& CoreSystem::core(int scale, Index k) const {
  const auto& lv = cores_at(scale);
  if (k < 0 || k >= static_cast<Index>(lv.size()))
    throw Error(ErrorKind::MissingEntry, "no core for ball (" + std::to_string(scale) + "," + std::to_string(k) + ")");
  return lv[static_cast<std::size_t>(k)];
}

CoreSystems build_core_systems(const NetHierarchy& nets, double A, int J) {
  CoreSystems s;
  const double c0 = 1.0 / (64.0 * A);
  if (J < 10) s.warnings.push_back("J = " + std::to_string(J) + " is below the required J >= 10");
  s.u = CoreSystem::build(nets, A, c0, J);
  s.ux = CoreSystem::build(nets, A, 8 * c0, J);
  s.uxx = CoreSystem::build(nets, A, 16 * c0, J, true);
  if (s.uxx.boundary())
    s.warnings.push_back("16c0 = 1/(4A) sits on the boundary of c < 1/(4A); its gap check is advisory");
  return s;
}

CoreTriple cores_for_ball(const Ball& q, const CoreSystems& sys) {
  return {&sys.u.core(q.scale, q.index), &sys.ux.core(q.scale, q.index), &sys.uxx.core(q.scale, q.index)};
}

std::vector<CoreTree> core_trees(const std::vector<Ball>& balls, const CoreSystem& sys) {
  // order: family, then base scale, then index
  std::vector<std::size_t> order(balls.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    int fa = sys.family_of(balls[a].scale), fb = sys.family_of(balls[b].scale);
    if (fa != fb) return fa < fb;
    if (balls[a].scale != balls[b].scale) return balls[a].scale < balls[b].scale;
    return balls[a].index < balls[b].index;
  });
  auto core_of = [&](std::size_t i) -> const CoreSet& { return sys.core(balls[i].scale, balls[i].index); };

  // member -> balls whose core holds it (per family)
  std::map<std::pair<int, CoreMember>, std::vector<std::size_t>> holders;
  for (std::size_t i : order)
    for (const CoreMember& m : core_of(i).members) holders[{sys.family_of(balls[i].scale), m}].push_back(i);

  std::vector<long> parent(balls.size(), -1);
  for (std::size_t i : order) {
    const CoreSet& u = core_of(i);
    int fam = sys.family_of(balls[i].scale);
    std::set<std::size_t> touching;
    for (const CoreMember& m : u.members)
      for (std::size_t j : holders[{fam, m}])
        if (j != i) touching.insert(j);
    std::size_t best = balls.size();
    for (std::size_t j : touching) {
      const CoreSet& v = core_of(j);
      bool v_in_u = u.includes(v), u_in_v = v.includes(u);
      if (!v_in_u && !u_in_v)
        throw Error(ErrorKind::Internal, "cores overlap without inclusion");
      if (u_in_v && !v_in_u) {
        if (best == balls.size() || v.members.size() < core_of(best).members.size()) best = j;
      }
    }
    if (best != balls.size()) parent[i] = static_cast<long>(best);
  }

  std::vector<CoreTree> trees;
  std::map<std::size_t, std::size_t> tree_of_root;
  for (std::size_t i : order) {
    if (parent[i] >= 0) continue;
    tree_of_root[i] = trees.size();
    trees.push_back({{i}, {-1}});
  }
  // attach descendants; order is by scale so parents precede children
  std::vector<std::pair<std::size_t, std::size_t>> where(balls.size());  // (tree, node)
  for (auto& [root, t] : tree_of_root) where[root] = {t, 0};
  for (std::size_t i : order) {
    if (parent[i] < 0) continue;
    auto [t, pn] = where[static_cast<std::size_t>(parent[i])];
    trees[t].nodes.push_back(i);
    trees[t].parent.push_back(static_cast<int>(pn));
    where[i] = {t, trees[t].nodes.size() - 1};
  }
  return trees;
}

CoreCheck check_core_system(const CoreSystem& sys) {
  CoreCheck out;
  const double cA = sys.c() * sys.A();
  const double upper_factor = 1.0 + 4.0 * std::ldexp(1.0, -sys.J() + 1);
  std::map<CoreMember, std::vector<const CoreSet*>> holders;
  for (int n = sys.n0(); n <= sys.n_max(); ++n) {
    const auto& lv = sys.cores_at(n);
    const double seed_diam = 2.0 * cA * std::ldexp(1.0, -n);
    for (const CoreSet& u : lv) {
      ++out.cores;
      if (u.truncated) ++out.truncated;
      if (u.diameter < seed_diam * (1 - 1e-12)) ++out.diam_lower_violations;
      if (u.diameter > upper_factor * seed_diam * (1 + 1e-12)) ++out.diam_upper_violations;
      if (u.diameter > upper_factor * 0.5 * seed_diam) ++out.alt_convention_flags;
      out.max_diam_ratio = std::max(out.max_diam_ratio, u.diameter / seed_diam);
      if (u.rounds > (sys.n_max() - n) / sys.J()) ++out.rounds_violations;
      for (const CoreMember& m : u.members) holders[m].push_back(&u);
      // connectivity of the member graph
      const Index M = u.centers.cols();
      std::vector<char> reached(static_cast<std::size_t>(M), 0);
      std::vector<Index> stack{0};
      reached[0] = 1;
      Index count = 1;
      while (!stack.empty()) {
        Index a = stack.back();
        stack.pop_back();
        for (Index b = 0; b < M; ++b) {
          if (reached[b]) continue;
          double rr = u.radii[a] + u.radii[b];
          if ((u.centers.col(a) - u.centers.col(b)).squaredNorm() < rr * rr) {
            reached[b] = 1;
            ++count;
            stack.push_back(b);
          }
        }
      }
      if (count != M) ++out.connectivity_violations;
    }
    // uniqueness: the ball cQ of each net point is a member of exactly one core at its scale
    std::vector<int> hits(lv.size(), 0);
    for (const CoreSet& u : lv)
      for (const CoreMember& m : u.members)
        if (m.scale == n) ++hits[static_cast<std::size_t>(m.index)];
    for (int h : hits)
      if (h != 1) ++out.uniqueness_violations;
    // same-scale separation, checked on candidate pairs near each other
    PointSet base(lv.empty() ? 0 : lv[0].centers.rows(), static_cast<Index>(lv.size()));
    double max_diam = 0.0;
    for (std::size_t k = 0; k < lv.size(); ++k) {
      base.col(static_cast<Index>(k)) = lv[k].centers.col(0);  // the base member sorts first
      max_diam = std::max(max_diam, lv[k].diameter);
    }
    if (lv.size() > 1) {
      KdTree tree(base);
      const double need = std::ldexp(1.0, -n - 1);
      const double reach = need + 2.0 * max_diam;
      for (std::size_t k = 0; k < lv.size(); ++k)
        for (Index j : tree.radius_search(base.col(static_cast<Index>(k)), reach * reach)) {
          if (j <= static_cast<Index>(k)) continue;
          double g = core_distance(lv[k], lv[static_cast<std::size_t>(j)]);
          out.min_gap_ratio = std::min(out.min_gap_ratio, g / need);
          if (g < need) ++out.gap_violations;
        }
    }
  }
  // nesting: cores sharing a member must be nested
  for (auto& [m, list] : holders)
    for (std::size_t a = 0; a < list.size(); ++a)
      for (std::size_t b = a + 1; b < list.size(); ++b) {
        const CoreSet& x = *list[a];
        const CoreSet& y = *list[b];
        if (x.base_scale == y.base_scale) continue;  // counted as a gap violation
        const CoreSet& deep = x.base_scale > y.base_scale ? x : y;
        const CoreSet& shallow = x.base_scale > y.base_scale ? y : x;
        if (!shallow.includes(deep)) ++out.nesting_violations;
      }
  return out;
}

std::vector<Subarc> clip_to_core(const Curve& c, const CoreSet& u) {
  std::vector<Subarc> all;
  for (Index i = 0; i < u.centers.cols(); ++i) {
    auto arcs = maximal_subarcs(c, u.centers.col(i), u.radii[i]);
    all.insert(all.end(), arcs.begin(), arcs.end());
  }
  std::sort(all.begin(), all.end(), [](const Subarc& a, const Subarc& b) { return a.a < b.a; });
  std::vector<Subarc> out;
  for (const Subarc& s : all) {
    if (!out.empty() && s.a <= out.back().b)
      out.back().b = std::max(out.back().b, s.b);
    else
      out.push_back(s);
  }
  return out;
}

double length_in_core(const Curve& c, const CoreSet& u) {
  double total = 0.0;
  for (const Subarc& s : clip_to_core(c, u)) total += s.length();
  return total;
}

std::string core_to_json(const CoreSet& u) {
  std::vector<std::string> mem;
  for (const CoreMember& m : u.members)
    mem.push_back("[" + std::to_string(m.scale) + "," + std::to_string(m.index) + "]");
  return JsonObject()
      .integer("family", u.family)
      .raw("base", "[" + std::to_string(u.base_scale) + "," + std::to_string(u.base_index) + "]")
      .raw("members", json_array(mem))
      .num("diam", u.diameter)
      .boolean("truncated", u.truncated)
      .done();
}

}  // namespace atst
