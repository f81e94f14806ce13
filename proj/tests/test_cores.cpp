#include <doctest.h>

#include "atst/cores.hpp"

#include <cmath>
#include <random>

using namespace atst;

namespace {

Curve wavy(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.12, 0.12);
  PointSet v(2, 9);
  for (int i = 0; i < 9; ++i) v.col(i) << i / 8.0, u(rng);
  return Curve(v);
}

NetHierarchy deep_nets(const Curve& c, int n_max = 12) {
  return build_nets(c, 0, n_max, std::ldexp(1.0, -n_max) / 8);
}

}  // namespace

TEST_CASE("core constants and validation") {
  NetHierarchy nets = build_nets(wavy(1), 0, 3, std::ldexp(1.0, -3) / 8);
  const double A = 8.0;
  CHECK_THROWS_AS(CoreSystem::build(nets, A, 1.0 / 32, 10), Error);
  CoreSystems sys = build_core_systems(nets, A, 10);
  CHECK(sys.u.c() == 1.0 / 512);
  CHECK(sys.uxx.c() == 1.0 / 32);
  CHECK(sys.uxx.boundary());
  CHECK_FALSE(sys.ux.boundary());
  CHECK(sys.warnings.size() == 1);
  CHECK(build_core_systems(nets, A, 5).warnings.size() == 2);
  Ball b;
  b.scale = 7;
  b.index = 0;
  CHECK_THROWS_AS(cores_for_ball(b, sys), Error);
}

TEST_CASE("isolated ball core is the seed ball") {
  NetHierarchy nets = build_nets(wavy(2), 0, 5, std::ldexp(1.0, -5) / 8);
  CoreSystems sys = build_core_systems(nets, 8.0, 10);
  auto balls = multiresolution_family(nets, 8.0);
  for (const Ball& q : balls) {
    CoreTriple t = cores_for_ball(q, sys);
    CHECK(t.u->members.size() == 1);
    CHECK(t.u->truncated);
    CHECK(t.u->diameter == doctest::Approx(2 * sys.u.c() * q.radius).epsilon(1e-15));
    CHECK(t.ux->diameter == doctest::Approx(16 * sys.u.c() * q.radius).epsilon(1e-15));
  }
}

TEST_CASE("Prop 1.4 properties on deep nets") {
  for (std::uint64_t s = 0; s < 3; ++s) {
    Curve c = wavy(s);
    NetHierarchy nets = deep_nets(c);
    CoreSystems sys = build_core_systems(nets, 8.0, 10);
    for (const CoreSystem* cs : {&sys.u, &sys.ux}) {
      CoreCheck chk = check_core_system(*cs);
      CHECK(chk.uniqueness_violations == 0);
      CHECK(chk.gap_violations == 0);
      CHECK(chk.nesting_violations == 0);
      CHECK(chk.connectivity_violations == 0);
      CHECK(chk.diam_lower_violations == 0);
      CHECK(chk.diam_upper_violations == 0);
      CHECK(chk.rounds_violations == 0);
      CHECK(chk.alt_convention_flags == chk.cores);
    }
    // the scale-0 core absorbs deeper members
    CHECK(sys.u.core(0, 0).members.size() > 1);
    // nesting across constants
    auto balls = multiresolution_family(nets, 8.0);
    std::mt19937_64 rng(s);
    for (int i = 0; i < 100; ++i) {
      const Ball& q = balls[rng() % balls.size()];
      CoreTriple t = cores_for_ball(q, sys);
      CHECK(t.ux->includes(*t.u));
      CHECK(t.uxx->includes(*t.ux));
    }
  }
}

TEST_CASE("core trees") {
  Curve c = wavy(4);
  NetHierarchy nets = deep_nets(c, 11);
  CoreSystems sys = build_core_systems(nets, 8.0, 10);
  auto balls = multiresolution_family(nets, 8.0);

  std::vector<Ball> same;
  for (const Ball& q : balls)
    if (q.scale == 3) same.push_back(q);
  auto forest = core_trees(same, sys.u);
  CHECK(forest.size() == same.size());
  for (const auto& t : forest) CHECK(t.nodes.size() == 1);

  CHECK(core_trees({}, sys.u).empty());

  // the scale-0 ball absorbs the scale-10 ball at the same point
  Ball top = balls.front();
  std::vector<Ball> pair{top};
  for (const Ball& q : balls)
    if (q.scale == 10 && q.index == 0) pair.push_back(q);
  REQUIRE(pair.size() == 2);
  auto nested = core_trees(pair, sys.u);
  REQUIRE(nested.size() == 1);
  CHECK(nested[0].nodes.size() == 2);
  CHECK(nested[0].root_ball() == 0);
  CHECK(nested[0].parent[1] == 0);
}

TEST_CASE("length inside a core") {
  Curve seg = load_curve(R"({"dim":2,"vertices":[[0,0],[1,0]]})");
  NetHierarchy nets = build_nets(seg, 0, 2, 0.01);
  CoreSystems sys = build_core_systems(nets, 8.0, 10);
  const CoreSet& u = sys.ux.core(0, 0);  // radius 8 * c0 * 8 = 1/8 at the origin
  CHECK(length_in_core(seg, u) == doctest::Approx(0.125));
  Point p(2), q(2);
  p << 0.1, -1;
  q << 0.1, 1;
  CHECK(u.meets_segment(p, q));
  p << 0.2, -1;
  q << 0.2, 1;
  CHECK_FALSE(u.meets_segment(p, q));
}
