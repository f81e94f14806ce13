#include <doctest.h>

#include "atst/measure.hpp"

#include <cmath>
#include <random>

using namespace atst;

namespace {

Curve vshape() { return load_curve(R"({"dim":2,"vertices":[[0,0],[0.5,0.3],[1,0]]})"); }
Curve hook() { return load_curve(R"({"dim":2,"vertices":[[0,0],[1,0],[0.5,0.2],[1.5,0.2]]})"); }

Curve random_curve(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  int nv = 3 + static_cast<int>(rng() % 12);
  PointSet v(2, nv);
  for (int i = 0; i < nv; ++i) v.col(i) << i / double(nv - 1) + 0.3 * u(rng), 0.3 * u(rng);
  return normalize(Curve(v)).first;
}

}  // namespace

TEST_CASE("rho") {
  auto r = rho(load_curve(R"({"dim":2,"vertices":[[0,0],[0.5,0],[0.5,0.3],[0.3,0.3],[0.3,0.1],[1,0]]})"));
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 1.0);
  CHECK(r[2] == 2.0);
  CHECK_THROWS_AS(rho(load_curve(R"({"dim":2,"vertices":[[1,0],[2,0]]})")), Error);
}

TEST_CASE("mu") {
  Curve seg = load_curve(R"({"dim":2,"vertices":[[0,0],[1,0]]})");
  CHECK(mu(seg, 0, 1) == 0.0);
  Curve v = vshape();
  CHECK(mu(v, 0, v.length()) == doctest::Approx(deficit(v)).epsilon(1e-14));
  CHECK(mu(v, 0, v.length()) == doctest::Approx(0.166190).epsilon(1e-5));
  CHECK(mu(v, 0, v.length() / 2) == doctest::Approx(std::sqrt(0.34) - 0.5).epsilon(1e-13));
  CHECK(mu(v, 0, v.length() / 2) == doctest::Approx(0.08309).epsilon(1e-4));
  CHECK_THROWS_AS(mu(v, 0.5, 0.2), Error);
}

TEST_CASE("identity on random subintervals") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    Curve c = random_curve(rng);
    CHECK(std::fabs(mu(c, 0, c.length()) - deficit(c)) <= 1e-12 * c.length());
    for (int k = 0; k < 10; ++k) {
      double a = u(rng) * c.length(), b = u(rng) * c.length();
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      CHECK(std::fabs(mu(c, a, b) - ((b - a) - (c.x1_at(b) - c.x1_at(a)))) <= 1e-12 * (b - a));
    }
  }
}

TEST_CASE("multiplicity") {
  Multiplicity mv = multiplicity_decomposition(vshape());
  CHECK(mv.pieces().size() == 1);
  CHECK(mv.at_least_two().empty());
  CHECK(mv.at(0.3) == 1);

  Multiplicity mh = multiplicity_decomposition(hook());
  CHECK(mh.pieces().size() == 3);
  CHECK(mh.at(0.7) == 3);
  CHECK(mh.at(0.25) == 1);
  CHECK(mh.at(1.25) == 1);
  CHECK(mh.at(1.0) == 2);  // turning point and the third piece
  REQUIRE(mh.at_least_two().size() == 1);
  CHECK(mh.at_least_two()[0].first == 0.5);
  CHECK(mh.at_least_two()[0].second == 1.0);

  Multiplicity mvert = multiplicity_decomposition(load_curve(R"({"dim":2,"vertices":[[0,0],[0.5,0],[0.5,0.4],[1,0.4]]})"));
  CHECK(std::isinf(mvert.at(0.5)));
  CHECK(mvert.at(0.25) == 1);
}

TEST_CASE("bends") {
  CHECK(bends(vshape()).empty());
  Curve h = hook();
  auto b = bends(h);
  REQUIRE(b.size() == 1);
  CHECK(b[0].t_lo == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b[0].t_hi == doctest::Approx(1.5 + std::sqrt(0.29)).epsilon(1e-15));
  CHECK(std::fabs(b[0].length - 1.5385164807134504) < 1e-9);
  CHECK(std::fabs(mu(h, b[0].t_lo, b[0].t_hi) - 1.0385164807134504) < 1e-9);
  CHECK(b[0].pi_lo == 0.5);
  CHECK(b[0].pi_hi == 1.0);

  // vertical segment is a bend
  auto bv = bends(load_curve(R"({"dim":2,"vertices":[[0,0],[0.5,0],[0.5,0.4],[1,0.4]]})"));
  REQUIRE(bv.size() == 1);
  CHECK(bv[0].length == doctest::Approx(0.4));
}

TEST_CASE("bend mass on random curves") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    Curve c = random_curve(rng);
    for (const Bend& b : bends(c)) {
      CHECK(b.length > 0);
      CHECK(mu(c, b.t_lo, b.t_hi) >= 0.5 * b.length - 1e-9);
    }
  }
}

TEST_CASE("mu tilde") {
  Curve v = vshape();
  DensityMeasure mt = mu_tilde(v, bends(v));
  CHECK(mt.total() == doctest::Approx(mu(v, 0, v.length())).epsilon(1e-14));

  Curve h = hook();
  auto b = bends(h);
  DensityMeasure mh = mu_tilde(h, b);
  CHECK(mh.measure(b[0].t_lo, b[0].t_hi) == doctest::Approx(2 * 1.5385164807134504).epsilon(1e-12));
  // the window covers the rest of this small curve
  CHECK(mh.total() == doctest::Approx(2 * b[0].length + (h.length() - b[0].length)).epsilon(1e-12));
  CHECK(mh.window_fraction() == doctest::Approx((h.length() - b[0].length) / h.length()));
}

TEST_CASE("mu tilde bounds on random curves") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    Curve c = random_curve(rng);
    DensityMeasure m0 = mu_measure(c);
    DensityMeasure mt = mu_tilde(c, bends(c));
    double mu_total = mu(c, 0, c.length());
    if (mu_total > 0) CHECK(mt.total() <= 405 * mu_total);
    CHECK(mt.total() >= mu_total - 1e-12);
    for (int k = 0; k < 50; ++k) {
      double t = u(rng) * c.length();
      double r0 = m0.density_at(t), rt = mt.density_at(t);
      CHECK(r0 >= -1e-15);
      CHECK(r0 <= 2 + 1e-15);
      CHECK(rt >= r0 - 1e-15);
      CHECK(rt <= 2);
    }
    for (int k = 0; k < 20; ++k) {
      double a = u(rng) * c.length(), b = u(rng) * c.length();
      if (a > b) std::swap(a, b);
      if (!(c.x1_at(a) < c.x1_at(b))) continue;
      auto [arc, seg] = arc_vs_segment_ratio(c, mt, a, b);
      CHECK(arc >= seg - 1e-9);
    }
  }
}

TEST_CASE("augment with arcs") {
  Curve v = vshape();
  DensityMeasure e = augment_with_arcs(v, {});
  CHECK(e.total() == doctest::Approx(deficit(v)).epsilon(1e-14));

  // long flat run with a short near-vertical jog
  Curve j = load_curve(R"({"dim":2,"vertices":[[0,0],[0.5,0],[0.500001,0.0001],[1,0.0001]]})");
  double t0 = j.param_of_vertex(1), t1 = j.param_of_vertex(2), L = t1 - t0;
  DensityMeasure m = augment_with_arcs(j, {{t0, t1}});
  CHECK(m.density_at(0.5 * (t0 + t1)) == 2.0);
  CHECK(m.density_at(t0 - 50 * L) == 1.0);
  CHECK(m.density_at(0.01) == doctest::Approx(0.0));
  CHECK(m.total() >= mu(j, 0, j.length()));
  CHECK_THROWS_AS(augment_with_arcs(j, {{0.1, 0.3}, {0.2, 0.4}}), Error);
}
