#include <doctest.h>

#include "atst/generators.hpp"
#include "atst/voronoi.hpp"

#include <algorithm>
#include <cmath>

using namespace atst;

namespace {
Curve unit_segment() { return make_segment(); }

// One hand-picked level n = 1 over the curve's dense sample.
NetHierarchy hand_net(const Curve& c, double spacing, std::vector<Index> chosen) {
  auto [t, p] = dense_sample(c, spacing);
  return NetHierarchy(t, p, spacing, {NetLevel{1, std::move(chosen)}});
}
}  // namespace

TEST_CASE("segment with net {0, 0.51} splits at the midpoint") {
  Curve seg = unit_segment();
  NetHierarchy nets = build_nets(seg, 1, 1, 0.01);
  auto cells = voronoi_cells(seg, nets, 1, 1);
  REQUIRE(cells.size() == 2);
  REQUIRE(cells[0].pieces.size() == 1);
  REQUIRE(cells[1].pieces.size() == 1);
  CHECK(cells[0].pieces[0].a == 0.0);
  CHECK(cells[0].pieces[0].b == doctest::Approx(0.255).epsilon(1e-14));
  CHECK(cells[1].pieces[0].a == doctest::Approx(0.255).epsilon(1e-14));
  CHECK(cells[1].pieces[0].b == 1.0);
  CHECK(cells[0].diam + cells[1].diam == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("single net point owns the whole curve") {
  Curve v = make_vshape(0.3);
  NetHierarchy nets = hand_net(v, 0.01, {40});
  auto cells = voronoi_cells(v, nets, 1, 1);
  REQUIRE(cells.size() == 1);
  REQUIRE(cells[0].pieces.size() == 1);
  CHECK(cells[0].pieces[0].a == 0.0);
  CHECK(cells[0].pieces[0].b == doctest::Approx(v.length()));
  CHECK(cells[0].diam == doctest::Approx(1.0));
}

TEST_CASE("owner order does not move the boundary") {
  // owners at t = 0.75 and t = 0.25; sample 0.5 is equidistant
  Curve seg = unit_segment();
  NetHierarchy nets = hand_net(seg, 0.125, {6, 2});
  auto cells = voronoi_cells(seg, nets, 1, 1);
  REQUIRE(cells.size() == 2);
  REQUIRE(cells[1].pieces.size() == 1);
  REQUIRE(cells[0].pieces.size() == 1);
  CHECK(cells[1].pieces[0].a == 0.0);
  CHECK(cells[1].pieces[0].b == 0.5);
  CHECK(cells[0].pieces[0].a == 0.5);
  CHECK(cells[0].pieces[0].b == 1.0);
}

TEST_CASE("cells tile the curve and satisfy the diameter bounds") {
  for (const char* spec : {"vshape:h=0.3", "semicircle:n_seg=128", "hook:depth=0.2,overlap=0.5",
                           "random_walk:n=20,step=0.08,smoothing=0.6"}) {
    Curve c = normalize(generate(spec, 7)).first;
    const int nmax = 9;
    NetHierarchy nets = build_nets(c, default_n0(c, 8.0), nmax, 7 * std::ldexp(1.0, -nmax - 6));
    for (int n = 1; 3 * n <= nmax; ++n) {
      if (!nets.has_level(3 * n)) continue;
      auto cells = voronoi_cells(c, nets, n, 3);
      double covered = 0.0;
      const double u = std::ldexp(1.0, -3 * n);
      for (const VoronoiCell& cell : cells) {
        for (const Subarc& p : cell.pieces) covered += p.b - p.a;
        CHECK(cell.diam >= 0.5 * u);
        CHECK(cell.diam < 2.0 * u);
      }
      CHECK(covered == doctest::Approx(c.length()).epsilon(1e-12));
    }
  }
}

TEST_CASE("flat classification") {
  Curve seg = unit_segment();
  NetHierarchy nets = build_nets(seg, 0, 6, std::ldexp(1.0, -6) / 8);
  for (char f : flat_classification(seg, nets, 2, 3, 0.01)) CHECK(f == 1);
  for (char f : flat_classification(seg, nets, 2, 3, 0.0)) CHECK(f == 0);

  Curve v = make_vshape(0.3);
  NetHierarchy vn = build_nets(v, 0, 6, std::ldexp(1.0, -6) / 8);
  auto flat = flat_classification(v, vn, 2, 3, 0.1);
  Index nonflat = 0;
  for (Index k = 0; k < vn.level_size(6); ++k)
    if (!flat[k]) {
      ++nonflat;
      // only balls B(x, 10 * 2^-6) that reach the apex bend
      CHECK((vn.point(6, k) - v.vertex(1)).norm() < 10 * std::ldexp(1.0, -6));
    }
  CHECK(nonflat > 0);
}

TEST_CASE("generation sums: segment is exact, V and semicircle converge to the length") {
  Curve seg = unit_segment();
  NetHierarchy sn = build_nets(seg, 0, 9, 7 * std::ldexp(1.0, -15));
  std::vector<double> zeros(10, 0.0);
  GenerationSummary s = generation_sums(seg, sn, 3, 0, 3, zeros, 1.0 / 128);
  REQUIRE(s.gens.size() == 4);
  for (const GenerationReport& r : s.gens) CHECK(r.sum_diam == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.C_fit == 0.0);

  for (const char* spec : {"vshape:h=0.3", "semicircle:n_seg=512"}) {
    Curve c = normalize(generate(spec, 1)).first;
    const int nmax = 12;
    const int n0 = default_n0(c, 8.0);
    NetHierarchy nets = build_nets(c, n0, nmax, 7 * std::ldexp(1.0, -nmax - 6));
    std::vector<double> by_scale(static_cast<std::size_t>(nmax - n0 + 1), 0.0);
    GenerationSummary g = generation_sums(c, nets, 3, 1, 4, by_scale, 1.0 / 128);
    CHECK(g.monotone);
    CHECK(g.bounded);
    CHECK(std::fabs(g.gens.back().sum_diam - c.length()) <= 0.01 * c.length());
  }
}

TEST_CASE("generation CSV has one row per generation") {
  Curve v = make_vshape(0.3);
  NetHierarchy nets = build_nets(v, 0, 6, std::ldexp(1.0, -6) / 8);
  GenerationSummary g = generation_sums(v, nets, 3, 0, 2, std::vector<double>(7, 0.0), 1.0 / 128, 2);
  std::string csv = generation_csv(g);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(g.gens.size()));
  CHECK(csv.rfind("n,scale,sum_diam", 0) == 0);
}
