// Acceptance run: one PASS/FAIL line per criterion, with a short detail.
// Usage: acceptance [--threads N] [--only k,...] [--xfail k,...]
// Exit status is 0 when every failing criterion is listed in --xfail.

#include "atst/beta.hpp"
#include "atst/classifier.hpp"
#include "atst/cores.hpp"
#include "atst/experiment.hpp"
#include "atst/generators.hpp"
#include "atst/measure.hpp"
#include "atst/nets.hpp"
#include "atst/voronoi.hpp"

#include "oracles.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

using namespace atst;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;  // printed indented under the verdict
};

int g_threads = 4;

Curve normalized(const std::string& spec) { return normalize(load_source(spec, 42)).first; }

std::vector<std::string> suite_2d() {
  std::vector<std::string> out;
  for (const std::string& s : builtin_suite())
    if (generate(s, 42).dim() == 2) out.push_back(s);
  return out;
}

// First coordinate at arclength t, from the vertices directly.
double x1_oracle(const PointSet& v, const std::vector<double>& cum, double t) {
  auto it = std::upper_bound(cum.begin(), cum.end(), t);
  std::size_t i = it == cum.begin() ? 0 : static_cast<std::size_t>(it - cum.begin()) - 1;
  if (i + 1 >= cum.size()) i = cum.size() - 2;
  double L = cum[i + 1] - cum[i];
  double s = L > 0 ? (t - cum[i]) / L : 0.0;
  return v(0, static_cast<Index>(i)) + s * (v(0, static_cast<Index>(i) + 1) - v(0, static_cast<Index>(i)));
}

std::vector<double> cum_oracle(const PointSet& v) {
  std::vector<double> cum{0.0};
  for (Index i = 1; i < v.cols(); ++i) cum.push_back(cum.back() + (v.col(i) - v.col(i - 1)).norm());
  return cum;
}

// mu over [a, b] by the closed form (b - a) - (x1(b) - x1(a)).
double mu_oracle(const Curve& c, double a, double b) {
  auto cum = cum_oracle(c.vertices());
  return (b - a) - (x1_oracle(c.vertices(), cum, b) - x1_oracle(c.vertices(), cum, a));
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// 1. mu(Gamma) = length - chord and mu on subintervals
Outcome c1_identity() {
  Outcome o;
  auto specs = random_suite(200, 42);
  for (const std::string& s : builtin_suite()) specs.push_back(s);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0, worst_sub = 0.0;
  for (const std::string& spec : specs) {
    Curve c = normalized(spec);
    auto cum = cum_oracle(c.vertices());
    const double L = cum.back();
    const double crd = (c.vertices().col(c.num_vertices() - 1) - c.vertices().col(0)).norm();
    DensityMeasure m = mu_measure(c);
    double rel = std::fabs(m.total() - (L - crd)) / L;
    worst = std::max(worst, rel);
    if (rel > 1e-12) o.pass = false;
    for (int k = 0; k < 20; ++k) {
      double a = u(rng) * L, b = u(rng) * L;
      if (a > b) std::swap(a, b);
      if (b - a < 1e-9) continue;
      double want = (b - a) - (x1_oracle(c.vertices(), cum, b) - x1_oracle(c.vertices(), cum, a));
      // both sides carry rounding of size eps * L from the cumulative lengths
      double r = std::fabs(m.measure(a, b) - want) / L;
      worst_sub = std::max(worst_sub, r);
      if (r > 1e-12) o.pass = false;
    }
  }
  o.detail = std::to_string(specs.size()) + " curves, worst relative error " + fmt(worst) +
             " on the whole curve, " + fmt(worst_sub) + " on subintervals (relative to length)";
  return o;
}

// 2. straight segment: every beta zero, deficit zero
Outcome c2_segment() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.source = "segment";
  cfg.n_max = 10;
  cfg.classify = false;
  cfg.threads = g_threads;
  PipelineResult r = run_pipeline(load_source("segment", 42), cfg, "segment");
  double worst = 0.0;
  for (const BetaValue& b : r.betas) worst = std::max(worst, b.value);
  o.pass = worst < 1e-12 && r.report.beta_sum == 0.0 && r.report.deficit == 0.0;
  o.detail = std::to_string(r.balls.size()) + " balls, max beta " + fmt(worst) + ", deficit " + fmt(r.report.deficit);
  return o;
}

// 3. net axioms by brute force on 100 random curves, 6 levels each
Outcome c3_nets() {
  Outcome o;
  Index levels = 0, bad = 0;
  for (const std::string& spec : random_suite(100, 7)) {
    Curve c = normalized(spec);
    const int n0 = default_n0(c, 8.0), nmax = n0 + 5;
    NetHierarchy nets = build_nets(c, n0, nmax, 7 * std::ldexp(1.0, -nmax - 6));
    const PointSet& samples = nets.sample_points();
    std::set<Index> prev;
    for (int n = n0; n <= nmax; ++n) {
      ++levels;
      const double eps = std::ldexp(1.0, -n);
      PointSet X = nets.level_points(n);
      bool ok = true;
      for (Index i = 0; i < X.cols() && ok; ++i)
        for (Index j = i + 1; j < X.cols(); ++j)
          if (!((X.col(i) - X.col(j)).norm() > eps)) {
            ok = false;
            break;
          }
      for (Index s = 0; s < samples.cols() && ok; ++s)
        if ((X.colwise() - samples.col(s)).colwise().norm().minCoeff() > eps) ok = false;
      std::set<Index> cur(nets.level(n).samples.begin(), nets.level(n).samples.end());
      for (Index s : prev)
        if (!cur.count(s)) ok = false;
      prev = std::move(cur);
      if (!ok) ++bad;
    }
  }
  o.pass = bad == 0;
  o.detail = std::to_string(levels) + " levels checked, " + std::to_string(bad) + " bad";
  return o;
}

// 4. core axioms on the standard suite, J in {2, 3, 10}
Outcome c4_cores() {
  Outcome o;
  Index systems = 0, flags = 0, cores = 0;
  for (const std::string& spec : builtin_suite()) {
    Curve c = normalized(spec);
    const int n0 = default_n0(c, 8.0);
    NetHierarchy nets = build_nets(c, n0, 9, 7 * std::ldexp(1.0, -15));
    for (int J : {2, 3, 10}) {
      CoreSystems cs = build_core_systems(nets, 8.0, J);
      for (const CoreSystem* s : {&cs.u, &cs.ux, &cs.uxx}) {
        CoreCheck k = check_core_system(*s);
        ++systems;
        cores += k.cores;
        flags += k.alt_convention_flags;
        bool ok = k.uniqueness_violations == 0 && k.nesting_violations == 0;
        // the c = 1/(4A) system may touch at equal scales; gaps only below it
        if (!s->boundary()) ok = ok && k.gap_violations == 0 && k.connectivity_violations == 0;
        ok = ok && k.diam_lower_violations == 0 && k.diam_upper_violations == 0 && k.rounds_violations == 0;
        if (!ok) {
          o.pass = false;
          o.notes.push_back(spec + " J=" + std::to_string(J) + " uniq=" + std::to_string(k.uniqueness_violations) +
                            " gap=" + std::to_string(k.gap_violations) + " nest=" +
                            std::to_string(k.nesting_violations) + " diam=" +
                            std::to_string(k.diam_lower_violations + k.diam_upper_violations));
        }
      }
    }
  }
  o.detail = std::to_string(systems) + " systems, " + std::to_string(cores) + " cores, alt-convention flags " +
             std::to_string(flags) + " (reported, not failed)";
  return o;
}

// 5. bend mass, and the hook's bend by closed form
Outcome c5_bends() {
  Outcome o;
  Index count = 0;
  double worst = 1e300;
  auto specs = builtin_suite();
  for (const std::string& s : random_suite(50, 5)) specs.push_back(s);
  for (const std::string& spec : specs) {
    Curve c = normalized(spec);
    for (const Bend& b : bends(c)) {
      ++count;
      double m = mu_oracle(c, b.t_lo, b.t_hi);
      worst = std::min(worst, m - 0.5 * b.length);
      if (m < 0.5 * b.length - 1e-9) o.pass = false;
    }
  }
  Curve hook = load_curve(R"({"dim":2,"vertices":[[0,0],[1,0],[0.5,0.2],[1.5,0.2]]})");
  auto hb = bends(hook);
  const double len = 0.5 + std::sqrt(0.29) + 0.5, mass = len - 0.5;
  bool hook_ok = hb.size() == 1 && std::fabs(hb[0].length - len) <= 1e-9 &&
                 std::fabs(mu(hook, hb[0].t_lo, hb[0].t_hi) - mass) <= 1e-9;
  o.pass = o.pass && hook_ok;
  o.detail = std::to_string(count) + " bends, min mu(b) - l(b)/2 = " + fmt(worst) + "; hook l(b) = " +
             (hb.empty() ? "none" : fmt(hb[0].length)) + ", mu(b) = " +
             (hb.empty() ? "none" : fmt(mu(hook, hb[0].t_lo, hb[0].t_hi)));
  return o;
}

// 6. mu~ <= 405 mu on the whole curve, and mu~ >= mu on every interval tried
Outcome c6_inflation() {
  Outcome o;
  auto specs = builtin_suite();
  for (const std::string& s : random_suite(50, 6)) specs.push_back(s);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  Index used = 0;
  for (const std::string& spec : specs) {
    Curve c = normalized(spec);
    DensityMeasure m = mu_measure(c), mt = mu_tilde(c, bends(c));
    double total = m.total();
    if (total > 0) {
      ++used;
      worst = std::max(worst, mt.total() / total);
      if (mt.total() > 405 * total) o.pass = false;
    }
    const double L = c.length();
    for (int k = 0; k < 50; ++k) {
      double a = u(rng) * L, b = u(rng) * L;
      if (a > b) std::swap(a, b);
      if (mt.measure(a, b) < m.measure(a, b) - 1e-12 * L) o.pass = false;
    }
  }
  o.detail = std::to_string(used) + " curves with mu > 0, max mu~/mu = " + fmt(worst);
  return o;
}

// Clip sets of random curves in random balls with 3..12 points.
std::vector<PointSet> small_clip_sets(int dim, int want, std::uint64_t seed) {
  std::vector<PointSet> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t k = 0; static_cast<int>(out.size()) < want; ++k) {
    Curve c = normalize(make_random_walk(0.15, 10, 0.3, seed * 1000 + k, dim)).first;
    for (int tries = 0; tries < 20 && static_cast<int>(out.size()) < want; ++tries) {
      Point x = c.point_at(u(rng) * c.length());
      PointSet p = clip_points(c, x, 0.05 + 0.5 * u(rng));
      if (p.cols() >= 3 && p.cols() <= 12 && distinct_count(p, 3) >= 3) out.push_back(p);
    }
  }
  return out;
}

// 7. beta against brute-force direction enumeration
Outcome c7_oracle() {
  Outcome o;
  double worst2 = 0.0;
  for (const PointSet& p : small_clip_sets(2, 100, 7)) {
    double f = fit_line(p).max_dist, w = oracle::min_width_2d(p);
    double rel = std::fabs(f - w) / std::max(w, 1e-300);
    if (w > 1e-14) worst2 = std::max(worst2, rel);
    if (w > 1e-14 && rel > 1e-6) o.pass = false;
  }
  double worst_gap = 0.0, worst_excess = -1.0, plain_gap = 0.0;
  for (const PointSet& p : small_clip_sets(3, 100, 8)) {
    double f = fit_line(p).max_dist, s = oracle::sampled_direction_3d(p), r = oracle::refined_direction_3d(p);
    if (!(s > 1e-14)) continue;
    worst_excess = std::max(worst_excess, (f - s) / s);
    plain_gap = std::max(plain_gap, (s - f) / s);
    if (f > s * (1 + 1e-9)) o.pass = false;
    double gap = r > 1e-14 ? std::fabs(f - r) / r : 0.0;
    worst_gap = std::max(worst_gap, gap);
    if (gap >= 0.05) o.pass = false;
  }
  o.detail = "2D worst rel " + fmt(worst2) + "; 3D (optimizer - 2000-direction oracle) max " + fmt(worst_excess) +
             " relative, gap to the polished oracle max " + fmt(worst_gap) + " (to the plain sample " +
             fmt(plain_gap) + ")";
  return o;
}

// 8. diameter bounds on every cell, monotone generation sums, V and semicircle within 1%
Outcome c8_voronoi() {
  Outcome o;
  auto specs = suite_2d();
  for (const std::string& s : random_suite(10, 8)) specs.push_back(s);
  const int nmax = 12, J = 3;
  Index cells = 0, lower = 0, upper = 0;
  for (const std::string& spec : specs) {
    Curve c = normalized(spec);
    const int n0 = default_n0(c, 8.0);
    NetHierarchy nets = build_nets(c, n0, nmax, 7 * std::ldexp(1.0, -nmax - 6));
    std::vector<double> zeros(static_cast<std::size_t>(nmax - n0 + 1), 0.0);
    GenerationSummary g = generation_sums(c, nets, J, 0, 100, zeros, 1.0 / 128, g_threads);
    for (const GenerationReport& r : g.gens) {
      cells += r.n_cells;
      lower += r.lower_violations;
      upper += r.upper_violations;
      if (!r.coverage_ok) o.pass = false;
    }
    if (!g.monotone) o.pass = false;
    if (spec.rfind("vshape", 0) == 0 || spec.rfind("semicircle", 0) == 0) {
      double gap = std::fabs(g.gens.back().sum_diam - c.length()) / c.length();
      o.notes.push_back(spec + ": finest generation sum " + fmt(g.gens.back().sum_diam) + " vs length " +
                        fmt(c.length()) + " (" + fmt(100 * gap) + "%)");
      if (gap > 0.01) o.pass = false;
    }
  }
  if (lower || upper) o.pass = false;
  o.detail = std::to_string(specs.size()) + " curves, " + std::to_string(cells) + " cells, diameter-bound violations " +
             std::to_string(lower) + " below / " + std::to_string(upper) + " above";
  return o;
}

// 9. sagitta sweep: finite positive ratios within a factor 10, tails under 5%
Outcome c9_sweep() {
  Outcome o;
  double lo = 1e300, hi = 0.0;
  for (double h : {0.02, 0.05, 0.08, 0.11, 0.14, 0.17, 0.2}) {
    ExperimentConfig cfg;
    cfg.classify = false;
    cfg.threads = g_threads;
    std::ostringstream src;
    src << "circular_arc:sagitta=" << h << ",n_seg=512";
    cfg.source = src.str();
    RatioReport r;
    for (cfg.n_max = 9; cfg.n_max <= 13; ++cfg.n_max) {
      r = run_ratio_experiment(cfg);
      if (r.tail_fraction < 0.05) break;
    }
    const double R = (h * h + 0.25) / (2 * h);
    const double closed = 2 * R * std::asin(0.5 / R) - 1.0;
    const double dev = std::fabs(r.deficit - closed) / closed;
    if (!(std::isfinite(r.ratio) && r.ratio > 0) || r.tail_fraction >= 0.05 || dev > 0.02) o.pass = false;
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
    o.notes.push_back("h=" + fmt(h) + " n_max=" + std::to_string(r.n_max) + " deficit=" + fmt(r.deficit) +
                      " (closed form " + fmt(closed) + ") beta_sum=" + fmt(r.beta_sum) + " ratio=" + fmt(r.ratio) +
                      " tail=" + fmt(r.tail_fraction));
  }
  if (!(hi / lo <= 10)) o.pass = false;
  o.detail = "ratio range [" + fmt(lo) + ", " + fmt(hi) + "], max/min " + fmt(hi / lo);
  return o;
}

// 10. every ball in exactly one leaf, exact conservation, each family <= total
Outcome c10_partition() {
  Outcome o;
  for (const std::string& spec : builtin_suite()) {
    ExperimentConfig cfg;
    cfg.source = spec;
    cfg.n_max = 10;
    cfg.threads = g_threads;
    PipelineResult r = run_pipeline(load_source(spec, 42), cfg, spec);
    const FamilySums& s = r.report.sums;
    Index counted = 0;
    bool ok = r.report.conservation_ok && s.balls == static_cast<Index>(r.balls.size()) &&
              s.total == r.report.beta_sum;
    std::ostringstream line;
    line << spec << ":";
    for (std::size_t k = 0; k < kLeafCount; ++k) {
      counted += s.count[k];
      if (s.sum[k] > s.total) ok = false;
      if (s.count[k]) line << " " << to_string(static_cast<Leaf>(k)) << "=" << fmt(s.total > 0 ? s.sum[k] / s.total : 0.0);
    }
    ok = ok && counted == static_cast<Index>(r.balls.size());
    if (!ok) o.pass = false;
    o.notes.push_back(line.str());
  }
  o.detail = std::to_string(builtin_suite().size()) + " curves, per-family share of the total below";
  return o;
}

// 11. far families: strictly increasing diameters, growth a > 0 on the hook suite
Outcome c11_far_growth() {
  Outcome o;
  struct Run {
    std::string name;
    Curve curve;
    double A, c;
    int nmax;
  };
  std::vector<Run> runs;
  for (const char* h : {"hook:depth=0.2,overlap=0.5", "hook:depth=0.05,overlap=0.2", "hook:depth=0.02,overlap=0.8",
                        "hook:depth=0.05,overlap=0.7", "hook:depth=0.1,overlap=0.9"}) {
    runs.push_back({h, load_source(h, 42), 8.0, 1e-3, 10});
    runs.push_back({h, load_source(h, 42), 8.0, 1e5, 10});
  }
  // a hairpin threaded through a long return loop
  const double ov = 2e-5, w = 1e-5, k = 1e-3;
  PointSet v(2, 7);
  v << 0, 1, 1 - ov, 1.2, 1.2, 1 + k, 1 + k, 0, 0, w, w, -0.2, -0.2, 0;
  runs.push_back({"threaded hook", Curve(v), 512.0, 1e5, 14});

  Index families = 0, multi = 0, non_increasing = 0;
  double best = -1.0;
  for (const Run& run : runs) {
    ExperimentConfig cfg;
    cfg.params.A = run.A;
    cfg.params.c_littlec = run.c;
    cfg.n_max = run.nmax;
    cfg.threads = g_threads;
    PipelineResult r = run_pipeline(run.curve, cfg, run.name);
    const Diagnostics& d = r.classes->diag;
    Index fam = 0, fam_multi = 0;
    for (const FarFamily& f : d.far_families) {
      ++fam;
      if (f.balls.size() >= 2) {
        ++fam_multi;
        best = std::max(best, f.min_growth);
      }
      if (!f.strictly_increasing) ++non_increasing;
    }
    families += fam;
    multi += fam_multi;
    o.notes.push_back(run.name + " A=" + fmt(run.A) + " c=" + fmt(run.c) + ": " + std::to_string(r.balls.size()) +
                      " balls, far families " + std::to_string(fam) + " (with >= 2 balls: " +
                      std::to_string(fam_multi) + ")");
  }
  o.pass = non_increasing == 0 && multi > 0 && best > 0.0;
  o.detail = std::to_string(families) + " far families, " + std::to_string(multi) + " with >= 2 balls, " +
             std::to_string(non_increasing) + " not increasing; growth a = " + (multi ? fmt(best) : "n/a");
  return o;
}

// 12. threads 1 and N give identical bytes
Outcome c12_determinism() {
  Outcome o;
  Index compared = 0;
  auto outputs = [](const std::string& spec, int threads) {
    ExperimentConfig cfg;
    cfg.source = spec;
    cfg.n_max = 8;
    cfg.threads = threads;
    PipelineResult r = run_pipeline(load_source(spec, 42), cfg, spec);
    int lo = (r.nets.n0() + 2) / 3, hi = r.nets.n_max() / 3;
    GenerationSummary g = generation_sums(r.curve, r.nets, 3, lo, hi, r.report.scale_sums, 1.0 / 128, threads);
    return std::vector<std::string>{ratio_report_json(r.report), ball_records_jsonl(r), generation_csv(g)};
  };
  for (const std::string& spec : builtin_suite()) {
    auto a = outputs(spec, 1), b = outputs(spec, g_threads);
    for (std::size_t i = 0; i < a.size(); ++i, ++compared)
      if (a[i] != b[i]) {
        o.pass = false;
        o.notes.push_back(spec + ": output " + std::to_string(i) + " differs");
      }
  }
  ExperimentConfig cfg;
  cfg.n_max = 7;
  cfg.classify = false;
  SuiteOptions opt;
  opt.random_curves = 3;
  opt.builtin = false;  // the builtin curves are compared above
  cfg.threads = 1;
  std::string s1 = run_invariant_suite(cfg, opt).jsonl();
  std::string w1 = sweep(cfg, "sagitta", {0.05, 0.1});
  cfg.threads = g_threads;
  std::string sN = run_invariant_suite(cfg, opt).jsonl();
  std::string wN = sweep(cfg, "sagitta", {0.05, 0.1});
  compared += 2;
  if (s1 != sN || w1 != wN) {
    o.pass = false;
    o.notes.push_back("invariant ledger or sweep CSV differs");
  }
  o.detail = std::to_string(compared) + " outputs compared at threads 1 and " + std::to_string(g_threads);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only, xfail;
  app.add_option("--threads", g_threads)->check(CLI::PositiveNumber);
  app.add_option("--only", only)->delimiter(',');
  app.add_option("--xfail", xfail, "criteria known to fail; they do not change the exit status")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0: no runtime limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "mu identity", 5, c1_identity},
      {2, "straight segment is zero", 1, c2_segment},
      {3, "net axioms", 30, c3_nets},
      {4, "core axioms", 60, c4_cores},
      {5, "bend mass", 0, c5_bends},
      {6, "measure inflation", 0, c6_inflation},
      {7, "beta oracle", 60, c7_oracle},
      {8, "Voronoi bounds", 60, c8_voronoi},
      {9, "sagitta scaling", 300, c9_sweep},
      {10, "classification partition", 120, c10_partition},
      {11, "far-ball growth", 0, c11_far_growth},
      {12, "determinism", 0, c12_determinism},
  };
  std::set<int> pick(only.begin(), only.end()), expected(xfail.begin(), xfail.end());
  int unexpected = 0;
  for (const Criterion& c : all) {
    if (!pick.empty() && !pick.count(c.id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = c.budget_s == 0 || secs < c.budget_s;
    bool pass = o.pass && in_time;
    std::printf("criterion %2d %-26s %s  %.1fs%s  %s\n", c.id, c.name, pass ? "PASS" : "FAIL", secs,
                c.budget_s > 0 ? (" of " + fmt(c.budget_s) + "s").c_str() : "", o.detail.c_str());
    for (const std::string& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    if (!pass && !expected.count(c.id)) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
