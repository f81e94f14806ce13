#include "atst/experiment.hpp"

#include "atst/generators.hpp"
#include "atst/measure.hpp"
#include "atst/parallel.hpp"
#include "atst/report.hpp"
#include "atst/summation.hpp"
#include "atst/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

namespace atst {

void ExperimentConfig::validate() const {
  params.validate();
  if (n0 && *n0 > n_max) throw Error(ErrorKind::InvalidArgument, "n0 must not exceed n_max");
  if (n_max > 24) throw Error(ErrorKind::InvalidArgument, "n_max above 24 is not supported");
  if (spacing < 0.0) throw Error(ErrorKind::InvalidArgument, "spacing must be positive");
  if (spacing > 0.0 && spacing > std::ldexp(1.0, -n_max) / 8.0)
    throw Error(ErrorKind::InvalidArgument, "spacing must be at most 2^-n_max / 8");
  if (threads < 1) throw Error(ErrorKind::InvalidArgument, "threads must be positive");
}

// 7/8 of the allowed maximum: grid steps then never add up to a power of two, so
// greedy net points do not land exactly 2^-n apart by accident.
double ExperimentConfig::resolved_spacing() const { return spacing > 0.0 ? spacing : 7.0 * std::ldexp(1.0, -n_max - 6); }

Curve load_source(const std::string& source, std::uint64_t seed) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(source, ec)) return load_curve_file(source);
  return generate(source, seed);
}

PipelineResult run_pipeline(const Curve& raw, const ExperimentConfig& cfg, const std::string& name) {
  cfg.validate();
  const ClassifierParams& p = cfg.params;
  auto [curve, norm] = normalize(raw);
  int n0 = cfg.n0 ? *cfg.n0 : default_n0(curve, p.A);
  if (n0 > cfg.n_max) throw Error(ErrorKind::InvalidArgument, "n_max is below the first scale " + std::to_string(n0));
  NetHierarchy nets = build_nets(curve, n0, cfg.n_max, cfg.resolved_spacing());
  std::vector<Ball> balls = multiresolution_family(nets, p.A);
  std::vector<BetaValue> betas(balls.size());
  parallel_for(balls.size(), cfg.threads, [&](std::size_t i) { betas[i] = beta_ball(curve, balls[i]); });

  RatioReport r;
  r.source = name.empty() ? cfg.source : name;
  r.dim = curve.dim();
  r.length = curve.length();
  r.chord = curve.chord();
  r.deficit = deficit(curve);
  r.scale_factor = norm.scale_factor;
  r.n0 = n0;
  r.n_max = cfg.n_max;
  r.balls = static_cast<Index>(balls.size());
  ExactSum total;
  std::vector<ExactSum> per_scale(static_cast<std::size_t>(cfg.n_max - n0 + 1));
  for (std::size_t i = 0; i < balls.size(); ++i) {
    double v = betas[i].value * betas[i].value * balls[i].diam();
    total.add(v);
    per_scale[balls[i].scale - n0].add(v);
    r.max_certified_gap = std::max(r.max_certified_gap, betas[i].fit.certified_gap);
  }
  r.beta_sum = total.value();
  for (const ExactSum& s : per_scale) r.scale_sums.push_back(s.value());
  r.tail = r.scale_sums.back();
  r.tail_fraction = r.beta_sum > 0 ? r.tail / r.beta_sum : 0.0;
  r.tail_flag = r.tail_fraction > 0.05;
  r.ratio = r.deficit > 1e-12 ? r.beta_sum / r.deficit : std::numeric_limits<double>::quiet_NaN();
  r.suspicious = r.deficit <= 1e-12 && r.beta_sum > 1e-12;
  if (r.suspicious) r.warnings.push_back("zero deficit with a positive beta sum");
  if (r.tail_flag) r.warnings.push_back("last scale carries more than 5% of the beta sum");

  PipelineResult out{curve, norm, nets, balls, betas, std::nullopt, std::nullopt, RatioReport{}};
  if (cfg.classify) {
    out.cores = build_core_systems(nets, p.A, p.J);
    for (const std::string& w : out.cores->warnings) r.warnings.push_back(w);
    out.classes = classify_all(curve, balls, betas, *out.cores, p, cfg.threads);
    r.classified = true;
    r.sums = family_sums(*out.classes);
    r.diag = out.classes->diag;
    Index counted = 0;
    for (Index n : r.sums.count) counted += n;
    r.conservation_ok = counted == r.balls && r.sums.total == r.beta_sum;
  }
  out.report = std::move(r);
  return out;
}

RatioReport run_ratio_experiment(const ExperimentConfig& cfg) {
  return run_pipeline(load_source(cfg.source, cfg.seed), cfg).report;
}

std::string ratio_report_json(const RatioReport& r) {
  JsonObject o;
  o.str("source", r.source).integer("dim", r.dim).num("length", r.length).num("chord", r.chord);
  o.num("deficit", r.deficit).num("scale_factor", r.scale_factor).num("beta_sum", r.beta_sum).num("ratio", r.ratio);
  o.nums("scale_sums", r.scale_sums).num("tail", r.tail).num("tail_fraction", r.tail_fraction);
  o.boolean("tail_flag", r.tail_flag).boolean("suspicious", r.suspicious);
  o.integer("n0", r.n0).integer("n_max", r.n_max).integer("balls", r.balls).num("max_certified_gap", r.max_certified_gap);
  if (r.classified) {
    o.raw("families", family_sums_json(r.sums));
    o.boolean("conservation_ok", r.conservation_ok);
    o.raw("diagnostics", diagnostics_json(r.diag));
  }
  std::vector<std::string> w;
  for (const std::string& s : r.warnings) w.push_back(json_escape(s));
  o.raw("warnings", json_array(w));
  return o.done();
}

std::string ball_records_jsonl(const PipelineResult& p) {
  std::string out;
  for (std::size_t i = 0; i < p.balls.size(); ++i) {
    if (p.classes) {
      out += ball_record_json(p.balls[i], p.classes->records[i]);
    } else {
      const BetaValue& b = p.betas[i];
      out += JsonObject()
                 .integer("n", p.balls[i].scale)
                 .integer("k", p.balls[i].index)
                 .num("radius", p.balls[i].radius)
                 .num("beta", b.value)
                 .str("method", to_string(b.fit.method))
                 .num("certified_gap", b.fit.certified_gap)
                 .done();
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// invariant suite

Index SuiteResult::failures() const {
  return std::count_if(entries.begin(), entries.end(), [](const LedgerEntry& e) { return !e.pass; });
}

std::string SuiteResult::jsonl() const {
  std::string out;
  for (const LedgerEntry& e : entries)
    out += JsonObject()
               .str("invariant", e.invariant)
               .str("curve", e.curve)
               .str("result", e.pass ? "PASS" : "FAIL")
               .str("detail", e.detail)
               .done() +
           "\n";
  return out;
}

std::string SuiteResult::summary_json() const {
  std::map<std::string, std::pair<Index, Index>> per;  // pass, fail
  for (const LedgerEntry& e : entries) (e.pass ? per[e.invariant].first : per[e.invariant].second)++;
  JsonObject inv;
  for (const auto& [k, v] : per) inv.raw(k, JsonObject().integer("pass", v.first).integer("fail", v.second).done());
  return JsonObject()
      .integer("entries", static_cast<std::int64_t>(entries.size()))
      .integer("failures", failures())
      .raw("invariants", inv.done())
      .done();
}

std::vector<std::string> builtin_suite() {
  return {"segment",
          "vshape:h=0.3",
          "circular_arc:sagitta=0.1,n_seg=256",
          "semicircle:n_seg=256",
          "hook:depth=0.2,overlap=0.5",
          "hook:depth=0.05,overlap=0.2",
          "koch:angle=30,depth=3",
          "helix3d:pitch=2,turns=1,n_seg=128",
          "vshape:h=0.2,dim=3"};
}

std::vector<std::string> random_suite(int count, std::uint64_t seed) {
  std::vector<std::string> out;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < count; ++i) {
    std::uint64_t s = rng() >> 16;
    std::ostringstream o;
    o << "random_walk:n=" << 12 + static_cast<int>(s % 20) << ",step=0.08,smoothing=0.6,seed=" << s;
    if (i % 5 == 4) o << ",dim=3";
    out.push_back(o.str());
  }
  return out;
}

namespace {

std::string fmt(double x) { return fmt_num(x); }

void check_curve(const std::string& spec, const ExperimentConfig& cfg, const SuiteOptions& opt, bool inject,
                 std::vector<LedgerEntry>& out) {
  auto add = [&](const std::string& inv, bool pass, const std::string& detail) {
    out.push_back({inv, spec, pass, detail});
  };
  PipelineResult p = run_pipeline(load_source(spec, cfg.seed), cfg, spec);
  const Curve& c = p.curve;

  if (p.curve.dim() == 2) add("generator_simple", is_simple(c), "");

  NetHierarchy nets = p.nets;
  if (inject) {
    auto& levels = nets.mutable_levels();
    NetLevel& L = levels.back();
    Index s = L.samples.front();
    Index extra = s + 1 < nets.sample_points().cols() ? s + 1 : s - 1;
    if (std::find(L.samples.begin(), L.samples.end(), extra) == L.samples.end()) L.samples.push_back(extra);
  }
  NetCheck nc = check_nets(nets);
  {
    std::ostringstream d;
    d << "levels=" << nets.levels().size() << " worst_cover=" << fmt(nc.worst_cover);
    if (!nc.separated) d << " separation level=" << nc.bad_level << " pair=(" << nc.bad_i << "," << nc.bad_j << ")";
    if (!nc.covering) d << " covering level=" << nc.bad_level << " sample=" << nc.bad_i;
    if (!nc.nested) d << " nesting level=" << nc.bad_level;
    add("net_separation", nc.separated, d.str());
    add("net_covering", nc.covering, d.str());
    add("net_nesting", nc.nested, d.str());
  }

  if (p.cores) {
    const CoreSystem* systems[] = {&p.cores->u, &p.cores->ux, &p.cores->uxx};
    const char* names[] = {"U", "Ux", "Uxx"};
    for (int k = 0; k < 3; ++k) {
      CoreCheck cc = check_core_system(*systems[k]);
      std::ostringstream d;
      d << names[k] << " cores=" << cc.cores << " uniq=" << cc.uniqueness_violations << " gap=" << cc.gap_violations
        << " min_gap_ratio=" << fmt(cc.min_gap_ratio) << " nest=" << cc.nesting_violations
        << " conn=" << cc.connectivity_violations << " diam_lo=" << cc.diam_lower_violations
        << " diam_hi=" << cc.diam_upper_violations << " alt_flags=" << cc.alt_convention_flags
        << " rounds=" << cc.rounds_violations;
      bool hard = cc.uniqueness_violations == 0 && cc.gap_violations == 0 && cc.nesting_violations == 0 &&
                  cc.connectivity_violations == 0;
      // the boundary system is allowed to touch; it only has to be well defined
      if (systems[k]->boundary()) hard = cc.uniqueness_violations == 0 && cc.nesting_violations == 0;
      add(std::string("core_axioms_") + names[k], hard, d.str());
      add(std::string("core_diameter_") + names[k],
          cc.diam_lower_violations == 0 && cc.diam_upper_violations == 0 && cc.rounds_violations == 0, d.str());
    }
  }

  {
    double L = c.length();
    bool ok = true;
    std::string detail;
    try {
      double m = mu(c, 0.0, L);
      ok = std::fabs(m - deficit(c)) <= 1e-12 * L;
      detail = "mu=" + fmt(m) + " deficit=" + fmt(deficit(c));
      std::mt19937_64 rng(7);
      std::uniform_real_distribution<double> u(0.0, L);
      for (int k = 0; k < 20; ++k) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        double lhs = mu(c, a, b), rhs = (b - a) - (c.x1_at(b) - c.x1_at(a));
        if (std::fabs(lhs - rhs) > 1e-12 * std::max(b - a, 1e-300) + 1e-15) ok = false;
      }
    } catch (const Error& e) {
      ok = false;
      detail = e.what();
    }
    add("mu_identity", ok, detail);
  }

  {
    std::vector<Bend> bs = bends(c);
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (const Bend& b : bs) {
      double m = mu(c, b.t_lo, b.t_hi);
      worst = std::min(worst, m / b.length);
      if (m < 0.5 * b.length - 1e-9) ok = false;
    }
    add("bend_mass", ok, "bends=" + std::to_string(bs.size()) + " min_ratio=" + fmt(bs.empty() ? 0.0 : worst));
    DensityMeasure mt = mu_tilde(c, bs), m0 = mu_measure(c);
    double tot = mt.total(), base = m0.total();
    add("mu_tilde_bound", base <= 0.0 || tot <= 405.0 * base,
        "mu_tilde=" + fmt(tot) + " mu=" + fmt(base) + " ratio=" + fmt(base > 0 ? tot / base : 0.0));
    add("mu_tilde_dominates", tot >= base - 1e-12 * c.length(), "");
  }

  {
    int J = opt.voronoi_J;
    std::vector<double> sums = p.report.scale_sums;
    int lo = (p.nets.n0() + J - 1) / J;
    int hi = p.nets.n_max() / J;
    if (hi - lo >= 1) {
      GenerationSummary g = generation_sums(c, p.nets, J, lo, hi, sums, 0.5 * std::ldexp(1.0, -2 * J), 1);
      Index lv = 0, uv = 0;
      bool cover = true;
      for (const auto& r : g.gens) {
        lv += r.lower_violations;
        uv += r.upper_violations;
        cover = cover && r.coverage_ok;
      }
      std::ostringstream d;
      d << "gens=" << g.gens.size() << " lower=" << lv << " upper=" << uv << " last_sum=" << fmt(g.gens.back().sum_diam)
        << " length=" << fmt(g.length) << " C_fit=" << fmt(g.C_fit);
      add("voronoi_5_1", lv == 0 && uv == 0, d.str());
      add("voronoi_coverage", cover, d.str());
      add("voronoi_monotone", g.monotone && g.bounded, d.str());
    }
  }

  {
    // oracle comparison on every 7th ball with at least three distinct points
    bool ok = true;
    Index checked = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < p.balls.size(); i += 7) {
      PointSet pts = clip_points(c, p.balls[i]);
      if (distinct_count(pts, 3) < 3) continue;
      LineFit f = fit_line(pts);
      LineFit o = fit_line_sampled(pts);
      ++checked;
      if (c.dim() == 2) {
        double rel = std::fabs(f.max_dist - o.max_dist) / std::max(o.max_dist, 1e-300);
        if (o.max_dist > 1e-14 && rel > 1e-6) ok = false;
        if (o.max_dist > 1e-14) worst = std::max(worst, rel);
      } else {
        // never above the plain direction sample; within 5% of the refined one
        if (f.max_dist > o.max_dist * (1 + 1e-9) + 1e-15) ok = false;
        LineFit r = fit_line_sampled(pts, 2000, true);
        double gap = r.max_dist > 1e-14 ? std::fabs(f.max_dist - r.max_dist) / r.max_dist : 0.0;
        worst = std::max(worst, gap);
        if (gap > 0.05) ok = false;
      }
    }
    add("beta_oracle", ok, "checked=" + std::to_string(checked) + " worst_rel=" + fmt(worst));
  }

  if (p.classes) {
    const RatioReport& r = p.report;
    add("classification_partition", r.conservation_ok,
        "balls=" + std::to_string(r.balls) + " total=" + fmt(r.sums.total) + " beta_sum=" + fmt(r.beta_sum));
    add("classification_dichotomy", r.diag.dichotomy_failures == 0, "");
    bool le = true;
    for (double s : r.sums.sum) le = le && s <= r.sums.total;
    add("family_sum_le_total", le, "");
    std::ostringstream d;
    d << "families=" << r.diag.far_families.size() << " min_growth=" << fmt(r.diag.far_min_growth);
    add("far_growth", r.diag.far_growth_ok, d.str());
    add("case_ii_cap", r.diag.cap_violations == 0,
        "cap_violations=" + std::to_string(r.diag.cap_violations) +
            " tube_violations=" + std::to_string(r.diag.tube_violations));
    add("arc_family_mass", r.diag.arc_mass_violations == 0, "min_ratio=" + fmt(r.diag.arc_mass_min_ratio));
  }
}

}  // namespace

SuiteResult run_invariant_suite(const ExperimentConfig& cfg, const SuiteOptions& opt) {
  std::vector<std::string> specs;
  if (opt.builtin) specs = builtin_suite();
  for (const std::string& s : random_suite(opt.random_curves, opt.random_seed)) specs.push_back(s);
  ExperimentConfig inner = cfg;
  inner.threads = 1;
  std::vector<std::vector<LedgerEntry>> per(specs.size());
  parallel_for(specs.size(), cfg.threads, [&](std::size_t i) {
    try {
      check_curve(specs[i], inner, opt, opt.inject_net_fault && i == 0, per[i]);
    } catch (const std::exception& e) {
      per[i].push_back({"pipeline", specs[i], false, e.what()});
    }
  });
  SuiteResult out;
  for (auto& v : per) out.entries.insert(out.entries.end(), v.begin(), v.end());
  return out;
}

std::string sweep(const ExperimentConfig& base, const std::string& axis, const std::vector<double>& values) {
  static const std::vector<std::string> config_axes = {"A", "J", "eps1", "eps2", "eps3", "delta", "C_U", "c",
                                                       "n0", "nmax", "spacing"};
  std::vector<std::string> header = {"axis", "value", "source", "dim", "length", "deficit", "beta_sum", "ratio",
                                     "tail_fraction", "tail_flag", "balls", "n0", "n_max"};
  for (std::size_t k = 0; k < kLeafCount; ++k) header.push_back(std::string("S_") + to_string(static_cast<Leaf>(k)));
  header.push_back("error");
  CsvWriter w(header);
  for (double v : values) {
    ExperimentConfig cfg = base;
    std::string err;
    RatioReport r;
    try {
      if (std::find(config_axes.begin(), config_axes.end(), axis) != config_axes.end()) {
        auto as_int = [&] {
          if (v != std::floor(v)) throw Error(ErrorKind::InvalidArgument, axis + " must be an integer");
          return static_cast<int>(v);
        };
        if (axis == "A") cfg.params.A = v;
        else if (axis == "J") cfg.params.J = as_int();
        else if (axis == "eps1") cfg.params.eps1 = v;
        else if (axis == "eps2") cfg.params.eps2 = v;
        else if (axis == "eps3") cfg.params.eps3 = v;
        else if (axis == "delta") cfg.params.delta = v;
        else if (axis == "C_U") cfg.params.C_U = v;
        else if (axis == "c") cfg.params.c_littlec = v;
        else if (axis == "n0") cfg.n0 = as_int();
        else if (axis == "nmax") cfg.n_max = as_int();
        else cfg.spacing = v;
      } else {
        GeneratorSpec g = parse_generator_spec(cfg.source);
        g.params[axis] = v;
        cfg.source = to_string(g);
      }
      r = run_ratio_experiment(cfg);
    } catch (const std::exception& e) {
      err = e.what();
    }
    std::vector<std::string> row = {axis, fmt_num(v), cfg.source};
    if (err.empty()) {
      for (std::string s : {std::to_string(r.dim), fmt_num(r.length), fmt_num(r.deficit), fmt_num(r.beta_sum),
                            fmt_num(r.ratio), fmt_num(r.tail_fraction), std::string(r.tail_flag ? "1" : "0"),
                            std::to_string(r.balls), std::to_string(r.n0), std::to_string(r.n_max)})
        row.push_back(s);
      for (std::size_t k = 0; k < kLeafCount; ++k) row.push_back(r.classified ? fmt_num(r.sums.sum[k]) : "");
    } else {
      row.resize(header.size() - 1);
    }
    row.push_back(err);
    w.row(row);
  }
  return w.text();
}

}  // namespace atst
