#include <doctest.h>

#include "atst/experiment.hpp"
#include "atst/generators.hpp"

#include <cmath>
#include <sstream>

using namespace atst;

namespace {
ExperimentConfig small(const std::string& source, int nmax = 7) {
  ExperimentConfig cfg;
  cfg.source = source;
  cfg.n_max = nmax;
  return cfg;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}
}  // namespace

TEST_CASE("config validation") {
  ExperimentConfig cfg = small("segment");
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.resolved_spacing() == 7 * std::ldexp(1.0, -13));
  cfg.spacing = std::ldexp(1.0, -7) / 4;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small("segment");
  cfg.n0 = 9;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small("segment");
  cfg.params.eps1 = 2.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("segment: zero sum, zero deficit, no ratio") {
  ExperimentConfig cfg = small("segment");
  PipelineResult r = run_pipeline(load_source("segment", cfg.seed), cfg, "segment");
  CHECK(r.report.beta_sum == 0.0);
  CHECK(r.report.deficit == 0.0);
  CHECK(std::isnan(r.report.ratio));
  CHECK_FALSE(r.report.suspicious);
  REQUIRE(r.report.classified);
  CHECK(r.report.sums.count[static_cast<std::size_t>(Leaf::G3)] + r.report.sums.count[static_cast<std::size_t>(Leaf::G_L)] ==
        r.report.balls);
  CHECK(ratio_report_json(r.report).find("\"ratio\":null") != std::string::npos);
}

TEST_CASE("family sums conserve the total exactly") {
  for (const char* spec : {"vshape:h=0.3", "hook:depth=0.2,overlap=0.5", "koch:angle=30,depth=2"}) {
    ExperimentConfig cfg = small(spec, 8);
    PipelineResult r = run_pipeline(load_source(spec, cfg.seed), cfg, spec);
    REQUIRE(r.report.classified);
    CHECK(r.report.conservation_ok);
    CHECK(r.report.sums.balls == r.report.balls);
    CHECK(r.report.sums.total == r.report.beta_sum);
    Index counted = 0;
    for (Index n : r.report.sums.count) counted += n;
    CHECK(counted == r.report.balls);
    CHECK(r.report.beta_sum > 0.0);
    CHECK(std::isfinite(r.report.ratio));
    double scales = 0.0;
    for (double s : r.report.scale_sums) scales += s;
    CHECK(scales == doctest::Approx(r.report.beta_sum).epsilon(1e-12));
  }
}

TEST_CASE("outputs do not depend on the thread count") {
  ExperimentConfig one = small("hook:depth=0.2,overlap=0.5", 8);
  ExperimentConfig many = one;
  many.threads = 4;
  Curve c = load_source(one.source, one.seed);
  PipelineResult a = run_pipeline(c, one, one.source), b = run_pipeline(c, many, many.source);
  CHECK(ratio_report_json(a.report) == ratio_report_json(b.report));
  CHECK(ball_records_jsonl(a) == ball_records_jsonl(b));
}

TEST_CASE("V-shape ratio is stable under refinement") {
  double lo = INFINITY, hi = 0;
  for (int nmax : {8, 10}) {
    ExperimentConfig cfg = small("vshape:h=0.3", nmax);
    cfg.classify = false;
    RatioReport r = run_ratio_experiment(cfg);
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  CHECK(hi / lo < 2.0);
}

TEST_CASE("ball records are one JSON object per ball") {
  ExperimentConfig cfg = small("vshape:h=0.3", 6);
  PipelineResult r = run_pipeline(load_source(cfg.source, cfg.seed), cfg, cfg.source);
  auto ls = lines(ball_records_jsonl(r));
  CHECK(static_cast<Index>(ls.size()) == r.report.balls);
  for (const std::string& l : ls) {
    CHECK(l.front() == '{');
    CHECK(l.back() == '}');
    CHECK(l.find("\"leaf\"") != std::string::npos);
  }
}

TEST_CASE("sweep: one row per value, errors in their own column") {
  ExperimentConfig base = small("circular_arc:sagitta=0.1,n_seg=64", 6);
  base.classify = false;
  auto ls = lines(sweep(base, "sagitta", {0.05, 0.1, 0.7}));
  REQUIRE(ls.size() == 4);
  CHECK(ls[0].rfind("axis,value,source", 0) == 0);
  CHECK(ls[0].substr(ls[0].size() - 5) == "error");
  CHECK(ls[1].back() == ',');  // empty error cell
  CHECK(ls[3].find("sagitta") != std::string::npos);
  CHECK(ls[3].back() != ',');
  // generator specs contain commas and are quoted
  CHECK(ls[1].find(",\"circular_arc:n_seg=64,sagitta=0.05") != std::string::npos);

  auto nm = lines(sweep(base, "nmax", {5, 6}));
  CHECK(nm.size() == 3);
  CHECK(lines(sweep(base, "sagitta", {})).size() == 1);
}

TEST_CASE("invariant suite passes and catches an injected net fault") {
  ExperimentConfig cfg = small("segment", 7);
  SuiteOptions opt;
  opt.random_curves = 2;
  opt.builtin = false;
  SuiteResult ok = run_invariant_suite(cfg, opt);
  CHECK(ok.failures() == 0);
  CHECK(ok.entries.size() > 10);

  opt.inject_net_fault = true;
  SuiteResult bad = run_invariant_suite(cfg, opt);
  CHECK(bad.failures() >= 1);
  bool found = false;
  for (const LedgerEntry& e : bad.entries)
    if (e.invariant == "net_separation" && !e.pass) found = e.detail.find("pair") != std::string::npos;
  CHECK(found);
  CHECK(bad.summary_json().find("\"failures\":") != std::string::npos);
}

TEST_CASE("builtin and random suites") {
  CHECK(builtin_suite().size() >= 8);
  auto r1 = random_suite(5, 42), r2 = random_suite(5, 42);
  CHECK(r1 == r2);
  CHECK(random_suite(5, 43) != r1);
  for (const std::string& s : r1) CHECK_NOTHROW(generate(s, 0));
}
