#include "atst/curve.hpp"
#include "atst/experiment.hpp"
#include "atst/generators.hpp"
#include "atst/parallel.hpp"
#include "atst/report.hpp"
#include "atst/voronoi.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>

using namespace atst;

namespace {

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text_file(out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tst: beta sums, deficits and the constructions behind them for polygonal arcs"};
  app.require_subcommand(1);
  app.fallthrough();

  ExperimentConfig cfg;
  ClassifierParams& p = cfg.params;
  int n0 = -1000;
  std::string out;
  cfg.threads = default_threads();
  app.add_option("--A", p.A, "ball inflation");
  app.add_option("--J", p.J, "scale jump");
  app.add_option("--eps1", p.eps1);
  app.add_option("--eps2", p.eps2);
  app.add_option("--eps3", p.eps3);
  app.add_option("--delta", p.delta);
  app.add_option("--C-U", p.C_U);
  app.add_option("--c", p.c_littlec, "tree root threshold constant");
  app.add_option("--n0", n0, "first scale (default floor(log2(A/diam)))");
  app.add_option("--nmax", cfg.n_max, "finest scale");
  app.add_option("--spacing", cfg.spacing, "dense sample spacing (default 7 * 2^-(nmax+6))");
  app.add_option("--seed", cfg.seed);
  app.add_option("--out", out, "output path, stdout if omitted");
  app.add_option("--threads", cfg.threads)->check(CLI::PositiveNumber);

  std::string source;

  auto* gen = app.add_subcommand("gen", "write a generated curve as JSON");
  gen->add_option("spec", source, "e.g. vshape:h=0.3")->required();

  bool no_classify = false;
  std::string balls_out;
  auto* analyze = app.add_subcommand("analyze", "beta sum, deficit and ratio report");
  analyze->add_option("source", source, "curve file or generator spec")->required();
  analyze->add_flag("--no-classify", no_classify);
  analyze->add_option("--balls", balls_out, "per-ball JSON lines");

  std::string summary_out;
  auto* classify = app.add_subcommand("classify", "per-ball family records as JSON lines");
  classify->add_option("source", source)->required();
  classify->add_option("--summary", summary_out, "summary JSON path");

  int vJ = 3, g_lo = 0, g_hi = 1000;
  double veps = -1.0;
  auto* voronoi = app.add_subcommand("voronoi", "Voronoi generation CSV");
  voronoi->add_option("source", source)->required();
  voronoi->add_option("--gen-J", vJ, "scale jump between generations")->check(CLI::PositiveNumber);
  voronoi->add_option("--gen-lo", g_lo);
  voronoi->add_option("--gen-hi", g_hi);
  voronoi->add_option("--flat-eps", veps, "flatness threshold (default 2^-2J / 2)");

  std::string axis;
  std::vector<double> values;
  auto* sw = app.add_subcommand("sweep", "one ratio run per value, CSV");
  sw->add_option("source", source)->required();
  sw->add_option("--axis", axis)->required();
  sw->add_option("--values", values)->required()->delimiter(',');

  SuiteOptions sopt;
  bool no_builtin = false;
  auto* verify = app.add_subcommand("verify", "invariant suite; exit 1 on any failure");
  verify->add_option("--random", sopt.random_curves, "number of random curves");
  verify->add_option("--random-seed", sopt.random_seed);
  verify->add_flag("--no-builtin", no_builtin);
  verify->add_flag("--inject-net-fault", sopt.inject_net_fault);
  verify->add_option("--gen-J", sopt.voronoi_J);
  verify->add_option("--summary", summary_out, "summary JSON path");

  CLI11_PARSE(app, argc, argv);
  if (n0 != -1000) cfg.n0 = n0;
  if (!source.empty()) cfg.source = source;

  try {
    if (*gen) {
      emit(out, curve_to_json(generate(source, cfg.seed)) + "\n");
    } else if (*analyze) {
      cfg.classify = !no_classify;
      PipelineResult r = run_pipeline(load_source(source, cfg.seed), cfg, source);
      if (!balls_out.empty()) write_text_file(balls_out, ball_records_jsonl(r));
      emit(out, ratio_report_json(r.report) + "\n");
    } else if (*classify) {
      PipelineResult r = run_pipeline(load_source(source, cfg.seed), cfg, source);
      emit(out, ball_records_jsonl(r));
      if (!summary_out.empty()) write_text_file(summary_out, ratio_report_json(r.report) + "\n");
    } else if (*voronoi) {
      cfg.classify = false;
      PipelineResult r = run_pipeline(load_source(source, cfg.seed), cfg, source);
      if (veps < 0) veps = 0.5 * std::ldexp(1.0, -2 * vJ);
      int lo = std::max(g_lo, (r.nets.n0() + vJ - 1) / vJ);
      int hi = std::min(g_hi, r.nets.n_max() / vJ);
      GenerationSummary g = generation_sums(r.curve, r.nets, vJ, lo, hi, r.report.scale_sums, veps, cfg.threads);
      emit(out, generation_csv(g));
    } else if (*sw) {
      emit(out, sweep(cfg, axis, values));
    } else if (*verify) {
      sopt.builtin = !no_builtin;
      SuiteResult s = run_invariant_suite(cfg, sopt);
      emit(out, s.jsonl());
      std::string summary = s.summary_json() + "\n";
      if (summary_out.empty())
        std::cerr << summary;
      else
        write_text_file(summary_out, summary);
      return s.failures() == 0 ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
