#pragma once

#include "atst/beta.hpp"
#include "atst/classifier.hpp"
#include "atst/cores.hpp"
#include "atst/nets.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace atst {

struct ExperimentConfig {
  std::string source = "vshape";  // generator spec, or a path to a curve file
  ClassifierParams params;
  std::optional<int> n0;           // default: floor(log2(A / diam))
  int n_max = 10;
  double spacing = 0.0;            // 0: 7 * 2^-(n_max+6)
  std::uint64_t seed = 42;
  int threads = 1;
  bool classify = true;

  // Throws InvalidArgument on bad settings; also validates params.
  void validate() const;
  double resolved_spacing() const;
};

struct RatioReport {
  std::string source;
  Index dim = 0;
  double length = 0.0, chord = 0.0, deficit = 0.0;
  double scale_factor = 1.0;
  double beta_sum = 0.0;
  double ratio = 0.0;  // NaN when deficit <= 1e-12
  std::vector<double> scale_sums;  // per scale from n0
  double tail = 0.0, tail_fraction = 0.0;
  bool tail_flag = false;  // last scale carries more than 5%
  bool suspicious = false; // deficit zero with a positive beta sum
  int n0 = 0, n_max = 0;
  Index balls = 0;
  double max_certified_gap = 0.0;
  bool classified = false;
  FamilySums sums;
  bool conservation_ok = true;
  Diagnostics diag;
  std::vector<std::string> warnings;
};

struct PipelineResult {
  Curve curve;  // normalized
  NormalizationReport norm;
  NetHierarchy nets;
  std::vector<Ball> balls;
  std::vector<BetaValue> betas;
  std::optional<CoreSystems> cores;
  std::optional<Classification> classes;
  RatioReport report;
};

Curve load_source(const std::string& source, std::uint64_t seed);

PipelineResult run_pipeline(const Curve& raw, const ExperimentConfig& cfg, const std::string& name = "");
RatioReport run_ratio_experiment(const ExperimentConfig& cfg);

std::string ratio_report_json(const RatioReport& r);
// One JSON line per ball.
std::string ball_records_jsonl(const PipelineResult& p);

// Invariant ledger.
struct LedgerEntry {
  std::string invariant;
  std::string curve;
  bool pass = true;
  std::string detail;
};

struct SuiteOptions {
  int random_curves = 20;
  std::uint64_t random_seed = 42;
  bool builtin = true;
  bool inject_net_fault = false;  // break separation on the first curve
  int voronoi_J = 3;
};

struct SuiteResult {
  std::vector<LedgerEntry> entries;
  Index failures() const;
  std::string jsonl() const;
  std::string summary_json() const;
};

std::vector<std::string> builtin_suite();
std::vector<std::string> random_suite(int count, std::uint64_t seed);

SuiteResult run_invariant_suite(const ExperimentConfig& cfg, const SuiteOptions& opt);

// One run per value; per-run errors land in the error column.
std::string sweep(const ExperimentConfig& base, const std::string& axis, const std::vector<double>& values);

}  // namespace atst
