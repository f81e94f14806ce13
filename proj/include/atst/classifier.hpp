#pragma once

#include "atst/beta.hpp"
#include "atst/cores.hpp"
#include "atst/measure.hpp"
#include "atst/nets.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace atst {

struct ClassifierParams {
  double A = 8.0;
  int J = 10;
  double eps1 = 0.1;
  double eps2 = 0.01;
  double eps3 = 0.015;
  double delta = 0.1;
  double C_U = 100.0;
  double c_littlec = 1e-3;

  // Throws InvalidArgument on a violated constraint.
  void validate() const;
};

enum class TopFamily { G_L, G1, G2, G3 };
enum class DeltaBranch { None, D1, D2_1, D2_2 };
enum class DeepFamily { None, D2_1_1, D2_1_2_i_c, D2_1_2_i_f, D2_1_2_ii_c, D2_1_2_ii_f };

// Leaves of the family tree, in report order.
enum class Leaf { G_L, G1, G3, D1, D2_2, D2_1_1, D2_1_2_i_c, D2_1_2_i_f, D2_1_2_ii_c, D2_1_2_ii_f };
inline constexpr std::size_t kLeafCount = 10;
const char* to_string(Leaf l);

enum class RegionKind { None, Bend, Arc };

struct FamilyLabel {
  TopFamily top = TopFamily::G3;
  int j = -1;  // winning inflation for G1/G2
  DeltaBranch delta = DeltaBranch::None;
  DeepFamily deep = DeepFamily::None;
  RegionKind region_kind = RegionKind::None;
  int region = -1;  // index into bends or into the arc family D
  bool large_top = false;  // G_L ball with diam > 8A

  Leaf leaf() const;
  std::string path() const;
};

// Element of Lambda(2^j Q) holding the center parameter.
Subarc gamma_Q(const Curve& c, const Ball& q, int j);

// The arcs of one inflated ball and the quantities the predicates need.
struct BallView {
  Ball ball;  // already inflated
  std::vector<Subarc> arcs;
  int gamma = -1;  // index into arcs
  double beta = 0.0;
  double beta_tilde_gamma = 0.0;
  std::vector<char> flat;  // per arc
  std::vector<Subarc> S;
  double beta_S = 0.0;
};

BallView make_view(const Curve& c, const Ball& q, int j, double eps2);

struct LargeSplit {
  std::vector<std::size_t> large, rest;  // indices into the ball list
  std::vector<char> large_top;           // per large ball: diam > 8A
  Index floor_violations = 0;            // G_L balls with diam < diam(curve)/4
};

LargeSplit split_large(const std::vector<Ball>& balls, const Curve& c, double A);

struct GResult {
  TopFamily top = TopFamily::G3;
  int j = -1;
  std::array<double, 3> beta{}, beta_tilde_gamma{}, beta_S{};
  bool dichotomy_ok = true;  // G3 re-evaluated on every j
};

GResult classify_G(const Ball& q, const Curve& c, const ClassifierParams& p);

struct DeltaResult {
  DeltaBranch branch = DeltaBranch::D2_1;
  double beta_S_Q = 0.0;
  double beta_S_Ux = 0.0;  // S arcs clipped to the U^x core
  double beta_Ux = 0.0;    // all curve points in the U^x core
};

DeltaResult classify_Delta(const Ball& q, const Curve& c, const CoreSystems& cores, const ClassifierParams& p);

struct FarFamily {
  RegionKind kind = RegionKind::None;
  int region = -1;
  int side = 0;  // -1 left of the region, +1 right
  std::vector<std::size_t> balls;  // ordered by projected distance to the region
  bool strictly_increasing = true;
  double min_growth = 0.0;  // min diam ratio minus one; 0 for singletons
};

struct Diagnostics {
  Index dichotomy_failures = 0;
  Index large_floor_violations = 0;
  Index tube_violations = 0;       // gamma not inside the 4 eps3 tube
  Index cap_violations = 0;            // case (ii) witness outside the cap
  Index missing_witness = 0;           // case (ii) without any zeta
  Index bend_lookup_failures = 0;
  Index arc_mass_violations = 0;
  double arc_mass_min_ratio = 0.0;     // min over D of mu~(d)/l(d)
  Index proj_pairs_checked = 0;
  Index proj_overlaps = 0;             // overlapping half-core projections
  bool i_c_empty = true;
  double K_bend = 0.0;                 // max beta*diam/l(b) over case (i)
  double K_arc = 0.0;                  // max beta*diam/l(d) over case (ii)
  std::map<std::pair<int, int>, Index> delta1_slices;  // (M, K) -> count
  std::vector<FarFamily> far_families;
  bool far_growth_ok = true;
  double far_min_growth = -1.0;  // over families with >= 2 balls; -1 if none
};

struct BallRecord {
  FamilyLabel label;
  double beta = 0.0;
  double contribution = 0.0;  // beta^2 * diam(Q)
  GResult g;
  DeltaResult d;
  double core_mu_tilde = 0.0, core_length = 0.0;  // root core, for D2_1
  Subarc gamma, witness;
  bool has_witness = false;
};

struct Classification {
  std::vector<BallRecord> records;  // same order as the ball list
  std::vector<Bend> bends;
  std::vector<Subarc> arc_family;  // D
  DensityMeasure mu_tilde, mu_star;
  Diagnostics diag;
};

// Classifies every ball. betas[i] must be beta_ball of balls[i]. The curve is
// expected normalized so the chord lies on the first axis.
Classification classify_all(const Curve& c, const std::vector<Ball>& balls, const std::vector<BetaValue>& betas,
                            const CoreSystems& cores, const ClassifierParams& p, int threads = 1);

struct FamilySums {
  std::array<double, kLeafCount> sum{};
  std::array<Index, kLeafCount> count{};
  double total = 0.0;
  Index balls = 0;
};

// Per-leaf sums of beta^2 diam with exact accumulation; total is over all balls.
FamilySums family_sums(const Classification& cl);

std::string ball_record_json(const Ball& q, const BallRecord& r);
std::string diagnostics_json(const Diagnostics& d);
std::string family_sums_json(const FamilySums& s);

}  // namespace atst
