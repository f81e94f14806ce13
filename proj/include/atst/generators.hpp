#pragma once

#include "atst/curve.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace atst {

Curve make_segment();
Curve make_vshape(double h);
// Chord from (0,0) to (1,0), bulging up by the sagitta.
Curve make_circular_arc(double sagitta, int n_seg);
// (0,0) -> (1,0) -> (1-overlap, depth) -> (2-overlap, depth)
Curve make_hook(double depth, double overlap);
Curve make_koch(double angle_deg, int depth);
Curve make_random_walk(double step, int n, double smoothing, std::uint64_t seed, int dim = 2);
Curve make_helix3d(double pitch, double turns, int n_seg);

// Pads with zero coordinates up to dim, then applies a seeded random rotation.
Curve embed(const Curve& c, int dim, std::uint64_t seed);

struct GeneratorSpec {
  std::string shape;
  std::map<std::string, double> params;
};

// "shape" or "shape:key=value,key=value".
GeneratorSpec parse_generator_spec(const std::string& text);
std::string to_string(const GeneratorSpec& g);

// Known keys per shape (defaults in brackets):
//   segment; vshape h[0.3]; circular_arc sagitta[0.125] n_seg[512];
//   semicircle n_seg[512]; hook depth[0.2] overlap[0.5]; koch angle[30] depth[3];
//   random_walk step[0.05] n[60] smoothing[0.5]; helix3d pitch[0.5] turns[2] n_seg[256].
// Every shape also takes dim to embed the result and seed to override the seed.
Curve generate(const GeneratorSpec& g, std::uint64_t seed);
Curve generate(const std::string& spec, std::uint64_t seed);

}  // namespace atst
