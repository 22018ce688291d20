#pragma once

#include "fceq/types.hpp"

#include <cstdint>
#include <vector>

namespace fceq {

/// splitmix64 step; the workhorse behind all seeded randomness here, so
/// results do not depend on the standard library's distribution details.
std::uint64_t splitmix64(std::uint64_t& state);

/// Uniform double in [0, 1) from a splitmix64 state.
double uniform01(std::uint64_t& state);

/// Deterministic unit directions on S^{dim-1}: a Kronecker (R_d additive
/// recurrence) sequence with a seeded Cranley-Patterson shift, pushed to the
/// sphere through Box-Muller and normalization.
std::vector<Vec> quasi_sphere_points(int dim, int count, std::uint64_t seed);

/// The 2*dim axis directions (+e_i, -e_i) followed by `count` quasi-random
/// directions. This is the sample set used by the pointwise solver.
std::vector<Vec> sample_directions(int dim, int count, std::uint64_t seed);

}  // namespace fceq
