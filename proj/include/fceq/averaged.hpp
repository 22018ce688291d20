#pragma once

#include "fceq/metrics.hpp"
#include "fceq/types.hpp"

#include <cstdint>

namespace fceq {

struct QuadratureSpec {
    enum class Scheme { angular, product_sphere, monte_carlo };

    Scheme scheme = Scheme::angular;
    int n_nodes = 256;
    std::uint64_t seed = 0;
    int threads = 0;  ///< 0 = all cores
};

/// Averaged Riemannian metric at one point, with the successive-refinement
/// difference against the half-resolution rule as an error estimate.
struct AveragedMetric {
    Mat gamma;
    double error_estimate = 0.0;
};

/// gamma_ij = (integral of g_ij over the indicatrix {F(p,.) = 1}) / (surface
/// volume), with the indicatrix parametrized radially over the unit sphere
/// and weighted by the induced Euclidean surface measure. A consistency
/// diagnostic for the normal-coordinate hypothesis, not an input to the
/// solver. Throws NOT_CONVEX if a Hessian sample is not positive definite.
AveragedMetric averaged_metric_at(const FinslerMetric& metric, const Vec& p,
                                  const QuadratureSpec& quad);

/// ||gamma - I||_max: how far the chart is from gamma-normal at this point.
double normal_deviation(const AveragedMetric& gamma);

}  // namespace fceq
