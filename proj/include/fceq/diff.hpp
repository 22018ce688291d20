#pragma once

#include "fceq/metrics.hpp"
#include "fceq/types.hpp"

#include <optional>

namespace fceq {

/// First-order data of a Finsler metric at one (x, y), plus the energy
/// Hessian on demand.
struct PointJet {
    Vec x;
    Vec y;
    double f_value = 0.0;
    Vec g_vec;                 ///< y-gradient of F (the G field)
    Vec h_vec;                 ///< x-gradient of F (the H field)
    std::optional<Mat> hess;   ///< Hessian of F^2/2 in y, symmetrized
};

/// Differentiates the metric at (x, y) with forward-mode jets; one evaluation
/// over 2n-direction jets yields F, G and H, and a nested-jet pass adds the
/// energy Hessian when requested. Throws EVAL_DOMAIN for y = 0 or a
/// non-finite evaluation.
PointJet jet_at(const FinslerMetric& metric, const Vec& x, const Vec& y,
                bool want_hessian = false);

/// Central finite differences of F in x and y against jet_at; returns the
/// maximum relative deviation over all 2n components. Step is scaled by
/// (1 + ||y||).
double fd_crosscheck(const FinslerMetric& metric, const Vec& x, const Vec& y,
                     double step = 1e-5);

}  // namespace fceq
