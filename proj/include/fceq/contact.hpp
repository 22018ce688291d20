#pragma once

#include "fceq/diff.hpp"
#include "fceq/types.hpp"

#include <optional>

namespace fceq {

/// Antisymmetric coefficient matrix f_ij = y^i G_j - y^j G_i at one tangent
/// vector; row i is the vector f_i = y^i G - G_i C. Carries the local scale
/// used by the relative contact thresholds.
struct FMatrix {
    Mat f;
    Vec y;
    double vert_scale = 1.0;  ///< 1 + ||y|| * ||G||

    int dim() const { return static_cast<int>(f.rows()); }
    double max_abs() const { return f.size() ? f.cwiseAbs().maxCoeff() : 0.0; }
};

struct ContactClass {
    bool vertical = false;    ///< G parallel to C: all f_ij vanish
    bool horizontal = false;  ///< H = 0: the CEQ right-hand side vanishes
};

struct PivotChoice {
    int i = -1;
    int j = -1;
    double magnitude = 0.0;  ///< |f_ij|, the maximum over all pairs
};

/// Builds f_ij = y^i G_j - y^j G_i; antisymmetry is exact by construction
/// (each pair computed once).
FMatrix f_matrix(const PointJet& jet);

/// Row i of the f-matrix as a vector (the paper-style f_i).
Vec f_vector(const FMatrix& fm, int i);

/// Vertical: max|f_ij| below contact_tol * (1 + ||y|| ||G||).
/// Horizontal: ||H||_inf below contact_tol * (1 + F).
ContactClass classify(const PointJet& jet, const TolerancePolicy& tol = {});

/// Largest |f_ij| over i < j with lexicographic tie-break; nullopt iff the
/// maximum sits below the vertical-contact threshold.
std::optional<PivotChoice> pick_pivot(const FMatrix& fm, const TolerancePolicy& tol = {});

/// Residual of the two-vector reconstruction identity
///   f_k = (f_kj/f_ij) f_i + (f_ik/f_ij) f_j,
/// maximized over k (sup-norm). Zero vacuously for n = 2.
double reconstruct_check(const FMatrix& fm, const PivotChoice& pivot);

/// Numerical rank of the stacked rows f_1..f_n; the span dichotomy says this
/// is 0 (vertically contact) or 2. Anything else throws RANK_ANOMALY.
int span_rank(const FMatrix& fm, const TolerancePolicy& tol = {});

}  // namespace fceq
