#pragma once

#include "fceq/types.hpp"

#include <utility>

namespace fceq {

/// Numerical rank: number of singular values above rank_rel_tol times the
/// largest one. The zero matrix has rank 0.
int rank(const Mat& m, const TolerancePolicy& tol = {});

/// Minimum-norm least-squares solution of a*x = b and the 2-norm of the
/// residual a*x - b. Rank deficiency is resolved by the minimum-norm choice,
/// so outputs are deterministic.
std::pair<Vec, double> solve_least_squares(const Mat& a, const Vec& b,
                                           const TolerancePolicy& tol = {});

/// Row sum of v (the eigenvalue of the constant-row matrix V along v).
double row_sum(const Vec& v);

/// True iff V - eps*I is safely invertible, i.e. eps stays out of the
/// band contact_tol*(1+|v~|) around the eigenvalues {0, v~ = v^1+...+v^n}
/// of the constant-row matrix V built from v.
bool is_shift_regular(const Vec& v, double eps, const TolerancePolicy& tol = {});

/// Closed-form inverse of V - eps*I where every row of V equals v:
///   (V - eps*I)^-1 = 1/((v~ - eps)*eps) * (V - (v~ - eps)*I).
/// Throws SHIFT_SINGULAR when is_shift_regular fails.
Mat shift_inverse(const Vec& v, double eps, const TolerancePolicy& tol = {});

}  // namespace fceq
