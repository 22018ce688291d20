#include "fceq/contact.hpp"

#include "fceq/linalg.hpp"

#include <cmath>
#include <string>

namespace fceq {

FMatrix f_matrix(const PointJet& jet) {
    const int n = static_cast<int>(jet.y.size());
    FMatrix fm;
    fm.y = jet.y;
    fm.vert_scale = 1.0 + jet.y.norm() * jet.g_vec.norm();
    fm.f = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double value = jet.y(i) * jet.g_vec(j) - jet.y(j) * jet.g_vec(i);
            fm.f(i, j) = value;
            fm.f(j, i) = -value;
        }
    return fm;
}

Vec f_vector(const FMatrix& fm, int i) {
    if (i < 0 || i >= fm.dim())
        throw Error(ErrorCode::EVAL_DOMAIN, "f_vector index out of range");
    return fm.f.row(i).transpose();
}

ContactClass classify(const PointJet& jet, const TolerancePolicy& tol) {
    const FMatrix fm = f_matrix(jet);
    ContactClass out;
    out.vertical = fm.max_abs() <= tol.contact_tol * fm.vert_scale;
    out.horizontal =
        jet.h_vec.cwiseAbs().maxCoeff() <= tol.contact_tol * (1.0 + jet.f_value);
    return out;
}

std::optional<PivotChoice> pick_pivot(const FMatrix& fm, const TolerancePolicy& tol) {
    PivotChoice best;
    const int n = fm.dim();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double mag = std::abs(fm.f(i, j));
            if (mag > best.magnitude) best = {i, j, mag};
        }
    if (best.magnitude <= tol.contact_tol * fm.vert_scale) return std::nullopt;
    return best;
}

double reconstruct_check(const FMatrix& fm, const PivotChoice& pivot) {
    const int n = fm.dim();
    const int i = pivot.i, j = pivot.j;
    const double fij = fm.f(i, j);
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const Vec lhs = fm.f.row(k).transpose();
        const Vec rhs = (fm.f(k, j) / fij) * fm.f.row(i).transpose() +
                        (fm.f(i, k) / fij) * fm.f.row(j).transpose();
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    return worst;
}

int span_rank(const FMatrix& fm, const TolerancePolicy& tol) {
    if (fm.max_abs() <= tol.contact_tol * fm.vert_scale) return 0;
    const int r = rank(fm.f, tol);
    if (r != 2)
        throw Error(ErrorCode::RANK_ANOMALY,
                    "f-vector span has rank " + std::to_string(r) +
                        ", expected 0 or 2 (corrupted derivatives?)");
    return r;
}

}  // namespace fceq
