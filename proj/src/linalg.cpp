#include "fceq/linalg.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace fceq {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EVAL_DOMAIN: return "EVAL_DOMAIN";
        case ErrorCode::SPEC_INVALID: return "SPEC_INVALID";
        case ErrorCode::SHIFT_SINGULAR: return "SHIFT_SINGULAR";
        case ErrorCode::PIVOT_LOST: return "PIVOT_LOST";
        case ErrorCode::VERTICAL_CONTACT: return "VERTICAL_CONTACT";
        case ErrorCode::RANK_ANOMALY: return "RANK_ANOMALY";
        case ErrorCode::NOT_CONVEX: return "NOT_CONVEX";
        case ErrorCode::CONFIG_INVALID: return "CONFIG_INVALID";
    }
    return "UNKNOWN";
}

int rank(const Mat& m, const TolerancePolicy& tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double cutoff = tol.rank_rel_tol * sv(0);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    return r;
}

std::pair<Vec, double> solve_least_squares(const Mat& a, const Vec& b,
                                           const TolerancePolicy& tol) {
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(tol.rank_rel_tol);
    Vec x = svd.solve(b);
    const double residual = (a * x - b).norm();
    return {std::move(x), residual};
}

double row_sum(const Vec& v) { return v.sum(); }

bool is_shift_regular(const Vec& v, double eps, const TolerancePolicy& tol) {
    const double vtilde = row_sum(v);
    const double band = tol.contact_tol * (1.0 + std::abs(vtilde));
    return std::abs(eps) > band && std::abs(eps - vtilde) > band;
}

Mat shift_inverse(const Vec& v, double eps, const TolerancePolicy& tol) {
    if (!is_shift_regular(v, eps, tol))
        throw Error(ErrorCode::SHIFT_SINGULAR,
                    "eps hits an eigenvalue of V (0 or the row sum of v)");
    const auto n = v.size();
    const double vtilde = row_sum(v);
    const double scale = 1.0 / ((vtilde - eps) * eps);
    Mat out(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            out(r, c) = scale * (v(c) - (r == c ? vtilde - eps : 0.0));
    return out;
}

}  // namespace fceq
