#include "fceq/ceq.hpp"

#include "fceq/linalg.hpp"
#include "fceq/parallel.hpp"
#include "fceq/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fceq {

const char* to_string(SolveStatus status) noexcept {
    switch (status) {
        case SolveStatus::UNIQUE: return "UNIQUE";
        case SolveStatus::RIEMANNIAN_INDETERMINATE: return "RIEMANNIAN_INDETERMINATE";
        case SolveStatus::INSOLVABLE: return "INSOLVABLE";
        case SolveStatus::DEGENERATE_SAMPLING: return "DEGENERATE_SAMPLING";
    }
    return "UNKNOWN";
}

namespace {

VCeqSystem system_from_jet(const PointJet& jet) {
    const FMatrix fm = f_matrix(jet);
    VCeqSystem sys;
    sys.a = fm.f;
    sys.b = -jet.h_vec;
    sys.v = jet.y;
    sys.x = jet.x;
    sys.g = jet.g_vec;
    sys.f_value = jet.f_value;
    sys.vert_scale = fm.vert_scale;
    return sys;
}

// f^h_ji / f_ji at one shifted point; PIVOT_LOST identifies the shift index.
double pivot_ratio(const PointJet& jet, const PivotChoice& pivot, const TolerancePolicy& tol,
                   int shift_index) {
    const int i = pivot.i, j = pivot.j;
    const double f_ji = jet.y(j) * jet.g_vec(i) - jet.y(i) * jet.g_vec(j);
    const double scale = 1.0 + jet.y.norm() * jet.g_vec.norm();
    if (std::abs(f_ji) <= tol.contact_tol * scale)
        throw error_at(ErrorCode::PIVOT_LOST,
                       "pivot f_" + std::to_string(i + 1) + std::to_string(j + 1) +
                           " vanished at shifted point w_" + std::to_string(shift_index + 1),
                       shift_index);
    const double fh_ji = jet.y(j) * jet.h_vec(i) - jet.y(i) * jet.h_vec(j);
    return fh_ji / f_ji;
}

Vec ratio_vector(const FinslerMetric& metric, const Vec& x, const Vec& v,
                 const PivotChoice& pivot, double eps, const TolerancePolicy& tol) {
    const auto n = v.size();
    Vec r(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        Vec w = v;
        w(l) -= eps;
        r(l) = pivot_ratio(jet_at(metric, x, w), pivot, tol, static_cast<int>(l));
    }
    return r;
}

void check_config(const SolverConfig& config, int dim) {
    if (config.n_sphere_samples < 2 * dim)
        throw Error(ErrorCode::CONFIG_INVALID, "n_sphere_samples must be at least 2*dim");
    if (!(config.eps_fraction > 0.0 && config.eps_fraction < 1.0))
        throw Error(ErrorCode::CONFIG_INVALID, "eps_fraction must lie in (0, 1)");
    if (config.max_eps_retries < 0)
        throw Error(ErrorCode::CONFIG_INVALID, "max_eps_retries must be non-negative");
}

constexpr double kQuadraticIndicatrixTol = 1e-8;

// True iff the energy Hessian is direction-independent at p, i.e. F(p,.)^2 is
// a quadratic form. A quadratic indicatrix is vertically contact everywhere
// in the frame of its own averaged metric, whatever the chart frame looks
// like, so this is the chart-independent trigger for the Riemannian branch.
bool quadratic_indicatrix(const FinslerMetric& metric, const Vec& x,
                          const std::vector<Vec>& dirs) {
    const std::size_t probes = std::min<std::size_t>(dirs.size(), 2 * metric.dim() + 4);
    Mat g0;
    for (std::size_t s = 0; s < probes; ++s) {
        const PointJet jet = jet_at(metric, x, dirs[s], /*want_hessian=*/true);
        if (s == 0) {
            g0 = *jet.hess;
            continue;
        }
        const double dev = (*jet.hess - g0).cwiseAbs().maxCoeff();
        if (dev > kQuadraticIndicatrixTol * (1.0 + g0.cwiseAbs().maxCoeff())) return false;
    }
    return true;
}

}  // namespace

VCeqSystem assemble(const FinslerMetric& metric, const Vec& x, const Vec& v) {
    return system_from_jet(jet_at(metric, x, v));
}

double ceq_residual(const VCeqSystem& system, const Vec& rho) {
    const double num = (system.a * rho - system.b).cwiseAbs().maxCoeff();
    const double a_max = system.a.size() ? system.a.cwiseAbs().maxCoeff() : 0.0;
    const double rho_max = rho.size() ? rho.cwiseAbs().maxCoeff() : 0.0;
    const double denom = 1.0 + system.b.cwiseAbs().maxCoeff() + a_max * rho_max;
    return num / denom;
}

IntrinsicReport intrinsic_check(const PointJet& jet, const TolerancePolicy& tol) {
    const FMatrix fm = f_matrix(jet);
    const auto pivot = pick_pivot(fm, tol);
    if (!pivot)
        throw Error(ErrorCode::VERTICAL_CONTACT,
                    "intrinsic conditions hold vacuously at a vertically contact vector");
    const int n = fm.dim();
    IntrinsicReport report;
    report.pivot = *pivot;
    const double h_max = jet.h_vec.cwiseAbs().maxCoeff();
    const double denom = fm.max_abs() * h_max + 1e-300;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                const double cyclic = fm.f(i, j) * jet.h_vec(k) + fm.f(j, k) * jet.h_vec(i) +
                                      fm.f(k, i) * jet.h_vec(j);
                const double res = std::abs(cyclic) / denom;
                if (res > report.worst_residual) {
                    report.worst_residual = res;
                    report.worst_triple = {i, j, k};
                }
                ++report.n_checked;
            }
    return report;
}

IntrinsicReport intrinsic_check(const FinslerMetric& metric, const Vec& x, const Vec& v,
                                const TolerancePolicy& tol) {
    return intrinsic_check(jet_at(metric, x, v), tol);
}

std::pair<double, double> eliminated_solve(const VCeqSystem& system, const PivotChoice& pivot,
                                           const TolerancePolicy& tol) {
    const int i = pivot.i, j = pivot.j;
    const double f_ji = system.a(j, i);
    if (std::abs(f_ji) <= tol.contact_tol * system.vert_scale)
        throw Error(ErrorCode::PIVOT_LOST, "pivot f_ij vanished at this tangent vector");
    // [[v_i, -g_i], [v_j, -g_j]] [<G,rho>, <C,rho>]^T = [b_i, b_j]^T, det = f_ji
    const double g_dot = (-system.g(j) * system.b(i) + system.g(i) * system.b(j)) / f_ji;
    const double c_dot = (-system.v(j) * system.b(i) + system.v(i) * system.b(j)) / f_ji;
    return {g_dot, c_dot};
}

Vec closed_form_rho(const FinslerMetric& metric, const Vec& x, const Vec& v,
                    const PivotChoice& pivot, double eps, const TolerancePolicy& tol) {
    if (!is_shift_regular(v, eps, tol))
        throw Error(ErrorCode::SHIFT_SINGULAR, "eps must avoid {0, sum(v)}");
    const Vec r = ratio_vector(metric, x, v, pivot, eps, tol);
    return shift_inverse(v, eps, tol) * r;
}

Vec closed_form_rho_summation(const FinslerMetric& metric, const Vec& x, const Vec& v,
                              const PivotChoice& pivot, double eps, const TolerancePolicy& tol) {
    if (!is_shift_regular(v, eps, tol))
        throw Error(ErrorCode::SHIFT_SINGULAR, "eps must avoid {0, sum(v)}");
    const Vec r = ratio_vector(metric, x, v, pivot, eps, tol);
    const double vtilde = row_sum(v);
    const double mean_term = v.dot(r) / (vtilde - eps);
    Vec rho(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) rho(k) = (mean_term - r(k)) / eps;
    return rho;
}

std::pair<Vec, double> ls_oracle(const FinslerMetric& metric, const Vec& x,
                                 const SolverConfig& config) {
    const int n = metric.dim();
    check_config(config, n);
    const auto dirs = sample_directions(n, config.n_sphere_samples, config.seed);
    Mat stacked(static_cast<Eigen::Index>(dirs.size()) * n, n);
    Vec rhs(static_cast<Eigen::Index>(dirs.size()) * n);
    parallel_for(dirs.size(), config.threads, [&](std::size_t s) {
        const VCeqSystem sys = assemble(metric, x, dirs[s]);
        stacked.middleRows(static_cast<Eigen::Index>(s) * n, n) = sys.a;
        rhs.segment(static_cast<Eigen::Index>(s) * n, n) = sys.b;
    });
    auto [rho, residual] = solve_least_squares(stacked, rhs, config.tol);
    return {std::move(rho), residual / (1.0 + rhs.norm())};
}

int homogeneous_nullspace_dim(const FinslerMetric& metric, const Vec& x,
                              const SolverConfig& config) {
    const int n = metric.dim();
    check_config(config, n);
    const auto dirs = sample_directions(n, config.n_sphere_samples, config.seed);
    // quadratic indicatrix: every direction is vertically contact in the
    // averaged-metric frame, so the homogeneous system is trivial
    if (quadratic_indicatrix(metric, x, dirs)) return n;
    std::vector<FMatrix> fms(dirs.size());
    parallel_for(dirs.size(), config.threads, [&](std::size_t s) {
        fms[s] = f_matrix(jet_at(metric, x, dirs[s]));
    });
    std::vector<Eigen::Index> keep;
    for (std::size_t s = 0; s < fms.size(); ++s)
        if (fms[s].max_abs() > config.tol.contact_tol * fms[s].vert_scale)
            keep.push_back(static_cast<Eigen::Index>(s));
    if (keep.empty()) return n;
    Mat stacked(static_cast<Eigen::Index>(keep.size()) * n, n);
    for (std::size_t t = 0; t < keep.size(); ++t)
        stacked.middleRows(static_cast<Eigen::Index>(t) * n, n) = fms[keep[t]].f;
    return n - rank(stacked, config.tol);
}

SolveOutcome solve_at_point(const FinslerMetric& metric, const Vec& p,
                            const SolverConfig& config) {
    const int n = metric.dim();
    check_config(config, n);
    const TolerancePolicy& tol = config.tol;
    const auto dirs = sample_directions(n, config.n_sphere_samples, config.seed);

    std::vector<PointJet> jets(dirs.size());
    parallel_for(dirs.size(), config.threads, [&](std::size_t s) {
        jets[s] = jet_at(metric, p, dirs[s]);
    });

    SolveOutcome out;
    out.samples_used = static_cast<int>(dirs.size());

    // classification pass; remember the best-conditioned pivot
    std::size_t base_index = dirs.size();
    PivotChoice base_pivot;
    bool all_vertical = true, all_horizontal = true;
    std::vector<Mat> nonvertical_rows;
    for (std::size_t s = 0; s < jets.size(); ++s) {
        const FMatrix fm = f_matrix(jets[s]);
        const auto pivot = pick_pivot(fm, tol);
        const bool horizontal =
            jets[s].h_vec.cwiseAbs().maxCoeff() <= tol.contact_tol * (1.0 + jets[s].f_value);
        if (!horizontal) all_horizontal = false;
        if (pivot) {
            all_vertical = false;
            nonvertical_rows.push_back(fm.f);
            if (pivot->magnitude > base_pivot.magnitude) {
                base_pivot = *pivot;
                base_index = s;
            }
        }
    }

    // A quadratic indicatrix means every direction is vertically contact in
    // the frame of the averaged metric even when the chart frame hides it
    // (constant non-identity a). Treat it like the all-vertical case.
    const bool riemannian_like = all_vertical || quadratic_indicatrix(metric, p, dirs);

    // common nullspace of the sampled homogeneous systems
    if (riemannian_like || nonvertical_rows.empty()) {
        out.nullspace_dim = n;
    } else {
        Mat stacked(static_cast<Eigen::Index>(nonvertical_rows.size()) * n, n);
        for (std::size_t t = 0; t < nonvertical_rows.size(); ++t)
            stacked.middleRows(static_cast<Eigen::Index>(t) * n, n) = nonvertical_rows[t];
        out.nullspace_dim = n - rank(stacked, tol);
    }

    if (riemannian_like) {
        // Corollary gate: a vertically contact tangent space is consistent
        // only if it is horizontally contact as well.
        out.status = all_horizontal ? SolveStatus::RIEMANNIAN_INDETERMINATE
                                    : SolveStatus::INSOLVABLE;
        double worst = 0.0;
        const Vec zero = Vec::Zero(n);
        for (std::size_t s = 0; s < jets.size(); ++s)
            worst = std::max(worst, ceq_residual(system_from_jet(jets[s]), zero));
        out.max_ceq_residual = worst;
        return out;
    }

    out.base_v = dirs[base_index];
    out.pivot = base_pivot;

    // epsilon schedule: start at eps_fraction * ||v||_inf, halve on failure.
    // The regularity band here is widened to 1e-3: an eps that merely avoids
    // the exact eigenvalues {0, v~} can still sit close enough to v~ to
    // amplify roundoff through the 1/((v~-eps) eps) factor.
    TolerancePolicy shift_tol = tol;
    shift_tol.contact_tol = std::max(tol.contact_tol, 1e-3);
    const Vec& base_v = dirs[base_index];
    double eps = config.eps_fraction * base_v.cwiseAbs().maxCoeff();
    std::optional<Vec> rho;
    for (int attempt = 0; attempt <= config.max_eps_retries; ++attempt, eps *= 0.5) {
        if (!is_shift_regular(base_v, eps, shift_tol)) continue;
        try {
            rho = closed_form_rho(metric, p, base_v, base_pivot, eps, tol);
            out.epsilon_used = eps;
            break;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::PIVOT_LOST && e.code() != ErrorCode::SHIFT_SINGULAR)
                throw;
        }
    }
    if (!rho) {
        out.status = SolveStatus::DEGENERATE_SAMPLING;
        return out;
    }

    // validate the single candidate against every sample
    double worst_res = 0.0;
    for (std::size_t s = 0; s < jets.size(); ++s)
        worst_res = std::max(worst_res, ceq_residual(system_from_jet(jets[s]), *rho));
    out.max_ceq_residual = worst_res;

    bool first_intrinsic = true;
    for (std::size_t s = 0; s < jets.size(); ++s) {
        const FMatrix fm = f_matrix(jets[s]);
        if (fm.max_abs() <= tol.contact_tol * fm.vert_scale) continue;
        const IntrinsicReport report = intrinsic_check(jets[s], tol);
        out.intrinsic.n_checked += report.n_checked;
        if (first_intrinsic || report.worst_residual > out.intrinsic.worst_residual) {
            out.intrinsic.worst_residual = report.worst_residual;
            out.intrinsic.worst_triple = report.worst_triple;
            out.intrinsic.pivot = report.pivot;
            out.intrinsic_worst_v = dirs[s];
            first_intrinsic = false;
        }
    }

    if (worst_res <= tol.residual_tol) {
        out.status = SolveStatus::UNIQUE;
        out.rho = std::move(rho);
    } else {
        out.status = SolveStatus::INSOLVABLE;
    }
    return out;
}

}  // namespace fceq
