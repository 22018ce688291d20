#pragma once

#include "fceq/contact.hpp"
#include "fceq/diff.hpp"
#include "fceq/metrics.hpp"
#include "fceq/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace fceq {

/// The pointwise compatibility system at one tangent vector: row i is f_i(v),
/// the right-hand side is -H(v). Carries the first-order jet data the
/// eliminated solve needs.
struct VCeqSystem {
    Mat a;              ///< n x n, antisymmetric, row i = f_i(v)
    Vec b;              ///< -H(v)
    Vec v;              ///< tangent vector (the C field at v)
    Vec x;              ///< base point
    Vec g;              ///< y-gradient of F at (x, v)
    double f_value = 0.0;
    double vert_scale = 1.0;
};

/// Worst cyclic-sum violation of the intrinsic solvability conditions
///   f_ij H_k + f_jk H_i + f_ki H_j = 0  over distinct triples.
struct IntrinsicReport {
    std::optional<PivotChoice> pivot;
    std::array<int, 3> worst_triple{-1, -1, -1};
    double worst_residual = 0.0;  ///< scale-normalized
    int n_checked = 0;
};

enum class SolveStatus {
    UNIQUE,
    RIEMANNIAN_INDETERMINATE,
    INSOLVABLE,
    DEGENERATE_SAMPLING,
};

const char* to_string(SolveStatus status) noexcept;

struct SolveOutcome {
    SolveStatus status = SolveStatus::INSOLVABLE;
    std::optional<Vec> rho;  ///< present iff status == UNIQUE
    double max_ceq_residual = 0.0;
    IntrinsicReport intrinsic;
    std::optional<Vec> intrinsic_worst_v;
    int nullspace_dim = 0;
    int samples_used = 0;
    std::optional<double> epsilon_used;
    std::optional<Vec> base_v;
    std::optional<PivotChoice> pivot;
};

struct SolverConfig {
    int n_sphere_samples = 64;  ///< quasi-random directions on top of the 2n axes
    std::uint64_t seed = 0;
    TolerancePolicy tol;
    double eps_fraction = 0.25;
    int max_eps_retries = 6;
    int threads = 0;  ///< 0 = all cores; results do not depend on this
};

/// Evaluates the metric at (x, v) and assembles the v-CEQ system.
VCeqSystem assemble(const FinslerMetric& metric, const Vec& x, const Vec& v);

/// ||a rho - b||_inf normalized by (1 + ||b||_inf + ||a||_max ||rho||_inf).
double ceq_residual(const VCeqSystem& system, const Vec& rho);

/// Cyclic-sum check over all triples of distinct indices at one v, normalized
/// by max|f| * max|H| of the sample. Throws VERTICAL_CONTACT when no pivot
/// exists (the condition holds vacuously there).
IntrinsicReport intrinsic_check(const FinslerMetric& metric, const Vec& x, const Vec& v,
                                const TolerancePolicy& tol = {});

/// Same check from already-computed jet data.
IntrinsicReport intrinsic_check(const PointJet& jet, const TolerancePolicy& tol = {});

/// Solves the eliminated 2x2 system at the pivot rows for the two inner
/// products (<G,rho>, <C,rho>). Throws PIVOT_LOST if |f_ij| has dropped below
/// the contact threshold at this v.
std::pair<double, double> eliminated_solve(const VCeqSystem& system, const PivotChoice& pivot,
                                           const TolerancePolicy& tol = {});

/// The closed-form candidate: evaluates the ratio f^h_ji/f_ji at the n
/// shifted points w_l = v - eps e_l and applies the rank-one-shift inverse.
/// Throws SHIFT_SINGULAR or PIVOT_LOST (with the failing shift index).
Vec closed_form_rho(const FinslerMetric& metric, const Vec& x, const Vec& v,
                    const PivotChoice& pivot, double eps, const TolerancePolicy& tol = {});

/// The same candidate through the expanded summation formula
///   rho_k = (1/eps) ( (1/(v~-eps)) sum_l v^l r_l - r_k );
/// algebraically identical to the matrix route, kept as a cross-check.
Vec closed_form_rho_summation(const FinslerMetric& metric, const Vec& x, const Vec& v,
                              const PivotChoice& pivot, double eps,
                              const TolerancePolicy& tol = {});

/// Independent oracle: stacks the v-CEQ systems of all sampled directions and
/// solves jointly by minimum-norm least squares. Returns (rho, normalized
/// stacked residual).
std::pair<Vec, double> ls_oracle(const FinslerMetric& metric, const Vec& x,
                                 const SolverConfig& config);

/// Dimension of the common nullspace of the sampled homogeneous systems:
/// n minus the rank of the stacked f-rows of all non-vertically-contact
/// samples (n when every sample is vertically contact).
int homogeneous_nullspace_dim(const FinslerMetric& metric, const Vec& x,
                              const SolverConfig& config);

/// Full pointwise pipeline: sample, classify, pick the best-conditioned base
/// vector and epsilon, run the closed form, and validate the candidate
/// against every sample. All failure modes are encoded in the status.
SolveOutcome solve_at_point(const FinslerMetric& metric, const Vec& p,
                            const SolverConfig& config);

}  // namespace fceq
