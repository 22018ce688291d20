#include "fceq/ceq.hpp"

#include "fceq/linalg.hpp"
#include "fceq/metrics.hpp"
#include "fceq/sampling.hpp"

#include <doctest.h>

#include <cmath>

using namespace fceq;

namespace {

// b with two live components: keeps every f_jk generically non-zero, so the
// intrinsic triple sums see perturbations in any H component
MetricSpec randers_base(int n) {
    Vec b = Vec::Zero(n);
    b(0) = 0.4;
    b(1) = 0.3;
    return MetricSpec::randers(Mat::Identity(n, n), b);
}

std::shared_ptr<FinslerMetric> germ_metric(const Vec& rho, double incompat = 0.0) {
    const int n = static_cast<int>(rho.size());
    return build(MetricSpec::germ(randers_base(n), rho, Vec::Zero(n), incompat));
}

Vec rho3() {
    Vec rho(3);
    rho << 0.3, -0.1, 0.2;
    return rho;
}

PivotChoice pivot_at(const FinslerMetric& metric, const Vec& x, const Vec& v) {
    const auto pivot = pick_pivot(f_matrix(jet_at(metric, x, v)));
    REQUIRE(pivot.has_value());
    return *pivot;
}

}  // namespace

TEST_SUITE_BEGIN("ceq");

TEST_CASE("assemble: euclidean system is identically zero") {
    auto metric = build(MetricSpec::euclidean(3));
    Vec v(3);
    v << 0.3, -0.8, 0.5;
    const VCeqSystem sys = assemble(*metric, Vec::Zero(3), v);
    CHECK(sys.a.cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(sys.b.cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(ceq_residual(sys, Vec::Zero(3)) <= 1e-15);
}

TEST_CASE("assemble: n=2 randers coefficient matrix at v=(0,1)") {
    Vec b(2);
    b << 0.5, 0.0;
    auto metric = build(MetricSpec::randers(Mat::Identity(2, 2), b));
    Vec v(2);
    v << 0.0, 1.0;
    const VCeqSystem sys = assemble(*metric, Vec::Zero(2), v);
    CHECK(sys.a(0, 0) == 0.0);
    CHECK(sys.a(0, 1) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(sys.a(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sys.a(1, 1) == 0.0);
}

TEST_CASE("assemble: the germ system is exactly consistent at rho*") {
    const Vec rho = rho3();
    auto germ = germ_metric(rho);
    for (const auto& v : sample_directions(3, 12, 3)) {
        const VCeqSystem sys = assemble(*germ, Vec::Zero(3), v);
        CHECK((sys.a * rho - sys.b).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(ceq_residual(sys, rho) <= 1e-12);
    }
}

TEST_CASE("ceq_residual: perturbing rho off a live row is visible") {
    const Vec rho = rho3();
    auto germ = germ_metric(rho);
    Vec v(3);
    v << 0.0, 1.0, 0.0;  // f_1 != 0 here (f_12 = -b_1)
    const VCeqSystem sys = assemble(*germ, Vec::Zero(3), v);
    Vec off = rho;
    off(0) += 1.0;
    CHECK(ceq_residual(sys, off) > 0.01);
}

TEST_CASE("intrinsic check: exact on the germ, vacuous for n=2, loud when broken") {
    const Vec rho = rho3();
    auto germ = germ_metric(rho);
    int checked = 0;
    for (const auto& v : sample_directions(3, 50, 5)) {
        const FMatrix fm = f_matrix(jet_at(*germ, Vec::Zero(3), v));
        if (!pick_pivot(fm)) continue;
        const IntrinsicReport report = intrinsic_check(*germ, Vec::Zero(3), v);
        CHECK(report.worst_residual <= 1e-9);
        CHECK(report.n_checked == 1);  // C(3,3) = 1 triple
        checked += report.n_checked;
    }
    CHECK(checked >= 50);

    // n = 2: no triples to check
    Vec rho2(2);
    rho2 << 0.3, -0.1;
    auto germ2 = germ_metric(rho2);
    Vec v2(2);
    v2 << 0.0, 1.0;
    const IntrinsicReport r2 = intrinsic_check(*germ2, Vec::Zero(2), v2);
    CHECK(r2.n_checked == 0);
    CHECK(r2.worst_residual == 0.0);

    // vertically contact vector: vacuous, reported as an error
    auto euclid = build(MetricSpec::euclidean(3));
    Vec v3(3);
    v3 << 1.0, 0.0, 0.0;
    CHECK_THROWS_AS((void)intrinsic_check(*euclid, Vec::Zero(3), v3), Error);

    // incompatible germ: the cyclic sums break at some sample
    auto broken = germ_metric(rho, 1e-2);
    double worst = 0.0;
    for (const auto& v : sample_directions(3, 50, 5)) {
        const FMatrix fm = f_matrix(jet_at(*broken, Vec::Zero(3), v));
        if (!pick_pivot(fm)) continue;
        worst = std::max(worst, intrinsic_check(*broken, Vec::Zero(3), v).worst_residual);
    }
    CHECK(worst > 1e-4);
}

TEST_CASE("eliminated solve: recovers the two inner products on the germ") {
    const Vec rho = rho3();
    auto germ = germ_metric(rho);
    for (const auto& v : quasi_sphere_points(3, 10, 7)) {
        const VCeqSystem sys = assemble(*germ, Vec::Zero(3), v);
        const FMatrix fm = f_matrix(jet_at(*germ, Vec::Zero(3), v));
        const auto pivot = pick_pivot(fm);
        if (!pivot) continue;
        const auto [g_dot, c_dot] = eliminated_solve(sys, *pivot);
        CHECK(std::abs(g_dot - sys.g.dot(rho)) <= 1e-10);
        CHECK(std::abs(c_dot - sys.v.dot(rho)) <= 1e-10);
        // determinant of the 2x2 system is f_ji = -f_ij
        CHECK(sys.a(pivot->j, pivot->i) == -sys.a(pivot->i, pivot->j));
    }

    auto flat = germ_metric(Vec::Zero(3));
    Vec v(3);
    v << 0.0, 1.0, 0.0;
    const VCeqSystem sys = assemble(*flat, Vec::Zero(3), v);
    const auto [g_dot, c_dot] = eliminated_solve(sys, pivot_at(*flat, Vec::Zero(3), v));
    CHECK(std::abs(g_dot) <= 1e-14);
    CHECK(std::abs(c_dot) <= 1e-14);
}

TEST_CASE("eliminated solve: pivot below threshold throws PIVOT_LOST") {
    auto germ = germ_metric(rho3());
    Vec v(3);
    v << 0.0, 1.0, 0.0;
    VCeqSystem sys = assemble(*germ, Vec::Zero(3), v);
    PivotChoice fake{1, 2, 0.0};  // f_23 = v_2 b_3 - v_3 b_2 = 0 at v = e_2
    CHECK_THROWS_AS((void)eliminated_solve(sys, fake), Error);
}

TEST_CASE("closed form: germ recovery, epsilon invariance, both routes agree") {
    const Vec rho = rho3();
    auto germ = germ_metric(rho);
    Vec v(3);
    v << 0.1, 0.9, -0.5;
    v.normalize();
    const PivotChoice pivot = pivot_at(*germ, Vec::Zero(3), v);

    const Vec r1 = closed_form_rho(*germ, Vec::Zero(3), v, pivot, 0.25);
    CHECK((r1 - rho).cwiseAbs().maxCoeff() <= 1e-8);

    const Vec r2 = closed_form_rho(*germ, Vec::Zero(3), v, pivot, 0.11);
    CHECK((r1 - r2).cwiseAbs().maxCoeff() <= 1e-7);

    const Vec r3 = closed_form_rho_summation(*germ, Vec::Zero(3), v, pivot, 0.25);
    CHECK((r1 - r3).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("closed form: scale invariance of the pipeline quantities") {
    const Vec rho = rho3();
    auto germ = germ_metric(rho);
    Vec v(3);
    v << 0.4, 0.8, -0.3;
    const PivotChoice pivot = pivot_at(*germ, Vec::Zero(3), v);
    const Vec r1 = closed_form_rho(*germ, Vec::Zero(3), v, pivot, 0.2);
    const Vec r2 = closed_form_rho(*germ, Vec::Zero(3), 2.0 * v, pivot, 0.4);
    CHECK((r1 - r2).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("closed form: singular epsilon rejected") {
    auto germ = germ_metric(rho3());
    Vec v(3);
    v << 0.2, 0.5, 0.3;  // row sum 1.0
    const PivotChoice pivot = pivot_at(*germ, Vec::Zero(3), v);
    CHECK_THROWS_AS((void)closed_form_rho(*germ, Vec::Zero(3), v, pivot, 0.0), Error);
    CHECK_THROWS_AS((void)closed_form_rho(*germ, Vec::Zero(3), v, pivot, 1.0), Error);
}

TEST_CASE("ls oracle: germ, euclidean and perturbed germ") {
    const Vec rho = rho3();
    SolverConfig config;
    config.seed = 9;

    auto [r, res] = ls_oracle(*germ_metric(rho), Vec::Zero(3), config);
    CHECK((r - rho).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(res <= 1e-10);

    auto [r0, res0] = ls_oracle(*build(MetricSpec::euclidean(3)), Vec::Zero(3), config);
    CHECK(r0.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(res0 <= 1e-12);

    auto [rb, resb] = ls_oracle(*germ_metric(rho, 1e-2), Vec::Zero(3), config);
    CHECK(resb > 1e-4);
}

TEST_CASE("homogeneous nullspace dimension") {
    SolverConfig config;
    config.seed = 2;
    CHECK(homogeneous_nullspace_dim(*build(MetricSpec::euclidean(3)), Vec::Zero(3), config) == 3);

    Vec rho2(2);
    rho2 << 0.4, 0.2;
    CHECK(homogeneous_nullspace_dim(*germ_metric(rho2), Vec::Zero(2), config) == 0);
    for (int n : {3, 4, 5}) {
        Vec rho = Vec::Zero(n);
        rho(0) = 0.4;
        CHECK(homogeneous_nullspace_dim(*germ_metric(rho), Vec::Zero(n), config) == 0);
    }
}

TEST_CASE("solve_at_point: euclidean reports the riemannian branch") {
    SolverConfig config;
    const SolveOutcome out = solve_at_point(*build(MetricSpec::euclidean(3)), Vec::Zero(3), config);
    CHECK(out.status == SolveStatus::RIEMANNIAN_INDETERMINATE);
    CHECK_FALSE(out.rho.has_value());
    CHECK(out.nullspace_dim == 3);
}

TEST_CASE("solve_at_point: germ recovery within 1e-7") {
    const Vec rho = rho3();
    SolverConfig config;
    config.seed = 4;
    const SolveOutcome out = solve_at_point(*germ_metric(rho), Vec::Zero(3), config);
    REQUIRE(out.status == SolveStatus::UNIQUE);
    REQUIRE(out.rho.has_value());
    CHECK((*out.rho - rho).cwiseAbs().maxCoeff() <= 1e-7);
    CHECK(out.epsilon_used.has_value());
    CHECK(out.base_v.has_value());
    CHECK(out.pivot.has_value());
    CHECK(out.max_ceq_residual <= config.tol.residual_tol);
    CHECK(out.nullspace_dim == 0);

    // necessity direction: accepted residuals imply clean intrinsic sums
    CHECK(out.intrinsic.worst_residual <= config.tol.residual_tol);
}

TEST_CASE("solve_at_point: incompatible germ is INSOLVABLE with loud diagnostics") {
    SolverConfig config;
    const SolveOutcome out =
        solve_at_point(*germ_metric(rho3(), 1e-2), Vec::Zero(3), config);
    CHECK(out.status == SolveStatus::INSOLVABLE);
    CHECK_FALSE(out.rho.has_value());
    CHECK(out.max_ceq_residual > config.tol.residual_tol);
    CHECK(out.intrinsic.worst_residual > 1e-4);
}

TEST_CASE("solve_at_point: unicity across seeds and configs") {
    const Vec rho = rho3();
    auto germ = germ_metric(rho);
    Vec first;
    for (std::uint64_t seed : {1ULL, 77ULL, 4096ULL}) {
        SolverConfig config;
        config.seed = seed;
        const SolveOutcome out = solve_at_point(*germ, Vec::Zero(3), config);
        REQUIRE(out.status == SolveStatus::UNIQUE);
        if (first.size() == 0)
            first = *out.rho;
        else
            CHECK((*out.rho - first).cwiseAbs().maxCoeff() <= 1e-7);
    }
}

TEST_CASE("solve_at_point: config invariants enforced") {
    SolverConfig config;
    config.n_sphere_samples = 3;  // < 2n
    CHECK_THROWS_AS(
        (void)solve_at_point(*build(MetricSpec::euclidean(3)), Vec::Zero(3), config), Error);
}

TEST_SUITE_END();
