#include "fceq/metrics.hpp"

#include "fceq/diff.hpp"
#include "fceq/sampling.hpp"

#include <doctest.h>

#include <cmath>

using namespace fceq;

namespace {

MetricSpec randers_spec(double b1) {
    Vec b(2);
    b << b1, 0.0;
    return MetricSpec::randers(Mat::Identity(2, 2), b);
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("build: euclidean evaluates to the norm") {
    auto metric = build(MetricSpec::euclidean(3));
    Vec x = Vec::Zero(3), y(3);
    y << 1.0, 2.0, 2.0;
    CHECK(metric->eval(x, y) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("build: randers evaluation and validity bound") {
    auto metric = build(randers_spec(0.5));
    Vec x = Vec::Zero(2), y(2);
    y << 0.0, 1.0;
    CHECK(metric->eval(x, y) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS((void)build(randers_spec(1.2)), Error);
    try {
        (void)build(randers_spec(1.2));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SPEC_INVALID);
    }
}

TEST_CASE("build: non-SPD riemannian rejected") {
    Mat a(2, 2);
    a << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
    CHECK_THROWS_AS((void)build(MetricSpec::riemannian_const(a)), Error);
}

TEST_CASE("germ: equals the base norm at the base point") {
    Vec rho(2), p(2);
    rho << 0.3, -0.1;
    p << 0.4, -0.2;
    auto germ = build(MetricSpec::germ(randers_spec(0.5), rho, p));
    auto base = build(randers_spec(0.5));
    for (const auto& y : quasi_sphere_points(2, 10, 4))
        CHECK(germ->eval(p, y) == doctest::Approx(base->eval(p, y)).epsilon(1e-15));
}

TEST_CASE("germ: prescribed x-gradient, checked by finite differences") {
    Vec rho(2), p(2);
    rho << 0.3, -0.1;
    p << 0.0, 0.0;
    auto germ = build(MetricSpec::germ(randers_spec(0.5), rho, p));
    auto base = build(randers_spec(0.5));
    const double h = 1e-6;
    for (const auto& y : quasi_sphere_points(2, 10, 5)) {
        const PointJet bj = jet_at(*base, p, y);
        for (int i = 0; i < 2; ++i) {
            // expected: dF/dx_i = -<f_i^phi(y), rho> = -(y_i <G,rho> - G_i <y,rho>)
            const double expected =
                -(y(i) * bj.g_vec.dot(rho) - bj.g_vec(i) * y.dot(rho));
            Vec xp = Vec::Zero(2), xm = Vec::Zero(2);
            xp(i) += h;
            xm(i) -= h;
            const double fd = (germ->eval(xp, y) - germ->eval(xm, y)) / (2.0 * h);
            CHECK(std::abs(fd - expected) <= 1e-8 * (1.0 + std::abs(expected)));
        }
    }
}

TEST_CASE("germ: zero torsion form is position-independent to first order") {
    Vec p(2);
    p << 0.1, 0.2;
    auto germ = build(MetricSpec::germ(randers_spec(0.5), Vec::Zero(2), p));
    for (const auto& y : quasi_sphere_points(2, 12, 6)) {
        const PointJet jet = jet_at(*germ, p, y);
        CHECK(jet.h_vec.cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("germ: base norm must be position-independent") {
    MetricSpec riem = MetricSpec::euclidean(2);
    PolyTerm bump;
    bump.delta = 0.1 * Mat::Identity(2, 2);
    bump.exponents = {1, 0};
    riem.position_terms.push_back(bump);
    auto base = build(riem);
    CHECK_THROWS_AS((void)make_germ(*base, Vec::Zero(2), Vec::Zero(2)), Error);
}

TEST_CASE("homogeneity of every shipped metric") {
    Vec rho(2);
    rho << 0.3, -0.1;
    std::vector<std::shared_ptr<FinslerMetric>> metrics = {
        build(MetricSpec::euclidean(2)),
        build(randers_spec(0.5)),
        build(MetricSpec::germ(randers_spec(0.5), rho, Vec::Zero(2))),
        make_lobed_norm(0.5),
    };
    Vec x(2);
    x << 0.2, -0.3;
    for (const auto& metric : metrics)
        for (const auto& d : quasi_sphere_points(2, 8, 7)) {
            const double f1 = metric->eval(x, d);
            for (double t : {0.5, 2.0, 10.0}) {
                const Vec y = t * d;
                CHECK(std::abs(metric->eval(x, y) - t * f1) <= 1e-10 * t * f1);
            }
        }
}

TEST_CASE("strong convexity probe") {
    Vec b(2);
    b << 0.5, 0.0;
    CHECK(strong_convexity_probe(*build(MetricSpec::euclidean(2)), Vec::Zero(2), 16, 1));
    CHECK(strong_convexity_probe(*build(MetricSpec::randers(Mat::Identity(2, 2), b)),
                                 Vec::Zero(2), 16, 1));
    // three-lobed perturbation of the norm: 1-homogeneous but not convex
    CHECK_FALSE(strong_convexity_probe(*make_lobed_norm(0.5), Vec::Zero(2), 64, 1));
}

TEST_SUITE_END();
