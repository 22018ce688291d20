#include "fceq/averaged.hpp"

#include "fceq/metrics.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace fceq;

namespace {

QuadratureSpec angular(int nodes) {
    QuadratureSpec q;
    q.scheme = QuadratureSpec::Scheme::angular;
    q.n_nodes = nodes;
    return q;
}

QuadratureSpec product3(int nodes) {
    QuadratureSpec q;
    q.scheme = QuadratureSpec::Scheme::product_sphere;
    q.n_nodes = nodes;
    return q;
}

std::shared_ptr<FinslerMetric> randers2(double b1, double b2 = 0.0) {
    Vec b(2);
    b << b1, b2;
    return build(MetricSpec::randers(Mat::Identity(2, 2), b));
}

}  // namespace

TEST_SUITE_BEGIN("averaged");

TEST_CASE("euclidean average is the identity") {
    auto e2 = build(MetricSpec::euclidean(2));
    const AveragedMetric g2 = averaged_metric_at(*e2, Vec::Zero(2), angular(256));
    CHECK(normal_deviation(g2) <= 1e-6);

    auto e3 = build(MetricSpec::euclidean(3));
    const AveragedMetric g3 = averaged_metric_at(*e3, Vec::Zero(3), product3(64 * 64));
    CHECK(normal_deviation(g3) <= 1e-6);
}

TEST_CASE("constant SPD riemannian averages to itself") {
    Mat a(2, 2);
    a << 2.0, 0.4, 0.4, 1.0;
    auto metric = build(MetricSpec::riemannian_const(a));
    const AveragedMetric g = averaged_metric_at(*metric, Vec::Zero(2), angular(128));
    // the integrand is the constant a, so the weighted average is exact
    CHECK((g.gamma - a).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(normal_deviation(g) ==
          doctest::Approx((a - Mat::Identity(2, 2)).cwiseAbs().maxCoeff()).epsilon(1e-12));
}

TEST_CASE("randers average: symmetric, positive definite, reflection kills gamma_12") {
    auto metric = randers2(0.5);
    const AveragedMetric g = averaged_metric_at(*metric, Vec::Zero(2), angular(256));
    CHECK((g.gamma - g.gamma.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Mat> eig(g.gamma);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    CHECK(std::abs(g.gamma(0, 1)) <= 1e-10);
}

TEST_CASE("quadrature refinement: error halves (factor-4 band) as nodes double") {
    auto metric = randers2(0.5, 0.2);
    const Mat g64 = averaged_metric_at(*metric, Vec::Zero(2), angular(64)).gamma;
    const Mat g128 = averaged_metric_at(*metric, Vec::Zero(2), angular(128)).gamma;
    const Mat g256 = averaged_metric_at(*metric, Vec::Zero(2), angular(256)).gamma;
    const double e1 = (g128 - g64).cwiseAbs().maxCoeff();
    const double e2 = (g256 - g128).cwiseAbs().maxCoeff();
    CHECK(e2 <= 2.0 * e1 + 1e-14);

    // reported estimate is the successive-refinement difference
    const AveragedMetric g = averaged_metric_at(*metric, Vec::Zero(2), angular(128));
    CHECK(g.error_estimate == doctest::Approx(e1).epsilon(1e-12));
}

TEST_CASE("rotation equivariance in n=2") {
    const double phi = 0.7;
    Eigen::Rotation2D<double> rot(phi);
    const Mat r = rot.toRotationMatrix();

    Vec b(2);
    b << 0.5, 0.0;
    auto metric = build(MetricSpec::randers(Mat::Identity(2, 2), b));
    auto rotated = build(MetricSpec::randers(Mat::Identity(2, 2), r * b));

    const Mat g = averaged_metric_at(*metric, Vec::Zero(2), angular(256)).gamma;
    const Mat gr = averaged_metric_at(*rotated, Vec::Zero(2), angular(256)).gamma;
    CHECK((gr - r * g * r.transpose()).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("monte carlo scheme covers higher dimensions") {
    auto e4 = build(MetricSpec::euclidean(4));
    QuadratureSpec q;
    q.scheme = QuadratureSpec::Scheme::monte_carlo;
    q.n_nodes = 2048;
    q.seed = 3;
    const AveragedMetric g = averaged_metric_at(*e4, Vec::Zero(4), q);
    CHECK(normal_deviation(g) <= 1e-12);  // constant integrand: exact for any weights
}

TEST_CASE("non-convex metric raises NOT_CONVEX") {
    auto lobed = make_lobed_norm(0.5);
    CHECK_THROWS_AS((void)averaged_metric_at(*lobed, Vec::Zero(2), angular(64)), Error);
    try {
        (void)averaged_metric_at(*lobed, Vec::Zero(2), angular(64));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NOT_CONVEX);
    }
}

TEST_CASE("scheme / dimension mismatches rejected") {
    auto e3 = build(MetricSpec::euclidean(3));
    CHECK_THROWS_AS((void)averaged_metric_at(*e3, Vec::Zero(3), angular(64)), Error);
    auto e2 = build(MetricSpec::euclidean(2));
    CHECK_THROWS_AS((void)averaged_metric_at(*e2, Vec::Zero(2), product3(64)), Error);
    QuadratureSpec tiny = angular(4);
    CHECK_THROWS_AS((void)averaged_metric_at(*e2, Vec::Zero(2), tiny), Error);
}

TEST_SUITE_END();
