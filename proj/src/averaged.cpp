#include "fceq/averaged.hpp"

#include "fceq/diff.hpp"
#include "fceq/parallel.hpp"
#include "fceq/sampling.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

namespace fceq {

namespace {

struct Node {
    Vec theta;   // unit direction
    double w;    // solid-angle weight (common factors cancel in the ratio)
};

// Gauss-Legendre nodes/weights on [-1, 1] by Newton on the Legendre recurrence.
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(m);
    weights.resize(m);
    for (int k = 0; k < m; ++k) {
        double x = std::cos(M_PI * (k + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= m; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[k] = x;
        weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

std::vector<Node> build_nodes(int dim, const QuadratureSpec& quad, int n_nodes) {
    std::vector<Node> nodes;
    switch (quad.scheme) {
        case QuadratureSpec::Scheme::angular: {
            if (dim != 2)
                throw Error(ErrorCode::CONFIG_INVALID, "angular scheme requires dim = 2");
            nodes.reserve(n_nodes);
            for (int k = 0; k < n_nodes; ++k) {
                const double phi = 2.0 * M_PI * (k + 0.5) / n_nodes;
                Vec theta(2);
                theta << std::cos(phi), std::sin(phi);
                nodes.push_back({std::move(theta), 2.0 * M_PI / n_nodes});
            }
            break;
        }
        case QuadratureSpec::Scheme::product_sphere: {
            if (dim != 3)
                throw Error(ErrorCode::CONFIG_INVALID, "product_sphere scheme requires dim = 3");
            const int m = std::max(4, static_cast<int>(std::lround(std::sqrt(n_nodes))));
            std::vector<double> u, wu;
            gauss_legendre(m, u, wu);
            nodes.reserve(static_cast<std::size_t>(m) * m);
            for (int a = 0; a < m; ++a) {
                const double phi = 2.0 * M_PI * (a + 0.5) / m;
                for (int b = 0; b < m; ++b) {
                    const double s = std::sqrt(std::max(0.0, 1.0 - u[b] * u[b]));
                    Vec theta(3);
                    theta << s * std::cos(phi), s * std::sin(phi), u[b];
                    nodes.push_back({std::move(theta), wu[b] * 2.0 * M_PI / m});
                }
            }
            break;
        }
        case QuadratureSpec::Scheme::monte_carlo: {
            auto dirs = quasi_sphere_points(dim, n_nodes, quad.seed);
            nodes.reserve(dirs.size());
            for (auto& d : dirs) nodes.push_back({std::move(d), 1.0});
            break;
        }
    }
    return nodes;
}

// ordered pairwise reduction keeps results independent of the thread count
template <typename T>
T pairwise_sum(std::vector<T> items) {
    std::size_t count = items.size();
    while (count > 1) {
        const std::size_t half = count / 2;
        for (std::size_t i = 0; i < half; ++i)
            items[i] = items[2 * i] + items[2 * i + 1];
        if (count % 2) items[half] = items[count - 1];
        count = half + count % 2;
    }
    return items[0];
}

Mat gamma_core(const FinslerMetric& metric, const Vec& p, const QuadratureSpec& quad,
               int n_nodes) {
    const int n = metric.dim();
    const auto nodes = build_nodes(n, quad, n_nodes);

    std::vector<Mat> num(nodes.size());
    std::vector<double> den(nodes.size());
    std::vector<int> bad(nodes.size(), 0);
    parallel_for(nodes.size(), quad.threads, [&](std::size_t k) {
        const PointJet jet = jet_at(metric, p, nodes[k].theta, /*want_hessian=*/true);
        Eigen::SelfAdjointEigenSolver<Mat> eig(*jet.hess);
        if (eig.eigenvalues().minCoeff() <= 0.0) {
            bad[k] = 1;
            num[k] = Mat::Zero(n, n);
            den[k] = 0.0;
            return;
        }
        // radial indicatrix point y = theta / F; induced surface element of
        // the graph over the sphere: r^(n-1) sqrt(1 + r^2 |P G|^2) dOmega
        const double r = 1.0 / jet.f_value;
        const Vec tangential = jet.g_vec - jet.g_vec.dot(nodes[k].theta) * nodes[k].theta;
        const double w_surf = nodes[k].w * std::pow(r, n - 1) *
                              std::sqrt(1.0 + r * r * tangential.squaredNorm());
        num[k] = w_surf * (*jet.hess);  // g_ij is 0-homogeneous: value at theta works
        den[k] = w_surf;
    });
    for (std::size_t k = 0; k < nodes.size(); ++k)
        if (bad[k])
            throw Error(ErrorCode::NOT_CONVEX,
                        "energy Hessian not positive definite at quadrature node " +
                            std::to_string(k));
    return pairwise_sum(std::move(num)) / pairwise_sum(std::move(den));
}

}  // namespace

AveragedMetric averaged_metric_at(const FinslerMetric& metric, const Vec& p,
                                  const QuadratureSpec& quad) {
    if (quad.n_nodes < 8)
        throw Error(ErrorCode::CONFIG_INVALID, "quadrature needs n_nodes >= 8");
    if (p.size() != metric.dim())
        throw Error(ErrorCode::EVAL_DOMAIN, "point dimension mismatch");
    AveragedMetric out;
    out.gamma = gamma_core(metric, p, quad, quad.n_nodes);
    const Mat coarse = gamma_core(metric, p, quad, std::max(8, quad.n_nodes / 2));
    out.error_estimate = (out.gamma - coarse).cwiseAbs().maxCoeff();
    return out;
}

double normal_deviation(const AveragedMetric& gamma) {
    const auto n = gamma.gamma.rows();
    return (gamma.gamma - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
}

}  // namespace fceq
