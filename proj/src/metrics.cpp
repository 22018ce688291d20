#include "fceq/metrics.hpp"

#include "fceq/diff.hpp"
#include "fceq/sampling.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <utility>

namespace fceq {

namespace {

template <typename S>
S quad_form(const Mat& a, std::span<const S> y) {
    S acc{};
    const auto n = a.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) acc += (y[i] * y[j]) * a(i, j);
    return acc;
}

// w^T a y for a constant vector w
template <typename S>
S mixed_form(const Mat& a, const Vec& w, std::span<const S> y) {
    S acc{};
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) acc += y[j] * (w(i) * a(i, j));
    return acc;
}

template <typename S>
S const_dot(const Vec& w, std::span<const S> y) {
    S acc{};
    for (Eigen::Index i = 0; i < w.size(); ++i) acc += y[i] * w(i);
    return acc;
}

template <typename S>
S row_dot(const Mat& a, Eigen::Index i, std::span<const S> y) {
    S acc{};
    for (Eigen::Index j = 0; j < a.cols(); ++j) acc += y[j] * a(i, j);
    return acc;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::SPEC_INVALID, what);
}

void check_spd(const Mat& a, const std::string& name) {
    require(a.rows() == a.cols(), name + " must be square");
    require(a.allFinite(), name + " must be finite");
    require((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + a.cwiseAbs().maxCoeff()),
            name + " must be symmetric");
    Eigen::LLT<Mat> llt(a);
    require(llt.info() == Eigen::Success, name + " must be positive definite");
}

}  // namespace

// ---- concrete metrics -------------------------------------------------------

class RiemannianMetric final : public MetricBase<RiemannianMetric> {
public:
    RiemannianMetric(Mat a, std::vector<PolyTerm> terms, std::string description)
        : MetricBase(static_cast<int>(a.rows()), std::move(description)),
          a_(std::move(a)),
          terms_(std::move(terms)) {}

    bool position_independent() const noexcept override { return terms_.empty(); }

    const Mat& quadratic_form() const noexcept { return a_; }

    template <typename S>
    S eval_impl(std::span<const S> x, std::span<const S> y) const {
        S q = quad_form(a_, y);
        for (const auto& term : terms_) {
            S m = monomial<S>(x, term.exponents);
            q += m * quad_form(term.delta, y);
        }
        return sqrt(q);
    }

private:
    template <typename S>
    static S monomial(std::span<const S> x, const std::vector<int>& exponents) {
        S m = detail::one_like(S{});
        for (std::size_t i = 0; i < exponents.size(); ++i)
            for (int e = 0; e < exponents[i]; ++e) m *= x[i];
        return m;
    }

    Mat a_;
    std::vector<PolyTerm> terms_;
};

class RandersMetric final : public MetricBase<RandersMetric> {
public:
    RandersMetric(Mat a, Vec b, std::string description)
        : MetricBase(static_cast<int>(a.rows()), std::move(description)),
          a_(std::move(a)),
          b_(std::move(b)) {}

    bool position_independent() const noexcept override { return true; }

    const Mat& quadratic_form() const noexcept { return a_; }
    const Vec& one_form() const noexcept { return b_; }

    template <typename S>
    S eval_impl(std::span<const S>, std::span<const S> y) const {
        return sqrt(quad_form(a_, y)) + const_dot(b_, y);
    }

private:
    Mat a_;
    Vec b_;
};

/// phi(y) - sum_i (x^i - p^i) <f_i^phi(y), rho*>, with phi = sqrt(y^T a y) + b.y
/// so the y-gradient of phi stays in closed form through jet evaluation.
class GermMetric final : public MetricBase<GermMetric> {
public:
    GermMetric(Mat a, Vec b, Vec rho_star, Vec p, double incompatibility, std::string description)
        : MetricBase(static_cast<int>(a.rows()), std::move(description)),
          a_(std::move(a)),
          b_(std::move(b)),
          rho_(std::move(rho_star)),
          p_(std::move(p)),
          delta_(incompatibility) {}

    const Vec& rho_star() const noexcept { return rho_; }
    const Vec& base_point() const noexcept { return p_; }
    double incompatibility() const noexcept { return delta_; }

    template <typename S>
    S eval_impl(std::span<const S> x, std::span<const S> y) const {
        const auto n = a_.rows();
        S s = sqrt(quad_form(a_, y));
        S f = s + const_dot(b_, y);

        // <G_phi, rho*> = (rho*^T a y)/s + rho*.b  and  <y, rho*>
        S grad_dot_rho = mixed_form(a_, rho_, y) / s + rho_.dot(b_);
        S y_dot_rho = const_dot(rho_, y);
        for (Eigen::Index i = 0; i < n; ++i) {
            S gphi_i = row_dot(a_, i, y) / s + b_(i);
            f -= (x[i] - p_(i)) * (y[i] * grad_dot_rho - gphi_i * y_dot_rho);
        }
        if (delta_ != 0.0) {
            S r2{};
            for (Eigen::Index i = 0; i < n; ++i) r2 += y[i] * y[i];
            f += delta_ * ((x[0] - p_(0)) * (y[1] * y[1])) / sqrt(r2);
        }
        return f;
    }

private:
    Mat a_;
    Vec b_;
    Vec rho_;
    Vec p_;
    double delta_;
};

class LobedNorm final : public MetricBase<LobedNorm> {
public:
    explicit LobedNorm(double amplitude)
        : MetricBase(2, "lobed non-convex norm, amplitude " + std::to_string(amplitude)),
          amp_(amplitude) {}

    bool position_independent() const noexcept override { return true; }

    template <typename S>
    S eval_impl(std::span<const S>, std::span<const S> y) const {
        S r = sqrt(y[0] * y[0] + y[1] * y[1]);
        S theta = atan2(y[1], y[0]);
        return r * (1.0 + amp_ * sin(3.0 * theta));
    }

private:
    double amp_;
};

// ---- spec construction ------------------------------------------------------

MetricSpec MetricSpec::euclidean(int dim) {
    MetricSpec s;
    s.kind = Kind::riemannian;
    s.dim = dim;
    s.a = Mat::Identity(dim, dim);
    return s;
}

MetricSpec MetricSpec::riemannian_const(Mat a) {
    MetricSpec s;
    s.kind = Kind::riemannian;
    s.dim = static_cast<int>(a.rows());
    s.a = std::move(a);
    return s;
}

MetricSpec MetricSpec::randers(Mat a, Vec b) {
    MetricSpec s;
    s.kind = Kind::randers;
    s.dim = static_cast<int>(a.rows());
    s.a = std::move(a);
    s.b = std::move(b);
    return s;
}

MetricSpec MetricSpec::germ(MetricSpec base, Vec rho_star, Vec base_point,
                            double incompatibility) {
    MetricSpec s;
    s.kind = Kind::synthetic_germ;
    s.dim = base.dim;
    s.base_norm = std::make_shared<MetricSpec>(std::move(base));
    s.rho_star = std::move(rho_star);
    s.base_point = std::move(base_point);
    s.incompatibility = incompatibility;
    return s;
}

std::shared_ptr<FinslerMetric> build(const MetricSpec& spec) {
    require(spec.dim >= 2, "dim must be at least 2");
    switch (spec.kind) {
        case MetricSpec::Kind::riemannian: {
            require(spec.a.rows() == spec.dim, "a must be dim x dim");
            check_spd(spec.a, "riemannian a");
            for (const auto& term : spec.position_terms) {
                require(term.delta.rows() == spec.dim && term.delta.cols() == spec.dim,
                        "position term delta must be dim x dim");
                require(term.delta.allFinite(), "position term delta must be finite");
                require((term.delta - term.delta.transpose()).cwiseAbs().maxCoeff() <=
                            1e-12 * (1.0 + term.delta.cwiseAbs().maxCoeff()),
                        "position term delta must be symmetric");
                require(static_cast<int>(term.exponents.size()) == spec.dim,
                        "position term exponents must have length dim");
                for (int e : term.exponents) require(e >= 0, "exponents must be non-negative");
            }
            std::ostringstream desc;
            desc << "riemannian n=" << spec.dim
                 << (spec.position_terms.empty() ? "" : " with polynomial perturbation");
            return std::make_shared<RiemannianMetric>(spec.a, spec.position_terms, desc.str());
        }
        case MetricSpec::Kind::randers: {
            require(spec.a.rows() == spec.dim, "a must be dim x dim");
            check_spd(spec.a, "randers a");
            require(spec.b.size() == spec.dim, "b must have length dim");
            require(spec.b.allFinite(), "b must be finite");
            const double bnorm = std::sqrt(spec.b.dot(spec.a.ldlt().solve(spec.b)));
            require(bnorm < 1.0, "randers needs ||b||_a < 1, got " + std::to_string(bnorm));
            std::ostringstream desc;
            desc << "randers n=" << spec.dim << " ||b||_a=" << bnorm;
            return std::make_shared<RandersMetric>(spec.a, spec.b, desc.str());
        }
        case MetricSpec::Kind::synthetic_germ: {
            require(spec.base_norm != nullptr, "germ needs a base_norm");
            require(spec.rho_star.size() == spec.dim, "rho_star must have length dim");
            require(spec.rho_star.allFinite(), "rho_star must be finite");
            require(spec.base_point.size() == spec.dim, "base_point must have length dim");
            require(spec.base_point.allFinite(), "base_point must be finite");
            auto base = build(*spec.base_norm);
            return make_germ(*base, spec.rho_star, spec.base_point, spec.incompatibility);
        }
    }
    throw Error(ErrorCode::SPEC_INVALID, "unknown metric kind");
}

std::shared_ptr<FinslerMetric> make_germ(const FinslerMetric& base_norm, const Vec& rho_star,
                                         const Vec& p, double incompatibility) {
    require(base_norm.position_independent(), "germ base norm must be position-independent");
    require(rho_star.size() == base_norm.dim(), "rho_star must have length dim");
    require(p.size() == base_norm.dim(), "base_point must have length dim");

    Mat a;
    Vec b = Vec::Zero(base_norm.dim());
    if (const auto* riem = dynamic_cast<const RiemannianMetric*>(&base_norm)) {
        a = riem->quadratic_form();
    } else if (const auto* randers = dynamic_cast<const RandersMetric*>(&base_norm)) {
        a = randers->quadratic_form();
        b = randers->one_form();
    } else {
        throw Error(ErrorCode::SPEC_INVALID,
                    "germ base norm must be a constant riemannian or randers metric");
    }
    std::ostringstream desc;
    desc << "germ over (" << base_norm.description() << ")";
    if (incompatibility != 0.0) desc << " incompatibility " << incompatibility;
    return std::make_shared<GermMetric>(std::move(a), std::move(b), rho_star, p,
                                        incompatibility, desc.str());
}

std::shared_ptr<FinslerMetric> make_lobed_norm(double amplitude) {
    return std::make_shared<LobedNorm>(amplitude);
}

bool strong_convexity_probe(const FinslerMetric& metric, const Vec& x, int n_samples,
                            std::uint64_t seed) {
    if (n_samples < 1) throw Error(ErrorCode::CONFIG_INVALID, "n_samples must be >= 1");
    const auto dirs = quasi_sphere_points(metric.dim(), n_samples, seed);
    for (const auto& y : dirs) {
        PointJet jet = jet_at(metric, x, y, /*want_hessian=*/true);
        Eigen::SelfAdjointEigenSolver<Mat> eig(*jet.hess);
        if (eig.eigenvalues().minCoeff() <= 0.0) return false;
    }
    return true;
}

}  // namespace fceq
