#pragma once

#include "fceq/jet.hpp"
#include "fceq/types.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fceq {

/// A Finsler metric on one chart: F(x, y), 1-homogeneous in y, smooth and
/// positive away from y = 0 in its declared validity region.
///
/// Evaluation must be pure and reentrant. The three overloads are the same
/// formula over double, first-order jets and nested (second-order) jets; the
/// derivative engine in diff.hpp picks whichever order it needs.
class FinslerMetric {
public:
    FinslerMetric(int dim, std::string description)
        : dim_(dim), description_(std::move(description)) {}
    virtual ~FinslerMetric() = default;

    int dim() const noexcept { return dim_; }
    const std::string& description() const noexcept { return description_; }

    virtual bool position_independent() const noexcept { return false; }

    virtual double eval(std::span<const double> x, std::span<const double> y) const = 0;
    virtual Jet1 eval(std::span<const Jet1> x, std::span<const Jet1> y) const = 0;
    virtual Jet2 eval(std::span<const Jet2> x, std::span<const Jet2> y) const = 0;

    double eval(const Vec& x, const Vec& y) const {
        return eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                    std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
    }

private:
    int dim_;
    std::string description_;
};

/// CRTP shim: derived classes implement a single
///   template <class S> S eval_impl(std::span<const S> x, std::span<const S> y) const
/// and get all three virtual instantiations.
template <typename Derived>
class MetricBase : public FinslerMetric {
public:
    using FinslerMetric::FinslerMetric;
    using FinslerMetric::eval;

    double eval(std::span<const double> x, std::span<const double> y) const override {
        return derived().template eval_impl<double>(x, y);
    }
    Jet1 eval(std::span<const Jet1> x, std::span<const Jet1> y) const override {
        return derived().template eval_impl<Jet1>(x, y);
    }
    Jet2 eval(std::span<const Jet2> x, std::span<const Jet2> y) const override {
        return derived().template eval_impl<Jet2>(x, y);
    }

private:
    const Derived& derived() const { return static_cast<const Derived&>(*this); }
};

/// One polynomial term of a position-dependent Riemannian perturbation:
/// a(x) += delta * prod_i x_i^exponents[i].
struct PolyTerm {
    Mat delta;
    std::vector<int> exponents;
};

/// Declarative metric description; `build` turns it into an evaluatable metric.
struct MetricSpec {
    enum class Kind { riemannian, randers, synthetic_germ };

    Kind kind = Kind::riemannian;
    int dim = 2;

    // riemannian / randers
    Mat a;
    Vec b;                             // randers 1-form (dual a-norm < 1)
    std::vector<PolyTerm> position_terms;  // riemannian only

    // synthetic_germ
    std::shared_ptr<MetricSpec> base_norm;
    Vec rho_star;
    Vec base_point;
    double incompatibility = 0.0;

    static MetricSpec euclidean(int dim);
    static MetricSpec riemannian_const(Mat a);
    static MetricSpec randers(Mat a, Vec b);
    static MetricSpec germ(MetricSpec base, Vec rho_star, Vec base_point,
                           double incompatibility = 0.0);
};

/// Validates the spec and constructs the metric. Throws SPEC_INVALID naming
/// the violated invariant.
std::shared_ptr<FinslerMetric> build(const MetricSpec& spec);

/// Germ metric: first-order-in-(x - p) extension of a position-independent
/// norm phi so that the pointwise compatibility system at p has the exact
/// solution rho_star for every non-zero tangent vector:
///   F(x, y) = phi(y) - sum_i (x^i - p^i) <f_i^phi(y), rho_star>.
/// `incompatibility` adds delta*(x^1 - p^1)*(y^2)^2/|y| on top, an x-linear
/// term outside span(f_i) that breaks solvability by a controlled amount.
/// The base norm must be a constant-coefficient riemannian or randers metric.
std::shared_ptr<FinslerMetric> make_germ(const FinslerMetric& base_norm, const Vec& rho_star,
                                         const Vec& p, double incompatibility = 0.0);

/// n=2 counterexample norm ||y|| * (1 + amplitude * sin(3 * atan2(y2, y1))):
/// 1-homogeneous and smooth off the origin but not strongly convex once
/// amplitude > 1/8.
std::shared_ptr<FinslerMetric> make_lobed_norm(double amplitude = 0.5);

/// True iff the energy Hessian is positive definite at n_samples seeded
/// pseudo-random unit directions.
bool strong_convexity_probe(const FinslerMetric& metric, const Vec& x, int n_samples,
                            std::uint64_t seed);

}  // namespace fceq
