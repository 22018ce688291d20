#include "fceq/diff.hpp"

#include <cmath>
#include <vector>

namespace fceq {

namespace {

void check_inputs(const FinslerMetric& metric, const Vec& x, const Vec& y) {
    if (x.size() != metric.dim() || y.size() != metric.dim())
        throw Error(ErrorCode::EVAL_DOMAIN, "x and y must have the metric's dimension");
    if (!x.allFinite() || !y.allFinite())
        throw Error(ErrorCode::EVAL_DOMAIN, "non-finite chart input");
    if (y.norm() == 0.0)
        throw Error(ErrorCode::EVAL_DOMAIN, "metric derivatives are undefined at y = 0");
}

double eval_plain(const FinslerMetric& metric, const Vec& x, const Vec& y) {
    const double f = metric.eval(x, y);
    if (!std::isfinite(f))
        throw Error(ErrorCode::EVAL_DOMAIN, "metric evaluation returned a non-finite value");
    return f;
}

}  // namespace

PointJet jet_at(const FinslerMetric& metric, const Vec& x, const Vec& y, bool want_hessian) {
    check_inputs(metric, x, y);
    const int n = metric.dim();

    // one pass with 2n directions: x seeds [0, n), y seeds [n, 2n)
    std::vector<Jet1> xj(n), yj(n);
    for (int i = 0; i < n; ++i) {
        xj[i] = Jet1::variable(x(i), 2 * n, i);
        yj[i] = Jet1::variable(y(i), 2 * n, n + i);
    }
    const Jet1 f = metric.eval(std::span<const Jet1>(xj), std::span<const Jet1>(yj));
    if (!std::isfinite(f.v))
        throw Error(ErrorCode::EVAL_DOMAIN, "metric evaluation returned a non-finite value");

    PointJet out;
    out.x = x;
    out.y = y;
    out.f_value = f.v;
    out.h_vec = Vec(n);
    out.g_vec = Vec(n);
    for (int i = 0; i < n; ++i) {
        out.h_vec(i) = f.d[i];
        out.g_vec(i) = f.d[n + i];
        if (!std::isfinite(out.h_vec(i)) || !std::isfinite(out.g_vec(i)))
            throw Error(ErrorCode::EVAL_DOMAIN, "non-finite metric derivative");
    }

    if (want_hessian) {
        // nested jets in y only; x enters as constants
        std::vector<Jet2> xj2(n), yj2(n);
        for (int i = 0; i < n; ++i) {
            xj2[i] = Jet2(Jet1(x(i)));
            Jet2 v(Jet1::variable(y(i), n, i));
            v.d.assign(n, Jet1{});
            v.d[i] = Jet1(1.0);
            yj2[i] = std::move(v);
        }
        const Jet2 f2 = metric.eval(std::span<const Jet2>(xj2), std::span<const Jet2>(yj2));
        const Jet2 energy = f2 * f2 * 0.5;
        Mat h(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) h(i, j) = energy.d[i].d[j];
        out.hess = 0.5 * (h + h.transpose());
        if (!out.hess->allFinite())
            throw Error(ErrorCode::EVAL_DOMAIN, "non-finite energy Hessian");
    }
    return out;
}

double fd_crosscheck(const FinslerMetric& metric, const Vec& x, const Vec& y, double step) {
    check_inputs(metric, x, y);
    if (step <= 0.0) throw Error(ErrorCode::EVAL_DOMAIN, "step must be positive");
    const int n = metric.dim();
    const double h = step * (1.0 + y.norm());
    const PointJet jet = jet_at(metric, x, y);

    double worst = 0.0;
    auto consider = [&](double fd, double exact) {
        const double denom = 1.0 + std::max(std::abs(fd), std::abs(exact));
        worst = std::max(worst, std::abs(fd - exact) / denom);
    };
    for (int i = 0; i < n; ++i) {
        Vec xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        consider((eval_plain(metric, xp, y) - eval_plain(metric, xm, y)) / (2.0 * h),
                 jet.h_vec(i));
        Vec yp = y, ym = y;
        yp(i) += h;
        ym(i) -= h;
        consider((eval_plain(metric, x, yp) - eval_plain(metric, x, ym)) / (2.0 * h),
                 jet.g_vec(i));
    }
    return worst;
}

}  // namespace fceq
