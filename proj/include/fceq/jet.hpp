#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace fceq {

/// Forward-mode jet: a value together with its partial derivatives along a
/// fixed set of independent directions. Nesting (Jet<Jet<double>>) yields
/// second derivatives without separate chain-rule code.
///
/// An empty partials vector represents a constant (identically zero
/// gradient); binary operations broadcast it against any length.
template <typename T>
class Jet {
public:
    Jet() = default;
    explicit Jet(T value) : v(std::move(value)) {}
    Jet(T value, std::vector<T> partials) : v(std::move(value)), d(std::move(partials)) {}

    /// Independent variable: value `x`, unit derivative in slot `index` of `nvars`.
    static Jet variable(T x, std::size_t nvars, std::size_t index);

    T v{};
    std::vector<T> d;

    std::size_t nvars() const { return d.size(); }
};

namespace detail {

inline double one_like(double) { return 1.0; }

template <typename T>
Jet<T> one_like(const Jet<T>&) {
    return Jet<T>(one_like(T{}));
}

// plain value of a (possibly nested) jet
inline double scalar_of(double x) { return x; }

template <typename T>
double scalar_of(const Jet<T>& j) {
    return scalar_of(j.v);
}

}  // namespace detail

template <typename T>
Jet<T> Jet<T>::variable(T x, std::size_t nvars, std::size_t index) {
    assert(index < nvars);
    Jet<T> j(std::move(x));
    j.d.assign(nvars, T{});
    j.d[index] = detail::one_like(T{});
    return j;
}

template <typename T>
double scalar_value(const Jet<T>& j) {
    return detail::scalar_of(j.v);
}

inline double scalar_value(double x) { return x; }

namespace detail {

// Combines partials entry-wise; an empty side reads as zeros.
template <typename T, typename F>
std::vector<T> combine(const std::vector<T>& a, const std::vector<T>& b, F&& f) {
    assert(a.empty() || b.empty() || a.size() == b.size());
    const std::size_t len = a.size() > b.size() ? a.size() : b.size();
    std::vector<T> out(len);
    for (std::size_t i = 0; i < len; ++i)
        out[i] = f(i < a.size() ? a[i] : T{}, i < b.size() ? b[i] : T{});
    return out;
}

template <typename T, typename F>
std::vector<T> map(const std::vector<T>& a, F&& f) {
    std::vector<T> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
    return out;
}

}  // namespace detail

// ---- arithmetic -----------------------------------------------------------

template <typename T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
    return {a.v + b.v, detail::combine(a.d, b.d, [](const T& x, const T& y) { return x + y; })};
}

template <typename T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
    return {a.v - b.v, detail::combine(a.d, b.d, [](const T& x, const T& y) { return x - y; })};
}

template <typename T>
Jet<T> operator-(const Jet<T>& a) {
    return {-a.v, detail::map(a.d, [](const T& x) { return -x; })};
}

template <typename T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
    return {a.v * b.v,
            detail::combine(a.d, b.d, [&](const T& x, const T& y) { return x * b.v + y * a.v; })};
}

template <typename T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
    T inv_b = detail::one_like(b.v) / b.v;
    T q = a.v * inv_b;
    return {q, detail::combine(a.d, b.d,
                               [&](const T& x, const T& y) { return (x - y * q) * inv_b; })};
}

// double on either side (constants never allocate partials)

template <typename T>
Jet<T> operator+(const Jet<T>& a, double c) {
    Jet<T> out = a;
    out.v = out.v + c;
    return out;
}
template <typename T>
Jet<T> operator+(double c, const Jet<T>& a) {
    return a + c;
}
template <typename T>
Jet<T> operator-(const Jet<T>& a, double c) {
    return a + (-c);
}
template <typename T>
Jet<T> operator-(double c, const Jet<T>& a) {
    return -(a - c);
}
template <typename T>
Jet<T> operator*(const Jet<T>& a, double c) {
    return {a.v * c, detail::map(a.d, [&](const T& x) { return x * c; })};
}
template <typename T>
Jet<T> operator*(double c, const Jet<T>& a) {
    return a * c;
}
template <typename T>
Jet<T> operator/(const Jet<T>& a, double c) {
    return a * (1.0 / c);
}
template <typename T>
Jet<T> operator/(double c, const Jet<T>& a) {
    return Jet<T>(T(c)) / a;
}

template <typename T>
Jet<T>& operator+=(Jet<T>& a, const Jet<T>& b) {
    a = a + b;
    return a;
}
template <typename T>
Jet<T>& operator-=(Jet<T>& a, const Jet<T>& b) {
    a = a - b;
    return a;
}
template <typename T>
Jet<T>& operator*=(Jet<T>& a, const Jet<T>& b) {
    a = a * b;
    return a;
}

// ---- functions ------------------------------------------------------------

using std::atan2;
using std::cos;
using std::sin;
using std::sqrt;

template <typename T>
Jet<T> sqrt(const Jet<T>& a) {
    T s = sqrt(a.v);
    T half_inv = detail::one_like(s) / (s + s);
    return {s, detail::map(a.d, [&](const T& x) { return x * half_inv; })};
}

template <typename T>
Jet<T> sin(const Jet<T>& a) {
    T c = cos(a.v);
    return {sin(a.v), detail::map(a.d, [&](const T& x) { return x * c; })};
}

template <typename T>
Jet<T> cos(const Jet<T>& a) {
    T s = sin(a.v);
    return {cos(a.v), detail::map(a.d, [&](const T& x) { return -(x * s); })};
}

/// atan2(y, x) with the usual quadrant conventions; d = (x dy - y dx) / (x^2 + y^2).
template <typename T>
Jet<T> atan2(const Jet<T>& y, const Jet<T>& x) {
    T r2 = x.v * x.v + y.v * y.v;
    T inv = detail::one_like(r2) / r2;
    return {atan2(y.v, x.v), detail::combine(y.d, x.d, [&](const T& dy, const T& dx) {
                return (x.v * dy - y.v * dx) * inv;
            })};
}

using Jet1 = Jet<double>;
using Jet2 = Jet<Jet1>;

}  // namespace fceq
