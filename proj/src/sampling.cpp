#include "fceq/sampling.hpp"

#include <cmath>

namespace fceq {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

namespace {

// Root of x^(d+1) = x + 1 (the "generalized golden ratio" of the R_d sequence).
double harmonious(int d) {
    double x = 2.0;
    for (int it = 0; it < 64; ++it)
        x = std::pow(1.0 + x, 1.0 / (d + 1));
    return x;
}

double frac(double x) { return x - std::floor(x); }

}  // namespace

std::vector<Vec> quasi_sphere_points(int dim, int count, std::uint64_t seed) {
    const int pairs = (dim + 1) / 2;
    const int d = 2 * pairs;
    const double phi = harmonious(d);
    std::vector<double> alpha(d), shift(d);
    std::uint64_t state = seed ^ 0xa02bdbf7bb3c0a7ULL;
    double a = 1.0;
    for (int k = 0; k < d; ++k) {
        a /= phi;
        alpha[k] = a;
        shift[k] = uniform01(state);
    }

    std::vector<Vec> out;
    out.reserve(count);
    for (int s = 0; s < count; ++s) {
        Vec z(dim);
        for (int t = 0; t < pairs; ++t) {
            double u1 = frac(shift[2 * t] + alpha[2 * t] * (s + 1));
            double u2 = frac(shift[2 * t + 1] + alpha[2 * t + 1] * (s + 1));
            u1 = std::max(u1, 1e-300);
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double c0 = r * std::cos(2.0 * M_PI * u2);
            const double c1 = r * std::sin(2.0 * M_PI * u2);
            z(2 * t) = c0;
            if (2 * t + 1 < dim) z(2 * t + 1) = c1;
        }
        const double nrm = z.norm();
        if (nrm < 1e-12) {
            z.setZero();
            z(0) = 1.0;
        } else {
            z /= nrm;
        }
        out.push_back(std::move(z));
    }
    return out;
}

std::vector<Vec> sample_directions(int dim, int count, std::uint64_t seed) {
    std::vector<Vec> out;
    out.reserve(2 * dim + count);
    for (int i = 0; i < dim; ++i) {
        Vec e = Vec::Zero(dim);
        e(i) = 1.0;
        out.push_back(e);
        e(i) = -1.0;
        out.push_back(std::move(e));
    }
    auto quasi = quasi_sphere_points(dim, count, seed);
    out.insert(out.end(), std::make_move_iterator(quasi.begin()),
               std::make_move_iterator(quasi.end()));
    return out;
}

}  // namespace fceq
