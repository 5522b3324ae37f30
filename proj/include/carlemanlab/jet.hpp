// Forward-mode automatic differentiation carrying value, gradient and Hessian
// with respect to up to kMaxDim independent coordinates.
//
// Jet2 is the "closed-form" derivative route of the toolkit: metric component
// suppliers and scalar fields are templated on the scalar type, and evaluating
// them on Jet2 seeds yields machine-precision first and second partials with
// no finite-difference truncation.  The finite-difference oracle lives in
// geometry.hpp and is kept entirely independent of this type.

#pragma once

#include <cmath>
#include <stdexcept>

#include "carlemanlab/linalg.hpp"

namespace carlemanlab {

struct Jet2 {
    int d = 0;                                      // number of independents
    double v = 0.0;                                 // value
    std::array<double, kMaxDim> g{};                // gradient
    std::array<double, kMaxDim * kMaxDim> h{};      // Hessian (symmetric, full)

    Jet2() = default;
    // NOLINTNEXTLINE(google-explicit-constructor): constants must convert.
    Jet2(double c) : d(0), v(c) {}
    Jet2(int dim, double c) : d(dim), v(c) {}

    double& hess(int i, int j) { return h[static_cast<std::size_t>(i * kMaxDim + j)]; }
    double hess(int i, int j) const { return h[static_cast<std::size_t>(i * kMaxDim + j)]; }

    static Jet2 variable(int dim, int index, double value) {
        Jet2 j(dim, value);
        j.g[static_cast<std::size_t>(index)] = 1.0;
        return j;
    }
};

inline double value_of(const Jet2& x) { return x.v; }

inline int joint_dim(const Jet2& a, const Jet2& b) {
    return a.d > b.d ? a.d : b.d;
}

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    Jet2 r(joint_dim(a, b), a.v + b.v);
    for (int i = 0; i < r.d; ++i) r.g[i] = a.g[i] + b.g[i];
    for (int i = 0; i < r.d; ++i)
        for (int j = 0; j < r.d; ++j) r.hess(i, j) = a.hess(i, j) + b.hess(i, j);
    return r;
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
    Jet2 r(joint_dim(a, b), a.v - b.v);
    for (int i = 0; i < r.d; ++i) r.g[i] = a.g[i] - b.g[i];
    for (int i = 0; i < r.d; ++i)
        for (int j = 0; j < r.d; ++j) r.hess(i, j) = a.hess(i, j) - b.hess(i, j);
    return r;
}

inline Jet2 operator-(const Jet2& a) {
    Jet2 r(a.d, -a.v);
    for (int i = 0; i < r.d; ++i) r.g[i] = -a.g[i];
    for (int i = 0; i < r.d; ++i)
        for (int j = 0; j < r.d; ++j) r.hess(i, j) = -a.hess(i, j);
    return r;
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r(joint_dim(a, b), a.v * b.v);
    for (int i = 0; i < r.d; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (int i = 0; i < r.d; ++i)
        for (int j = 0; j < r.d; ++j)
            r.hess(i, j) = a.hess(i, j) * b.v + a.g[i] * b.g[j] + a.g[j] * b.g[i] +
                           a.v * b.hess(i, j);
    return r;
}

// Composition with a univariate function given value and first two derivatives
// at the inner value.  All elementary functions funnel through here, as does
// the tortoise-inversion custom node in the metric catalog.
inline Jet2 chain(const Jet2& x, double f, double f1, double f2) {
    Jet2 r(x.d, f);
    for (int i = 0; i < r.d; ++i) r.g[i] = f1 * x.g[i];
    for (int i = 0; i < r.d; ++i)
        for (int j = 0; j < r.d; ++j)
            r.hess(i, j) = f1 * x.hess(i, j) + f2 * x.g[i] * x.g[j];
    return r;
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
    if (b.v == 0.0) throw std::runtime_error("jet: division by zero value");
    const double inv = 1.0 / b.v;
    return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet2 sqrt(const Jet2& x) {
    const double s = std::sqrt(x.v);
    return chain(x, s, 0.5 / s, -0.25 / (s * x.v));
}
inline Jet2 exp(const Jet2& x) {
    const double e = std::exp(x.v);
    return chain(x, e, e, e);
}
inline Jet2 log(const Jet2& x) {
    return chain(x, std::log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v));
}
inline Jet2 sin(const Jet2& x) { return chain(x, std::sin(x.v), std::cos(x.v), -std::sin(x.v)); }
inline Jet2 cos(const Jet2& x) { return chain(x, std::cos(x.v), -std::sin(x.v), -std::cos(x.v)); }
inline Jet2 pow(const Jet2& x, double p) {
    const double f = std::pow(x.v, p);
    return chain(x, f, p * f / x.v, p * (p - 1.0) * f / (x.v * x.v));
}
inline Jet2 fabs(const Jet2& x) { return x.v < 0.0 ? -x : x; }

inline bool operator<(const Jet2& a, const Jet2& b) { return a.v < b.v; }
inline bool operator>(const Jet2& a, const Jet2& b) { return a.v > b.v; }

}  // namespace carlemanlab
