// Metric catalog in double-null coordinates.
//
// Coordinates are x = (u, v, y^1 .. y^{n-1}) with r = v - u (zero mass) or
// r* = v - u (tortoise difference, positive mass); y are round-sphere chart
// coordinates.  Component suppliers are templated on the scalar type so that
// evaluating them on Jet2 seeds yields exact first/second partials ("closed
// form" route); the finite-difference oracle never touches the jet type.
//
// Catalog:
//   Minkowski           g = -4 du dv + r^2 ring-gamma
//   PerturbedMinkowski  double-null form with decay-class perturbations of
//                       size delta (K-1 ~ r^-2, gamma-ring ~ r^-1, c ~ r^-1,
//                       mu,nu ~ r^-3)
//   Schwarzschild       g = -4(1 - 2m/r) du dv + r^2 ring-gamma, r(v-u) by
//                       tortoise inversion
//   PositiveMass        Schwarzschild with an in-class angular perturbation
//   KerrNull            Kerr pulled back to reference double-null coordinates
//                       (u0, v0, theta0, phi0) through the comoving chart
//
// Chart decorations implement the conformal pictures:
//   Physical            the metric as listed above
//   Sharp               g-sharp = K^-1 g, same coordinates
//   InvertedZeroMass    g-bar = f^2 g in (U,V,y), U = -1/(-u+eps), V = 1/(v+eps)
//   InvertedPositiveMass g-bar = K^-1 f^2 g in (U,V,y), U = 1/u, V = 1/v
//   PenroseScaled       Omega^2 g with Omega = ((1+u^2)(1+v^2))^-1/2, same chart

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "carlemanlab/jet.hpp"
#include "carlemanlab/linalg.hpp"

namespace carlemanlab {

struct Point {
    int dim = 0;  // spacetime dimension n+1
    std::array<double, kMaxDim> x{};

    Point() = default;
    Point(int d, std::array<double, kMaxDim> coords) : dim(d), x(coords) {}
};

// Assemble a Point for spatial dimension n (dim = n+1).
inline Point make_point(int n, double u, double v, double y1 = 0.0, double y2 = 0.0,
                        double y3 = 0.0) {
    Point p;
    p.dim = n + 1;
    p.x = {u, v, y1, y2, y3};
    return p;
}

enum class Family { Minkowski, PerturbedMinkowski, Schwarzschild, PositiveMass, KerrNull };
enum class Chart {
    Physical,
    Sharp,                  // K^-1 g, same coordinates
    InvertedZeroMass,       // f^2 g in (U, V, y)
    InvertedPositiveMass,   // K^-1 f^2 g in (U, V, y)
    PenroseScaled,          // Omega^2 g, Omega = ((1+u^2)(1+v^2))^-1/2
    CarlemanScaled,         // f^2 g (zero mass) or K^-1 f^2 g (mass), same coords
};

struct MetricSpec {
    Family family = Family::Minkowski;
    int n = 3;            // spatial dimension; spacetime dim is n+1
    double mass = 0.0;    // m (Schwarzschild / PositiveMass / Kerr)
    double spin = 0.0;    // a (Kerr)
    double delta = 0.0;   // perturbation amplitude
    double rbase = 4.0;   // tortoise base radius r0 (r*(rbase) = 0)
    Chart chart = Chart::Physical;
    double eps = 0.0;     // foliation eps for the zero-mass inversion

    std::string name() const;
};

inline std::string MetricSpec::name() const {
    std::string s;
    switch (family) {
        case Family::Minkowski: s = "minkowski"; break;
        case Family::PerturbedMinkowski: s = "perturbed-minkowski"; break;
        case Family::Schwarzschild: s = "schwarzschild"; break;
        case Family::PositiveMass: s = "positive-mass"; break;
        case Family::KerrNull: s = "kerr-null"; break;
    }
    switch (chart) {
        case Chart::Physical: break;
        case Chart::Sharp: s += "/sharp"; break;
        case Chart::InvertedZeroMass: s += "/inverted-zero-mass"; break;
        case Chart::InvertedPositiveMass: s += "/inverted-positive-mass"; break;
        case Chart::PenroseScaled: s += "/penrose-scaled"; break;
        case Chart::CarlemanScaled: s += "/carleman-scaled"; break;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Tortoise coordinate r*(r) = integral_{rbase}^{r} (1 - 2m/s)^-1 ds
//                          = r - rbase + 2m log((r - 2m)/(rbase - 2m)),
// and its inverse r(r*) by Newton iteration.  The jet overload injects the
// analytic derivatives dr/dr* = 1 - 2m/r into the AD graph.
// ---------------------------------------------------------------------------

inline double tortoise_of_r(double r, double m, double rbase) {
    return r - rbase + 2.0 * m * std::log((r - 2.0 * m) / (rbase - 2.0 * m));
}

inline double tortoise_radius(double rstar, double m, double rbase) {
    if (m == 0.0) return rstar + rbase;
    // Initial guess: r ~ rstar for large rstar, r ~ 2m + small for very
    // negative rstar; Newton converges monotonically from either side here.
    double r = rstar > rbase ? rstar : rbase;
    if (rstar < 0.0) r = rbase;
    for (int it = 0; it < 200; ++it) {
        const double k = 1.0 - 2.0 * m / r;
        const double step = (tortoise_of_r(r, m, rbase) - rstar) * k;
        double rn = r - step;
        if (rn <= 2.0 * m) rn = 0.5 * (r + 2.0 * m);  // keep inside the domain
        if (std::fabs(rn - r) <= 1e-15 * (1.0 + std::fabs(rn))) {
            r = rn;
            break;
        }
        r = rn;
    }
    return r;
}

inline Jet2 tortoise_radius(const Jet2& rstar, double m, double rbase) {
    const double r = tortoise_radius(rstar.v, m, rbase);
    const double k = 1.0 - 2.0 * m / r;
    // d2r/drstar2 = d/dr (1 - 2m/r) * dr/drstar
    return chain(rstar, r, k, (2.0 * m / (r * r)) * k);
}

// ---------------------------------------------------------------------------
// Round sphere ring-gamma in the standard chart, dimension n-1 (1 <= n-1 <= 3).
//   n=2: dtheta^2           n=3: dtheta^2 + sin^2 theta dphi^2
//   n=4: dchi^2 + sin^2 chi (dtheta^2 + sin^2 theta dphi^2)
// ---------------------------------------------------------------------------
template <class T>
void round_sphere(int n, const std::array<T, 3>& y, MatN<T>& gamma) {
    using std::sin;
    gamma = MatN<T>(n - 1);
    gamma(0, 0) = T(1);
    if (n >= 3) gamma(1, 1) = sin(y[0]) * sin(y[0]);
    if (n >= 4) gamma(2, 2) = sin(y[0]) * sin(y[0]) * sin(y[1]) * sin(y[1]);
}

namespace detail {

using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

// Physical-chart components for the non-Kerr families.
template <class T>
MatN<T> base_components(const MetricSpec& spec, const std::array<T, kMaxDim>& x) {
    const int n = spec.n;
    const int dim = n + 1;
    const T u = x[0];
    const T v = x[1];
    std::array<T, 3> y = {T(0), T(0), T(0)};
    for (int a = 0; a < n - 1; ++a) y[static_cast<std::size_t>(a)] = x[static_cast<std::size_t>(2 + a)];

    MatN<T> g(dim);
    MatN<T> gam;
    round_sphere(n, y, gam);

    switch (spec.family) {
        case Family::Minkowski: {
            const T r = v - u;
            g(0, 1) = g(1, 0) = T(-2);
            for (int a = 0; a < n - 1; ++a)
                for (int b = 0; b < n - 1; ++b) g(2 + a, 2 + b) = r * r * gam(a, b);
            break;
        }
        case Family::PerturbedMinkowski: {
            const T r = v - u;
            const T s = sin(u + v);
            const T c = cos(u + v);
            const double d = spec.delta;
            const T K = T(1) + d * s / (r * r);
            const T mu = d * s / (r * r * r);
            const T nu = d * c / (r * r * r);
            const T gpert = T(1) + d * c * cos(y[0]) / r;
            const T cA = d * sin(y[0]) * s / r;
            g(0, 0) = mu;
            g(1, 1) = nu;
            g(0, 1) = g(1, 0) = T(-2) * K;
            g(0, 2) = g(2, 0) = cA;
            g(1, 2) = g(2, 1) = cA;
            for (int a = 0; a < n - 1; ++a)
                for (int b = 0; b < n - 1; ++b) g(2 + a, 2 + b) = r * r * gpert * gam(a, b);
            break;
        }
        case Family::Schwarzschild:
        case Family::PositiveMass: {
            const T rstar = v - u;
            const T r = tortoise_radius(rstar, spec.mass, spec.rbase);
            const T K = T(1) - 2.0 * spec.mass / r;
            g(0, 1) = g(1, 0) = T(-2) * K;
            T gpert = T(1);
            if (spec.family == Family::PositiveMass)
                gpert = T(1) + spec.delta * cos(y[0]) / r;
            for (int a = 0; a < n - 1; ++a)
                for (int b = 0; b < n - 1; ++b) g(2 + a, 2 + b) = r * r * gpert * gam(a, b);
            break;
        }
        case Family::KerrNull:
            throw std::logic_error("KerrNull handled separately");
    }
    return g;
}

// Kerr in reference double-null coordinates (u0, v0, theta0, phi0).
//
// Pipeline: (u0,v0) -> (t0, r0) by the mass-m tortoise; (r0, theta0) ->
// comoving (r, theta) by the closed-form oblate relations r0^2 = r^2 +
// a^2 sin^2 theta, r0 cos theta0 = r cos theta; then pull the
// Boyer-Lindquist components back through the chain of Jacobians.
template <class T>
MatN<T> kerr_null_components(const MetricSpec& spec, const std::array<T, kMaxDim>& x) {
    const double m = spec.mass;
    const double a = spec.spin;
    const T u0 = x[0];
    const T v0 = x[1];
    const T th0 = x[2];

    const T r0star = v0 - u0;
    const T r0 = tortoise_radius(r0star, m, spec.rbase);
    const T K0 = T(1) - 2.0 * m / r0;

    // Comoving (r, theta) from (r0, theta0): quartic closed form.
    const T c = r0 * cos(th0);                 // = r cos(theta)
    const T b = r0 * r0 - a * a;
    const T r2 = 0.5 * (b + sqrt(b * b + 4.0 * a * a * c * c));
    const T r = sqrt(r2);
    const T costh = c / r;
    const T sinth2 = T(1) - costh * costh;
    const T sinth = sqrt(sinth2);
    const T rho2 = r2 + a * a * costh * costh;
    const T Dr = r2 + a * a - 2.0 * m * r;

    // Boyer-Lindquist components in (t, r, theta, phi).
    MatN<T> gbl(4);
    gbl(0, 0) = -(T(1) - 2.0 * m * r / rho2);
    gbl(0, 3) = gbl(3, 0) = -(2.0 * m * a * r * sinth2) / rho2;
    gbl(1, 1) = rho2 / Dr;
    gbl(2, 2) = rho2;
    gbl(3, 3) = (r2 + a * a + 2.0 * m * a * a * r * sinth2 / rho2) * sinth2;

    // d(r, theta)/d(r0, theta0) from the implicit relations
    //   r0^2 = r^2 + a^2 sin^2 theta,    r0 cos theta0 = r cos theta:
    //   [ r        a^2 sin th cos th ] [dr    ]   [ r0 dr0                          ]
    //   [ cos th  -r sin th          ] [dtheta] = [ cos th0 dr0 - r0 sin th0 dth0   ]
    const T a11 = r;
    const T a12 = a * a * sinth * costh;
    const T a21 = costh;
    const T a22 = -r * sinth;
    const T det = a11 * a22 - a12 * a21;
    const T rhs1_r0 = r0;
    const T rhs2_r0 = cos(th0);
    const T rhs2_th0 = -r0 * sin(th0);
    const T dr_dr0 = (rhs1_r0 * a22 - a12 * rhs2_r0) / det;
    const T dth_dr0 = (a11 * rhs2_r0 - rhs1_r0 * a21) / det;
    const T dr_dth0 = (-a12 * rhs2_th0) / det;
    const T dth_dth0 = (a11 * rhs2_th0) / det;

    // Pull back to (t0, r0, theta0, phi0):  t = t0, phi = phi0.
    // J[mu][I] = d x_bl^mu / d x_ref^I with index order (t0, r0, th0, ph0).
    T J[4][4];
    for (auto& row : J)
        for (auto& e : row) e = T(0);
    J[0][0] = T(1);
    J[1][1] = dr_dr0;
    J[1][2] = dr_dth0;
    J[2][1] = dth_dr0;
    J[2][2] = dth_dth0;
    J[3][3] = T(1);

    MatN<T> gref(4);
    for (int I = 0; I < 4; ++I)
        for (int Jc = I; Jc < 4; ++Jc) {
            T s = T(0);
            for (int mu = 0; mu < 4; ++mu)
                for (int nu = 0; nu < 4; ++nu) s = s + gbl(mu, nu) * J[mu][I] * J[nu][Jc];
            gref(I, Jc) = s;
            if (Jc != I) gref(Jc, I) = s;
        }

    // Reference (t0, r0) -> null (u0, v0): t0 = u0 + v0, dr0 = K0 (dv0 - du0).
    MatN<T> g(4);
    const T A[2][2] = {{T(1), T(1)}, {-K0, K0}};  // d(t0,r0)/d(u0,v0)
    for (int I = 0; I < 2; ++I)
        for (int Jc = 0; Jc < 2; ++Jc) {
            T s = T(0);
            for (int mu = 0; mu < 2; ++mu)
                for (int nu = 0; nu < 2; ++nu) s = s + gref(mu, nu) * A[mu][I] * A[nu][Jc];
            g(I, Jc) = s;
        }
    for (int I = 0; I < 2; ++I)
        for (int B = 2; B < 4; ++B) {
            T s = T(0);
            for (int mu = 0; mu < 2; ++mu) s = s + gref(mu, B) * A[mu][I];
            g(I, B) = s;
            g(B, I) = s;
        }
    for (int B = 2; B < 4; ++B)
        for (int C = 2; C < 4; ++C) g(B, C) = gref(B, C);
    return g;
}

template <class T>
MatN<T> physical_components(const MetricSpec& spec, const std::array<T, kMaxDim>& x) {
    if (spec.family == Family::KerrNull) return kerr_null_components(spec, x);
    return base_components(spec, x);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Chart decorations (conformal pictures).
// ---------------------------------------------------------------------------

// Metric components of `spec` at coordinates x of its own chart.
template <class T>
MatN<T> metric_components(const MetricSpec& spec, const std::array<T, kMaxDim>& x) {
    using std::sqrt;
    const int dim = spec.n + 1;

    if (spec.chart == Chart::Physical) return detail::physical_components(spec, x);

    MetricSpec phys = spec;
    phys.chart = Chart::Physical;

    if (spec.chart == Chart::Sharp || spec.chart == Chart::PenroseScaled ||
        spec.chart == Chart::CarlemanScaled) {
        std::array<T, kMaxDim> xp = x;
        MatN<T> g = detail::physical_components(phys, xp);
        T omega2;
        if (spec.chart == Chart::Sharp) {
            omega2 = T(-2) / g(0, 1);  // K^-1 with K = -g_uv / 2
        } else if (spec.chart == Chart::PenroseScaled) {
            const T u = x[0];
            const T v = x[1];
            omega2 = T(1) / ((T(1) + u * u) * (T(1) + v * v));
        } else {
            // f^2 (zero-mass families) or K^-1 f^2 (mass families), with
            // f = 1/((-u+eps)(v+eps)) resp. 1/((-u) v).
            const T u = x[0];
            const T v = x[1];
            const bool has_mass =
                spec.family == Family::Schwarzschild || spec.family == Family::PositiveMass;
            const double eps = has_mass ? 0.0 : spec.eps;
            const T f = T(1) / ((-u + eps) * (v + eps));
            omega2 = f * f;
            if (has_mass) omega2 = omega2 * (T(-2) / g(0, 1));
        }
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) g(i, j) = omega2 * g(i, j);
        return g;
    }

    // Inversions: coordinates of `x` are (U, V, y); map back to the physical
    // chart, evaluate K^-1 f^2 g there, and pull back through the diagonal
    // coordinate change.
    T u, v, dudU, dvdV, f;
    const T U = x[0];
    const T V = x[1];
    if (spec.chart == Chart::InvertedZeroMass) {
        // U = -1/(-u+eps), V = 1/(v+eps);  f = -UV
        u = spec.eps + T(1) / U;
        v = T(1) / V - spec.eps;
        dudU = T(-1) / (U * U);
        dvdV = T(-1) / (V * V);
        f = -U * V;
    } else {  // InvertedPositiveMass: U = 1/u, V = 1/v;  f = -UV
        u = T(1) / U;
        v = T(1) / V;
        dudU = T(-1) / (U * U);
        dvdV = T(-1) / (V * V);
        f = -U * V;
    }

    std::array<T, kMaxDim> xp = x;
    xp[0] = u;
    xp[1] = v;
    MatN<T> g = detail::physical_components(phys, xp);

    T kinv = T(1);
    if (spec.chart == Chart::InvertedPositiveMass) kinv = T(-2) / g(0, 1);
    const T w = kinv * f * f;

    MatN<T> gb(dim);
    gb(0, 0) = w * g(0, 0) * dudU * dudU;
    gb(1, 1) = w * g(1, 1) * dvdV * dvdV;
    gb(0, 1) = gb(1, 0) = w * g(0, 1) * dudU * dvdV;
    for (int A = 2; A < dim; ++A) {
        gb(0, A) = gb(A, 0) = w * g(0, A) * dudU;
        gb(1, A) = gb(A, 1) = w * g(1, A) * dvdV;
        for (int B = 2; B < dim; ++B) gb(A, B) = w * g(A, B);
    }
    return gb;
}

inline MatN<double> metric_components(const MetricSpec& spec, const Point& p) {
    return metric_components<double>(spec, p.x);
}

// Closed-form metric value + first/second partials at p, via Jet2 seeds.
inline MatN<Jet2> metric_components_jet(const MetricSpec& spec, const Point& p) {
    std::array<Jet2, kMaxDim> x;
    for (int i = 0; i < p.dim; ++i) x[static_cast<std::size_t>(i)] = Jet2::variable(p.dim, i, p.x[static_cast<std::size_t>(i)]);
    return metric_components<Jet2>(spec, x);
}

// Domain guard shared by the CLI and the sweep kernels: r (or r*) positive and
// sphere chart away from the poles by the margin used throughout (0.1 rad).
bool point_in_domain(const MetricSpec& spec, const Point& p, std::string* why = nullptr);

}  // namespace carlemanlab
