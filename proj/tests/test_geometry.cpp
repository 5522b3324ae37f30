#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "carlemanlab/geometry.hpp"
#include "doctest.h"

using namespace carlemanlab;

namespace {

MetricSpec make_spec(Family fam, int n = 3, double mass = 1.0, double spin = 0.0,
                     double delta = 0.0) {
    MetricSpec spec;
    spec.family = fam;
    spec.n = n;
    spec.mass = mass;
    spec.spin = spin;
    spec.delta = delta;
    spec.eps = 1.0;
    return spec;
}

// The five catalog backgrounds at their default parameters.
std::vector<MetricSpec> catalog() {
    return {
        make_spec(Family::Minkowski),
        make_spec(Family::PerturbedMinkowski, 3, 0.0, 0.0, 1e-3),
        make_spec(Family::Schwarzschild),
        make_spec(Family::PositiveMass, 3, 1.0, 0.0, 1e-3),
        make_spec(Family::KerrNull, 3, 1.0, 0.5),
    };
}

std::vector<Point> probe_points(int n) {
    return {
        make_point(n, -5.2, 4.1, 1.1, 0.7, 0.3),
        make_point(n, -3.4, 6.0, 1.9, 2.3, 1.4),
        make_point(n, -6.1, 3.2, 0.6, 4.0, 2.2),
    };
}

double christoffel_rel_diff(const MetricSpec& spec, const Point& p, double step) {
    const MetricValue mv = eval_metric(spec, p);
    const Christoffels fd = christoffel_fd_oracle(spec, p, step);
    double num = 0.0, scale = 1.0;
    for (int a = 0; a < p.dim; ++a)
        for (int b = 0; b < p.dim; ++b)
            for (int c = 0; c < p.dim; ++c) {
                const double closed = mv.gamma[static_cast<std::size_t>(a)](b, c);
                num = std::max(num, std::fabs(closed - fd[static_cast<std::size_t>(a)](b, c)));
                scale = std::max(scale, std::fabs(closed));
            }
    return num / scale;
}

}  // namespace

TEST_CASE("flat metric: known Christoffels and unit-diagonal inverse product") {
    const MetricSpec spec = make_spec(Family::Minkowski);
    for (const Point& p : probe_points(3)) {
        const MetricValue mv = eval_metric(spec, p);
        // In the double-null chart g = -4 du dv + r^2 (dth^2 + sin^2 th dph^2)
        // with r = v - u, the only curvature-free structure is spherical:
        // Gamma^u_{th th} = r/2, Gamma^v_{th th} = -r/2, Gamma^th_{u th} = -1/r.
        const double r = p.x[1] - p.x[0];
        CHECK(mv.gamma[0](2, 2) == doctest::Approx(0.5 * r).epsilon(1e-12));
        CHECK(mv.gamma[1](2, 2) == doctest::Approx(-0.5 * r).epsilon(1e-12));
        CHECK(mv.gamma[2](0, 2) == doctest::Approx(-1.0 / r).epsilon(1e-12));
        CHECK(std::fabs(mv.gamma[0](0, 0)) < 1e-14);
        CHECK(std::fabs(mv.gamma[0](0, 1)) < 1e-14);
        CHECK(std::fabs(mv.gamma[1](1, 1)) < 1e-14);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                double s = 0.0;
                for (int c = 0; c < 4; ++c) s += mv.g(a, c) * mv.ginv(c, b);
                CHECK(std::fabs(s - (a == b ? 1.0 : 0.0)) < 1e-12);
            }
        CHECK(mv.det < 0.0);
    }
}

TEST_CASE("closed-form Christoffels agree with the finite-difference oracle on the catalog") {
    for (const MetricSpec& spec : catalog()) {
        CAPTURE(spec.name());
        for (const Point& p : probe_points(spec.n))
            CHECK(christoffel_rel_diff(spec, p, kDefaultFdStep) < 1e-6);
    }
}

TEST_CASE("oracle equivalence holds in spatial dimensions 2 and 4") {
    for (int n : {2, 4}) {
        for (Family fam : {Family::Minkowski, Family::PerturbedMinkowski}) {
            const MetricSpec spec = make_spec(fam, n, 0.0, 0.0, fam == Family::Minkowski ? 0.0 : 1e-3);
            CAPTURE(spec.name());
            CAPTURE(n);
            for (const Point& p : probe_points(n))
                CHECK(christoffel_rel_diff(spec, p, kDefaultFdStep) < 1e-6);
        }
    }
}

TEST_CASE("a coarse finite-difference step degrades the oracle near the horizon") {
    // Close to r = 2m the tortoise log term is stiff and the 1e-2 stencil's
    // truncation error dominates; the default step still resolves it.
    // The tortoise chart smooths the horizon with length scale 2m, so a small
    // mass makes that scale comparable to the 1e-2 stencil.
    const MetricSpec spec = make_spec(Family::Schwarzschild, 3, 0.01);
    const double rstar = tortoise_of_r(0.04, spec.mass, spec.rbase);
    const Point p = make_point(3, -0.5 * rstar, 0.5 * rstar, 1.1, 0.7);
    const double coarse = christoffel_rel_diff(spec, p, 1e-2);
    const double fine = christoffel_rel_diff(spec, p, kDefaultFdStep);
    CHECK(coarse > 1e-6);
    CHECK(fine < 1e-8);
}

TEST_CASE("covariant Hessian matches hand values for a quadratic on the flat background") {
    const MetricSpec spec = make_spec(Family::Minkowski);
    // phi = u^2 + 3 u v: coordinate second partials are the full answer since
    // the Christoffels vanish.
    const ScalarField phi = ScalarField::from(4, [](const auto& x) { return x[0] * x[0] + 3.0 * x[0] * x[1]; });
    const Point p = probe_points(3)[1];
    const MatN<double> H = hessian_scalar(spec, phi, p);
    CHECK(H(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(H(0, 1) == doctest::Approx(3.0).epsilon(1e-12));
    // (2,2) picks up -Gamma^u_{th th} d_u phi - Gamma^v_{th th} d_v phi with
    // Gamma^{u,v}_{th th} = +-r/2.
    const double u = p.x[0], v = p.x[1], r = v - u;
    const double expected = -0.5 * r * (2.0 * u + 3.0 * v) + 0.5 * r * (3.0 * u);
    CHECK(H(2, 2) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("static inverse-radius field is wave-free on the flat background") {
    const MetricSpec spec = make_spec(Family::Minkowski);
    // phi = 1/r with r = v - u is harmonic and static away from r = 0.
    const ScalarField phi = ScalarField::from(4, [](const auto& x) {
        return decltype(x[0])(1.0) / (x[1] - x[0]);
    });
    for (const Point& p : probe_points(3)) CHECK(std::fabs(box_scalar(spec, phi, p)) < 1e-12);
}

TEST_CASE("vacuum backgrounds have vanishing scalar curvature (both routes)") {
    for (Family fam : {Family::Minkowski, Family::Schwarzschild}) {
        const MetricSpec spec = make_spec(fam);
        for (const Point& p : probe_points(3)) {
            CHECK(std::fabs(scalar_curvature_closed(spec, p)) < 1e-8);
            CHECK(std::fabs(scalar_curvature(spec, p)) < 1e-6);
        }
    }
}

TEST_CASE("scalar curvature routes agree on every catalog background") {
    for (const MetricSpec& spec : catalog()) {
        CAPTURE(spec.name());
        const Point p = probe_points(spec.n)[0];
        const double closed = scalar_curvature_closed(spec, p);
        const double fd = scalar_curvature(spec, p);
        CHECK(std::fabs(closed - fd) < 1e-6 * std::max(1.0, std::fabs(closed)));
    }
}

TEST_CASE("metric compatibility residual is negligible across the catalog") {
    for (const MetricSpec& spec : catalog()) {
        CAPTURE(spec.name());
        for (const Point& p : probe_points(spec.n))
            CHECK(metric_compatibility_residual(spec, p) < 1e-8);
    }
}
