#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "carlemanlab/conformal.hpp"
#include "doctest.h"

using namespace carlemanlab;

namespace {

MetricSpec base_spec(Family fam, double mass = 0.0) {
    MetricSpec spec;
    spec.family = fam;
    spec.n = 3;
    spec.mass = mass;
    spec.eps = 1.0;
    return spec;
}

// Smooth bump with closed-form jets, centered at c with widths wdt.
ScalarField gaussian_bump(int dim, const std::array<double, kMaxDim>& c,
                          const std::array<double, kMaxDim>& wdt) {
    return ScalarField::from(dim, [dim, c, wdt](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        T arg(0.0);
        for (int i = 0; i < dim; ++i) {
            const T d = (x[static_cast<std::size_t>(i)] - c[static_cast<std::size_t>(i)]) /
                        wdt[static_cast<std::size_t>(i)];
            arg = arg + d * d;
        }
        return exp(-arg);
    });
}

ScalarField random_bump(std::mt19937_64& rng, const Point& near) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::array<double, kMaxDim> c{}, w{};
    for (int i = 0; i < near.dim; ++i) {
        c[static_cast<std::size_t>(i)] = near.x[static_cast<std::size_t>(i)] + 0.4 * (unit(rng) - 0.5);
        w[static_cast<std::size_t>(i)] = 0.5 + unit(rng);
    }
    return gaussian_bump(near.dim, c, w);
}

}  // namespace

TEST_CASE("inversion coordinate maps are mutually inverse") {
    for (FoliationMode mode : {FoliationMode::ZeroMass, FoliationMode::PositiveMass}) {
        const double eps = mode == FoliationMode::ZeroMass ? 1.0 : 0.0;
        double U = 0.0, V = 0.0, u = 0.0, v = 0.0;
        uv_inversion(mode, eps, -4.2, 3.7, &U, &V);
        uv_inversion_back(mode, eps, U, V, &u, &v);
        CHECK(u == doctest::Approx(-4.2).epsilon(1e-14));
        CHECK(v == doctest::Approx(3.7).epsilon(1e-14));
        CHECK(U < 0.0);
        CHECK(V > 0.0);
    }
}

TEST_CASE("inverted foliation value agrees with the mapped physical value") {
    const MetricSpec phys = base_spec(Family::Minkowski);
    const ConformalMap map = invert_metric(phys, FoliationMode::ZeroMass, 1.0);
    const Point p = make_point(3, -4.2, 3.7, 1.1, 0.7);
    const Point q = map_to_target(map, p);
    CHECK(-q.x[0] * q.x[1] == doctest::Approx(1.0 / (5.2 * 4.7)).epsilon(1e-12));
    const Point back = map_to_source(map, q);
    CHECK(back.x[0] == doctest::Approx(p.x[0]).epsilon(1e-12));
    CHECK(back.x[1] == doctest::Approx(p.x[1]).epsilon(1e-12));
}

TEST_CASE("Hessian transformation law holds on both same-chart scalings") {
    std::mt19937_64 rng(11);
    const Point p = make_point(3, -4.0, 3.2, 1.2, 0.8);
    for (FoliationMode mode : {FoliationMode::ZeroMass, FoliationMode::PositiveMass}) {
        const MetricSpec base =
            base_spec(mode == FoliationMode::ZeroMass ? Family::Minkowski : Family::Schwarzschild,
                      mode == FoliationMode::ZeroMass ? 0.0 : 1.0);
        const MetricSpec target = carleman_scaled(base, mode, 1.0);
        for (int k = 0; k < 5; ++k) {
            const ScalarField phi = random_bump(rng, p);
            CHECK(hessian_transform_residual(base, target, phi, p) < 1e-10);
        }
    }
}

TEST_CASE("conformally covariant operator transports across both scalings") {
    std::mt19937_64 rng(12);
    const Point p = make_point(3, -4.0, 3.2, 1.2, 0.8);
    for (FoliationMode mode : {FoliationMode::ZeroMass, FoliationMode::PositiveMass}) {
        const MetricSpec base =
            base_spec(mode == FoliationMode::ZeroMass ? Family::Minkowski : Family::Schwarzschild,
                      mode == FoliationMode::ZeroMass ? 0.0 : 1.0);
        const MetricSpec target = carleman_scaled(base, mode, 1.0);
        for (int k = 0; k < 5; ++k) {
            const ScalarField phi = random_bump(rng, p);
            CHECK(conformal_laplacian_transport_residual(base, target, phi, p, 1e-3) < 1e-5);
        }
    }
}

TEST_CASE("curvature scaling identity cross-checks the finite-difference curvature") {
    const Point p = make_point(3, -4.0, 3.2, 1.2, 0.8);
    for (FoliationMode mode : {FoliationMode::ZeroMass, FoliationMode::PositiveMass}) {
        const MetricSpec base =
            base_spec(mode == FoliationMode::ZeroMass ? Family::Minkowski : Family::Schwarzschild,
                      mode == FoliationMode::ZeroMass ? 0.0 : 1.0);
        const MetricSpec target = carleman_scaled(base, mode, 1.0);
        CHECK(yamabe_residual(base, target, p, 1e-3) < 1e-5);
    }
}

TEST_CASE("lower-order coefficients transport consistently with the operator") {
    std::mt19937_64 rng(13);
    const Point p = make_point(3, -4.0, 3.2, 1.2, 0.8);
    const MetricSpec base = base_spec(Family::Minkowski);
    const MetricSpec target = carleman_scaled(base, FoliationMode::ZeroMass, 1.0);

    OperatorCoefficients coeffs;
    coeffs.dim = 4;
    for (int i = 0; i < 4; ++i) coeffs.a[static_cast<std::size_t>(i)] = random_bump(rng, p);
    coeffs.V = random_bump(rng, p);

    for (int k = 0; k < 3; ++k) {
        const ScalarField phi = random_bump(rng, p);
        CHECK(operator_transport_residual(base, target, coeffs, phi, p, 1e-3) < 1e-5);
    }
}

TEST_CASE("tortoise gap grows like 2m log r with the exact mass coefficient") {
    const MassGapFit fit = mass_gap_bounds(1.0, 4.0, 1e3, 1e6, 24);
    CHECK(fit.samples == 24);
    CHECK(fit.coeff_log == doctest::Approx(2.0).epsilon(0.01));
    // Lower-bound constant exists: r* - r >= 2 m log r - C on the ladder.
    CHECK(std::isfinite(fit.c_lower));
    CHECK(fit.c_upper > 0.0);
}

TEST_CASE("zero mass closes the tortoise gap identically") {
    for (double r : {10.0, 1e3, 1e5})
        CHECK(tortoise_of_r(r, 0.0, 4.0) == doctest::Approx(r - 4.0).epsilon(1e-15));
}
