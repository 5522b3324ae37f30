#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "carlemanlab/carleman.hpp"
#include "doctest.h"

using namespace carlemanlab;

namespace {

FoliationContext flat_inverted() {
    FoliationContext ctx;
    ctx.mode = FoliationMode::ZeroMass;
    ctx.eps = 1.0;
    ctx.spec.family = Family::Minkowski;
    ctx.spec.n = 3;
    ctx.spec.eps = 1.0;
    ctx.spec.chart = Chart::InvertedZeroMass;
    return ctx;
}

FoliationContext schw_inverted() {
    FoliationContext ctx;
    ctx.mode = FoliationMode::PositiveMass;
    ctx.mass_min = 1.0;
    ctx.spec.family = Family::PositiveMass;
    ctx.spec.n = 3;
    ctx.spec.mass = 1.0;
    ctx.spec.chart = Chart::InvertedPositiveMass;
    return ctx;
}

QuadratureDomain small_domain() {
    QuadratureDomain dom;
    dom.tau = 1e-3;
    dom.omega_prime = 1e-2;
    dom.s_lo = -4.1;
    dom.s_hi = 4.1;
    dom.nf = 24;
    dom.ns = 6;
    dom.nang = 4;
    dom.f_concentrate = 4e-3;
    dom.f_min_cell = 2e-7;
    return dom;
}

}  // namespace

TEST_CASE("(f, s) chart inverts to (U, V) exactly") {
    for (double f : {1e-3, 5e-3, 2e-2})
        for (double s : {-3.0, 0.0, 2.5}) {
            double U = 0.0, V = 0.0;
            fs_to_uv(f, s, &U, &V);
            CHECK(U < 0.0);
            CHECK(V > 0.0);
            CHECK(-U * V == doctest::Approx(f).epsilon(1e-12));
            CHECK(1.0 / U + 1.0 / V == doctest::Approx(s).epsilon(1e-9));
        }
}

TEST_CASE("collar test function is supported inside its window") {
    const FoliationContext ctx = flat_inverted();
    const ScalarField phi = collar_test_function(ctx, 4e-3, 9e-3, -2.0, 2.0, 0.0);
    double U, V;
    // Inside the window: strictly positive.
    fs_to_uv(6e-3, 0.0, &U, &V);
    CHECK(phi(make_point(3, U, V, 1.1, 0.7)) > 0.0);
    // Outside in f and outside in s: exactly zero.
    fs_to_uv(2e-3, 0.0, &U, &V);
    CHECK(phi(make_point(3, U, V, 1.1, 0.7)) == 0.0);
    fs_to_uv(6e-3, 3.0, &U, &V);
    CHECK(phi(make_point(3, U, V, 1.1, 0.7)) == 0.0);
}

TEST_CASE("conjugated operator: expansion equals the direct composite route") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const FoliationContext& ctx : {flat_inverted(), schw_inverted()}) {
        ReparamSpec rep;
        rep.kind = ctx.mode == FoliationMode::ZeroMass ? 1 : 2;
        const ScalarField phi = collar_test_function(ctx, 3e-3, 9e-3, -2.0, 2.0, 0.3);
        for (int k = 0; k < 4; ++k) {
            const double f = 4e-3 + 4e-3 * unit(rng);
            const double s = -1.5 + 3.0 * unit(rng);
            double U, V;
            fs_to_uv(f, s, &U, &V);
            const Point p = make_point(3, U, V, 0.9 + unit(rng), 0.7);
            // Kind 2 reaches e^(lambda f^-q) ~ e^(30 lambda); keep lambda small
            // enough for the direct route to stay inside double range.
            const double lambda = rep.kind == 1 ? 10.0 + 30.0 * unit(rng) : 0.2 + 0.8 * unit(rng);
            const ConjugatedValue cv = conjugated_operator(ctx, rep, lambda, phi, p);
            const double scale = std::max(1.0, std::fabs(cv.direct));
            CHECK(std::fabs(cv.expansion - cv.direct) / scale < 1e-8);
        }
    }
}

TEST_CASE("multiplier identity residual converges at fourth order") {
    const FoliationContext ctx = flat_inverted();
    ReparamSpec rep;
    const ScalarField phi = collar_test_function(ctx, 3e-3, 9e-3, -2.0, 2.0, 0.3);
    double U, V;
    fs_to_uv(5e-3, 0.4, &U, &V);
    const Point p = make_point(3, U, V, 1.2, 0.6);
    // Steps sit above the roundoff floor of the fourth-order stencil but well
    // inside the bump support (the chart stiffness is ~1/U^2).
    const std::vector<double> steps{1.6e-4, 8e-5, 4e-5, 2e-5};
    const double order = identity_convergence_order(ctx, rep, 15.0, phi, p, steps);
    CHECK(order > 3.5);
    CHECK(order < 4.5);
}

TEST_CASE("conjugation shorthand bounds behave like the displayed shapes") {
    const FoliationContext ctx = flat_inverted();
    ReparamSpec rep;
    std::vector<double> f_grid;
    for (int i = 0; i < 12; ++i) f_grid.push_back(1e-3 * std::pow(10.0, i / 11.0));
    const LambdaEBounds b = lambda_e_bounds(ctx, rep, f_grid, 0.3, 1.1, 0.7);
    CHECK(b.count == 12);
    // Lambda ~ f F' G: the ratio stays within a fixed positive band.
    CHECK(b.min_lambda_ratio > 0.0);
    CHECK(b.max_lambda_ratio < 10.0 * b.min_lambda_ratio);
    // |E| <~ G with a modest constant.
    CHECK(b.max_e_over_g > 0.0);
    CHECK(b.max_e_over_g < 100.0);
}

TEST_CASE("shorthand identity E + G = F' (2h - 1) when ell = f") {
    // On the flat inverted chart ell = |grad f|^2 = f exactly, and then
    // E + G = 2 F' h + F'' f - (f F')' + ... collapses to F' (2h - 1).
    const FoliationContext ctx = flat_inverted();
    ReparamSpec rep;
    double U, V;
    fs_to_uv(5e-3, 0.3, &U, &V);
    const Point p = make_point(3, U, V, 1.1, 0.7);
    const ScalarField phi = collar_test_function(ctx, 3e-3, 9e-3, -2.0, 2.0, 0.0);
    const ConjugationState st = conjugation_state(ctx, rep, 10.0, phi, p);
    CHECK(st.ell == doctest::Approx(st.f).epsilon(1e-8));
    CHECK(st.Ecal + st.rep.G ==
          doctest::Approx(st.rep.Fp * (2.0 * st.h - 1.0)).epsilon(1e-8));
}

TEST_CASE("weighted integral check is deterministic and matches its serial reference") {
    const FoliationContext ctx = flat_inverted();
    ReparamSpec rep;
    const ScalarField phi = collar_test_function(ctx, 4e-3, 9e-3, -4.0, 4.0, 0.0);
    const QuadratureDomain dom = small_domain();
    const std::vector<double> lambdas{20.0, 40.0};
    const CarlemanSweep a = integral_carleman_check(ctx, rep, phi, lambdas, dom, false);
    const CarlemanSweep b = integral_carleman_check(ctx, rep, phi, lambdas, dom, false);
    const CarlemanSweep s = integral_carleman_check(ctx, rep, phi, lambdas, dom, true);
    REQUIRE(a.reports.size() == 2);
    for (std::size_t i = 0; i < a.reports.size(); ++i) {
        CHECK(a.reports[i].log_lhs == b.reports[i].log_lhs);
        CHECK(a.reports[i].log_ratio == b.reports[i].log_ratio);
        CHECK(a.reports[i].log_lhs == s.reports[i].log_lhs);
        CHECK(a.reports[i].log_ratio == s.reports[i].log_ratio);
    }
}

TEST_CASE("counterexample ladder: first two decay orders and wave residuals") {
    for (int N : {0, 1}) {
        const VanishingOrderFit fit = vanishing_order_fit(N);
        CHECK(fit.order == doctest::Approx(N + 1.0).epsilon(0.05));
        CHECK(fit.box_residual < 1e-6);
    }
}

TEST_CASE("absorption driver: vanishing field gives zero interior and no failure") {
    const FoliationContext ctx = flat_inverted();
    ReparamSpec rep;
    const ScalarField zero = ScalarField::from(4, [](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        (void)x;
        return T(0.0);
    });
    const UCReport rep_out =
        unique_continuation_driver(ctx, rep, zero, 0.5, {20.0, 40.0}, small_domain());
    CHECK(rep_out.interior == 0.0);
    CHECK_FALSE(rep_out.absorption_failed);
}
