#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "carlemanlab/foliation.hpp"
#include "doctest.h"

using namespace carlemanlab;

namespace {

FoliationContext flat_ctx(Chart chart) {
    FoliationContext ctx;
    ctx.mode = FoliationMode::ZeroMass;
    ctx.eps = 1.0;
    ctx.spec.family = Family::Minkowski;
    ctx.spec.n = 3;
    ctx.spec.eps = 1.0;
    ctx.spec.chart = chart;
    return ctx;
}

FoliationContext schw_ctx(Chart chart) {
    FoliationContext ctx;
    ctx.mode = FoliationMode::PositiveMass;
    ctx.mass_min = 1.0;
    ctx.spec.family = Family::Schwarzschild;
    ctx.spec.n = 3;
    ctx.spec.mass = 1.0;
    ctx.spec.chart = chart;
    return ctx;
}

}  // namespace

TEST_CASE("reparametrization derivatives are internally consistent") {
    // Check F', F'', G = -(f F')' against centered differences of F itself.
    const double df = 1e-6;
    for (int kind : {1, 2}) {
        for (double f : {1e-3, 5e-3, 2e-2}) {
            const ReparamValue m = reparam_eval(kind, 0.1, 2.0 / 3.0, f);
            const ReparamValue lo = reparam_eval(kind, 0.1, 2.0 / 3.0, f - df);
            const ReparamValue hi = reparam_eval(kind, 0.1, 2.0 / 3.0, f + df);
            CHECK(m.Fp == doctest::Approx((hi.F - lo.F) / (2.0 * df)).epsilon(1e-6));
            CHECK(m.Fpp == doctest::Approx((hi.Fp - lo.Fp) / (2.0 * df)).epsilon(1e-4));
            const double fFp_lo = (f - df) * lo.Fp;
            const double fFp_hi = (f + df) * hi.Fp;
            CHECK(m.G == doctest::Approx(-(fFp_hi - fFp_lo) / (2.0 * df)).epsilon(1e-6));
        }
    }
}

TEST_CASE("foliation function is -UV on the inverted chart") {
    const FoliationContext ctx = flat_ctx(Chart::InvertedZeroMass);
    const Point p = make_point(3, -0.2, 0.3, 1.1, 0.7);
    CHECK(eval_f(ctx, p) == doctest::Approx(0.06).epsilon(1e-14));
    // And 1/(u~ v~) on the physical chart.
    const FoliationContext phys = flat_ctx(Chart::Physical);
    const Point q = make_point(3, -4.0, 3.0, 1.1, 0.7);
    CHECK(eval_f(phys, q) == doctest::Approx(1.0 / (5.0 * 4.0)).epsilon(1e-14));
}

TEST_CASE("adapted frame is orthonormal and tangent to the level sets") {
    for (const FoliationContext& ctx :
         {flat_ctx(Chart::InvertedZeroMass), schw_ctx(Chart::InvertedPositiveMass)}) {
        const Point p = make_point(3, -0.15, 0.22, 1.3, 0.6);
        const AdaptedFrame fr = adapted_frame(ctx, p);
        const MetricValue mv = eval_metric(ctx.spec, p);
        CHECK(fr.gram_residual < 1e-10);
        CHECK(fr.tangency_residual < 1e-10);
        for (int a = 0; a < fr.dim; ++a)
            for (int b = 0; b < fr.dim; ++b) {
                const double ip = metric_inner(mv.g, fr.e[static_cast<std::size_t>(a)],
                                               fr.e[static_cast<std::size_t>(b)]);
                if (a != b) CHECK(std::fabs(ip) < 1e-10);
                else CHECK(std::fabs(std::fabs(ip) - 1.0) < 1e-10);
            }
        // Exactly one timelike direction (the tangential T slot).
        const double gTT = metric_inner(mv.g, fr.T(), fr.T());
        const double gNN = metric_inner(mv.g, fr.N(), fr.N());
        CHECK(gTT == doctest::Approx(-1.0).epsilon(1e-10));
        CHECK(gNN == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("flat physical-chart convexity tensor matches the closed form") {
    // With h = -f^2/2 - (eps/r) f^2 / 2 the tensor is diagonal with all
    // tangential entries (eps / 2 r) f^2.
    const FoliationContext ctx = flat_ctx(Chart::Physical);
    for (const Point& p : {make_point(3, -4.0, 3.0, 1.1, 0.7), make_point(3, -2.5, 5.5, 1.9, 2.3)}) {
        const double f = eval_f(ctx, p);
        const double r = p.x[1] - p.x[0];
        const double h = -0.5 * f * f - 0.5 * (ctx.eps / r) * f * f;
        const PseudoconvexityResult res = pseudoconvexity_tensor(ctx, p, h);
        const double closed = 0.5 * (ctx.eps / r) * f * f;
        for (int a = 0; a < 3; ++a)
            CHECK(res.pi_frame(a, a) == doctest::Approx(closed).epsilon(1e-8));
        CHECK(res.max_offdiag < 1e-10);
        CHECK(res.min_tangential_eigenvalue == doctest::Approx(closed).epsilon(1e-8));
    }
}

TEST_CASE("inverted static tensor is tangentially isotropic with the closed value") {
    const FoliationContext ctx = schw_ctx(Chart::InvertedPositiveMass);
    const Point p = make_point(3, -0.12, 0.14, 1.2, 0.5);
    const double h = pseudoconvexity_h(ctx, p);
    const PseudoconvexityResult res = pseudoconvexity_tensor(ctx, p, h);
    // pi(T,T) = pi(E_A, E_A) for all angular directions, with the displayed
    // closed value (r*/r - 1)/4 - (3/8)(2m/r)(r*/r).
    const double rstar = radius_of(ctx, p);
    const double r = tortoise_radius(rstar, ctx.spec.mass, ctx.spec.rbase);
    const double closed =
        0.25 * (rstar / r - 1.0) - 0.375 * (2.0 * ctx.spec.mass / r) * (rstar / r);
    for (int a = 0; a < 3; ++a)
        CHECK(res.pi_frame(a, a) == doctest::Approx(closed).epsilon(1e-8));
    CHECK(res.max_offdiag < 1e-10);
}

TEST_CASE("parallel and serial sweeps agree bitwise") {
    const FoliationContext ctx = flat_ctx(Chart::InvertedZeroMass);
    SweepGrid grid;
    grid.u0 = -0.5;
    grid.u1 = -0.05;
    grid.v0 = 0.05;
    grid.v1 = 0.5;
    grid.nu = 9;
    grid.nv = 7;
    const std::vector<SweepRecord> par = pseudoconvexity_sweep(ctx, grid);
    const std::vector<SweepRecord> ser = pseudoconvexity_sweep_serial(ctx, grid);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].min_tangential_eigenvalue == ser[i].min_tangential_eigenvalue);
        CHECK(par[i].max_offdiag == ser[i].max_offdiag);
        CHECK(par[i].ratio == ser[i].ratio);
        CHECK(par[i].f == ser[i].f);
    }
}

TEST_CASE("gap check reports a positive ratio band on the flat inverted chart") {
    const FoliationContext ctx = flat_ctx(Chart::InvertedZeroMass);
    SweepGrid grid;
    grid.u0 = -0.5;
    grid.u1 = -0.05;
    grid.v0 = 0.05;
    grid.v1 = 0.5;
    grid.nu = 8;
    grid.nv = 8;
    const PsiGapResult gap = psi_gap_check(ctx, grid);
    CHECK(gap.count == 64);
    // Flat inverted picture: tangential pi = Psi/2 exactly, so the ratio
    // against its natural scale Psi is 1/2 across the whole grid.
    CHECK(gap.min_ratio == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(gap.max_ratio == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("perturbation scale follows the two mode profiles") {
    const FoliationContext flat = flat_ctx(Chart::Physical);
    const Point p = make_point(3, -4.0, 3.0, 1.1, 0.7);
    CHECK(psi_scale(flat, p) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));

    const FoliationContext schw = schw_ctx(Chart::Physical);
    const double rstar = p.x[1] - p.x[0];
    CHECK(psi_scale(schw, p) ==
          doctest::Approx(schw.mass_min / rstar * std::log(rstar)).epsilon(1e-12));
}
