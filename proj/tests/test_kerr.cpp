#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "carlemanlab/geometry.hpp"
#include "carlemanlab/kerr.hpp"
#include "carlemanlab/metric.hpp"
#include "doctest.h"

using namespace carlemanlab;

TEST_CASE("comoving chart round-trips and matches the closed radius") {
    const KerrParams kp{1.0, 0.5};

    // r0^2 = r^2 + a^2 sin^2(theta): at the equator r = 10 the reference
    // radius is sqrt(100.25).
    double r0, theta0;
    to_comoving(kp, 10.0, M_PI / 2.0, &r0, &theta0);
    CHECK(r0 == doctest::Approx(std::sqrt(100.25)).epsilon(1e-14));
    CHECK(theta0 == doctest::Approx(M_PI / 2.0).epsilon(1e-12));

    for (const double r : {3.0, 10.0, 250.0}) {
        for (const double theta : {0.3, 1.1, 2.6}) {
            to_comoving(kp, r, theta, &r0, &theta0);
            double rb, thetab;
            from_comoving(kp, r0, theta0, &rb, &thetab);
            CHECK(rb == doctest::Approx(r).epsilon(1e-12));
            CHECK(thetab == doctest::Approx(theta).epsilon(1e-12));
        }
    }
}

TEST_CASE("zero spin reduces to the static metric in both charts") {
    const KerrParams kp{1.0, 0.0};
    for (const double r : {4.0, 30.0}) {
        for (const double theta : {0.4, 1.3}) {
            const MatN<double> g = kerr_bl_components(kp, r, theta);
            const double K = 1.0 - 2.0 * kp.m / r;
            const double s2 = std::sin(theta) * std::sin(theta);
            CHECK(g(0, 0) == doctest::Approx(-K).epsilon(1e-14));
            CHECK(g(1, 1) == doctest::Approx(1.0 / K).epsilon(1e-14));
            CHECK(g(2, 2) == doctest::Approx(r * r).epsilon(1e-14));
            CHECK(g(3, 3) == doctest::Approx(r * r * s2).epsilon(1e-14));
            CHECK(g(0, 3) == 0.0);

            const DeltaG d = kerr_minus_schwarzschild(kp, r, theta);
            CHECK(d.t0t0 == 0.0);
            CHECK(d.t0phi0 == 0.0);
            CHECK(d.phi0phi0 == 0.0);
            CHECK(d.r0r0 == 0.0);
            CHECK(d.r0theta0 == 0.0);
            CHECK(d.theta0theta0 == 0.0);
        }
    }
}

TEST_CASE("closed-form component differences match a numeric chart pullback") {
    // Oracle: pull the Boyer-Lindquist metric back through a finite-difference
    // Jacobian of (r, theta)(r0, theta0) and subtract the static metric in the
    // reference chart.
    const KerrParams kp{1.0, 0.9};
    const double hfd = 1e-5;
    for (const double r0 : {8.0, 40.0, 300.0}) {
        for (const double theta0 : {0.5, 1.1, 2.2}) {
            double r, theta;
            from_comoving(kp, r0, theta0, &r, &theta);
            const MatN<double> gbl = kerr_bl_components(kp, r, theta);

            // d(r, theta)/d(r0, theta0) by central differences.
            double drdr0, dthdr0, drdth0, dthdth0;
            {
                double rp, tp, rm, tm;
                from_comoving(kp, r0 + hfd, theta0, &rp, &tp);
                from_comoving(kp, r0 - hfd, theta0, &rm, &tm);
                drdr0 = (rp - rm) / (2.0 * hfd);
                dthdr0 = (tp - tm) / (2.0 * hfd);
                from_comoving(kp, r0, theta0 + hfd, &rp, &tp);
                from_comoving(kp, r0, theta0 - hfd, &rm, &tm);
                drdth0 = (rp - rm) / (2.0 * hfd);
                dthdth0 = (tp - tm) / (2.0 * hfd);
            }

            // J maps (t0, r0, theta0, phi0) tangent vectors to BL ones.
            MatN<double> J(4);
            J(0, 0) = 1.0;
            J(3, 3) = 1.0;
            J(1, 1) = drdr0;
            J(1, 2) = drdth0;
            J(2, 1) = dthdr0;
            J(2, 2) = dthdth0;

            MatN<double> g0(4);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    double s = 0.0;
                    for (int k = 0; k < 4; ++k)
                        for (int l = 0; l < 4; ++l) s += J(k, i) * gbl(k, l) * J(l, j);
                    g0(i, j) = s;
                }

            const double K = 1.0 - 2.0 * kp.m / r0;
            const double s0 = std::sin(theta0);
            const DeltaG d = kerr_minus_schwarzschild(kp, r0, theta0);

            // The (t, phi) block needs no Jacobian, so those closed forms are
            // exact; the r0-block forms are the leading decay terms, with
            // relative corrections that shrink as r0 grows, and theta0theta0
            // falls below the finite-difference noise floor on the outer rungs.
            CHECK(g0(0, 0) - (-K) == doctest::Approx(d.t0t0).epsilon(1e-6));
            CHECK(g0(0, 3) == doctest::Approx(d.t0phi0).epsilon(1e-6));
            CHECK(g0(3, 3) - r0 * r0 * s0 * s0 == doctest::Approx(d.phi0phi0).epsilon(1e-6));
            CHECK(g0(1, 1) - 1.0 / K == doctest::Approx(d.r0r0).epsilon(5e-3));
            CHECK(g0(1, 2) == doctest::Approx(d.r0theta0).epsilon(5e-3));
            if (r0 < 10.0)
                CHECK(g0(2, 2) - r0 * r0 == doctest::Approx(d.theta0theta0).epsilon(5e-2));
        }
    }
}

TEST_CASE("component differences decay at the predicted orders") {
    // Sampled decades apart, each closed-form component should track its
    // predicted power of r0.
    const KerrParams kp{1.0, 0.9};
    const double theta0 = 1.1;
    const DeltaG lo = kerr_minus_schwarzschild(kp, 1e2, theta0);
    const DeltaG hi = kerr_minus_schwarzschild(kp, 1e3, theta0);
    const auto order = [](double a, double b) { return std::log10(std::fabs(b / a)); };
    CHECK(order(lo.t0t0, hi.t0t0) == doctest::Approx(-3.0).epsilon(0.05));
    CHECK(order(lo.t0phi0, hi.t0phi0) == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(order(lo.phi0phi0, hi.phi0phi0) == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(order(lo.r0r0, hi.r0r0) == doctest::Approx(-3.0).epsilon(0.05));
    CHECK(order(lo.r0theta0, hi.r0theta0) == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(order(lo.theta0theta0, hi.theta0theta0) == doctest::Approx(-3.0).epsilon(0.05));
}

TEST_CASE("certificate passes at moderate spin and flags zero spin as exact") {
    const KerrCertificate c0 = kerr_certificate(KerrParams{1.0, 0.0});
    CHECK(c0.identically_zero);
    CHECK(c0.all_pass);
    // The null-chart series carry O(eps) rounding from the chart pullback.
    CHECK(c0.max_abs_delta <= 1e-14);

    const KerrCertificate c5 = kerr_certificate(KerrParams{1.0, 0.5});
    CHECK_FALSE(c5.identically_zero);
    CHECK(c5.all_pass);
    CHECK(c5.entries.size() == 13);
    for (const CertificateEntry& e : c5.entries) {
        CHECK(std::isfinite(e.fitted_order));
        const bool ok =
            std::fabs(e.fitted_order - e.predicted_order) <= 0.15 || e.fitted_order < e.predicted_order;
        CHECK(ok);
    }
}
