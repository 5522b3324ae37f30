// Rotating-black-hole asymptotics: Boyer-Lindquist metric, the comoving
// (corotating) chart, closed-form differences against the mass-m static
// metric in reference coordinates, and the decay certificate.
//
// The comoving chart (t0, r0, theta0, phi0) -> (t, r, theta, phi) is defined
// by t = t0, phi = phi0, r0^2 = r^2 + a^2 sin^2 theta and
// r0 cos theta0 = r cos theta; it makes the metric approach the static
// solution one order faster than Boyer-Lindquist components do.  The
// certificate fits the decay of the six component differences and of the
// double-null display classes against their predicted orders on a log-spaced
// radius ladder; faster-than-predicted decay counts as a pass.

#pragma once

#include <string>
#include <vector>

#include "carlemanlab/geometry.hpp"

namespace carlemanlab {

struct KerrParams {
    double m = 1.0;  // mass > 0
    double a = 0.0;  // angular momentum parameter >= 0
};

// Boyer-Lindquist components in coordinate order (t, r, theta, phi).
// Throws if Delta_r = r^2 + a^2 - 2 m r <= 0 (inside horizon / ergo issue).
MatN<double> kerr_bl_components(const KerrParams& kp, double r, double theta);
MetricValue kerr_bl_metric(const KerrParams& kp, double r, double theta);

// Chart maps.  Forward: BL (r, theta) -> reference (r0, theta0); inverse
// solves the closed-form quartic r^2 = ((r0^2 - a^2)
// + sqrt((r0^2 - a^2)^2 + 4 a^2 r0^2 cos^2 theta0)) / 2 with
// cos theta = r0 cos theta0 / r; branch theta, theta0 in [0, pi].
void to_comoving(const KerrParams& kp, double r, double theta, double* r0, double* theta0);
void from_comoving(const KerrParams& kp, double r0, double theta0, double* r, double* theta);

// The six closed-form component differences (g - g_m) in reference
// coordinates, evaluated at (r0, theta0); identically zero at a = 0.
struct DeltaG {
    double t0t0 = 0.0;
    double t0phi0 = 0.0;
    double phi0phi0 = 0.0;
    double r0r0 = 0.0;
    double r0theta0 = 0.0;
    double theta0theta0 = 0.0;
};
DeltaG kerr_minus_schwarzschild(const KerrParams& kp, double r0, double theta0);

// Decay certificate: fits |component| against r0 on a log-spaced ladder.
// pass = fitted order within tol of predicted, or strictly faster decay.
struct CertificateEntry {
    std::string component;
    double predicted_order = 0.0;  // slope of log|.| vs log r0 (negative)
    double fitted_order = 0.0;
    double fitted_constant = 0.0;  // |component| * r0^(-predicted) at ladder top
    bool pass = false;
};

struct KerrCertificate {
    KerrParams params;
    std::vector<CertificateEntry> entries;
    bool all_pass = false;
    double max_abs_delta = 0.0;  // max |Delta g| over the ladder (a = 0 check)
    bool identically_zero = false;
};

KerrCertificate kerr_certificate(const KerrParams& kp, double r0_lo = 1e2, double r0_hi = 1e4,
                                 int count = 20, double theta0 = 1.1, double order_tol = 0.15);

}  // namespace carlemanlab
