// Conformal machinery: inversions, Hessian transformation law, conformal
// Laplacian transport, lower-order operator transport, and the tortoise
// mass-gap bounds.
//
// Two kinds of conformal relation appear:
//   * same-chart scalings  g-bar = Omega^2 g  (Sharp, PenroseScaled,
//     CarlemanScaled decorations), where the transformation laws are checked
//     pointwise in shared coordinates;
//   * the inversions (InvertedZeroMass / InvertedPositiveMass), which also
//     change coordinates (U, V) = (-1/u~, 1/v~).

#pragma once

#include "carlemanlab/fit.hpp"
#include "carlemanlab/foliation.hpp"
#include "carlemanlab/geometry.hpp"

namespace carlemanlab {

// ---------------------------------------------------------------------------
// Coordinate side of the inversions.
// ---------------------------------------------------------------------------
struct ConformalMap {
    MetricSpec source;  // physical chart
    MetricSpec target;  // decorated chart
    FoliationMode mode = FoliationMode::ZeroMass;
    double eps = 0.0;
};

// Decorated spec for the full inversion g-bar = (K^-1) f^2 g in (U, V, y).
ConformalMap invert_metric(const MetricSpec& physical, FoliationMode mode, double eps);

// Same-chart scaled spec g-bar = (K^-1) f^2 g in (u, v, y).
MetricSpec carleman_scaled(const MetricSpec& physical, FoliationMode mode, double eps);

// (u, v) <-> (U, V).
void uv_inversion(FoliationMode mode, double eps, double u, double v, double* U, double* V);
void uv_inversion_back(FoliationMode mode, double eps, double U, double V, double* u, double* v);
Point map_to_target(const ConformalMap& map, const Point& physical_pt);
Point map_to_source(const ConformalMap& map, const Point& target_pt);

// Omega^2 with g_target = Omega^2 g_base in shared coordinates, as a field
// with closed-form jets.  Valid for the same-chart decorations.
ScalarField conformal_omega2(const MetricSpec& target);

// ---------------------------------------------------------------------------
// Hessian transformation law for g-bar = Omega^2 g (shared chart):
//   nabla-bar^2_ab phi = nabla^2_ab phi - d_a log(Omega) d_b phi
//                        - d_b log(Omega) d_a phi + g(grad log Omega, grad phi) g_ab.
// Returns the max-abs residual between the directly computed target Hessian
// and the law's right-hand side.
// ---------------------------------------------------------------------------
double hessian_transform_residual(const MetricSpec& base, const MetricSpec& target,
                                  const ScalarField& phi, const Point& p);

// ---------------------------------------------------------------------------
// Conformal Laplacian P_g = Box_g - ((n-1)/(4n)) R_g, with R_g from the
// finite-difference curvature route.
// ---------------------------------------------------------------------------
double conformal_laplacian(const MetricSpec& spec, const ScalarField& phi, const Point& p,
                           double fd_step = kDefaultFdStep);

// Residual of P_gbar(Omega^-(n-1)/2 phi) = Omega^-(n+3)/2 P_g phi at p (shared
// chart, g-bar = Omega^2 g).
double conformal_laplacian_transport_residual(const MetricSpec& base, const MetricSpec& target,
                                              const ScalarField& phi, const Point& p,
                                              double fd_step = kDefaultFdStep);

// Residual of the curvature scaling identity
//   Omega^-2 R_g - R_gbar = 2 n Omega^-3 Box_g Omega + n(n-3) Omega^-4 g(grad
//   Omega, grad Omega),
// with both curvatures from the direct route (cross-check of the FD curvature).
double yamabe_residual(const MetricSpec& base, const MetricSpec& target, const Point& p,
                       double fd_step = kDefaultFdStep);

// ---------------------------------------------------------------------------
// Lower-order coefficient transport for L = Box + a^alpha d_alpha + V.
// ---------------------------------------------------------------------------
struct OperatorCoefficients {
    int dim = 0;
    std::array<ScalarField, kMaxDim> a;  // a^alpha (index raised), per coordinate
    ScalarField V;
};

// a-bar^alpha = Omega^-2 a^alpha;  V-bar = Omega^-2 V
//   + ((n-1)/4) Omega^-4 a^alpha d_alpha(Omega^2)
//   + ((n-1)/(4n)) (Omega^-2 R_g - R_gbar).
// The coefficient fields are returned where closed-form (a-bar); V-bar is
// evaluated pointwise because it involves the FD curvature route.
std::array<ScalarField, kMaxDim> transport_a(const MetricSpec& base, const MetricSpec& target,
                                             const OperatorCoefficients& coeffs);
double transport_V(const MetricSpec& base, const MetricSpec& target,
                   const OperatorCoefficients& coeffs, const Point& p,
                   double fd_step = kDefaultFdStep);

// Apply L to phi at p (V supplied as a number to allow the pointwise V-bar).
double apply_operator(const MetricSpec& spec, const OperatorCoefficients& coeffs,
                      const ScalarField& phi, const Point& p);

// Residual of L_g phi = Omega^(n+3)/2 L-bar_gbar (Omega^-(n-1)/2 phi) at p.
double operator_transport_residual(const MetricSpec& base, const MetricSpec& target,
                                   const OperatorCoefficients& coeffs, const ScalarField& phi,
                                   const Point& p, double fd_step = kDefaultFdStep);

// ---------------------------------------------------------------------------
// Mass-gap bounds for the tortoise coordinate of a mass-m background:
//   r* - r >= 2 m_min log r - C     and     r* - r <= C_m log r.
// Fits the log coefficient over a geometric ladder r in [r_lo, r_hi].
// ---------------------------------------------------------------------------
struct MassGapFit {
    double coeff_log = 0.0;  // fitted coefficient of log r in r* - r
    double c_lower = 0.0;    // smallest C with r* - r >= 2 m_min log r - C
    double c_upper = 0.0;    // largest (r* - r)/log r
    int samples = 0;
};
MassGapFit mass_gap_bounds(double mass, double rbase, double r_lo, double r_hi, int count);

}  // namespace carlemanlab
