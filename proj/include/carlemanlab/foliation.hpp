// Level-set foliation machinery.
//
// The foliation function is f = 1/(u~ v~) with
//   zero mass:      u~ = -u + eps,  v~ = v + eps   (eps > 0)
//   positive mass:  u~ = -u,        v~ = v          (u < 0 < v)
// In the inverted charts f = -U V.  Adapted frames are built from the
// tangential/normal seed vectors and made exactly orthonormal by Gram-Schmidt
// in the order E_1 .. E_{n-1}, T, N.

#pragma once

#include <vector>

#include "carlemanlab/geometry.hpp"

namespace carlemanlab {

enum class FoliationMode { ZeroMass, PositiveMass };

struct FoliationContext {
    FoliationMode mode = FoliationMode::ZeroMass;
    double eps = 0.0;       // zero-mass offset
    double mass_min = 0.0;  // m_min for the positive-mass weight
    MetricSpec spec;        // metric this foliation is paired with (any chart)
};

// f as a scalar field on the chart of ctx.spec (physical or inverted).
ScalarField foliation_f(const FoliationContext& ctx);

// f value at a point of ctx.spec's chart.
double eval_f(const FoliationContext& ctx, const Point& p);

// Radius proxy of the underlying physical point: r = v - u (zero mass;
// tortoise difference r* = v - u for positive mass), mapped back from the
// inverted chart when needed.
double radius_of(const FoliationContext& ctx, const Point& p);

// ---------------------------------------------------------------------------
// Reparametrizations F(f) with G = -(f F')'.
//   kind 1:  F = log f - f^p      (F' = 1/f - p f^(p-1),  G = p^2 f^(p-1))
//   kind 2:  F = -f^(-q)          (F' = q f^(-q-1),       G = q^2 f^(-q-1))
// ---------------------------------------------------------------------------
struct ReparamValue {
    double F = 0.0;
    double Fp = 0.0;   // F'
    double Fpp = 0.0;  // F''
    double G = 0.0;    // -(f F')'
};
ReparamValue reparam_eval(int kind, double p, double q, double f);

// Carleman weight w (zero mass: -eps/(2 r); positive mass:
// -(m_min/(2 r*)) log r*) and the derived quantities.
double weight_w(const FoliationContext& ctx, const Point& p);
ScalarField weight_w_field(const FoliationContext& ctx);

// Perturbation scale Psi (zero mass: eps/r; positive mass: (m_min/r*) log r*).
double psi_scale(const FoliationContext& ctx, const Point& p);

// h from w:  h = w - (n-1)/4 + (1/2) Box f  on the chart of ctx.spec.
// This is the multiplier-identity h; the convexity displays below use
// pseudoconvexity_h instead.
double h_of_w(const FoliationContext& ctx, const Point& p);

// Closed-form h for which the convexity tensor is diagonal in the adapted
// frame with the displayed tangential values:
//   zero mass, physical chart:  h = -f^2/2 - (eps/r) f^2 / 2,
//                               giving pi_tang = (eps / 2 r) f^2;
//   zero mass, inverted chart:  h = 1/2 - eps/(2 r),
//                               giving pi_tang = eps/(2 r);
//   positive mass, inverted:    h = 1/2 - (r*/r - 1)/4 + (3/8)(2m/r)(r*/r),
//                               giving pi_tang = (r*/r - 1)/4 - (3/8)(2m/r)(r*/r).
// Falls back to h_of_w for chart/mode combinations without a display.
double pseudoconvexity_h(const FoliationContext& ctx, const Point& p);

// ---------------------------------------------------------------------------
// Adapted frame.
// ---------------------------------------------------------------------------
struct AdaptedFrame {
    int dim = 0;
    // Coordinate components, order E_1 .. E_{n-1}, T, N.
    std::array<VecN<double>, kMaxDim> e;
    double gram_residual = 0.0;      // orthonormality defect of the raw seeds
    double tangency_residual = 0.0;  // max |X f| over tangential frame vectors

    const VecN<double>& tangential(int a) const { return e[static_cast<std::size_t>(a)]; }
    const VecN<double>& T() const { return e[static_cast<std::size_t>(dim - 2)]; }
    const VecN<double>& N() const { return e[static_cast<std::size_t>(dim - 1)]; }
};
AdaptedFrame adapted_frame(const FoliationContext& ctx, const Point& p);

// ---------------------------------------------------------------------------
// Pseudoconvexity tensor pi = h g - nabla^2 f in the adapted frame.
// Tangential block = indices (E_1..E_{n-1}, T), i.e. the first dim-1 frame
// slots.
// ---------------------------------------------------------------------------
struct PseudoconvexityResult {
    MatN<double> pi_frame;                  // dim x dim, frame components
    double min_tangential_eigenvalue = 0.0;
    double max_offdiag = 0.0;               // max |pi_ij|, i != j, full frame
};
PseudoconvexityResult pseudoconvexity_tensor(const FoliationContext& ctx, const Point& p,
                                             double h);

// ---------------------------------------------------------------------------
// Grid sweeps (OpenMP kernel + serial reference).  The record layout is what
// the CLI pseudoconvexity command reports.
// ---------------------------------------------------------------------------
struct SweepRecord {
    Point p;
    double f = 0.0;
    double h = 0.0;
    double psi = 0.0;
    double min_tangential_eigenvalue = 0.0;
    double max_offdiag = 0.0;
    double ratio = 0.0;  // min eigenvalue / (psi f^2)
};

struct SweepGrid {
    // Rectangular grid in (u, v) (or (U, V)) with fixed angular slice.
    double u0 = 0.0, u1 = 0.0;
    double v0 = 0.0, v1 = 0.0;
    int nu = 8, nv = 8;
    double y1 = 1.2, y2 = 0.7, y3 = 0.0;
};

// h is taken from pseudoconvexity_h at each point.
std::vector<SweepRecord> pseudoconvexity_sweep(const FoliationContext& ctx, const SweepGrid& grid);
std::vector<SweepRecord> pseudoconvexity_sweep_serial(const FoliationContext& ctx,
                                                      const SweepGrid& grid);

// Gap check: min over the sweep of ratio = min-eig / (Psi f^2) on physical
// charts and min-eig / Psi on inverted ones; positivity at the perturbation
// scale holds when the returned minimum is bounded below by a positive
// constant.
struct PsiGapResult {
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    int count = 0;
};
PsiGapResult psi_gap_check(const FoliationContext& ctx, const SweepGrid& grid);

}  // namespace carlemanlab
