// Pointwise differential geometry: Christoffel symbols, scalar Hessians,
// wave operator, scalar curvature.
//
// Two derivative routes are kept deliberately independent:
//   * closed form: Jet2 evaluation of the component suppliers (exact);
//   * finite differences: 4th-order central stencils of the plain double
//     suppliers, with one Richardson extrapolation level.
// The oracle-equivalence tests compare the two on every catalog background.

#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "carlemanlab/jet.hpp"
#include "carlemanlab/linalg.hpp"
#include "carlemanlab/metric.hpp"

namespace carlemanlab {

// Default finite-difference step (relative to coordinate scale) and the
// acceptance-grade step used by the transport checks.
inline constexpr double kDefaultFdStep = 1e-4;

// ---------------------------------------------------------------------------
// Scalar fields with closed-form jets.  A field is constructed from a single
// generic lambda that must evaluate on both double and Jet2 coordinates.
// ---------------------------------------------------------------------------
struct ScalarField {
    int dim = 0;
    std::function<double(const std::array<double, kMaxDim>&)> fd;
    std::function<Jet2(const std::array<Jet2, kMaxDim>&)> fj;

    template <class F>
    static ScalarField from(int dim, F f) {
        ScalarField s;
        s.dim = dim;
        s.fd = [f](const std::array<double, kMaxDim>& x) { return f(x); };
        s.fj = [f](const std::array<Jet2, kMaxDim>& x) { return f(x); };
        return s;
    }

    double operator()(const Point& p) const { return fd(p.x); }

    Jet2 jet(const Point& p) const {
        std::array<Jet2, kMaxDim> x;
        for (int i = 0; i < p.dim; ++i)
            x[static_cast<std::size_t>(i)] = Jet2::variable(p.dim, i, p.x[static_cast<std::size_t>(i)]);
        return fj(x);
    }
};

using Christoffels = std::array<MatN<double>, kMaxDim>;  // [a](b,c) = Gamma^a_bc

struct MetricValue {
    int dim = 0;
    MatN<double> g;
    MatN<double> ginv;
    double det = 0.0;       // det g (negative, Lorentzian)
    Christoffels gamma;     // closed-form route
};

// Metric, inverse, determinant and closed-form Christoffels at p.
MetricValue eval_metric(const MetricSpec& spec, const Point& p);

// Christoffels from 4th-order central differences of the double component
// supplier with one Richardson level; independent of the jet machinery.
Christoffels christoffel_fd_oracle(const MetricSpec& spec, const Point& p,
                                   double step = kDefaultFdStep);

// First and second coordinate partials of the metric from jets.
struct MetricJets {
    int dim = 0;
    MatN<double> g;
    // dg[e](a,b) = d_e g_ab ;  d2g[e][f](a,b) = d_e d_f g_ab
    std::array<MatN<double>, kMaxDim> dg;
    std::array<std::array<MatN<double>, kMaxDim>, kMaxDim> d2g;
};
MetricJets metric_jets(const MetricSpec& spec, const Point& p);

// Covariant Hessian (nabla^2 phi)_ab = d_a d_b phi - Gamma^c_ab d_c phi,
// using closed-form jets for both the field and the Christoffels.
MatN<double> hessian_scalar(const MetricSpec& spec, const ScalarField& phi, const Point& p);

// Wave operator Box phi = g^ab (nabla^2 phi)_ab.
double box_scalar(const MetricSpec& spec, const ScalarField& phi, const Point& p);

// Scalar curvature via finite differences of the closed-form Christoffels
// (standard Riemann contraction), with one Richardson level.
double scalar_curvature(const MetricSpec& spec, const Point& p, double step = kDefaultFdStep);

// Scalar curvature entirely from jets (exact contraction; cross-check route).
double scalar_curvature_closed(const MetricSpec& spec, const Point& p);

// Residual of metric compatibility nabla g = 0 evaluated with the closed-form
// Christoffels; diagnostic for the geometry-check command.
double metric_compatibility_residual(const MetricSpec& spec, const Point& p);

// Gradient with index raised: (grad phi)^a = g^ab d_b phi.
VecN<double> gradient_raised(const MetricValue& mv, const Jet2& phi_jet);

// g(X, Y) for coordinate-component vectors.
double metric_inner(const MatN<double>& g, const VecN<double>& X, const VecN<double>& Y);

}  // namespace carlemanlab
