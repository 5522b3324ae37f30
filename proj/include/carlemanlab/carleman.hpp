// Conjugated-operator machinery and weighted-integral verification.
//
// Pointwise layer: the conjugation shorthands (ell, ell-bar, S_w, Lambda,
// curly-E, current P) and the multiplier identity
//   (L psi) S_w psi = 2 lambda F' |S_w psi|^2 + pi(grad psi, grad psi)
//                     + lambda^2 Lambda psi^2 + lambda E psi S_w psi
//                     - (1/2) Box w psi^2 + div P,
// whose divergence term is evaluated by finite differences of the current
// (everything else is closed form), so the residual converges at the FD
// scheme's order.
//
// Integral layer: the weighted estimates
//   kind 1:  W = f^(-2 lambda + 1) e^(2 lambda f^p)
//            LHS  integral W |Box phi|^2
//            RHS  lambda   integral W f^(p-1)    |N phi|^2
//               + lambda   integral W f^-1 Psi   sum_tang |E_i phi|^2
//               + lambda^3 integral W f^(p-2)    phi^2
//   kind 2:  W = f^(q+1) e^(2 lambda f^-q), densities f^(-q-1), f^(-q-1) Psi,
//            f^(-3q-2).
// All integrals are accumulated in log space (see logsum.hpp); cells are
// evaluated by an OpenMP kernel and reduced in fixed node order.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "carlemanlab/conformal.hpp"
#include "carlemanlab/foliation.hpp"
#include "carlemanlab/logsum.hpp"

namespace carlemanlab {

struct ReparamSpec {
    int kind = 1;     // 1 or 2
    double p = 0.1;   // kind-1 exponent
    double q = 2.0 / 3.0;
};

// ---------------------------------------------------------------------------
// Conjugation shorthands at a point.
// ---------------------------------------------------------------------------
struct ConjugationState {
    double lambda = 0.0;
    ReparamValue rep;     // F, F', F'', G at f
    double f = 0.0;
    double ell = 0.0;      // |grad f|^2
    double ell_bar = 0.0;  // grad f . grad f . hess f
    double psi = 0.0;
    double S_psi = 0.0;    // grad f . grad psi
    double Sw_psi = 0.0;   // S psi - w' psi
    double w = 0.0;
    double w_prime = 0.0;  // w - (n-1)/4
    double h = 0.0;        // w' + (1/2) Box f
    double box_psi = 0.0;
    double Ecal = 0.0;     // 2 F' h + F'' ell
    double Lambda = 0.0;   // -(F')^2 ell_bar - F' F'' ell^2 - (F')^2 ell h
};

ConjugationState conjugation_state(const FoliationContext& ctx, const ReparamSpec& rep,
                                   double lambda, const ScalarField& psi, const Point& p);

// L psi by expansion (closed form) and by direct evaluation
// e^(-lambda F) Box(e^(lambda F) psi); both returned for oracle comparison.
struct ConjugatedValue {
    double expansion = 0.0;
    double direct = 0.0;
};
ConjugatedValue conjugated_operator(const FoliationContext& ctx, const ReparamSpec& rep,
                                    double lambda, const ScalarField& psi, const Point& p);

// Residual of the multiplier identity at p; div P by 4th-order central FD of
// the densitized current at the given step.
double algebraic_identity_residual(const FoliationContext& ctx, const ReparamSpec& rep,
                                   double lambda, const ScalarField& psi, const Point& p,
                                   double step);

// Fitted convergence order of the identity residual over a step ladder.
double identity_convergence_order(const FoliationContext& ctx, const ReparamSpec& rep,
                                  double lambda, const ScalarField& psi, const Point& p,
                                  const std::vector<double>& steps);

// ---------------------------------------------------------------------------
// Lambda / curly-E bound sweep: Lambda ~ f F' G and |E| <~ G over a grid
// in f.
// ---------------------------------------------------------------------------
struct LambdaEBounds {
    double min_lambda_ratio = 0.0;  // min of Lambda / (f F' G)
    double max_lambda_ratio = 0.0;
    double max_e_over_g = 0.0;      // max of |E| / G
    int count = 0;
};
LambdaEBounds lambda_e_bounds(const FoliationContext& ctx, const ReparamSpec& rep,
                              const std::vector<double>& f_grid, double s_fixed, double y1,
                              double y2);

// ---------------------------------------------------------------------------
// Quadrature domain in (f, s = u+v, angles) over the inverted chart.
// ---------------------------------------------------------------------------
struct QuadratureDomain {
    double tau = 0.0, omega_prime = 1e-2;  // truncation f in [tau, omega']
    double s_lo = 0.0, s_hi = 0.0;         // truncation in s = u + v
    int nf = 16, ns = 8, nang = 4;         // cells per axis (angles share nang)
    double pole_margin = 0.1;
    // The weight confines every integrand to a layer of width ~ f/(2 lambda)
    // at the lower edge of the test-function support.  When f_concentrate is
    // set (>= 0) the f-axis uses geometrically graded cells starting there,
    // with smallest width f_min_cell, instead of a uniform grid; integration
    // starts at f_concentrate, so it must not exceed the support's lower
    // edge (the integrand vanishes below it).
    double f_concentrate = -1.0;
    double f_min_cell = 1e-6;
};

// Compactly supported test function on the inverted chart:
//   B(f; f1, f2) B(s; s1, s2) (1 + a cos y1),
// with C^2 polynomial bumps.  Support must sit strictly inside the truncation
// window (the caller keeps one cell of clearance).
ScalarField collar_test_function(const FoliationContext& ctx_inverted, double f1, double f2,
                                 double s1, double s2, double a_cos);

// (f, s) -> (U, V) on the inverted chart: 1/U, 1/V are the roots of
// z^2 - s z - 1/f = 0.
void fs_to_uv(double f, double s, double* U, double* V);

struct CarlemanReport {
    double lambda = 0.0;
    int reparam_kind = 1;
    // Logs of the four weighted integrals J_k (no lambda prefactors):
    // 0 = |Box phi|^2, 1 = normal, 2 = tangential, 3 = zero-order.
    double log_J[4] = {0, 0, 0, 0};
    // Logs of LHS and the three RHS terms with their lambda prefactors.
    double log_lhs = 0.0;
    double log_rhs_normal = 0.0;
    double log_rhs_tangential = 0.0;
    double log_rhs_zero = 0.0;
    double log_ratio = 0.0;  // log LHS - log(sum RHS)
    double divergence_residual = 0.0;  // |integral div P| estimate (diagnostic)
    bool underresolved = false;
    double refine_disagreement = 0.0;  // max |log J(coarse) - log J(fine)|
};

struct CarlemanSweep {
    std::vector<CarlemanReport> reports;
    // Prefactor exponents fitted from log(term_k / J_k) vs log lambda; the
    // estimate's lambda, lambda, lambda^3 structure.
    double exponent_normal = 0.0;
    double exponent_tangential = 0.0;
    double exponent_zero = 0.0;
    double c_fitted = 0.0;        // LHS/RHS at the smallest lambda
    double min_ratio = 0.0;       // min over the sweep of LHS/RHS
    bool constant_uniform = false;  // min_ratio >= c_fitted (up to roundoff)
};

CarlemanSweep integral_carleman_check(const FoliationContext& ctx_inverted,
                                      const ReparamSpec& rep, const ScalarField& phi,
                                      const std::vector<double>& lambdas,
                                      const QuadratureDomain& dom, bool serial_reference = false);

// ---------------------------------------------------------------------------
// Counterexample family phi_N = partial_z^N r^(2-n) (n = 3): decay fit and
// harmonicity residual.
// ---------------------------------------------------------------------------
ScalarField phi_n_field(int N);

struct VanishingOrderFit {
    double order = 0.0;          // fitted decay order (= -slope)
    double box_residual = 0.0;   // max |Box phi_N| on the ladder
};
VanishingOrderFit vanishing_order_fit(int N, double r_lo = 1.0, int ladder = 8,
                                      double costheta = 0.6);

// ---------------------------------------------------------------------------
// Absorption argument driver: interior smallness vs the lambda^-3 bound.
// ---------------------------------------------------------------------------
struct UCReport {
    double interior = 0.0;                   // integral_{f <= (1-kappa) omega'} f^(p-2) phi~^2
    std::vector<double> lambdas;
    std::vector<double> bounds;              // lambda^-3 integral J^2, J = Box(chi phi-bar)
    double fitted_exponent = 0.0;            // slope of log bound vs log lambda
    double c_fitted = 0.0;                   // interior / bound at smallest lambda (0 if interior 0)
    bool absorption_failed = false;          // interior > c * bound at some larger lambda
};
UCReport unique_continuation_driver(const FoliationContext& ctx_inverted, const ReparamSpec& rep,
                                    const ScalarField& phi_bar, double kappa,
                                    const std::vector<double>& lambdas,
                                    const QuadratureDomain& dom);

}  // namespace carlemanlab
