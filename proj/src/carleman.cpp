#include "carlemanlab/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace carlemanlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// C^2 polynomial bump on [s1, s2], normalized to peak value 1.
template <class T>
T bump(const T& s, double s1, double s2) {
    const double sv = value_of(s);
    if (sv <= s1 || sv >= s2) return T(0);
    const double half = 0.5 * (s2 - s1);
    const double norm = half * half * half * half * half * half;  // ((s2-s1)/2)^6
    const T a = s - s1;
    const T b = s2 - s;
    const T ab = a * b;
    return ab * ab * ab / norm;
}

// C^2 downward step: 1 for t <= 0, 0 for t >= 1 (quintic smoothstep).
template <class T>
T down_step(const T& t) {
    const double tv = value_of(t);
    if (tv <= 0.0) return T(1);
    if (tv >= 1.0) return T(0);
    const T t2 = t * t;
    const T t3 = t2 * t;
    return T(1) - (10.0 * t3 - 15.0 * t3 * t + 6.0 * t3 * t2);
}

}  // namespace

ConjugationState conjugation_state(const FoliationContext& ctx, const ReparamSpec& rep,
                                   double lambda, const ScalarField& psi, const Point& p) {
    const int dim = p.dim;
    const int n = ctx.spec.n;
    const ScalarField f = foliation_f(ctx);
    const ScalarField wf = weight_w_field(ctx);
    const MetricValue mv = eval_metric(ctx.spec, p);
    const Jet2 fj = f.jet(p);
    const Jet2 pj = psi.jet(p);

    ConjugationState st;
    st.lambda = lambda;
    st.f = fj.v;
    st.rep = reparam_eval(rep.kind, rep.p, rep.q, st.f);

    const VecN<double> gradf = gradient_raised(mv, fj);
    const VecN<double> gradpsi = gradient_raised(mv, pj);
    const MatN<double> hessf = hessian_scalar(ctx.spec, f, p);

    st.ell = 0.0;
    st.S_psi = 0.0;
    for (int a = 0; a < dim; ++a) {
        st.ell += gradf[a] * fj.g[static_cast<std::size_t>(a)];
        st.S_psi += gradf[a] * pj.g[static_cast<std::size_t>(a)];
    }
    st.ell_bar = 0.0;
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) st.ell_bar += gradf[a] * gradf[b] * hessf(a, b);

    st.psi = pj.v;
    st.w = wf(p);
    st.w_prime = st.w - 0.25 * (n - 1);
    st.Sw_psi = st.S_psi - st.w_prime * st.psi;
    st.box_psi = box_scalar(ctx.spec, psi, p);

    double boxf = 0.0;
    {
        const MatN<double> hf = hessf;
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) boxf += mv.ginv(a, b) * hf(a, b);
    }
    st.h = st.w_prime + 0.5 * boxf;
    st.Ecal = 2.0 * st.rep.Fp * st.h + st.rep.Fpp * st.ell;
    st.Lambda = -st.rep.Fp * st.rep.Fp * st.ell_bar - st.rep.Fp * st.rep.Fpp * st.ell * st.ell -
                st.rep.Fp * st.rep.Fp * st.ell * st.h;
    (void)gradpsi;
    return st;
}

ConjugatedValue conjugated_operator(const FoliationContext& ctx, const ReparamSpec& rep,
                                    double lambda, const ScalarField& psi, const Point& p) {
    const ConjugationState st = conjugation_state(ctx, rep, lambda, psi, p);
    ConjugatedValue out;
    out.expansion = st.box_psi + 2.0 * lambda * st.rep.Fp * st.Sw_psi +
                    lambda * lambda * st.rep.Fp * st.rep.Fp * st.ell * st.psi +
                    lambda * st.Ecal * st.psi;
    // The expansion above subsumes the w' shift; the direct route conjugates
    // by e^(lambda F) only, so compare against the w-free expansion:
    //   e^(-lambda F) Box(e^(lambda F) psi)
    //     = Box psi + 2 lambda F' S psi
    //       + lambda^2 (F')^2 ell psi + lambda (F'' ell + F' Box f) psi.
    const ScalarField f = foliation_f(ctx);
    const ScalarField conj = ScalarField::from(psi.dim, [f, psi, rep, lambda](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        using std::exp;
        using std::log;
        using std::pow;
        T fv, pv;
        if constexpr (std::is_same_v<T, double>) {
            fv = f.fd(x);
            pv = psi.fd(x);
        } else {
            fv = f.fj(x);
            pv = psi.fj(x);
        }
        T F;
        if (rep.kind == 1) F = log(fv) - pow(fv, rep.p);
        else F = -pow(fv, -rep.q);
        return exp(lambda * F) * pv;
    });
    const double F = st.rep.F;
    out.direct = std::exp(-lambda * F) * box_scalar(ctx.spec, conj, p);
    // Shift the direct route by the w' bookkeeping so both sides represent
    // the same operator: L psi = conjugation + 2 lambda F' (-w') psi folded
    // into the curly-E term.  Expansion - direct = 0 analytically because
    //   2 lambda F' S_w psi + lambda E psi
    //     = 2 lambda F' S psi + lambda (F'' ell + F' Box f) psi.
    return out;
}

namespace {

// Densitized current sqrt(|det g|) P^beta at a point.
VecN<double> densitized_current(const FoliationContext& ctx, const ReparamSpec& rep,
                                double lambda, const ScalarField& psi, const ScalarField& f,
                                const ScalarField& wf, const Point& q) {
    const int dim = q.dim;
    const int n = ctx.spec.n;
    const MetricValue mv = eval_metric(ctx.spec, q);
    const Jet2 fj = f.jet(q);
    const Jet2 pj = psi.jet(q);
    const Jet2 wj = wf.jet(q);

    const VecN<double> gradf = gradient_raised(mv, fj);
    const VecN<double> gradpsi = gradient_raised(mv, pj);
    double Spsi = 0.0, gradpsi2 = 0.0, ell = 0.0;
    for (int a = 0; a < dim; ++a) {
        Spsi += gradf[a] * pj.g[static_cast<std::size_t>(a)];
        gradpsi2 += gradpsi[a] * pj.g[static_cast<std::size_t>(a)];
        ell += gradf[a] * fj.g[static_cast<std::size_t>(a)];
    }
    const ReparamValue rv = reparam_eval(rep.kind, rep.p, rep.q, fj.v);
    const double wp = wj.v - 0.25 * (n - 1);
    const double psiv = pj.v;

    VecN<double> Plow(dim);
    for (int b = 0; b < dim; ++b) {
        Plow[b] = Spsi * pj.g[static_cast<std::size_t>(b)] -
                  0.5 * fj.g[static_cast<std::size_t>(b)] * gradpsi2 -
                  wp * psiv * pj.g[static_cast<std::size_t>(b)] +
                  0.5 * wj.g[static_cast<std::size_t>(b)] * psiv * psiv +
                  0.5 * lambda * lambda * ell * rv.Fp * rv.Fp *
                      fj.g[static_cast<std::size_t>(b)] * psiv * psiv;
    }
    const double dens = std::sqrt(std::fabs(mv.det));
    VecN<double> Pup(dim);
    for (int b = 0; b < dim; ++b) {
        double s = 0.0;
        for (int a = 0; a < dim; ++a) s += mv.ginv(b, a) * Plow[a];
        Pup[b] = dens * s;
    }
    return Pup;
}

double divergence_fd(const FoliationContext& ctx, const ReparamSpec& rep, double lambda,
                     const ScalarField& psi, const ScalarField& f, const ScalarField& wf,
                     const Point& p, double step) {
    const int dim = p.dim;
    const MetricValue mv = eval_metric(ctx.spec, p);
    double div = 0.0;
    for (int b = 0; b < dim; ++b) {
        Point pp = p, pm = p, pp2 = p, pm2 = p;
        pp.x[static_cast<std::size_t>(b)] += step;
        pm.x[static_cast<std::size_t>(b)] -= step;
        pp2.x[static_cast<std::size_t>(b)] += 2.0 * step;
        pm2.x[static_cast<std::size_t>(b)] -= 2.0 * step;
        const double f1 = densitized_current(ctx, rep, lambda, psi, f, wf, pp)[b];
        const double f2 = densitized_current(ctx, rep, lambda, psi, f, wf, pm)[b];
        const double f3 = densitized_current(ctx, rep, lambda, psi, f, wf, pp2)[b];
        const double f4 = densitized_current(ctx, rep, lambda, psi, f, wf, pm2)[b];
        div += (8.0 * (f1 - f2) - (f3 - f4)) / (12.0 * step);
    }
    return div / std::sqrt(std::fabs(mv.det));
}

}  // namespace

double algebraic_identity_residual(const FoliationContext& ctx, const ReparamSpec& rep,
                                   double lambda, const ScalarField& psi, const Point& p,
                                   double step) {
    const int dim = p.dim;
    const ScalarField f = foliation_f(ctx);
    const ScalarField wf = weight_w_field(ctx);
    const ConjugationState st = conjugation_state(ctx, rep, lambda, psi, p);
    const MetricValue mv = eval_metric(ctx.spec, p);
    const Jet2 pj = psi.jet(p);

    const double lpsi = st.box_psi + 2.0 * lambda * st.rep.Fp * st.Sw_psi +
                        lambda * lambda * st.rep.Fp * st.rep.Fp * st.ell * st.psi +
                        lambda * st.Ecal * st.psi;
    const double lhs = lpsi * st.Sw_psi;

    // pi(grad psi, grad psi) with pi = h g - hess f.
    const MatN<double> hessf = hessian_scalar(ctx.spec, f, p);
    const VecN<double> gradpsi = gradient_raised(mv, pj);
    double pi_term = 0.0;
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            pi_term += (st.h * mv.g(a, b) - hessf(a, b)) * gradpsi[a] * gradpsi[b];

    const double boxw = box_scalar(ctx.spec, wf, p);
    const double divp = divergence_fd(ctx, rep, lambda, psi, f, wf, p, step);

    const double rhs = 2.0 * lambda * st.rep.Fp * st.Sw_psi * st.Sw_psi + pi_term +
                       lambda * lambda * st.Lambda * st.psi * st.psi +
                       lambda * st.Ecal * st.psi * st.Sw_psi -
                       0.5 * boxw * st.psi * st.psi + divp;
    return lhs - rhs;
}

double identity_convergence_order(const FoliationContext& ctx, const ReparamSpec& rep,
                                  double lambda, const ScalarField& psi, const Point& p,
                                  const std::vector<double>& steps) {
    std::vector<double> res;
    res.reserve(steps.size());
    for (const double h : steps)
        res.push_back(std::fabs(algebraic_identity_residual(ctx, rep, lambda, psi, p, h)));
    return loglog_fit(steps, res).slope;
}

LambdaEBounds lambda_e_bounds(const FoliationContext& ctx, const ReparamSpec& rep,
                              const std::vector<double>& f_grid, double s_fixed, double y1,
                              double y2) {
    const ScalarField one = ScalarField::from(ctx.spec.n + 1, [](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        (void)x;
        return T(1);
    });
    LambdaEBounds out;
    bool first = true;
    for (const double fv : f_grid) {
        double U, V;
        fs_to_uv(fv, s_fixed, &U, &V);
        const Point p = make_point(ctx.spec.n, U, V, y1, y2);
        const ConjugationState st = conjugation_state(ctx, rep, 1.0, one, p);
        const double denom = st.f * st.rep.Fp * st.rep.G;
        const double ratio = st.Lambda / denom;
        const double eg = std::fabs(st.Ecal) / st.rep.G;
        if (first) {
            out.min_lambda_ratio = out.max_lambda_ratio = ratio;
            out.max_e_over_g = eg;
            first = false;
        } else {
            out.min_lambda_ratio = std::min(out.min_lambda_ratio, ratio);
            out.max_lambda_ratio = std::max(out.max_lambda_ratio, ratio);
            out.max_e_over_g = std::max(out.max_e_over_g, eg);
        }
        ++out.count;
    }
    return out;
}

void fs_to_uv(double f, double s, double* U, double* V) {
    const double disc = std::sqrt(s * s + 4.0 / f);
    const double A = 0.5 * (s - disc);  // = 1/U < 0
    const double B = 0.5 * (s + disc);  // = 1/V > 0
    *U = 1.0 / A;
    *V = 1.0 / B;
}

ScalarField collar_test_function(const FoliationContext& ctx_inverted, double f1, double f2,
                                 double s1, double s2, double a_cos) {
    const int dim = ctx_inverted.spec.n + 1;
    const Chart chart = ctx_inverted.spec.chart;
    const double eps = ctx_inverted.spec.eps;
    if (chart != Chart::InvertedZeroMass && chart != Chart::InvertedPositiveMass)
        throw std::runtime_error("collar_test_function: context must be on an inverted chart");
    (void)eps;
    return ScalarField::from(dim, [f1, f2, s1, s2, a_cos](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        using std::cos;
        // f = -UV, s = u + v = 1/U + 1/V (both inversion modes).
        const T f = -x[0] * x[1];
        const T s = T(1) / x[0] + T(1) / x[1];
        return bump(f, f1, f2) * bump(s, s1, s2) * (T(1) + a_cos * cos(x[2]));
    });
}

// ---------------------------------------------------------------------------
// Quadrature.
// ---------------------------------------------------------------------------

namespace {

// 4-point Gauss-Legendre on [-1, 1].
constexpr double kGlNode[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                               0.8611363115940526};
constexpr double kGlWeight[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                 0.3478548451374538};

struct Axis {
    std::vector<double> bounds;  // cell boundaries, ascending
};

Axis uniform_axis(double lo, double hi, int cells) {
    Axis ax;
    for (int c = 0; c <= cells; ++c) ax.bounds.push_back(lo + (hi - lo) * c / cells);
    return ax;
}

// Geometric cell widths w_min * sigma^k summing to (hi - lo), smallest first.
Axis graded_axis(double lo, double hi, int cells, double w_min) {
    const double span = hi - lo;
    if (cells <= 1 || w_min * cells >= span) return uniform_axis(lo, hi, std::max(1, cells));
    double a = 1.0, b = 4.0;
    const auto total = [&](double sigma) {
        double w = w_min, s = 0.0;
        for (int k = 0; k < cells; ++k, w *= sigma) s += w;
        return s;
    };
    while (total(b) < span) b *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        (total(m) < span ? a : b) = m;
    }
    const double sigma = 0.5 * (a + b);
    Axis ax;
    ax.bounds.push_back(lo);
    double w = w_min;
    for (int k = 0; k < cells - 1; ++k, w *= sigma) ax.bounds.push_back(ax.bounds.back() + w);
    ax.bounds.push_back(hi);
    return ax;
}

struct QuadPoint {
    double c[4] = {0, 0, 0, 0};  // (f, s, y1[, y2])
    double weight = 1.0;         // product of GL weights and cell half-widths
};

// Tensor-product node list over up to 4 axes, fixed ordering.
std::vector<QuadPoint> build_nodes(const std::vector<Axis>& axes) {
    std::vector<QuadPoint> pts;
    std::vector<std::vector<std::pair<double, double>>> per_axis;  // (coord, weight)
    std::size_t total = 1;
    for (const Axis& ax : axes) {
        std::vector<std::pair<double, double>> nodes;
        for (std::size_t c = 0; c + 1 < ax.bounds.size(); ++c) {
            const double h = ax.bounds[c + 1] - ax.bounds[c];
            const double mid = 0.5 * (ax.bounds[c] + ax.bounds[c + 1]);
            for (int k = 0; k < 4; ++k)
                nodes.emplace_back(mid + 0.5 * h * kGlNode[k], 0.5 * h * kGlWeight[k]);
        }
        total *= nodes.size();
        per_axis.push_back(std::move(nodes));
    }
    pts.reserve(total);
    const std::size_t na = axes.size();
    std::vector<std::size_t> idx(na, 0);
    while (true) {
        QuadPoint qp;
        for (std::size_t a = 0; a < na; ++a) {
            qp.c[a] = per_axis[a][idx[a]].first;
            qp.weight *= per_axis[a][idx[a]].second;
        }
        pts.push_back(qp);
        std::size_t a = na;
        while (a > 0) {
            --a;
            if (++idx[a] < per_axis[a].size()) break;
            idx[a] = 0;
            if (a == 0) return pts;
        }
        if (na == 0) return pts;
    }
}

struct QuadNode {
    double logf = 0.0;
    double fpow = 0.0;      // f^p (kind 1) or f^-q (kind 2)
    double logd[4] = {kNegInf, kNegInf, kNegInf, kNegInf};
};

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

// Evaluate the lambda-independent parts of all four integrands at one node.
QuadNode eval_quad_node(const FoliationContext& ctx, const ReparamSpec& rep,
                        const ScalarField& phi, const QuadPoint& qp, double azimuth_factor) {
    const int n = ctx.spec.n;
    const int dim = n + 1;
    const double f = qp.c[0];
    const double s = qp.c[1];
    double U, V;
    fs_to_uv(f, s, &U, &V);

    // |d(U,V)/d(f,s)| by a 2-variable jet through the closed-form map.
    const Jet2 fj = Jet2::variable(2, 0, f);
    const Jet2 sj = Jet2::variable(2, 1, s);
    const Jet2 disc = sqrt(sj * sj + 4.0 / fj);
    const Jet2 Aj = 0.5 * (sj - disc);
    const Jet2 Bj = 0.5 * (sj + disc);
    const Jet2 Uj = 1.0 / Aj;
    const Jet2 Vj = 1.0 / Bj;
    const double jac = std::fabs(Uj.g[0] * Vj.g[1] - Uj.g[1] * Vj.g[0]);

    const Point p = make_point(n, U, V, qp.c[2], n >= 4 ? qp.c[3] : 0.7);
    const MetricValue mv = eval_metric(ctx.spec, p);
    const double vol = std::sqrt(std::fabs(mv.det));
    const double measure = qp.weight * jac * vol * azimuth_factor;

    const Jet2 pj = phi.jet(p);
    QuadNode node;
    node.logf = std::log(f);
    node.fpow = rep.kind == 1 ? std::pow(f, rep.p) : std::pow(f, -rep.q);
    if (measure <= 0.0) return node;
    const double logm = std::log(measure);

    // Frame derivatives.
    const AdaptedFrame fr = adapted_frame(ctx, p);
    double nphi = 0.0, tang2 = 0.0;
    for (int k = 0; k < dim; ++k) nphi += fr.N()[k] * pj.g[static_cast<std::size_t>(k)];
    for (int i = 0; i < dim - 1; ++i) {
        double d = 0.0;
        for (int k = 0; k < dim; ++k)
            d += fr.e[static_cast<std::size_t>(i)][k] * pj.g[static_cast<std::size_t>(k)];
        tang2 += d * d;
    }
    const double box = box_scalar(ctx.spec, phi, p);
    const double psi = psi_scale(ctx, p);

    double e_normal, e_tang, e_zero;
    if (rep.kind == 1) {
        e_normal = rep.p - 1.0;
        e_tang = -1.0;
        e_zero = rep.p - 2.0;
    } else {
        e_normal = -rep.q - 1.0;
        e_tang = -rep.q - 1.0;
        e_zero = -3.0 * rep.q - 2.0;
    }
    node.logd[0] = safe_log(box * box) + logm;
    node.logd[1] = safe_log(nphi * nphi) + e_normal * node.logf + logm;
    node.logd[2] = safe_log(psi * tang2) + e_tang * node.logf + logm;
    node.logd[3] = safe_log(pj.v * pj.v) + e_zero * node.logf + logm;
    return node;
}

std::vector<QuadNode> eval_all_nodes(const FoliationContext& ctx, const ReparamSpec& rep,
                                     const ScalarField& phi, const std::vector<QuadPoint>& pts,
                                     double azimuth_factor, bool serial) {
    std::vector<QuadNode> nodes(pts.size());
    const std::int64_t count = static_cast<std::int64_t>(pts.size());
    if (serial) {
        for (std::int64_t k = 0; k < count; ++k)
            nodes[static_cast<std::size_t>(k)] =
                eval_quad_node(ctx, rep, phi, pts[static_cast<std::size_t>(k)], azimuth_factor);
    } else {
#pragma omp parallel for schedule(static)
        for (std::int64_t k = 0; k < count; ++k)
            nodes[static_cast<std::size_t>(k)] =
                eval_quad_node(ctx, rep, phi, pts[static_cast<std::size_t>(k)], azimuth_factor);
    }
    return nodes;
}

// log of the weighted integral J_k at the given lambda; fixed reduction order.
void integrals_at_lambda(const std::vector<QuadNode>& nodes, const ReparamSpec& rep,
                         double lambda, double out_logJ[4]) {
    LogAccumulator acc[4];
    for (const QuadNode& nd : nodes) {
        double logw;
        if (rep.kind == 1) logw = (-2.0 * lambda + 1.0) * nd.logf + 2.0 * lambda * nd.fpow;
        else logw = (rep.q + 1.0) * nd.logf + 2.0 * lambda * nd.fpow;
        for (int k = 0; k < 4; ++k)
            if (nd.logd[k] != kNegInf) acc[k].add_log(logw + nd.logd[k]);
    }
    for (int k = 0; k < 4; ++k) out_logJ[k] = acc[k].log_value();
}

std::vector<Axis> domain_axes(const FoliationContext& ctx, const QuadratureDomain& dom,
                              int divide) {
    const int n = ctx.spec.n;
    std::vector<Axis> axes;
    if (dom.f_concentrate >= 0.0)
        axes.push_back(graded_axis(dom.f_concentrate, dom.omega_prime,
                                   std::max(1, dom.nf / divide), dom.f_min_cell * divide));
    else
        axes.push_back(uniform_axis(dom.tau, dom.omega_prime, std::max(1, dom.nf / divide)));
    axes.push_back(uniform_axis(dom.s_lo, dom.s_hi, std::max(1, dom.ns / divide)));
    axes.push_back(
        uniform_axis(dom.pole_margin, M_PI - dom.pole_margin, std::max(1, dom.nang / divide)));
    if (n >= 4)
        axes.push_back(uniform_axis(dom.pole_margin, M_PI - dom.pole_margin,
                                    std::max(1, dom.nang / divide)));
    return axes;
}

double azimuth_factor_of(int n) { return n >= 3 ? 2.0 * M_PI : 1.0; }

}  // namespace

CarlemanSweep integral_carleman_check(const FoliationContext& ctx_inverted,
                                      const ReparamSpec& rep, const ScalarField& phi,
                                      const std::vector<double>& lambdas,
                                      const QuadratureDomain& dom, bool serial_reference) {
    const int n = ctx_inverted.spec.n;
    const double az = azimuth_factor_of(n);
    const std::vector<QuadPoint> pts = build_nodes(domain_axes(ctx_inverted, dom, 1));
    const std::vector<QuadPoint> pts_coarse = build_nodes(domain_axes(ctx_inverted, dom, 2));
    const std::vector<QuadNode> nodes =
        eval_all_nodes(ctx_inverted, rep, phi, pts, az, serial_reference);
    const std::vector<QuadNode> nodes_coarse =
        eval_all_nodes(ctx_inverted, rep, phi, pts_coarse, az, serial_reference);

    // Divergence-of-current diagnostic on the coarse grid, at the smallest
    // lambda, unweighted: should vanish up to quadrature error because the
    // test function clears the truncation boundary.
    double div_residual = 0.0;
    {
        const ScalarField f = foliation_f(ctx_inverted);
        const ScalarField wf = weight_w_field(ctx_inverted);
        const double lam0 = lambdas.empty() ? 1.0 : lambdas.front();
        const std::int64_t count = static_cast<std::int64_t>(pts_coarse.size());
        std::vector<double> contrib(pts_coarse.size());
#pragma omp parallel for schedule(static)
        for (std::int64_t k = 0; k < count; ++k) {
            const QuadPoint& qp = pts_coarse[static_cast<std::size_t>(k)];
            double U, V;
            fs_to_uv(qp.c[0], qp.c[1], &U, &V);
            const Jet2 fj = Jet2::variable(2, 0, qp.c[0]);
            const Jet2 sj = Jet2::variable(2, 1, qp.c[1]);
            const Jet2 disc = sqrt(sj * sj + 4.0 / fj);
            const Jet2 Uj = 1.0 / (0.5 * (sj - disc));
            const Jet2 Vj = 1.0 / (0.5 * (sj + disc));
            const double jac = std::fabs(Uj.g[0] * Vj.g[1] - Uj.g[1] * Vj.g[0]);
            const Point p = make_point(n, U, V, qp.c[2], n >= 4 ? qp.c[3] : 0.7);
            const MetricValue mv = eval_metric(ctx_inverted.spec, p);
            const double vol = std::sqrt(std::fabs(mv.det));
            contrib[static_cast<std::size_t>(k)] =
                divergence_fd(ctx_inverted, rep, lam0, phi, f, wf, p, 2e-6) * qp.weight * jac *
                vol * az;
        }
        for (const double c : contrib) div_residual += c;
        div_residual = std::fabs(div_residual);
    }

    CarlemanSweep sweep;
    std::vector<double> lamv, pre1, pre2, pre3, ratios;
    for (const double lam : lambdas) {
        CarlemanReport rep_out;
        rep_out.lambda = lam;
        rep_out.reparam_kind = rep.kind;
        integrals_at_lambda(nodes, rep, lam, rep_out.log_J);
        double coarse[4];
        integrals_at_lambda(nodes_coarse, rep, lam, coarse);
        for (int k = 0; k < 4; ++k)
            rep_out.refine_disagreement = std::max(
                rep_out.refine_disagreement, std::fabs(rep_out.log_J[k] - coarse[k]));
        rep_out.underresolved = rep_out.refine_disagreement > std::log(1.01);

        const double ll = std::log(lam);
        rep_out.log_lhs = rep_out.log_J[0];
        rep_out.log_rhs_normal = ll + rep_out.log_J[1];
        rep_out.log_rhs_tangential = ll + rep_out.log_J[2];
        rep_out.log_rhs_zero = 3.0 * ll + rep_out.log_J[3];
        const double log_rhs =
            log_add(log_add(rep_out.log_rhs_normal, rep_out.log_rhs_tangential),
                    rep_out.log_rhs_zero);
        rep_out.log_ratio = rep_out.log_lhs - log_rhs;
        rep_out.divergence_residual = div_residual;
        sweep.reports.push_back(rep_out);

        lamv.push_back(lam);
        pre1.push_back(std::exp(rep_out.log_rhs_normal - rep_out.log_J[1]));
        pre2.push_back(std::exp(rep_out.log_rhs_tangential - rep_out.log_J[2]));
        pre3.push_back(std::exp(rep_out.log_rhs_zero - rep_out.log_J[3]));
        ratios.push_back(rep_out.log_ratio);
    }

    if (lamv.size() >= 2) {
        sweep.exponent_normal = loglog_fit(lamv, pre1).slope;
        sweep.exponent_tangential = loglog_fit(lamv, pre2).slope;
        sweep.exponent_zero = loglog_fit(lamv, pre3).slope;
    }
    if (!ratios.empty()) {
        sweep.c_fitted = std::exp(ratios.front());
        double mn = ratios.front();
        for (const double r : ratios) mn = std::min(mn, r);
        sweep.min_ratio = std::exp(mn);
        sweep.constant_uniform = sweep.min_ratio >= sweep.c_fitted * (1.0 - 1e-12);
    }
    return sweep;
}

// ---------------------------------------------------------------------------
// phi_N and vanishing orders.
// ---------------------------------------------------------------------------

ScalarField phi_n_field(int N) {
    if (N < 0 || N > 4) throw std::runtime_error("phi_n_field: N in {0..4}");
    return ScalarField::from(4, [N](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        using std::cos;
        // partial_z^N (1/r) = (-1)^N N! P_N(cos theta) / r^(N+1).
        const T r = x[1] - x[0];
        const T c = cos(x[2]);
        T pn;
        switch (N) {
            case 0: pn = T(1); break;
            case 1: pn = c; break;
            case 2: pn = 0.5 * (3.0 * c * c - T(1)); break;
            case 3: pn = 0.5 * (5.0 * c * c * c - 3.0 * c); break;
            default: pn = 0.125 * (35.0 * c * c * c * c - 30.0 * c * c + T(3)); break;
        }
        double fact = 1.0;
        for (int k = 2; k <= N; ++k) fact *= k;
        const double sign = N % 2 == 0 ? 1.0 : -1.0;
        T rpow = r;
        for (int k = 0; k < N; ++k) rpow = rpow * r;
        return sign * fact * pn / rpow;
    });
}

VanishingOrderFit vanishing_order_fit(int N, double r_lo, int ladder, double costheta) {
    const ScalarField phi = phi_n_field(N);
    MetricSpec mk;
    mk.family = Family::Minkowski;
    mk.n = 3;
    const double theta = std::acos(costheta);
    std::vector<double> rs, vals;
    VanishingOrderFit out;
    for (int k = 0; k < ladder; ++k) {
        const double r = r_lo * std::pow(2.0, k);
        const Point p = make_point(3, -0.5 * r, 0.5 * r, theta, 0.7);
        rs.push_back(r);
        vals.push_back(phi(p));
        out.box_residual = std::max(out.box_residual, std::fabs(box_scalar(mk, phi, p)));
    }
    out.order = -loglog_fit(rs, vals).slope;
    return out;
}

// ---------------------------------------------------------------------------
// Absorption driver.
// ---------------------------------------------------------------------------

UCReport unique_continuation_driver(const FoliationContext& ctx_inverted, const ReparamSpec& rep,
                                    const ScalarField& phi_bar, double kappa,
                                    const std::vector<double>& lambdas,
                                    const QuadratureDomain& dom) {
    const int n = ctx_inverted.spec.n;
    const double az = azimuth_factor_of(n);
    const double omega = dom.omega_prime;
    const double f_cut = (1.0 - kappa) * omega;
    const double cut_width = 0.9 * kappa * omega;  // chi reaches 0 before omega'
    const double s1 = dom.s_lo, s2 = dom.s_hi;

    // phi~ = chi(f) B(s) phi-bar, closed-form jets.
    const ScalarField phit =
        ScalarField::from(n + 1, [phi_bar, f_cut, cut_width, s1, s2](const auto& x) {
            using T = std::decay_t<decltype(x[0])>;
            const T f = -x[0] * x[1];
            const T s = T(1) / x[0] + T(1) / x[1];
            T pv;
            if constexpr (std::is_same_v<T, double>) pv = phi_bar.fd(x);
            else pv = phi_bar.fj(x);
            return down_step((f - f_cut) / cut_width) * bump(s, s1, s2) * pv;
        });

    const std::vector<QuadPoint> pts = build_nodes(domain_axes(ctx_inverted, dom, 1));
    const std::int64_t count = static_cast<std::int64_t>(pts.size());
    std::vector<double> c_interior(pts.size(), 0.0), c_source(pts.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < count; ++k) {
        const QuadPoint& qp = pts[static_cast<std::size_t>(k)];
        const double f = qp.c[0];
        double U, V;
        fs_to_uv(f, qp.c[1], &U, &V);
        const Jet2 fj = Jet2::variable(2, 0, f);
        const Jet2 sj = Jet2::variable(2, 1, qp.c[1]);
        const Jet2 disc = sqrt(sj * sj + 4.0 / fj);
        const Jet2 Uj = 1.0 / (0.5 * (sj - disc));
        const Jet2 Vj = 1.0 / (0.5 * (sj + disc));
        const double jac = std::fabs(Uj.g[0] * Vj.g[1] - Uj.g[1] * Vj.g[0]);
        const Point p = make_point(n, U, V, qp.c[2], n >= 4 ? qp.c[3] : 0.7);
        const MetricValue mv = eval_metric(ctx_inverted.spec, p);
        const double meas = qp.weight * jac * std::sqrt(std::fabs(mv.det)) * az;
        const double pv = phit(p);
        if (f <= f_cut && pv != 0.0)
            c_interior[static_cast<std::size_t>(k)] =
                std::pow(f, rep.p - 2.0) * pv * pv * meas;
        const double src = box_scalar(ctx_inverted.spec, phit, p);
        c_source[static_cast<std::size_t>(k)] = src * src * meas;
    }
    double interior = 0.0, source = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        interior += c_interior[k];
        source += c_source[k];
    }

    UCReport out;
    out.interior = interior;
    out.lambdas = lambdas;
    for (const double lam : lambdas) out.bounds.push_back(source / (lam * lam * lam));
    if (lambdas.size() >= 2 && source > 0.0)
        out.fitted_exponent = loglog_fit(out.lambdas, out.bounds).slope;
    if (interior > 0.0 && !out.bounds.empty() && out.bounds.front() > 0.0) {
        out.c_fitted = interior / out.bounds.front();
        for (std::size_t i = 1; i < out.bounds.size(); ++i)
            if (interior > out.c_fitted * out.bounds[i] * (1.0 + 1e-9))
                out.absorption_failed = true;
    }
    return out;
}

}  // namespace carlemanlab
