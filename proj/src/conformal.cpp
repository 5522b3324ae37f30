#include "carlemanlab/conformal.hpp"

#include <cmath>
#include <stdexcept>

namespace carlemanlab {

ConformalMap invert_metric(const MetricSpec& physical, FoliationMode mode, double eps) {
    if (physical.chart != Chart::Physical)
        throw std::runtime_error("invert_metric: source must be in the physical chart");
    ConformalMap map;
    map.source = physical;
    map.mode = mode;
    map.eps = eps;
    map.target = physical;
    map.target.chart =
        mode == FoliationMode::ZeroMass ? Chart::InvertedZeroMass : Chart::InvertedPositiveMass;
    map.target.eps = eps;
    return map;
}

MetricSpec carleman_scaled(const MetricSpec& physical, FoliationMode mode, double eps) {
    if (physical.chart != Chart::Physical)
        throw std::runtime_error("carleman_scaled: source must be in the physical chart");
    MetricSpec s = physical;
    s.chart = Chart::CarlemanScaled;
    s.eps = mode == FoliationMode::ZeroMass ? eps : 0.0;
    return s;
}

void uv_inversion(FoliationMode mode, double eps, double u, double v, double* U, double* V) {
    if (mode == FoliationMode::ZeroMass) {
        *U = -1.0 / (-u + eps);
        *V = 1.0 / (v + eps);
    } else {
        *U = 1.0 / u;
        *V = 1.0 / v;
    }
}

void uv_inversion_back(FoliationMode mode, double eps, double U, double V, double* u, double* v) {
    if (mode == FoliationMode::ZeroMass) {
        *u = eps + 1.0 / U;
        *v = 1.0 / V - eps;
    } else {
        *u = 1.0 / U;
        *v = 1.0 / V;
    }
}

Point map_to_target(const ConformalMap& map, const Point& physical_pt) {
    Point q = physical_pt;
    uv_inversion(map.mode, map.eps, physical_pt.x[0], physical_pt.x[1], &q.x[0], &q.x[1]);
    return q;
}

Point map_to_source(const ConformalMap& map, const Point& target_pt) {
    Point q = target_pt;
    uv_inversion_back(map.mode, map.eps, target_pt.x[0], target_pt.x[1], &q.x[0], &q.x[1]);
    return q;
}

ScalarField conformal_omega2(const MetricSpec& target) {
    const int dim = target.n + 1;
    MetricSpec phys = target;
    phys.chart = Chart::Physical;

    switch (target.chart) {
        case Chart::Sharp:
            return ScalarField::from(dim, [phys](const auto& x) {
                using T = std::decay_t<decltype(x[0])>;
                const MatN<T> g = metric_components(phys, x);
                return T(-2) / g(0, 1);
            });
        case Chart::PenroseScaled:
            return ScalarField::from(dim, [](const auto& x) {
                using T = std::decay_t<decltype(x[0])>;
                return T(1) / ((T(1) + x[0] * x[0]) * (T(1) + x[1] * x[1]));
            });
        case Chart::CarlemanScaled: {
            const bool has_mass =
                target.family == Family::Schwarzschild || target.family == Family::PositiveMass;
            const double eps = has_mass ? 0.0 : target.eps;
            return ScalarField::from(dim, [phys, has_mass, eps](const auto& x) {
                using T = std::decay_t<decltype(x[0])>;
                const T f = T(1) / ((-x[0] + eps) * (x[1] + eps));
                T om2 = f * f;
                if (has_mass) {
                    const MatN<T> g = metric_components(phys, x);
                    om2 = om2 * (T(-2) / g(0, 1));
                }
                return om2;
            });
        }
        default:
            throw std::runtime_error("conformal_omega2: target is not a same-chart scaling");
    }
}

double hessian_transform_residual(const MetricSpec& base, const MetricSpec& target,
                                  const ScalarField& phi, const Point& p) {
    const int dim = p.dim;
    const ScalarField om2 = conformal_omega2(target);
    const Jet2 oj = om2.jet(p);
    const Jet2 fj = phi.jet(p);
    const MetricValue mv = eval_metric(base, p);

    // d log Omega = (1/2) d log Omega^2.
    std::array<double, kMaxDim> dlo{};
    for (int a = 0; a < dim; ++a) dlo[static_cast<std::size_t>(a)] = 0.5 * oj.g[static_cast<std::size_t>(a)] / oj.v;

    double cross = 0.0;  // g^{cd} d_c log Omega d_d phi
    for (int c = 0; c < dim; ++c)
        for (int d = 0; d < dim; ++d)
            cross += mv.ginv(c, d) * dlo[static_cast<std::size_t>(c)] * fj.g[static_cast<std::size_t>(d)];

    const MatN<double> hb = hessian_scalar(base, phi, p);
    const MatN<double> ht = hessian_scalar(target, phi, p);
    double worst = 0.0;
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            const double law = hb(a, b) - dlo[static_cast<std::size_t>(a)] * fj.g[static_cast<std::size_t>(b)] -
                               dlo[static_cast<std::size_t>(b)] * fj.g[static_cast<std::size_t>(a)] +
                               cross * mv.g(a, b);
            worst = std::max(worst, std::fabs(ht(a, b) - law));
        }
    return worst;
}

double conformal_laplacian(const MetricSpec& spec, const ScalarField& phi, const Point& p,
                           double fd_step) {
    const int n = spec.n;
    const double r = scalar_curvature(spec, p, fd_step);
    return box_scalar(spec, phi, p) - (double(n - 1) / (4.0 * n)) * r * phi(p);
}

namespace {

// phi-bar = Omega^-(n-1)/2 phi = (Omega^2)^-(n-1)/4 phi, with closed jets.
ScalarField conformal_weighted(const MetricSpec& target, const ScalarField& phi, int n) {
    const ScalarField om2 = conformal_omega2(target);
    const double expo = -0.25 * (n - 1);
    return ScalarField::from(phi.dim, [om2, phi, expo](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        using std::pow;
        T o, f;
        if constexpr (std::is_same_v<T, double>) {
            o = om2.fd(x);
            f = phi.fd(x);
        } else {
            o = om2.fj(x);
            f = phi.fj(x);
        }
        return pow(o, expo) * f;
    });
}

}  // namespace

double conformal_laplacian_transport_residual(const MetricSpec& base, const MetricSpec& target,
                                              const ScalarField& phi, const Point& p,
                                              double fd_step) {
    const int n = base.n;
    const ScalarField phibar = conformal_weighted(target, phi, n);
    const double om2 = conformal_omega2(target)(p);
    const double lhs = conformal_laplacian(target, phibar, p, fd_step);
    const double rhs = std::pow(om2, -0.25 * (n + 3)) * conformal_laplacian(base, phi, p, fd_step);
    return std::fabs(lhs - rhs);
}

double yamabe_residual(const MetricSpec& base, const MetricSpec& target, const Point& p,
                       double fd_step) {
    const int n = base.n;
    const ScalarField om2 = conformal_omega2(target);
    const ScalarField omega = ScalarField::from(om2.dim, [om2](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        using std::sqrt;
        if constexpr (std::is_same_v<T, double>) return sqrt(om2.fd(x));
        else return sqrt(om2.fj(x));
    });

    const double rg = scalar_curvature(base, p, fd_step);
    const double rt = scalar_curvature(target, p, fd_step);
    const double ov = omega(p);
    const double lhs = rg / (ov * ov) - rt;

    const MetricValue mv = eval_metric(base, p);
    const Jet2 oj = omega.jet(p);
    double grad2 = 0.0;
    for (int a = 0; a < p.dim; ++a)
        for (int b = 0; b < p.dim; ++b)
            grad2 += mv.ginv(a, b) * oj.g[static_cast<std::size_t>(a)] * oj.g[static_cast<std::size_t>(b)];
    const double rhs = 2.0 * n * box_scalar(base, omega, p) / (ov * ov * ov) +
                       double(n) * (n - 3) * grad2 / (ov * ov * ov * ov);
    return std::fabs(lhs - rhs);
}

std::array<ScalarField, kMaxDim> transport_a(const MetricSpec& base, const MetricSpec& target,
                                             const OperatorCoefficients& coeffs) {
    (void)base;
    const ScalarField om2 = conformal_omega2(target);
    std::array<ScalarField, kMaxDim> abar;
    for (int al = 0; al < coeffs.dim; ++al) {
        const ScalarField& a = coeffs.a[static_cast<std::size_t>(al)];
        abar[static_cast<std::size_t>(al)] = ScalarField::from(coeffs.dim, [om2, a](const auto& x) {
            using T = std::decay_t<decltype(x[0])>;
            if constexpr (std::is_same_v<T, double>) return a.fd(x) / om2.fd(x);
            else return a.fj(x) / om2.fj(x);
        });
    }
    return abar;
}

double transport_V(const MetricSpec& base, const MetricSpec& target,
                   const OperatorCoefficients& coeffs, const Point& p, double fd_step) {
    const int n = base.n;
    const ScalarField om2f = conformal_omega2(target);
    const Jet2 oj = om2f.jet(p);
    const double om2 = oj.v;

    double adom = 0.0;  // a^alpha d_alpha (Omega^2)
    for (int al = 0; al < p.dim; ++al)
        adom += coeffs.a[static_cast<std::size_t>(al)](p) * oj.g[static_cast<std::size_t>(al)];

    const double rg = scalar_curvature(base, p, fd_step);
    const double rt = scalar_curvature(target, p, fd_step);

    return coeffs.V(p) / om2 + 0.25 * (n - 1) * adom / (om2 * om2) +
           (double(n - 1) / (4.0 * n)) * (rg / om2 - rt);
}

double apply_operator(const MetricSpec& spec, const OperatorCoefficients& coeffs,
                      const ScalarField& phi, const Point& p) {
    const Jet2 fj = phi.jet(p);
    double s = box_scalar(spec, phi, p);
    for (int al = 0; al < p.dim; ++al)
        s += coeffs.a[static_cast<std::size_t>(al)](p) * fj.g[static_cast<std::size_t>(al)];
    return s + coeffs.V(p) * fj.v;
}

double operator_transport_residual(const MetricSpec& base, const MetricSpec& target,
                                   const OperatorCoefficients& coeffs, const ScalarField& phi,
                                   const Point& p, double fd_step) {
    const int n = base.n;
    const ScalarField phibar = conformal_weighted(target, phi, n);
    const std::array<ScalarField, kMaxDim> abar = transport_a(base, target, coeffs);
    const double vbar = transport_V(base, target, coeffs, p, fd_step);

    const Jet2 pj = phibar.jet(p);
    double lbar = box_scalar(target, phibar, p);
    for (int al = 0; al < p.dim; ++al)
        lbar += abar[static_cast<std::size_t>(al)](p) * pj.g[static_cast<std::size_t>(al)];
    lbar += vbar * pj.v;

    const double om2 = conformal_omega2(target)(p);
    const double lhs = apply_operator(base, coeffs, phi, p);
    return std::fabs(lhs - std::pow(om2, 0.25 * (n + 3)) * lbar);
}

MassGapFit mass_gap_bounds(double mass, double rbase, double r_lo, double r_hi, int count) {
    if (count < 2 || !(r_lo > 2.0 * mass) || !(r_hi > r_lo))
        throw std::runtime_error("mass_gap_bounds: bad sampling window");
    MassGapFit out;
    out.samples = count;
    std::vector<double> rs, gap;
    rs.reserve(static_cast<std::size_t>(count));
    gap.reserve(static_cast<std::size_t>(count));
    const double ratio = std::pow(r_hi / r_lo, 1.0 / (count - 1));
    double c_low = -1e300, c_up = -1e300;
    for (int i = 0; i < count; ++i) {
        const double r = r_lo * std::pow(ratio, i);
        const double g = tortoise_of_r(r, mass, rbase) - r;
        rs.push_back(r);
        gap.push_back(g);
        c_low = std::max(c_low, 2.0 * mass * std::log(r) - g);
        if (std::log(r) > 0.0) c_up = std::max(c_up, g / std::log(r));
    }
    std::vector<double> lr(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) lr[i] = std::log(rs[i]);
    const LineFit f = line_fit(lr, gap);
    out.coeff_log = f.slope;
    out.c_lower = c_low;
    out.c_upper = c_up;
    return out;
}

}  // namespace carlemanlab
