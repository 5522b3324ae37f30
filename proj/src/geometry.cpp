#include "carlemanlab/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace carlemanlab {

namespace {

// Christoffels from a metric value, its inverse, and first partials.
Christoffels christoffel_from_partials(int dim, const MatN<double>& ginv,
                                       const std::array<MatN<double>, kMaxDim>& dg) {
    Christoffels gamma;
    for (int a = 0; a < dim; ++a) gamma[static_cast<std::size_t>(a)] = MatN<double>(dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            for (int c = b; c < dim; ++c) {
                double s = 0.0;
                for (int d = 0; d < dim; ++d)
                    s += ginv(a, d) *
                         (dg[static_cast<std::size_t>(b)](d, c) + dg[static_cast<std::size_t>(c)](d, b) -
                          dg[static_cast<std::size_t>(d)](b, c));
                gamma[static_cast<std::size_t>(a)](b, c) = 0.5 * s;
                gamma[static_cast<std::size_t>(a)](c, b) = 0.5 * s;
            }
    return gamma;
}

}  // namespace

MetricJets metric_jets(const MetricSpec& spec, const Point& p) {
    MetricJets mj;
    mj.dim = p.dim;
    const MatN<Jet2> gj = metric_components_jet(spec, p);
    mj.g = MatN<double>(p.dim);
    for (int e = 0; e < p.dim; ++e) {
        mj.dg[static_cast<std::size_t>(e)] = MatN<double>(p.dim);
        for (int f = 0; f < p.dim; ++f)
            mj.d2g[static_cast<std::size_t>(e)][static_cast<std::size_t>(f)] = MatN<double>(p.dim);
    }
    for (int a = 0; a < p.dim; ++a)
        for (int b = 0; b < p.dim; ++b) {
            const Jet2& c = gj(a, b);
            mj.g(a, b) = c.v;
            for (int e = 0; e < p.dim; ++e) {
                mj.dg[static_cast<std::size_t>(e)](a, b) = c.g[static_cast<std::size_t>(e)];
                for (int f = 0; f < p.dim; ++f)
                    mj.d2g[static_cast<std::size_t>(e)][static_cast<std::size_t>(f)](a, b) = c.hess(e, f);
            }
        }
    return mj;
}

MetricValue eval_metric(const MetricSpec& spec, const Point& p) {
    const MetricJets mj = metric_jets(spec, p);
    MetricValue mv;
    mv.dim = p.dim;
    mv.g = mj.g;
    mv.ginv = inverse(mj.g);
    mv.det = determinant(mj.g);
    mv.gamma = christoffel_from_partials(p.dim, mv.ginv, mj.dg);
    return mv;
}

Christoffels christoffel_fd_oracle(const MetricSpec& spec, const Point& p, double step) {
    const int dim = p.dim;

    // 4th-order central first partials of the components at one step size.
    auto partials_at = [&](double h) {
        std::array<MatN<double>, kMaxDim> dg;
        for (int e = 0; e < dim; ++e) {
            Point pp = p, pm = p, pp2 = p, pm2 = p;
            pp.x[static_cast<std::size_t>(e)] += h;
            pm.x[static_cast<std::size_t>(e)] -= h;
            pp2.x[static_cast<std::size_t>(e)] += 2.0 * h;
            pm2.x[static_cast<std::size_t>(e)] -= 2.0 * h;
            const MatN<double> g1 = metric_components(spec, pp);
            const MatN<double> g2 = metric_components(spec, pm);
            const MatN<double> g3 = metric_components(spec, pp2);
            const MatN<double> g4 = metric_components(spec, pm2);
            MatN<double> d(dim);
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b)
                    d(a, b) = (8.0 * (g1(a, b) - g2(a, b)) - (g3(a, b) - g4(a, b))) / (12.0 * h);
            dg[static_cast<std::size_t>(e)] = d;
        }
        return dg;
    };

    // One Richardson level on the 4th-order stencil: D = (16 D(h/2) - D(h))/15.
    const auto dh = partials_at(step);
    const auto dh2 = partials_at(0.5 * step);
    std::array<MatN<double>, kMaxDim> dg;
    for (int e = 0; e < dim; ++e) {
        MatN<double> d(dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                d(a, b) = (16.0 * dh2[static_cast<std::size_t>(e)](a, b) -
                           dh[static_cast<std::size_t>(e)](a, b)) /
                          15.0;
        dg[static_cast<std::size_t>(e)] = d;
    }

    const MatN<double> g = metric_components(spec, p);
    return christoffel_from_partials(dim, inverse(g), dg);
}

MatN<double> hessian_scalar(const MetricSpec& spec, const ScalarField& phi, const Point& p) {
    const MetricValue mv = eval_metric(spec, p);
    const Jet2 f = phi.jet(p);
    MatN<double> h(p.dim);
    for (int a = 0; a < p.dim; ++a)
        for (int b = 0; b < p.dim; ++b) {
            double s = f.hess(a, b);
            for (int c = 0; c < p.dim; ++c)
                s -= mv.gamma[static_cast<std::size_t>(c)](a, b) * f.g[static_cast<std::size_t>(c)];
            h(a, b) = s;
        }
    return h;
}

double box_scalar(const MetricSpec& spec, const ScalarField& phi, const Point& p) {
    const MetricValue mv = eval_metric(spec, p);
    const MatN<double> h = hessian_scalar(spec, phi, p);
    double s = 0.0;
    for (int a = 0; a < p.dim; ++a)
        for (int b = 0; b < p.dim; ++b) s += mv.ginv(a, b) * h(a, b);
    return s;
}

namespace {

// Ricci scalar from Christoffels supplied at displaced points (FD route) or
// from exact dGamma (closed route).  Shared contraction:
double ricci_scalar_from(int dim, const MatN<double>& ginv, const Christoffels& gamma,
                         const std::array<Christoffels, kMaxDim>& dgamma) {
    // R_bd = d_a Gamma^a_db - d_d Gamma^a_ab + Gamma^a_ae Gamma^e_db
    //        - Gamma^a_de Gamma^e_ab
    MatN<double> ric(dim);
    for (int b = 0; b < dim; ++b)
        for (int d = 0; d < dim; ++d) {
            double s = 0.0;
            for (int a = 0; a < dim; ++a) {
                s += dgamma[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)](d, b);
                s -= dgamma[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)](a, b);
                for (int e = 0; e < dim; ++e) {
                    s += gamma[static_cast<std::size_t>(a)](a, e) * gamma[static_cast<std::size_t>(e)](d, b);
                    s -= gamma[static_cast<std::size_t>(a)](d, e) * gamma[static_cast<std::size_t>(e)](a, b);
                }
            }
            ric(b, d) = s;
        }
    double r = 0.0;
    for (int b = 0; b < dim; ++b)
        for (int d = 0; d < dim; ++d) r += ginv(b, d) * ric(b, d);
    return r;
}

}  // namespace

double scalar_curvature(const MetricSpec& spec, const Point& p, double step) {
    const int dim = p.dim;
    const MetricValue mv = eval_metric(spec, p);

    auto dgamma_at = [&](double h) {
        // dgamma[e][a](b,c) = d_e Gamma^a_bc by 4th-order central differences
        // of the closed-form Christoffels.
        std::array<Christoffels, kMaxDim> dgam;
        for (int e = 0; e < dim; ++e) {
            Point pp = p, pm = p, pp2 = p, pm2 = p;
            pp.x[static_cast<std::size_t>(e)] += h;
            pm.x[static_cast<std::size_t>(e)] -= h;
            pp2.x[static_cast<std::size_t>(e)] += 2.0 * h;
            pm2.x[static_cast<std::size_t>(e)] -= 2.0 * h;
            const Christoffels g1 = eval_metric(spec, pp).gamma;
            const Christoffels g2 = eval_metric(spec, pm).gamma;
            const Christoffels g3 = eval_metric(spec, pp2).gamma;
            const Christoffels g4 = eval_metric(spec, pm2).gamma;
            for (int a = 0; a < dim; ++a) {
                MatN<double> d(dim);
                for (int b = 0; b < dim; ++b)
                    for (int c = 0; c < dim; ++c)
                        d(b, c) = (8.0 * (g1[static_cast<std::size_t>(a)](b, c) -
                                          g2[static_cast<std::size_t>(a)](b, c)) -
                                   (g3[static_cast<std::size_t>(a)](b, c) -
                                    g4[static_cast<std::size_t>(a)](b, c))) /
                                  (12.0 * h);
                dgam[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)] = d;
            }
        }
        return dgam;
    };

    const auto dh = dgamma_at(step);
    const auto dh2 = dgamma_at(0.5 * step);
    std::array<Christoffels, kMaxDim> dgam;
    for (int e = 0; e < dim; ++e)
        for (int a = 0; a < dim; ++a) {
            MatN<double> d(dim);
            for (int b = 0; b < dim; ++b)
                for (int c = 0; c < dim; ++c)
                    d(b, c) = (16.0 * dh2[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)](b, c) -
                               dh[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)](b, c)) /
                              15.0;
            dgam[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)] = d;
        }

    return ricci_scalar_from(dim, mv.ginv, mv.gamma, dgam);
}

double scalar_curvature_closed(const MetricSpec& spec, const Point& p) {
    const int dim = p.dim;
    const MetricJets mj = metric_jets(spec, p);
    const MatN<double> ginv = inverse(mj.g);
    const Christoffels gamma = christoffel_from_partials(dim, ginv, mj.dg);

    // d_e Gamma^a_bc = 1/2 d_e g^ad (d_b g_dc + d_c g_db - d_d g_bc)
    //                + 1/2 g^ad (d_e d_b g_dc + d_e d_c g_db - d_e d_d g_bc),
    // with d_e g^ad = -g^ap (d_e g_pq) g^qd.
    std::array<MatN<double>, kMaxDim> dginv;
    for (int e = 0; e < dim; ++e) {
        MatN<double> d(dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) {
                double s = 0.0;
                for (int pq = 0; pq < dim; ++pq)
                    for (int q = 0; q < dim; ++q)
                        s -= ginv(a, pq) * mj.dg[static_cast<std::size_t>(e)](pq, q) * ginv(q, b);
                d(a, b) = s;
            }
        dginv[static_cast<std::size_t>(e)] = d;
    }

    std::array<Christoffels, kMaxDim> dgam;
    for (int e = 0; e < dim; ++e)
        for (int a = 0; a < dim; ++a) {
            MatN<double> d(dim);
            for (int b = 0; b < dim; ++b)
                for (int c = 0; c < dim; ++c) {
                    double s = 0.0;
                    for (int dd = 0; dd < dim; ++dd) {
                        const double sym = mj.dg[static_cast<std::size_t>(b)](dd, c) +
                                           mj.dg[static_cast<std::size_t>(c)](dd, b) -
                                           mj.dg[static_cast<std::size_t>(dd)](b, c);
                        const double dsym =
                            mj.d2g[static_cast<std::size_t>(e)][static_cast<std::size_t>(b)](dd, c) +
                            mj.d2g[static_cast<std::size_t>(e)][static_cast<std::size_t>(c)](dd, b) -
                            mj.d2g[static_cast<std::size_t>(e)][static_cast<std::size_t>(dd)](b, c);
                        s += dginv[static_cast<std::size_t>(e)](a, dd) * sym + ginv(a, dd) * dsym;
                    }
                    d(b, c) = 0.5 * s;
                }
            dgam[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)] = d;
        }

    return ricci_scalar_from(dim, ginv, gamma, dgam);
}

double metric_compatibility_residual(const MetricSpec& spec, const Point& p) {
    const int dim = p.dim;
    const MetricJets mj = metric_jets(spec, p);
    const MetricValue mv = eval_metric(spec, p);
    double worst = 0.0;
    for (int c = 0; c < dim; ++c)
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) {
                double s = mj.dg[static_cast<std::size_t>(c)](a, b);
                for (int d = 0; d < dim; ++d) {
                    s -= mv.gamma[static_cast<std::size_t>(d)](c, a) * mv.g(d, b);
                    s -= mv.gamma[static_cast<std::size_t>(d)](c, b) * mv.g(a, d);
                }
                worst = std::max(worst, std::fabs(s));
            }
    return worst;
}

VecN<double> gradient_raised(const MetricValue& mv, const Jet2& phi_jet) {
    VecN<double> v(mv.dim);
    for (int a = 0; a < mv.dim; ++a) {
        double s = 0.0;
        for (int b = 0; b < mv.dim; ++b) s += mv.ginv(a, b) * phi_jet.g[static_cast<std::size_t>(b)];
        v[a] = s;
    }
    return v;
}

double metric_inner(const MatN<double>& g, const VecN<double>& X, const VecN<double>& Y) {
    double s = 0.0;
    for (int a = 0; a < g.n; ++a)
        for (int b = 0; b < g.n; ++b) s += g(a, b) * X[a] * Y[b];
    return s;
}

bool point_in_domain(const MetricSpec& spec, const Point& p, std::string* why) {
    const double pole_margin = 0.1;  // rad, shared by all sphere charts
    auto fail = [&](const std::string& msg) {
        if (why != nullptr) *why = msg;
        return false;
    };

    double u = p.x[0];
    double v = p.x[1];
    if (spec.chart == Chart::InvertedZeroMass) {
        if (!(p.x[0] < 0.0 && p.x[1] > 0.0)) return fail("inverted chart requires U < 0 < V");
        u = spec.eps + 1.0 / p.x[0];
        v = 1.0 / p.x[1] - spec.eps;
    } else if (spec.chart == Chart::InvertedPositiveMass) {
        if (!(p.x[0] < 0.0 && p.x[1] > 0.0)) return fail("inverted chart requires U < 0 < V");
        u = 1.0 / p.x[0];
        v = 1.0 / p.x[1];
    }
    if (!(v - u > 0.0)) return fail("requires v - u > 0");

    // Polar-chart angles away from the poles: every chart uses y[0] in
    // (0, pi), and n = 4 also uses y[1] in (0, pi).
    const int n = spec.n;
    for (int a = 0; a < (n >= 4 ? 2 : (n >= 3 ? 1 : 0)); ++a) {
        const double th = p.x[static_cast<std::size_t>(2 + a)];
        if (!(th > pole_margin && th < M_PI - pole_margin))
            return fail("sphere chart angle within pole margin");
    }
    return true;
}

}  // namespace carlemanlab
