#include "carlemanlab/foliation.hpp"

#include <cmath>
#include <stdexcept>

namespace carlemanlab {

namespace {

bool inverted_chart(const MetricSpec& spec) {
    return spec.chart == Chart::InvertedZeroMass || spec.chart == Chart::InvertedPositiveMass;
}

// Physical (u, v) of a point in ctx.spec's chart.
void physical_uv(const FoliationContext& ctx, const Point& p, double* u, double* v) {
    if (ctx.spec.chart == Chart::InvertedZeroMass) {
        *u = ctx.spec.eps + 1.0 / p.x[0];
        *v = 1.0 / p.x[1] - ctx.spec.eps;
    } else if (ctx.spec.chart == Chart::InvertedPositiveMass) {
        *u = 1.0 / p.x[0];
        *v = 1.0 / p.x[1];
    } else {
        *u = p.x[0];
        *v = p.x[1];
    }
}

}  // namespace

ScalarField foliation_f(const FoliationContext& ctx) {
    const int dim = ctx.spec.n + 1;
    if (inverted_chart(ctx.spec)) {
        return ScalarField::from(dim, [](const auto& x) { return -x[0] * x[1]; });
    }
    const double eps = ctx.mode == FoliationMode::ZeroMass ? ctx.eps : 0.0;
    return ScalarField::from(dim, [eps](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        const T ut = -x[0] + eps;
        const T vt = x[1] + eps;
        return T(1) / (ut * vt);
    });
}

double eval_f(const FoliationContext& ctx, const Point& p) {
    return foliation_f(ctx).fd(p.x);
}

double radius_of(const FoliationContext& ctx, const Point& p) {
    double u, v;
    physical_uv(ctx, p, &u, &v);
    return v - u;
}

ReparamValue reparam_eval(int kind, double p, double q, double f) {
    if (!(f > 0.0)) throw std::runtime_error("reparam_eval: requires f > 0");
    ReparamValue r;
    if (kind == 1) {
        r.F = std::log(f) - std::pow(f, p);
        r.Fp = 1.0 / f - p * std::pow(f, p - 1.0);
        r.Fpp = -1.0 / (f * f) - p * (p - 1.0) * std::pow(f, p - 2.0);
        r.G = p * p * std::pow(f, p - 1.0);
    } else if (kind == 2) {
        r.F = -std::pow(f, -q);
        r.Fp = q * std::pow(f, -q - 1.0);
        r.Fpp = -q * (q + 1.0) * std::pow(f, -q - 2.0);
        r.G = q * q * std::pow(f, -q - 1.0);
    } else {
        throw std::runtime_error("reparam_eval: kind must be 1 or 2");
    }
    return r;
}

double weight_w(const FoliationContext& ctx, const Point& p) {
    const double r = radius_of(ctx, p);
    if (ctx.mode == FoliationMode::ZeroMass) return -0.5 * ctx.eps / r;
    return -0.5 * (ctx.mass_min / r) * std::log(r);
}

ScalarField weight_w_field(const FoliationContext& ctx) {
    const int dim = ctx.spec.n + 1;
    const double eps = ctx.eps;
    const double mmin = ctx.mass_min;
    const bool zero_mass = ctx.mode == FoliationMode::ZeroMass;
    const Chart chart = ctx.spec.chart;
    return ScalarField::from(dim, [=](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        using std::log;
        T u, v;
        if (chart == Chart::InvertedZeroMass) {
            u = eps + T(1) / x[0];
            v = T(1) / x[1] - eps;
        } else if (chart == Chart::InvertedPositiveMass) {
            u = T(1) / x[0];
            v = T(1) / x[1];
        } else {
            u = x[0];
            v = x[1];
        }
        const T r = v - u;
        if (zero_mass) return T(-0.5 * eps) / r;
        return -0.5 * mmin * log(r) / r;
    });
}

double psi_scale(const FoliationContext& ctx, const Point& p) {
    const double r = radius_of(ctx, p);
    if (ctx.mode == FoliationMode::ZeroMass) return ctx.eps / r;
    return (ctx.mass_min / r) * std::log(r);
}

double h_of_w(const FoliationContext& ctx, const Point& p) {
    const int n = ctx.spec.n;
    const double boxf = box_scalar(ctx.spec, foliation_f(ctx), p);
    return weight_w(ctx, p) - 0.25 * (n - 1) + 0.5 * boxf;
}

AdaptedFrame adapted_frame(const FoliationContext& ctx, const Point& p) {
    const int dim = ctx.spec.n + 1;
    const MetricValue mv = eval_metric(ctx.spec, p);
    const ScalarField f = foliation_f(ctx);
    const double fv = f(p);
    if (!(fv > 0.0)) throw std::runtime_error("adapted_frame: requires f > 0");

    // Seed vectors.
    std::array<VecN<double>, kMaxDim> seed;
    for (int i = 0; i < dim; ++i) seed[static_cast<std::size_t>(i)] = VecN<double>(dim);
    for (int a = 0; a < dim - 2; ++a) {
        const double gaa = mv.g(2 + a, 2 + a);
        seed[static_cast<std::size_t>(a)][2 + a] = 1.0 / std::sqrt(gaa);
    }
    if (inverted_chart(ctx.spec)) {
        const double U = p.x[0], V = p.x[1];
        const double c = 0.5 / std::sqrt(fv);
        seed[static_cast<std::size_t>(dim - 2)][0] = c * U;   // T
        seed[static_cast<std::size_t>(dim - 2)][1] = -c * V;
        seed[static_cast<std::size_t>(dim - 1)][0] = c * U;   // N
        seed[static_cast<std::size_t>(dim - 1)][1] = c * V;
    } else {
        double u, v;
        physical_uv(ctx, p, &u, &v);
        const double eps = ctx.mode == FoliationMode::ZeroMass ? ctx.eps : 0.0;
        const double ut = -u + eps, vt = v + eps;
        const double c = 0.5 * std::sqrt(fv);
        seed[static_cast<std::size_t>(dim - 2)][0] = c * ut;  // T
        seed[static_cast<std::size_t>(dim - 2)][1] = c * vt;
        seed[static_cast<std::size_t>(dim - 1)][0] = c * ut;  // N
        seed[static_cast<std::size_t>(dim - 1)][1] = -c * vt;
    }

    AdaptedFrame fr;
    fr.dim = dim;

    // Orthonormality defect of the raw seeds (diagnostic).
    double defect = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const double eta = i == j ? (i == dim - 2 ? -1.0 : 1.0) : 0.0;
            defect = std::max(defect, std::fabs(metric_inner(mv.g, seed[static_cast<std::size_t>(i)],
                                                             seed[static_cast<std::size_t>(j)]) -
                                                eta));
        }
    fr.gram_residual = defect;

    // Gram-Schmidt in order E_1 .. E_{n-1}, T, N.
    for (int i = 0; i < dim; ++i) {
        VecN<double> x = seed[static_cast<std::size_t>(i)];
        for (int j = 0; j < i; ++j) {
            const auto& ej = fr.e[static_cast<std::size_t>(j)];
            const double sigma = j == dim - 2 ? -1.0 : 1.0;
            const double proj = sigma * metric_inner(mv.g, x, ej);
            for (int k = 0; k < dim; ++k) x[k] -= proj * ej[k];
        }
        const double q = metric_inner(mv.g, x, x);
        const double want = i == dim - 2 ? -1.0 : 1.0;
        if (q * want <= 0.0)
            throw std::runtime_error("adapted_frame: causal character lost in Gram-Schmidt");
        const double norm = std::sqrt(std::fabs(q));
        for (int k = 0; k < dim; ++k) x[k] /= norm;
        fr.e[static_cast<std::size_t>(i)] = x;
    }

    // Tangency of E_A and T to the level sets of f.
    const Jet2 fj = f.jet(p);
    double tres = 0.0;
    for (int i = 0; i < dim - 1; ++i) {
        double s = 0.0;
        for (int k = 0; k < dim; ++k)
            s += fr.e[static_cast<std::size_t>(i)][k] * fj.g[static_cast<std::size_t>(k)];
        tres = std::max(tres, std::fabs(s));
    }
    fr.tangency_residual = tres;

    // Orient N outward: N f > 0.
    double nf = 0.0;
    for (int k = 0; k < dim; ++k)
        nf += fr.N()[k] * fj.g[static_cast<std::size_t>(k)];
    if (nf < 0.0)
        for (int k = 0; k < dim; ++k) fr.e[static_cast<std::size_t>(dim - 1)][k] *= -1.0;

    return fr;
}

PseudoconvexityResult pseudoconvexity_tensor(const FoliationContext& ctx, const Point& p,
                                             double h) {
    const int dim = ctx.spec.n + 1;
    const AdaptedFrame fr = adapted_frame(ctx, p);
    const MatN<double> hess = hessian_scalar(ctx.spec, foliation_f(ctx), p);

    PseudoconvexityResult res;
    res.pi_frame = MatN<double>(dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const double eta = i == j ? (i == dim - 2 ? -1.0 : 1.0) : 0.0;
            double hx = 0.0;
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b)
                    hx += hess(a, b) * fr.e[static_cast<std::size_t>(i)][a] *
                          fr.e[static_cast<std::size_t>(j)][b];
            res.pi_frame(i, j) = h * eta - hx;
        }

    MatN<double> tang(dim - 1);
    for (int i = 0; i < dim - 1; ++i)
        for (int j = 0; j < dim - 1; ++j) tang(i, j) = res.pi_frame(i, j);
    res.min_tangential_eigenvalue = symmetric_eigenvalues(tang)[0];

    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            if (i != j) res.max_offdiag = std::max(res.max_offdiag, std::fabs(res.pi_frame(i, j)));
    return res;
}

double pseudoconvexity_h(const FoliationContext& ctx, const Point& p) {
    const bool inverted = ctx.spec.chart == Chart::InvertedZeroMass ||
                          ctx.spec.chart == Chart::InvertedPositiveMass;
    if (ctx.mode == FoliationMode::ZeroMass) {
        const double r = radius_of(ctx, p);
        if (inverted) return 0.5 - 0.5 * ctx.eps / r;
        const double f = eval_f(ctx, p);
        return -0.5 * f * f - 0.5 * (ctx.eps / r) * f * f;
    }
    if (inverted) {
        const double rstar = radius_of(ctx, p);
        const double r = tortoise_radius(rstar, ctx.spec.mass, ctx.spec.rbase);
        return 0.5 - 0.25 * (rstar / r - 1.0) +
               0.375 * (2.0 * ctx.spec.mass / r) * (rstar / r);
    }
    return h_of_w(ctx, p);
}

namespace {

SweepRecord sweep_point(const FoliationContext& ctx, const Point& p) {
    SweepRecord rec;
    rec.p = p;
    rec.f = eval_f(ctx, p);
    rec.h = pseudoconvexity_h(ctx, p);
    rec.psi = psi_scale(ctx, p);
    const PseudoconvexityResult pi = pseudoconvexity_tensor(ctx, p, rec.h);
    rec.min_tangential_eigenvalue = pi.min_tangential_eigenvalue;
    rec.max_offdiag = pi.max_offdiag;
    // Natural scale of the tangential entries: Psi f^2 in the physical-chart
    // picture, Psi after the inversion.
    const bool inverted = ctx.spec.chart == Chart::InvertedZeroMass ||
                          ctx.spec.chart == Chart::InvertedPositiveMass;
    const double scale = inverted ? rec.psi : rec.psi * rec.f * rec.f;
    rec.ratio = rec.min_tangential_eigenvalue / scale;
    return rec;
}

std::vector<Point> sweep_points(const FoliationContext& ctx, const SweepGrid& grid) {
    const int n = ctx.spec.n;
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(grid.nu) * static_cast<std::size_t>(grid.nv));
    for (int i = 0; i < grid.nu; ++i)
        for (int j = 0; j < grid.nv; ++j) {
            const double u = grid.u0 + (grid.u1 - grid.u0) * (grid.nu == 1 ? 0.5 : double(i) / (grid.nu - 1));
            const double v = grid.v0 + (grid.v1 - grid.v0) * (grid.nv == 1 ? 0.5 : double(j) / (grid.nv - 1));
            pts.push_back(make_point(n, u, v, grid.y1, grid.y2, grid.y3));
        }
    return pts;
}

}  // namespace

std::vector<SweepRecord> pseudoconvexity_sweep(const FoliationContext& ctx, const SweepGrid& grid) {
    const std::vector<Point> pts = sweep_points(ctx, grid);
    std::vector<SweepRecord> out(pts.size());
    // Each record depends only on its own point, so a parallel fill is
    // bit-identical to the serial reference for any thread count.
    const std::int64_t count = static_cast<std::int64_t>(pts.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < count; ++k)
        out[static_cast<std::size_t>(k)] = sweep_point(ctx, pts[static_cast<std::size_t>(k)]);
    return out;
}

std::vector<SweepRecord> pseudoconvexity_sweep_serial(const FoliationContext& ctx,
                                                      const SweepGrid& grid) {
    const std::vector<Point> pts = sweep_points(ctx, grid);
    std::vector<SweepRecord> out(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) out[k] = sweep_point(ctx, pts[k]);
    return out;
}

PsiGapResult psi_gap_check(const FoliationContext& ctx, const SweepGrid& grid) {
    const std::vector<SweepRecord> recs = pseudoconvexity_sweep(ctx, grid);
    PsiGapResult res;
    res.count = static_cast<int>(recs.size());
    bool first = true;
    for (const auto& r : recs) {
        if (first) {
            res.min_ratio = res.max_ratio = r.ratio;
            first = false;
        } else {
            res.min_ratio = std::min(res.min_ratio, r.ratio);
            res.max_ratio = std::max(res.max_ratio, r.ratio);
        }
    }
    return res;
}

}  // namespace carlemanlab
