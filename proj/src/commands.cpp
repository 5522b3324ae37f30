#include "carlemanlab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "carlemanlab/carleman.hpp"
#include "carlemanlab/geometry.hpp"
#include "carlemanlab/kerr.hpp"
#include "carlemanlab/report.hpp"

namespace carlemanlab {

namespace {

std::string out_path(const RunConfig& cfg, const std::string& file) {
    return cfg.out_dir + "/" + file;
}

JsonObject run_header(const RunConfig& cfg, const std::string& command) {
    JsonObject o;
    o.set("command", command);
    o.set("background", cfg.background);
    o.set("mode", cfg.mode);
    o.set("seed", cfg.seed);
    return o;
}

// Deterministic sample points inside the background's valid chart window.
std::vector<Point> sample_points(const RunConfig& cfg, int count) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point> pts;
    const MetricSpec spec = cfg.metric_spec();
    // Default window sits in the physical chart well away from r = 2m; a
    // configured [grid] section overrides it (e.g. to probe near the horizon).
    double u_lo = -6.0, u_hi = -3.0, v_lo = 3.0, v_hi = 6.0;
    if (cfg.grid_set) {
        u_lo = cfg.grid.u0;
        u_hi = cfg.grid.u1;
        v_lo = cfg.grid.v0;
        v_hi = cfg.grid.v1;
    }
    for (int i = 0; i < count; ++i) {
        double u = u_lo + (u_hi - u_lo) * unit(rng);
        double v = v_lo + (v_hi - v_lo) * unit(rng);
        double y1 = 0.4 + 2.2 * unit(rng);
        double y2 = spec.n >= 3 ? 6.28 * unit(rng) : 0.0;
        pts.push_back(make_point(spec.n, u, v, y1, y2));
    }
    return pts;
}

double christoffel_discrepancy(const MetricSpec& spec, const Point& p, double step) {
    const MetricValue mv = eval_metric(spec, p);
    const Christoffels fd = christoffel_fd_oracle(spec, p, step);
    double num = 0.0, scale = 1.0;
    for (int a = 0; a < p.dim; ++a)
        for (int b = 0; b < p.dim; ++b)
            for (int c = 0; c < p.dim; ++c) {
                num = std::max(num, std::fabs(mv.gamma[static_cast<std::size_t>(a)](b, c) -
                                              fd[static_cast<std::size_t>(a)](b, c)));
                scale = std::max(scale, std::fabs(mv.gamma[static_cast<std::size_t>(a)](b, c)));
            }
    return num / scale;
}

}  // namespace

int cmd_geometry_check(const RunConfig& cfg) {
    const MetricSpec spec = cfg.metric_spec();
    const double tol = cfg.tolerance("christoffel", 1e-6);
    const std::vector<Point> pts = sample_points(cfg, 24);

    double max_gamma = 0.0, max_compat = 0.0, max_curv = 0.0;
    CsvTable csv({"u", "v", "y1", "y2", "christoffel_rel", "compatibility", "curvature_diff"});
    std::vector<std::pair<double, double>> plot;
    for (const Point& p : pts) {
        const double dg = christoffel_discrepancy(spec, p, cfg.fd_step);
        const double dc = metric_compatibility_residual(spec, p);
        const double dr =
            std::fabs(scalar_curvature(spec, p, cfg.fd_step) - scalar_curvature_closed(spec, p));
        max_gamma = std::max(max_gamma, dg);
        max_compat = std::max(max_compat, dc);
        max_curv = std::max(max_curv, dr);
        csv.add_row({CsvTable::cell(p.x[0]), CsvTable::cell(p.x[1]), CsvTable::cell(p.x[2]),
                     CsvTable::cell(p.x[3]), CsvTable::cell(dg), CsvTable::cell(dc),
                     CsvTable::cell(dr)});
        plot.emplace_back(p.x[1] - p.x[0], dg);
    }
    std::sort(plot.begin(), plot.end());

    const bool pass = max_gamma <= tol && max_compat <= tol;
    JsonObject o = run_header(cfg, "geometry-check");
    o.set("fd_step", cfg.fd_step);
    o.set("tolerance", tol);
    o.set("max_christoffel_discrepancy", max_gamma);
    o.set("max_compatibility_residual", max_compat);
    o.set("max_curvature_difference", max_curv);
    o.set("points", static_cast<int>(pts.size()));
    if (!pass && cfg.fd_step >= 1e-3)
        o.set("diagnostic", "StepTooLarge: finite-difference step too coarse for the oracle "
                            "tolerance; reduce run.fd_step");
    if (spec.family == Family::KerrNull && spec.spin == 0.0)
        o.set("note", "spin a = 0: reduces to Schwarzschild");
    o.set("pass", pass);

    write_file_atomic(out_path(cfg, "geometry_check.json"), o.dump());
    write_file_atomic(out_path(cfg, "geometry_check.csv"), csv.dump());
    write_plot_data(out_path(cfg, "geometry_check.dat"), plot);
    std::printf("geometry-check %s  max christoffel discrepancy %s\n", pass ? "PASS" : "FAIL",
                format_real(max_gamma).c_str());
    return pass ? 0 : 1;
}

int cmd_pseudoconvexity(const RunConfig& cfg) {
    const Chart chart = cfg.foliation_mode() == FoliationMode::ZeroMass
                            ? Chart::InvertedZeroMass
                            : Chart::InvertedPositiveMass;
    const FoliationContext ctx = cfg.foliation(chart);
    const std::vector<SweepRecord> records = pseudoconvexity_sweep(ctx, cfg.grid);
    const PsiGapResult gap = psi_gap_check(ctx, cfg.grid);

    double min_eig = records.empty() ? 0.0 : records.front().min_tangential_eigenvalue;
    double max_offdiag = 0.0;
    CsvTable csv({"U", "V", "y1", "f", "psi", "min_tangential_eigenvalue", "max_offdiag", "ratio"});
    std::vector<std::pair<double, double>> plot;
    for (const SweepRecord& r : records) {
        min_eig = std::min(min_eig, r.min_tangential_eigenvalue);
        max_offdiag = std::max(max_offdiag, r.max_offdiag);
        csv.add_row({CsvTable::cell(r.p.x[0]), CsvTable::cell(r.p.x[1]), CsvTable::cell(r.p.x[2]),
                     CsvTable::cell(r.f), CsvTable::cell(r.psi),
                     CsvTable::cell(r.min_tangential_eigenvalue), CsvTable::cell(r.max_offdiag),
                     CsvTable::cell(r.ratio)});
        plot.emplace_back(r.f, r.min_tangential_eigenvalue);
    }
    std::sort(plot.begin(), plot.end());

    const double min_ratio_tol = cfg.tolerance("min_ratio", 1e-6);
    const bool pass = min_eig > 0.0 && gap.min_ratio >= min_ratio_tol;
    JsonObject o = run_header(cfg, "pseudoconvexity");
    o.set("grid_points", static_cast<int>(records.size()));
    o.set("min_tangential_eigenvalue", min_eig);
    o.set("max_offdiag", max_offdiag);
    o.set("min_ratio", gap.min_ratio);
    o.set("max_ratio", gap.max_ratio);
    o.set("min_ratio_tolerance", min_ratio_tol);
    o.set("pass", pass);

    write_file_atomic(out_path(cfg, "pseudoconvexity.json"), o.dump());
    write_file_atomic(out_path(cfg, "pseudoconvexity.csv"), csv.dump());
    write_plot_data(out_path(cfg, "pseudoconvexity.dat"), plot);
    std::printf("pseudoconvexity %s  min tangential eigenvalue %s  min ratio %s\n",
                pass ? "PASS" : "FAIL", format_real(min_eig).c_str(),
                format_real(gap.min_ratio).c_str());
    return pass ? 0 : 1;
}

int cmd_carleman(const RunConfig& cfg) {
    const Chart chart = cfg.foliation_mode() == FoliationMode::ZeroMass
                            ? Chart::InvertedZeroMass
                            : Chart::InvertedPositiveMass;
    const FoliationContext ctx = cfg.foliation(chart);
    ReparamSpec rep;
    rep.kind = cfg.reparam_kind;
    rep.p = cfg.p;
    rep.q = cfg.q;
    const ScalarField phi = collar_test_function(ctx, cfg.f1, cfg.f2, cfg.s1, cfg.s2, cfg.a_cos);
    const CarlemanSweep sweep = integral_carleman_check(ctx, rep, phi, cfg.lambdas, cfg.quad);

    CsvTable csv({"lambda", "log_lhs", "log_rhs_normal", "log_rhs_tangential", "log_rhs_zero",
                  "log_ratio", "refine_disagreement", "underresolved"});
    std::vector<std::pair<double, double>> plot;
    std::vector<JsonObject> per_lambda;
    bool resolved = true;
    for (const CarlemanReport& r : sweep.reports) {
        csv.add_row({CsvTable::cell(r.lambda), CsvTable::cell(r.log_lhs),
                     CsvTable::cell(r.log_rhs_normal), CsvTable::cell(r.log_rhs_tangential),
                     CsvTable::cell(r.log_rhs_zero), CsvTable::cell(r.log_ratio),
                     CsvTable::cell(r.refine_disagreement), CsvTable::cell(int(r.underresolved))});
        plot.emplace_back(r.lambda, std::exp(r.log_ratio));
        resolved = resolved && !r.underresolved;
        JsonObject e;
        e.set("lambda", r.lambda);
        e.set("log_lhs", r.log_lhs);
        e.set("log_rhs_normal", r.log_rhs_normal);
        e.set("log_rhs_tangential", r.log_rhs_tangential);
        e.set("log_rhs_zero", r.log_rhs_zero);
        e.set("ratio", std::exp(r.log_ratio));
        e.set("divergence_residual", r.divergence_residual);
        e.set("underresolved", r.underresolved);
        per_lambda.push_back(e);
    }

    const double exp_tol = cfg.tolerance("exponent", 0.1);
    const bool exponents_ok = std::fabs(sweep.exponent_normal - 1.0) <= exp_tol &&
                              std::fabs(sweep.exponent_tangential - 1.0) <= exp_tol &&
                              std::fabs(sweep.exponent_zero - 3.0) <= exp_tol;
    const bool pass = sweep.constant_uniform && exponents_ok && resolved;
    JsonObject o = run_header(cfg, "carleman");
    o.set("reparam_kind", cfg.reparam_kind);
    o.set("lambdas", cfg.lambdas);
    o.set("reports", per_lambda);
    o.set("exponent_normal", sweep.exponent_normal);
    o.set("exponent_tangential", sweep.exponent_tangential);
    o.set("exponent_zero", sweep.exponent_zero);
    o.set("c_fitted", sweep.c_fitted);
    o.set("min_ratio", sweep.min_ratio);
    o.set("constant_uniform", sweep.constant_uniform);
    o.set("resolved", resolved);
    o.set("pass", pass);

    write_file_atomic(out_path(cfg, "carleman.json"), o.dump());
    write_file_atomic(out_path(cfg, "carleman.csv"), csv.dump());
    write_plot_data(out_path(cfg, "carleman.dat"), plot);
    std::printf("carleman %s  exponents (%s, %s, %s)  uniform constant %s\n",
                pass ? "PASS" : "FAIL", format_real(sweep.exponent_normal).c_str(),
                format_real(sweep.exponent_tangential).c_str(),
                format_real(sweep.exponent_zero).c_str(), sweep.constant_uniform ? "yes" : "no");
    return pass ? 0 : 1;
}

int cmd_kerr_certificate(const RunConfig& cfg) {
    KerrParams kp;
    kp.m = cfg.mass;
    kp.a = cfg.spin;
    const KerrCertificate cert = kerr_certificate(kp);

    CsvTable csv({"component", "predicted_order", "fitted_order", "fitted_constant", "pass"});
    std::vector<JsonObject> entries;
    for (const CertificateEntry& e : cert.entries) {
        csv.add_row({e.component, CsvTable::cell(e.predicted_order), CsvTable::cell(e.fitted_order),
                     CsvTable::cell(e.fitted_constant), CsvTable::cell(int(e.pass))});
        JsonObject j;
        j.set("component", e.component);
        j.set("predicted_order", e.predicted_order);
        j.set("fitted_order", e.fitted_order);
        j.set("fitted_constant", e.fitted_constant);
        j.set("pass", e.pass);
        entries.push_back(j);
    }

    // Plot data: overall decay of the comoving-chart difference vs r0.
    std::vector<std::pair<double, double>> plot;
    for (int i = 0; i < 16; ++i) {
        const double r0 = 1e2 * std::pow(1e2, i / 15.0);
        const DeltaG d = kerr_minus_schwarzschild(kp, r0, 1.1);
        const double m = std::max({std::fabs(d.t0t0), std::fabs(d.t0phi0), std::fabs(d.phi0phi0),
                                   std::fabs(d.r0r0), std::fabs(d.r0theta0),
                                   std::fabs(d.theta0theta0)});
        plot.emplace_back(r0, m);
    }

    JsonObject o = run_header(cfg, "kerr-certificate");
    o.set("mass", kp.m);
    o.set("spin", kp.a);
    o.set("entries", entries);
    o.set("max_abs_delta", cert.max_abs_delta);
    o.set("identically_zero", cert.identically_zero);
    o.set("pass", cert.all_pass);

    write_file_atomic(out_path(cfg, "kerr_certificate.json"), o.dump());
    write_file_atomic(out_path(cfg, "kerr_certificate.csv"), csv.dump());
    write_plot_data(out_path(cfg, "kerr_certificate.dat"), plot);
    std::printf("kerr-certificate %s  m=%s a=%s%s\n", cert.all_pass ? "PASS" : "FAIL",
                format_real(kp.m).c_str(), format_real(kp.a).c_str(),
                cert.identically_zero ? "  (difference identically zero)" : "");
    return cert.all_pass ? 0 : 1;
}

int cmd_vanishing_orders(const RunConfig& cfg) {
    const double order_tol = cfg.tolerance("order", 0.1);
    const double box_tol = cfg.tolerance("box_residual", 1e-6);

    CsvTable csv({"N", "expected_order", "fitted_order", "box_residual", "pass"});
    std::vector<JsonObject> entries;
    std::vector<std::pair<double, double>> plot;
    bool pass = true;
    for (int N = 0; N <= 3; ++N) {
        const VanishingOrderFit fit = vanishing_order_fit(N);
        const double expected = N + 1.0;
        const bool ok = std::fabs(fit.order - expected) <= order_tol && fit.box_residual <= box_tol;
        pass = pass && ok;
        csv.add_row({CsvTable::cell(N), CsvTable::cell(expected), CsvTable::cell(fit.order),
                     CsvTable::cell(fit.box_residual), CsvTable::cell(int(ok))});
        plot.emplace_back(N, fit.order);
        JsonObject j;
        j.set("N", N);
        j.set("expected_order", expected);
        j.set("fitted_order", fit.order);
        j.set("box_residual", fit.box_residual);
        j.set("pass", ok);
        entries.push_back(j);
    }

    JsonObject o = run_header(cfg, "vanishing-orders");
    o.set("order_tolerance", order_tol);
    o.set("box_residual_tolerance", box_tol);
    o.set("entries", entries);
    o.set("pass", pass);

    write_file_atomic(out_path(cfg, "vanishing_orders.json"), o.dump());
    write_file_atomic(out_path(cfg, "vanishing_orders.csv"), csv.dump());
    write_plot_data(out_path(cfg, "vanishing_orders.dat"), plot);
    std::printf("vanishing-orders %s\n", pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}

}  // namespace carlemanlab
