// Benchmark: OpenMP kernels vs their serial reference implementations.
//
// Times the pseudoconvexity grid sweep and the weighted-integral node
// evaluation in both modes, checks the results agree bitwise, and prints a
// small table.  Usage: bench_sweep [grid_n]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "carlemanlab/carleman.hpp"
#include "carlemanlab/foliation.hpp"

using namespace carlemanlab;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

FoliationContext flat_inverted() {
    FoliationContext ctx;
    ctx.mode = FoliationMode::ZeroMass;
    ctx.eps = 1.0;
    ctx.spec.family = Family::Minkowski;
    ctx.spec.n = 3;
    ctx.spec.eps = 1.0;
    ctx.spec.chart = Chart::InvertedZeroMass;
    return ctx;
}

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 48;
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif

    const FoliationContext ctx = flat_inverted();

    // --- pseudoconvexity sweep ---------------------------------------------
    SweepGrid grid;
    grid.u0 = -0.5;
    grid.u1 = -0.05;
    grid.v0 = 0.05;
    grid.v1 = 0.5;
    grid.nu = n;
    grid.nv = n;

    auto t0 = Clock::now();
    const std::vector<SweepRecord> par = pseudoconvexity_sweep(ctx, grid);
    const double t_par = seconds_since(t0);

    t0 = Clock::now();
    const std::vector<SweepRecord> ser = pseudoconvexity_sweep_serial(ctx, grid);
    const double t_ser = seconds_since(t0);

    bool identical = par.size() == ser.size();
    for (std::size_t i = 0; identical && i < par.size(); ++i)
        identical = par[i].min_tangential_eigenvalue == ser[i].min_tangential_eigenvalue &&
                    par[i].ratio == ser[i].ratio && par[i].max_offdiag == ser[i].max_offdiag;

    std::printf("pseudoconvexity sweep  %d x %d points\n", grid.nu, grid.nv);
    std::printf("  parallel: %8.3f s\n", t_par);
    std::printf("  serial:   %8.3f s   speedup %.2fx   results %s\n", t_ser,
                t_par > 0 ? t_ser / t_par : 0.0, identical ? "identical" : "DIFFER");

    // --- weighted integral node evaluation ---------------------------------
    ReparamSpec rep;  // kind 1, default p
    const ScalarField phi = collar_test_function(ctx, 4e-3, 9e-3, -4.0, 4.0, 0.0);
    QuadratureDomain dom;
    dom.tau = 1e-3;
    dom.omega_prime = 1e-2;
    dom.s_lo = -4.1;
    dom.s_hi = 4.1;
    dom.nf = 40;
    dom.ns = 8;
    dom.nang = 4;
    dom.f_concentrate = 4e-3;
    dom.f_min_cell = 2e-7;
    const std::vector<double> lambdas{20.0, 40.0};

    t0 = Clock::now();
    const CarlemanSweep sw_par = integral_carleman_check(ctx, rep, phi, lambdas, dom, false);
    const double q_par = seconds_since(t0);

    t0 = Clock::now();
    const CarlemanSweep sw_ser = integral_carleman_check(ctx, rep, phi, lambdas, dom, true);
    const double q_ser = seconds_since(t0);

    bool q_identical = sw_par.reports.size() == sw_ser.reports.size();
    for (std::size_t i = 0; q_identical && i < sw_par.reports.size(); ++i)
        q_identical = sw_par.reports[i].log_lhs == sw_ser.reports[i].log_lhs &&
                      sw_par.reports[i].log_ratio == sw_ser.reports[i].log_ratio;

    std::printf("weighted integral check  %d x %d x %d cells, %zu lambdas\n", dom.nf, dom.ns,
                dom.nang, lambdas.size());
    std::printf("  parallel: %8.3f s\n", q_par);
    std::printf("  serial:   %8.3f s   speedup %.2fx   results %s\n", q_ser,
                q_par > 0 ? q_ser / q_par : 0.0, q_identical ? "identical" : "DIFFER");

    return (identical && q_identical) ? 0 : 1;
}
