// Run configuration: flat key = value text with [section] headers, overridden
// by CARLEMANLAB_-prefixed environment variables and then by CLI flags.
//
// Keys are flattened to "section.key".  The environment override for
// "carleman.omega_prime" is CARLEMANLAB_CARLEMAN_OMEGA_PRIME.  Precedence:
// file < environment < command line.

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "carlemanlab/carleman.hpp"
#include "carlemanlab/foliation.hpp"
#include "carlemanlab/metric.hpp"

namespace carlemanlab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string>;

// Parse "[section]\nkey = value" text; '#' and ';' start comments.  Throws
// ConfigError on malformed lines or duplicate keys.
KeyValues parse_config_text(const std::string& text);
KeyValues parse_config_file(const std::string& path);

// Apply CARLEMANLAB_SECTION_KEY environment overrides to kv.
void apply_env_overrides(KeyValues& kv);

// Comma-separated list of reals ("20,40,80,160").
std::vector<double> parse_number_list(const std::string& text);

// ---------------------------------------------------------------------------
// Typed configuration consumed by the commands.
// ---------------------------------------------------------------------------
struct RunConfig {
    // [background]
    std::string background = "minkowski";  // minkowski | perturbed-minkowski |
                                           // schwarzschild | positive-mass | kerr
    int n = 3;                             // spatial dimension
    double mass = 1.0;
    double spin = 0.0;
    double delta = 0.0;
    double rbase = 4.0;
    double eps = 1.0;  // zero-mass foliation offset

    // [mode]
    std::string mode = "zero-mass";  // zero-mass | positive-mass

    // [reparam]
    int reparam_kind = 1;
    double p = 0.1;
    double q = 2.0 / 3.0;

    // [grid] rectangular (u, v) sweep window with fixed angles; the default
    // covers the inverted chart U < 0 < V away from the f = 0 edge
    SweepGrid grid{.u0 = -0.5, .u1 = -0.05, .v0 = 0.05, .v1 = 0.5, .nu = 12, .nv = 12};
    bool grid_set = false;  // true when the config provided any [grid] key

    // [carleman] quadrature domain + collar bump support; defaults match the
    // flat zero-mass sweep with the first reparametrization
    QuadratureDomain quad{.tau = 1e-3, .omega_prime = 1e-2, .s_lo = -4.1, .s_hi = 4.1,
                          .nf = 40, .ns = 8, .nang = 4, .pole_margin = 0.1,
                          .f_concentrate = 4e-3, .f_min_cell = 2e-7};
    double f1 = 4e-3, f2 = 9e-3;  // bump support in f
    double s1 = -4.0, s2 = 4.0;   // bump support in s = u + v
    double a_cos = 0.0;

    // [run]
    std::vector<double> lambdas{20.0, 40.0, 80.0, 160.0};
    std::string out_dir = "reports";
    long long seed = 0;
    double fd_step = 1e-4;  // geometry-check oracle step

    // [tolerances]
    std::map<std::string, double> tolerances;

    double tolerance(const std::string& key, double fallback) const;

    // Derived catalog objects.  Throw ConfigError on unresolved names.
    MetricSpec metric_spec() const;
    FoliationContext foliation(Chart chart) const;
    FoliationMode foliation_mode() const;
};

// Build a RunConfig from flattened key-values; unknown keys throw
// ConfigError so typos fail loudly.
RunConfig make_run_config(const KeyValues& kv);

}  // namespace carlemanlab
