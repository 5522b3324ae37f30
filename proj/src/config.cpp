#include "carlemanlab/config.hpp"

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

extern char** environ;

namespace carlemanlab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
    std::size_t pos = line.find_first_of("#;");
    return pos == std::string::npos ? line : line.substr(0, pos);
}

double to_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + value + "'");
    }
}

long long to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not an integer: '" + value + "'");
    }
}

}  // namespace

KeyValues parse_config_text(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        if (kv.count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

KeyValues parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void apply_env_overrides(KeyValues& kv) {
    const std::string prefix = "CARLEMANLAB_";
    for (char** e = environ; e && *e; ++e) {
        std::string entry(*e);
        if (entry.compare(0, prefix.size(), prefix) != 0) continue;
        std::size_t eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string name = entry.substr(prefix.size(), eq - prefix.size());
        std::string value = entry.substr(eq + 1);
        // SECTION_KEY -> section.key; the first underscore separates the
        // section, the rest belong to the key (keys may contain '_').
        std::size_t us = name.find('_');
        if (us == std::string::npos || us == 0 || us + 1 >= name.size()) continue;
        std::string key = name.substr(0, us) + "." + name.substr(us + 1);
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        kv[key] = value;
    }
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(to_real("<list>", item));
    }
    if (out.empty()) throw ConfigError("empty number list: '" + text + "'");
    return out;
}

double RunConfig::tolerance(const std::string& key, double fallback) const {
    auto it = tolerances.find(key);
    return it == tolerances.end() ? fallback : it->second;
}

MetricSpec RunConfig::metric_spec() const {
    MetricSpec spec;
    if (background == "minkowski") spec.family = Family::Minkowski;
    else if (background == "perturbed-minkowski") spec.family = Family::PerturbedMinkowski;
    else if (background == "schwarzschild") spec.family = Family::Schwarzschild;
    else if (background == "positive-mass") spec.family = Family::PositiveMass;
    else if (background == "kerr" || background == "kerr-null") spec.family = Family::KerrNull;
    else throw ConfigError("unknown background: '" + background + "'");
    spec.n = n;
    spec.mass = mass;
    spec.spin = spin;
    spec.delta = delta;
    spec.rbase = rbase;
    spec.eps = eps;
    spec.chart = Chart::Physical;
    return spec;
}

FoliationMode RunConfig::foliation_mode() const {
    if (mode == "zero-mass") return FoliationMode::ZeroMass;
    if (mode == "positive-mass") return FoliationMode::PositiveMass;
    throw ConfigError("unknown mode: '" + mode + "' (expected zero-mass or positive-mass)");
}

FoliationContext RunConfig::foliation(Chart chart) const {
    FoliationContext ctx;
    ctx.mode = foliation_mode();
    ctx.eps = eps;
    ctx.mass_min = mass;
    ctx.spec = metric_spec();
    ctx.spec.chart = chart;
    return ctx;
}

RunConfig make_run_config(const KeyValues& kv) {
    RunConfig cfg;
    for (const auto& [key, value] : kv) {
        auto real = [&] { return to_real(key, value); };
        auto integer = [&] { return static_cast<int>(to_int(key, value)); };
        if (key == "background.name") cfg.background = value;
        else if (key == "background.n") cfg.n = integer();
        else if (key == "background.mass") cfg.mass = real();
        else if (key == "background.spin") cfg.spin = real();
        else if (key == "background.delta") cfg.delta = real();
        else if (key == "background.rbase") cfg.rbase = real();
        else if (key == "background.eps") cfg.eps = real();
        else if (key == "mode.name") cfg.mode = value;
        else if (key == "reparam.kind") cfg.reparam_kind = integer();
        else if (key == "reparam.p") cfg.p = real();
        else if (key == "reparam.q") cfg.q = real();
        else if (key == "grid.u0") cfg.grid.u0 = real();
        else if (key == "grid.u1") cfg.grid.u1 = real();
        else if (key == "grid.v0") cfg.grid.v0 = real();
        else if (key == "grid.v1") cfg.grid.v1 = real();
        else if (key == "grid.nu") cfg.grid.nu = integer();
        else if (key == "grid.nv") cfg.grid.nv = integer();
        else if (key == "grid.y1") cfg.grid.y1 = real();
        else if (key == "grid.y2") cfg.grid.y2 = real();
        else if (key == "grid.y3") cfg.grid.y3 = real();
        else if (key == "carleman.tau") cfg.quad.tau = real();
        else if (key == "carleman.omega_prime") cfg.quad.omega_prime = real();
        else if (key == "carleman.s_lo") cfg.quad.s_lo = real();
        else if (key == "carleman.s_hi") cfg.quad.s_hi = real();
        else if (key == "carleman.nf") cfg.quad.nf = integer();
        else if (key == "carleman.ns") cfg.quad.ns = integer();
        else if (key == "carleman.nang") cfg.quad.nang = integer();
        else if (key == "carleman.pole_margin") cfg.quad.pole_margin = real();
        else if (key == "carleman.f_concentrate") cfg.quad.f_concentrate = real();
        else if (key == "carleman.f_min_cell") cfg.quad.f_min_cell = real();
        else if (key == "carleman.f1") cfg.f1 = real();
        else if (key == "carleman.f2") cfg.f2 = real();
        else if (key == "carleman.s1") cfg.s1 = real();
        else if (key == "carleman.s2") cfg.s2 = real();
        else if (key == "carleman.a_cos") cfg.a_cos = real();
        else if (key == "run.lambdas") cfg.lambdas = parse_number_list(value);
        else if (key == "run.out_dir") cfg.out_dir = value;
        else if (key == "run.seed") cfg.seed = to_int(key, value);
        else if (key == "run.fd_step") cfg.fd_step = real();
        else if (key.rfind("tolerances.", 0) == 0)
            cfg.tolerances[key.substr(std::string("tolerances.").size())] = real();
        else throw ConfigError("unknown config key: '" + key + "'");
        if (key.rfind("grid.", 0) == 0) cfg.grid_set = true;
    }
    for (const auto& [k, v] : cfg.tolerances)
        if (v <= 0.0) throw ConfigError("tolerance '" + k + "' must be positive");
    if (cfg.reparam_kind != 1 && cfg.reparam_kind != 2)
        throw ConfigError("reparam.kind must be 1 or 2");
    // Resolve catalog names eagerly so bad configs fail before any work runs.
    (void)cfg.metric_spec();
    (void)cfg.foliation_mode();
    return cfg;
}

}  // namespace carlemanlab
