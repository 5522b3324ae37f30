#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "carlemanlab/commands.hpp"
#include "carlemanlab/config.hpp"
#include "carlemanlab/report.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace carlemanlab;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string temp_dir(const std::string& leaf) {
    const auto dir = std::filesystem::temp_directory_path() / "carlemanlab_test" / leaf;
    std::filesystem::remove_all(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("config text parses sections, comments and flattened keys") {
    const KeyValues kv = parse_config_text("# preamble comment\n"
                                           "[background]\n"
                                           "name = schwarzschild  ; inline comment\n"
                                           "mass = 0.5\n"
                                           "\n"
                                           "[run]\n"
                                           "seed = 42\n");
    CHECK(kv.at("background.name") == "schwarzschild");
    CHECK(kv.at("background.mass") == "0.5");
    CHECK(kv.at("run.seed") == "42");
    CHECK(kv.size() == 3);

    CHECK_THROWS_AS(parse_config_text("[run]\nno_equals_here\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[run\nseed = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[run]\nseed = 1\nseed = 2\n"), ConfigError);
    CHECK_THROWS_WITH(parse_config_text("a = 1\nb\n"),
                      doctest::Contains("line 2"));
}

TEST_CASE("typed config rejects unknown keys and bad values") {
    KeyValues kv = parse_config_text("[background]\n"
                                     "name = positive-mass\n"
                                     "mass = 2.0\n"
                                     "[mode]\n"
                                     "name = positive-mass\n"
                                     "[run]\n"
                                     "lambdas = 10, 20, 40\n"
                                     "seed = 9\n"
                                     "[tolerances]\n"
                                     "christoffel = 1e-7\n");
    const RunConfig cfg = make_run_config(kv);
    CHECK(cfg.background == "positive-mass");
    CHECK(cfg.mass == 2.0);
    CHECK(cfg.seed == 9);
    CHECK(cfg.lambdas == std::vector<double>{10.0, 20.0, 40.0});
    CHECK(cfg.tolerance("christoffel", 1e-6) == 1e-7);
    CHECK(cfg.tolerance("absent", 0.25) == 0.25);
    CHECK_FALSE(cfg.grid_set);
    CHECK(cfg.metric_spec().family == Family::PositiveMass);
    CHECK(cfg.foliation_mode() == FoliationMode::PositiveMass);

    CHECK_THROWS_AS(make_run_config(parse_config_text("[run]\nsped = 1\n")), ConfigError);
    CHECK_THROWS_AS(make_run_config(parse_config_text("[background]\nname = frw\n")), ConfigError);
    CHECK_THROWS_AS(make_run_config(parse_config_text("[background]\nmass = fast\n")), ConfigError);
    CHECK_THROWS_AS(make_run_config(parse_config_text("[reparam]\nkind = 3\n")), ConfigError);
    CHECK_THROWS_AS(make_run_config(parse_config_text("[tolerances]\norder = -0.1\n")), ConfigError);
}

TEST_CASE("environment variables override file values and any grid key marks the grid") {
    KeyValues kv = parse_config_text("[run]\nseed = 1\n");
    REQUIRE(setenv("CARLEMANLAB_RUN_SEED", "7", 1) == 0);
    REQUIRE(setenv("CARLEMANLAB_GRID_NU", "6", 1) == 0);
    apply_env_overrides(kv);
    unsetenv("CARLEMANLAB_RUN_SEED");
    unsetenv("CARLEMANLAB_GRID_NU");
    CHECK(kv.at("run.seed") == "7");
    CHECK(kv.at("grid.nu") == "6");
    const RunConfig cfg = make_run_config(kv);
    CHECK(cfg.seed == 7);
    CHECK(cfg.grid.nu == 6);
    CHECK(cfg.grid_set);
}

TEST_CASE("reals render with twelve significant digits and stable specials") {
    CHECK(format_real(0.0) == "0.00000000000e+00");
    CHECK(format_real(-1.0 / 3.0) == "-3.33333333333e-01");
    CHECK(format_real(6.02214076e23) == "6.02214076000e+23");
    CHECK(format_real(std::nan("")) == "nan");
    CHECK(format_real(1.0 / 0.0) == "inf");
    CHECK(format_real(-1.0 / 0.0) == "-inf");
}

TEST_CASE("JSON output keeps insertion order and round-trips through a parser") {
    JsonObject inner;
    inner.set("value", 0.5).set("pass", true);
    JsonObject o;
    o.set("zebra", 1);
    o.set("alpha", "line\nbreak \"quoted\"");
    o.set("nested", inner);
    o.set("list", std::vector<double>{1.0, 2.5});
    const std::string text = o.dump();

    // Insertion order, not alphabetical.
    CHECK(text.find("zebra") < text.find("alpha"));

    const nlohmann::json j = nlohmann::json::parse(text);
    CHECK(j["zebra"] == 1);
    CHECK(j["alpha"] == "line\nbreak \"quoted\"");
    CHECK(j["nested"]["value"] == 0.5);
    CHECK(j["nested"]["pass"] == true);
    CHECK(j["list"].size() == 2);
    CHECK(j["list"][1] == 2.5);
}

TEST_CASE("CSV tables enforce the header width") {
    CsvTable t({"a", "b"});
    t.add_row({"1", CsvTable::cell(2.0)});
    CHECK_THROWS_AS(t.add_row({"only-one"}), std::invalid_argument);
    const std::string text = t.dump();
    CHECK(text.find("a,b\n") == 0);
    CHECK(text.find("1,2.00000000000e+00") != std::string::npos);
}

TEST_CASE("atomic writes land the final file and leave no temporary behind") {
    const std::string dir = temp_dir("atomic");
    const std::string path = dir + "/sub/report.json";
    write_file_atomic(path, "payload\n");
    CHECK(read_file(path) == "payload\n");
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
}

TEST_CASE("identical config and seed produce byte-identical reports") {
    RunConfig cfg = make_run_config(parse_config_text("[run]\nseed = 3\n"));
    cfg.out_dir = temp_dir("det_a");
    REQUIRE(cmd_pseudoconvexity(cfg) == 0);
    RunConfig cfg2 = cfg;
    cfg2.out_dir = temp_dir("det_b");
    REQUIRE(cmd_pseudoconvexity(cfg2) == 0);
    for (const char* f : {"pseudoconvexity.json", "pseudoconvexity.csv", "pseudoconvexity.dat"})
        CHECK(read_file(cfg.out_dir + "/" + std::string(f)) ==
              read_file(cfg2.out_dir + "/" + std::string(f)));
}

TEST_CASE("geometry check flags a too-coarse oracle step near the horizon") {
    // Small mass brings the tortoise smoothing scale 2m down to the stencil
    // width, so a 1e-2 step fails the oracle while the default step passes.
    const std::string base = "[background]\n"
                             "name = schwarzschild\n"
                             "mass = 0.01\n"
                             "[grid]\n"
                             "u0 = 2.00\nu1 = 2.04\nv0 = -2.06\nv1 = -2.02\n"
                             "[run]\nseed = 5\n";
    RunConfig ok = make_run_config(parse_config_text(base));
    ok.out_dir = temp_dir("geom_ok");
    CHECK(cmd_geometry_check(ok) == 0);

    RunConfig coarse = make_run_config(parse_config_text(base + "fd_step = 1e-2\n"));
    coarse.out_dir = temp_dir("geom_coarse");
    CHECK(cmd_geometry_check(coarse) == 1);
    const nlohmann::json j =
        nlohmann::json::parse(read_file(coarse.out_dir + "/geometry_check.json"));
    CHECK_FALSE(j["pass"].get<bool>());
    CHECK(j["diagnostic"].get<std::string>().find("StepTooLarge") == 0);
}
