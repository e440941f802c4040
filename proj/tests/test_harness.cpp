#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ccdtvd/harness.hpp"

using namespace ccdtvd;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ccdtvd_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_SUITE("harness_cli") {

TEST_CASE("config file parsing") {
    const fs::path dir = scratch_dir("config");
    {
        std::ofstream f(dir / "run.cfg");
        f << "# comment\nexample = 3\ncells = 8\n\ndt_rule = m2   # trailing\nboundary_policy=stage\n";
    }
    RunConfig c;
    apply_settings(c, read_config_file(dir / "run.cfg"));
    CHECK(c.example == 3);
    CHECK(c.cells == std::vector<std::size_t>{8});
    CHECK(c.step_rule == StepRule::cells_squared);
    CHECK(c.boundary_policy == BoundaryPolicy::stage);
    CHECK_THROWS_AS(read_config_file(dir / "missing.cfg"), ConfigError);
    {
        std::ofstream f(dir / "bad.cfg");
        f << "example 3\n";
    }
    CHECK_THROWS_AS(read_config_file(dir / "bad.cfg"), ConfigError);
}

TEST_CASE("invalid settings name the offending field") {
    RunConfig c;
    auto field_of = [&c](const std::string& k, const std::string& v) {
        try {
            apply_setting(c, k, v);
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    CHECK(field_of("example", "5") == "example");
    CHECK(field_of("dt", "-1") == "dt");
    CHECK(field_of("dt_rule", "cfl") == "dt_rule");
    CHECK(field_of("variant", "exact") == "variant");
    CHECK(field_of("boundary_policy", "none") == "boundary_policy");
    CHECK(field_of("inv_re", "abc") == "inv_re");
    CHECK(field_of("colour", "red") == "colour");
    CHECK(field_of("reproducible", "maybe") == "reproducible");
}

TEST_CASE("resolution and step rule resolution") {
    RunConfig c;
    c.example = 3;
    ResolvedRun r = resolve(c);
    CHECK(r.resolution.cells[0] == 8);
    CHECK(r.steps.count == 64);
    CHECK(r.step_rule == StepRule::cells_squared);

    c.example = 2;
    apply_setting(c, "cells", "8,16");
    r = resolve(c);
    CHECK(r.resolution.cells[0] == 8);
    CHECK(r.resolution.cells[1] == 16);
    CHECK(r.steps.dt == doctest::Approx(1.0 / 256));  // h_min = 1/16

    apply_setting(c, "cells", "8,16,32");
    CHECK_THROWS_AS(resolve(c), ConfigError);
    apply_setting(c, "cells", "3");
    CHECK_THROWS_AS(resolve(c), ConfigError);

    RunConfig e1;
    apply_setting(e1, "dt", "0.3");
    CHECK_THROWS_AS(resolve(e1), ConfigError);
    e1 = RunConfig{};
    CHECK(resolve(e1).steps.count == 100000);
}

TEST_CASE("zero final time reports zero error") {
    RunConfig c;
    c.example = 2;
    c.final_time = 0.0;
    const SolveResult r = solve(c);
    CHECK(r.run.steps.count == 0);
    for (double e : r.errors) CHECK(e == 0.0);
}

TEST_CASE("convergence rates are base-2 logarithms of error ratios") {
    RunConfig c;
    c.example = 3;
    c.cells_list = {4, 8, 16};
    const ConvergenceReport rep = converge(c);
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.dyadic);
    CHECK(rep.rows[0].rates.empty());
    for (std::size_t i = 1; i < 3; ++i) {
        for (std::size_t comp = 0; comp < 2; ++comp) {
            REQUIRE(rep.rows[i].rates[comp].has_value());
            CHECK(*rep.rows[i].rates[comp] ==
                  doctest::Approx(std::log2(rep.rows[i - 1].errors[comp] / rep.rows[i].errors[comp])));
        }
    }
    const std::string csv = convergence_csv(rep);
    CHECK(csv.rfind("cells,h,e_u,rate_u,e_v,rate_v\n", 0) == 0);

    c.cells_list = {4, 6};
    const ConvergenceReport odd = converge(c);
    CHECK_FALSE(odd.dyadic);
    CHECK_FALSE(odd.notice.empty());
    CHECK(odd.rows[1].rates.empty());

    c.cells_list = {8, 4};
    CHECK_THROWS_AS(converge(c), ConfigError);
}

TEST_CASE("reproducible artifacts are byte-identical") {
    RunConfig c;
    c.example = 3;
    c.reproducible = true;
    const SolveResult a = solve(c), b = solve(c);
    CHECK(solve_summary_csv(a) == solve_summary_csv(b));
    CHECK(run_manifest_json(c, a) == run_manifest_json(c, b));

    const auto j = nlohmann::json::parse(run_manifest_json(c, a));
    CHECK(j["wall_seconds"].is_null());
    CHECK(j["dt_rule"] == "m2");
    CHECK(j["steps"] == 64);
    CHECK(j["oracle_check"]["verified"] == true);
    CHECK(j["example4_variant"] == "residual-corrected");
    CHECK(j["boundary_policy"] == "step");
}

TEST_CASE("solve summary rows") {
    RunConfig c;
    c.example = 3;
    const std::string csv = solve_summary_csv(solve(c));
    CHECK(csv.rfind("quantity,value\ne_u_inf,", 0) == 0);
    CHECK(csv.find("e_v_inf,") != std::string::npos);
    CHECK(csv.find("\"u(0.125,0.125,0.1)\",") != std::string::npos);
}

TEST_CASE("grid dump round trip") {
    RunConfig c;
    c.example = 3;
    const SolveResult r = solve(c);
    const TensorGrid grid(r.run.example.spec, r.run.resolution);
    const fs::path path = scratch_dir("dump") / "fields.bin";
    write_grid_dump(path, r.state, grid);

    std::ifstream in(path, std::ios::binary);
    auto get = [&in](auto& v) { in.read(reinterpret_cast<char*>(&v), sizeof v); };
    std::uint32_t dim = 0, ncomp = 0;
    get(dim);
    get(ncomp);
    CHECK(dim == 2);
    CHECK(ncomp == 2);
    std::uint64_t nodes[2];
    get(nodes[0]);
    get(nodes[1]);
    CHECK(nodes[0] == 9);
    CHECK(nodes[1] == 9);
    double h[2], t = 0.0;
    get(h[0]);
    get(h[1]);
    get(t);
    CHECK(h[0] == 0.0625);
    CHECK(t == doctest::Approx(0.1));
    for (std::size_t comp = 0; comp < 2; ++comp)
        for (std::size_t n = 0; n < 81; ++n) {
            double v = 0.0;
            get(v);
            CHECK(v == r.state.components[comp][n]);
        }
    CHECK(in.peek() == std::char_traits<char>::eof());
}

TEST_CASE("reference table loads") {
    const auto rows = load_table1_reference(default_table1_reference());
    REQUIRE(rows.size() == 12);
    CHECK(rows[0].x == 0.25);
    CHECK(rows[0].t == 0.4);
    CHECK(rows[0].exact == 0.308893);
    CHECK(rows[11].tvcf == 0.287474);
    CHECK_THROWS(load_table1_reference("/nonexistent/table.csv"));
}

TEST_CASE("derive output") {
    const std::string csv = derive_csv("poly3", 8, 0.0, 1.0);
    CHECK(csv.rfind("x,u,du,d2u,du_exact,d2u_exact\n", 0) == 0);
    std::size_t lines = 0;
    for (char ch : csv) lines += ch == '\n';
    CHECK(lines == 10);
    CHECK_THROWS_AS(derive_csv("tan", 8, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(derive_csv("sin", 3, 0.0, 1.0), ConfigError);
    CHECK(format_number(0.5) == "5.00000e-01");
}

}
