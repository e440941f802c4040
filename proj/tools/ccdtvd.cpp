// ccdtvd: command-line front end for the CCD-TVD Burgers solver.
//
//   ccdtvd solve    --example 2 --cells 16
//   ccdtvd converge --example 3 --cells-list 4,8,16
//   ccdtvd table1
//   ccdtvd audit    --sizes 5-128 --spacings 1,0.1,0.01
//   ccdtvd derive   --function sin --cells 16

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ccdtvd/harness.hpp"
#include "ccdtvd/solvability_audit.hpp"

namespace fs = std::filesystem;
using namespace ccdtvd;

namespace {

struct CommonOptions {
    std::string config_file;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;
};

void add_run_options(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_file, "key = value configuration file");
    cmd->add_option("--set", o.sets, "override a setting, key=value (repeatable)");
    auto flag = [&](const std::string& name, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::string>(
            name, [&o, key](const std::string& v) { o.flags[key] = v; }, help);
    };
    flag("--example", "example", "example id 1-4");
    flag("--cells", "cells", "cells per axis (one value or one per axis, comma separated)");
    flag("--dt", "dt", "explicit time step");
    flag("--dt-rule", "dt_rule", "explicit | h2 | m2");
    flag("--final-time", "final_time", "final time");
    flag("--inv-re", "inv_re", "diffusion coefficient 1/Re");
    flag("--variant", "variant", "example 4 oracle: residual-corrected | as-printed");
    flag("--boundary-policy", "boundary_policy", "step | stage");
    flag("--out", "output_dir", "output directory");
    cmd->add_flag_function(
        "--reproducible", [&o](std::int64_t) { o.flags["reproducible"] = "true"; },
        "omit wall-clock timings from artifacts");
}

RunConfig build_config(const CommonOptions& o) {
    RunConfig c;
    if (!o.config_file.empty()) apply_settings(c, read_config_file(o.config_file));
    apply_settings(c, o.flags);
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("set", fmt::format("'{}' is not key=value", s));
        apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
    }
    return c;
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    out << text;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            out.push_back(std::stoul(item));
        } else {
            const auto lo = std::stoul(item.substr(0, dash));
            const auto hi = std::stoul(item.substr(dash + 1));
            for (auto m = lo; m <= hi; ++m) out.push_back(m);
        }
    }
    for (auto m : out)
        if (m < 4) throw ConfigError("sizes", "every size must be at least 4");
    if (out.empty()) throw ConfigError("sizes", "empty");
    return out;
}

std::vector<double> parse_spacings(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const double h = std::stod(item);
        if (!(h > 0.0)) throw ConfigError("spacings", "must be positive");
        out.push_back(h);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CCD-TVD solver for the viscous Burgers equations"};
    app.require_subcommand(1);

    CommonOptions solve_opts, conv_opts, t1_opts;
    std::string cells_list;
    std::string sizes = "5-128", spacings = "1,0.1,0.01", audit_out = ".";
    std::string function = "sin";
    std::size_t derive_cells = 16;
    double left = 0.0, right = 1.0;
    bool dump_grid = false;

    auto* solve_cmd = app.add_subcommand("solve", "run one example and compare with its oracle");
    add_run_options(solve_cmd, solve_opts);
    solve_cmd->add_flag("--dump-grid", dump_grid, "write the final fields as a raw binary grid");

    auto* conv_cmd = app.add_subcommand("converge", "grid-refinement study");
    add_run_options(conv_cmd, conv_opts);
    conv_cmd->add_option("--cells-list", cells_list, "comma separated cells per level, e.g. 4,8,16");

    auto* t1_cmd = app.add_subcommand("table1", "1D example at the twelve reference (x, t) points");
    add_run_options(t1_cmd, t1_opts);

    auto* audit_cmd = app.add_subcommand("audit", "solvability audit of the CCD matrix");
    audit_cmd->add_option("--sizes", sizes, "node counts, e.g. 5-128 or 5,10,20");
    audit_cmd->add_option("--spacings", spacings, "grid spacings, comma separated");
    audit_cmd->add_option("--out", audit_out, "output directory");

    auto* derive_cmd = app.add_subcommand("derive", "CCD derivatives of a sampled test function");
    derive_cmd->add_option("--function", function, "sin | exp | polyK");
    derive_cmd->add_option("--cells", derive_cells, "number of cells");
    derive_cmd->add_option("--left", left, "left end");
    derive_cmd->add_option("--right", right, "right end");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*solve_cmd) {
            RunConfig cfg = build_config(solve_opts);
            cfg.dump_grid = cfg.dump_grid || dump_grid;
            const SolveResult r = solve(cfg);
            if (r.run.stability.exceeds)
                std::cerr << "warning: " << r.run.stability.message << "\n";
            if (!r.oracle.verified)
                std::cerr << fmt::format("warning: oracle '{}' unverified (PDE residual {:.3e} > {:.1e})\n",
                                         r.run.example.oracle_name, r.oracle.max_residual,
                                         r.oracle.tolerance);
            const std::string summary = solve_summary_csv(r);
            write_file(cfg.output_dir / "solve_summary.csv", summary);
            write_file(cfg.output_dir / "manifest.json", run_manifest_json(cfg, r));
            if (cfg.dump_grid) {
                const TensorGrid grid(r.run.example.spec, r.run.resolution);
                write_grid_dump(cfg.output_dir / "fields.bin", r.state, grid);
            }
            std::cout << summary;
        } else if (*conv_cmd) {
            RunConfig cfg = build_config(conv_opts);
            if (!cells_list.empty()) apply_setting(cfg, "cells_list", cells_list);
            const ConvergenceReport rep = converge(cfg);
            if (!rep.notice.empty()) std::cerr << "notice: " << rep.notice << "\n";
            if (!rep.oracle_check.verified)
                std::cerr << fmt::format("warning: oracle '{}' unverified (PDE residual {:.3e})\n",
                                         rep.oracle, rep.oracle_check.max_residual);
            const std::string csv = convergence_csv(rep);
            write_file(cfg.output_dir / "convergence.csv", csv);
            write_file(cfg.output_dir / "convergence_manifest.json", convergence_manifest_json(cfg, rep));
            std::cout << csv;
        } else if (*t1_cmd) {
            RunConfig cfg = build_config(t1_opts);
            const Table1Result res = table1(cfg);
            const std::string csv = table1_csv(res);
            write_file(cfg.output_dir / "table1.csv", csv);
            std::cout << csv;
        } else if (*audit_cmd) {
            const AuditReport rep = run_audit(parse_sizes(sizes), parse_spacings(spacings));
            write_file(fs::path(audit_out) / "audit.json", audit_report_json(rep));
            std::size_t failures = 0;
            for (const auto& row : rep.sweep) failures += row.passed ? 0 : 1;
            std::cout << fmt::format("reduced matrix min dominance margin: {:.6e}\n",
                                     rep.reduction.min_margin);
            std::cout << fmt::format("sweep: {} cases, {} failures\n", rep.sweep.size(), failures);
            std::cout << (rep.passed ? "audit passed\n" : "audit FAILED\n");
            return rep.passed ? kExitOk : kExitAudit;
        } else if (*derive_cmd) {
            std::cout << derive_csv(function, derive_cells, left, right);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InstabilityError& e) {
        std::cerr << "instability: " << e.what() << "\n";
        return kExitInstability;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
