#pragma once

// Configuration, drivers and artifact writers behind the `ccdtvd` command line.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccdtvd/burgers.hpp"
#include "ccdtvd/exact_solutions.hpp"

namespace ccdtvd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInstability = 3;
inline constexpr int kExitAudit = 4;

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct RunConfig {
    int example = 1;
    std::vector<std::size_t> cells;       // one per axis, or a single value for all axes
    std::vector<std::size_t> cells_list;  // refinement study, one value per level
    std::optional<StepRule> step_rule;    // example default when unset
    std::optional<double> dt;
    std::optional<double> final_time;
    std::optional<double> inv_re;
    Example4Variant variant = Example4Variant::residual_corrected;
    BoundaryPolicy boundary_policy = BoundaryPolicy::step;
    std::filesystem::path output_dir = ".";
    bool reproducible = false;
    bool dump_grid = false;
};

/// Flat `key = value` lines; '#' starts a comment. Throws ConfigError.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Keys: example, cells, cells_list, dt_rule, dt, final_time, inv_re, variant,
/// boundary_policy, output_dir, reproducible, dump_grid.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
void apply_settings(RunConfig& config, const std::map<std::string, std::string>& settings);

std::string to_string(Example4Variant variant);
std::string to_string(BoundaryPolicy policy);

struct ResolvedRun {
    ExampleCase example;
    Resolution resolution;
    StepRule step_rule = StepRule::fixed_dt;
    TimeSteps steps;
    StabilityCheck stability;
};

/// Applies example defaults; `cells` overrides the configured resolution.
ResolvedRun resolve(const RunConfig& config, std::optional<std::size_t> cells = std::nullopt);

struct SolveResult {
    ResolvedRun run;
    FieldSet state;
    std::vector<double> errors;  // empty when the example has no exact solution
    OracleCheck oracle;
    double wall_seconds = 0.0;
};

/// Throws InstabilityError, ConfigError.
SolveResult solve(const RunConfig& config);

/// quantity,value rows: per-component max errors and nodal probe values.
std::string solve_summary_csv(const SolveResult& result);
std::string run_manifest_json(const RunConfig& config, const SolveResult& result);

/// Header: uint32 dimension, uint32 components, uint64 nodes per axis, double
/// spacing per axis, double time; then each component's float64 values, x fastest.
void write_grid_dump(const std::filesystem::path& path, const FieldSet& state,
                     const TensorGrid& grid);

struct ConvergenceRow {
    std::size_t cells = 0;
    double h = 0.0;
    TimeSteps steps;
    std::vector<double> errors;
    std::vector<std::optional<double>> rates;  // log2(e(2h) / e(h)); empty on the first row
};

struct ConvergenceReport {
    int example = 0;
    std::string step_rule;
    std::string oracle;
    OracleCheck oracle_check;
    std::vector<ConvergenceRow> rows;
    bool dyadic = true;
    std::string notice;
    double wall_seconds = 0.0;
};

ConvergenceReport converge(const RunConfig& config);
std::string convergence_csv(const ConvergenceReport& report);
std::string convergence_manifest_json(const RunConfig& config, const ConvergenceReport& report);

struct Table1Reference {
    double x = 0.0, t = 0.0;
    double hc = 0.0, rhc = 0.0, rpa = 0.0, tvcf = 0.0;
    double ccd_tvd = 0.0, exact = 0.0;  // previously published values
};

std::filesystem::path default_table1_reference();
std::vector<Table1Reference> load_table1_reference(const std::filesystem::path& path);

struct Table1Row {
    Table1Reference reference;
    double computed = 0.0;
    double series = 0.0;
};

struct Table1Result {
    ResolvedRun run;
    std::vector<Table1Row> rows;
    double wall_seconds = 0.0;
};

/// Runs the 1D example once and samples it at every reference (x, t).
Table1Result table1(const RunConfig& config,
                    const std::filesystem::path& reference = default_table1_reference());
std::string table1_csv(const Table1Result& result);

/// CCD derivatives of a named test function on [left, right] with `cells` cells.
/// Functions: sin (sin 2 pi x), exp, polyK (x^K).
std::string derive_csv(const std::string& function, std::size_t cells, double left, double right);

/// Formats as %.5e.
std::string format_number(double value);

}  // namespace ccdtvd
