#include "ccdtvd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace ccdtvd {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, fmt::format("'{}' is not a number", text));
    }
}

std::size_t parse_count(const std::string& key, const std::string& text) {
    const double v = parse_double(key, text);
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9)
        throw ConfigError(key, fmt::format("'{}' is not a positive integer", text));
    return static_cast<std::size_t>(v);
}

std::vector<std::size_t> parse_count_list(const std::string& key, const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_count(key, item));
    }
    if (out.empty()) throw ConfigError(key, "empty list");
    return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
    if (text == "0" || text == "false" || text == "no" || text == "off") return false;
    throw ConfigError(key, fmt::format("'{}' is not a boolean", text));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const char* component_name(std::size_t c) {
    static const char* names[] = {"u", "v", "w"};
    return names[c];
}

std::string format_g(double v) { return fmt::format("{:g}", v); }

}  // namespace

std::string format_number(double value) { return fmt::format("{:.5e}", value); }

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", fmt::format("cannot open '{}'", path.string()));
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", fmt::format("{}:{}: expected key = value", path.string(), lineno));
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "example") {
        const std::size_t id = parse_count(key, value);
        if (id < 1 || id > 4) throw ConfigError(key, "must be 1, 2, 3 or 4");
        c.example = static_cast<int>(id);
    } else if (key == "cells") {
        c.cells = parse_count_list(key, value);
    } else if (key == "cells_list") {
        c.cells_list = parse_count_list(key, value);
    } else if (key == "dt_rule") {
        try {
            c.step_rule = parse_step_rule(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(key, e.what());
        }
    } else if (key == "dt") {
        const double v = parse_double(key, value);
        if (!(v > 0.0)) throw ConfigError(key, "must be positive");
        c.dt = v;
    } else if (key == "final_time") {
        const double v = parse_double(key, value);
        if (!(v >= 0.0)) throw ConfigError(key, "must be non-negative");
        c.final_time = v;
    } else if (key == "inv_re") {
        const double v = parse_double(key, value);
        if (!(v > 0.0)) throw ConfigError(key, "must be positive");
        c.inv_re = v;
    } else if (key == "variant") {
        if (value == "residual-corrected") c.variant = Example4Variant::residual_corrected;
        else if (value == "as-printed") c.variant = Example4Variant::as_printed;
        else throw ConfigError(key, "expected residual-corrected or as-printed");
    } else if (key == "boundary_policy") {
        if (value == "step") c.boundary_policy = BoundaryPolicy::step;
        else if (value == "stage") c.boundary_policy = BoundaryPolicy::stage;
        else throw ConfigError(key, "expected step or stage");
    } else if (key == "output_dir") {
        if (value.empty()) throw ConfigError(key, "empty path");
        c.output_dir = value;
    } else if (key == "reproducible") {
        c.reproducible = parse_bool(key, value);
    } else if (key == "dump_grid") {
        c.dump_grid = parse_bool(key, value);
    } else {
        throw ConfigError(key, "unknown setting");
    }
}

void apply_settings(RunConfig& config, const std::map<std::string, std::string>& settings) {
    for (const auto& [k, v] : settings) apply_setting(config, k, v);
}

std::string to_string(Example4Variant variant) {
    return variant == Example4Variant::as_printed ? "as-printed" : "residual-corrected";
}

std::string to_string(BoundaryPolicy policy) {
    return policy == BoundaryPolicy::stage ? "stage" : "step";
}

ResolvedRun resolve(const RunConfig& config, std::optional<std::size_t> cells) {
    ResolvedRun r;
    ExampleOptions opts;
    opts.inv_re = config.inv_re;
    opts.final_time = config.final_time;
    opts.variant = config.variant;
    try {
        r.example = make_example(config.example, opts);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("example", e.what());
    }
    const ProblemSpec& spec = r.example.spec;
    const auto d = static_cast<std::size_t>(spec.dimension);

    if (cells) {
        r.resolution = Resolution::uniform(spec.dimension, *cells);
    } else if (config.cells.empty()) {
        r.resolution = Resolution::uniform(spec.dimension, r.example.default_cells);
    } else if (config.cells.size() == 1) {
        r.resolution = Resolution::uniform(spec.dimension, config.cells[0]);
    } else if (config.cells.size() == d) {
        for (std::size_t a = 0; a < d; ++a) r.resolution.cells[a] = config.cells[a];
    } else {
        throw ConfigError("cells", fmt::format("expected 1 or {} values, got {}", d, config.cells.size()));
    }
    for (std::size_t a = 0; a < d; ++a)
        if (r.resolution.cells[a] < kMinCcdCells)
            throw ConfigError("cells", fmt::format("at least {} cells per axis are required (the "
                                                   "CCD system is singular below that)",
                                                   kMinCcdCells));

    r.step_rule = config.step_rule.value_or(config.dt ? StepRule::fixed_dt : r.example.step_rule);
    double dt = 0.0;
    if (r.step_rule == StepRule::fixed_dt) {
        dt = config.dt.value_or(r.example.dt);
        if (!(dt > 0.0) && spec.final_time > 0.0)
            throw ConfigError("dt", "an explicit dt is required for dt_rule = explicit");
    }
    try {
        r.steps = resolve_step_rule(r.step_rule, dt, spec, r.resolution);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("dt", e.what());
    }
    r.stability = stability_guard(spec, r.resolution, r.steps.dt);
    return r;
}

SolveResult solve(const RunConfig& config) {
    SolveResult out;
    out.run = resolve(config);
    const ProblemSpec& spec = out.run.example.spec;

    out.oracle = check_oracle(spec, out.run.example.gate_times, out.run.example.oracle_tolerance);

    RunOptions opts;
    opts.boundary_policy = config.boundary_policy;
    const auto start = std::chrono::steady_clock::now();
    out.state = run(spec, out.run.resolution, out.run.steps, opts);
    out.wall_seconds = seconds_since(start);

    if (spec.exact) {
        const TensorGrid grid(spec, out.run.resolution);
        out.errors = max_errors(out.state, spec.exact, grid);
    }
    return out;
}

std::string solve_summary_csv(const SolveResult& r) {
    const ProblemSpec& spec = r.run.example.spec;
    const TensorGrid grid(spec, r.run.resolution);
    std::string out = "quantity,value\n";
    for (std::size_t c = 0; c < r.errors.size(); ++c)
        out += fmt::format("e_{}_inf,{}\n", component_name(c), format_number(r.errors[c]));

    for (double f : {0.25, 0.5, 0.75}) {
        std::array<std::size_t, 3> idx{0, 0, 0};
        bool on_node = true;
        for (int a = 0; a < spec.dimension; ++a) {
            const double pos = f * static_cast<double>(r.run.resolution.cells[static_cast<std::size_t>(a)]);
            if (pos != std::floor(pos)) on_node = false;
            idx[static_cast<std::size_t>(a)] = static_cast<std::size_t>(pos);
        }
        if (!on_node) continue;
        const std::size_t flat = grid.shape().index(idx[0], idx[1], idx[2]);
        const Point p = grid.coordinate(flat);
        std::string where;
        for (int a = 0; a < spec.dimension; ++a) where += format_g(p[static_cast<std::size_t>(a)]) + ",";
        for (std::size_t c = 0; c < r.state.dimension(); ++c)
            out += fmt::format("\"{}({}{})\",{}\n", component_name(c), where, format_g(r.state.time),
                               format_number(r.state.components[c][flat]));
    }
    return out;
}

namespace {

nlohmann::json base_manifest(const RunConfig& config, const ResolvedRun& run) {
    nlohmann::json j;
    const ProblemSpec& spec = run.example.spec;
    j["example"] = run.example.id;
    j["problem"] = spec.name;
    j["dimension"] = spec.dimension;
    j["inv_re"] = spec.inv_re;
    j["final_time"] = spec.final_time;
    j["dt_rule"] = to_string(run.step_rule);
    j["oracle"] = run.example.oracle_name;
    j["example4_variant"] = to_string(config.variant);
    j["boundary_policy"] = to_string(config.boundary_policy);
    j["reproducible"] = config.reproducible;
    j["version"] = "1.0.0";
    return j;
}

nlohmann::json oracle_json(const OracleCheck& o) {
    return {{"verified", o.verified}, {"max_residual", o.max_residual}, {"tolerance", o.tolerance}};
}

}  // namespace

std::string run_manifest_json(const RunConfig& config, const SolveResult& r) {
    nlohmann::json j = base_manifest(config, r.run);
    const auto d = static_cast<std::size_t>(r.run.example.spec.dimension);
    const TensorGrid grid(r.run.example.spec, r.run.resolution);
    j["cells"] = std::vector<std::size_t>(r.run.resolution.cells.begin(), r.run.resolution.cells.begin() + static_cast<long>(d));
    j["h"] = grid.spacing();
    j["dt"] = r.run.steps.dt;
    j["steps"] = r.run.steps.count;
    j["oracle_check"] = oracle_json(r.oracle);
    j["errors"] = r.errors;
    j["stability"] = {{"limit", r.run.stability.limit}, {"exceeds", r.run.stability.exceeds}};
    j["wall_seconds"] = config.reproducible ? nlohmann::json(nullptr) : nlohmann::json(r.wall_seconds);
    return j.dump(2);
}

void write_grid_dump(const std::filesystem::path& path, const FieldSet& state,
                     const TensorGrid& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    auto put = [&](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
    put(static_cast<std::uint32_t>(grid.dimension()));
    put(static_cast<std::uint32_t>(state.dimension()));
    for (int a = 0; a < grid.dimension(); ++a)
        put(static_cast<std::uint64_t>(grid.shape().nodes[static_cast<std::size_t>(a)]));
    for (double h : grid.spacing()) put(h);
    put(state.time);
    for (const auto& comp : state.components)
        out.write(reinterpret_cast<const char*>(comp.values().data()),
                  static_cast<std::streamsize>(comp.size() * sizeof(double)));
}

ConvergenceReport converge(const RunConfig& config) {
    std::vector<std::size_t> levels = config.cells_list;
    if (levels.empty()) {
        switch (config.example) {
            case 1: levels = {10, 20, 40}; break;
            case 2: levels = {8, 16, 32, 64}; break;
            default: levels = {4, 8, 16}; break;
        }
    }
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (levels[i] <= levels[i - 1]) throw ConfigError("cells_list", "must be strictly increasing");

    ConvergenceReport rep;
    rep.example = config.example;
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (levels[i] != 2 * levels[i - 1]) rep.dyadic = false;
    if (!rep.dyadic) rep.notice = "cells_list is not dyadic; rates omitted";

    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const ResolvedRun level = resolve(config, levels[i]);
        const ProblemSpec& spec = level.example.spec;
        if (i == 0) {
            rep.step_rule = to_string(level.step_rule);
            rep.oracle = level.example.oracle_name;
            rep.oracle_check = check_oracle(spec, level.example.gate_times, level.example.oracle_tolerance);
        }
        RunOptions opts;
        opts.boundary_policy = config.boundary_policy;
        const FieldSet state = run(spec, level.resolution, level.steps, opts);
        const TensorGrid grid(spec, level.resolution);

        ConvergenceRow row;
        row.cells = levels[i];
        const auto h = grid.spacing();
        row.h = *std::min_element(h.begin(), h.end());
        row.steps = level.steps;
        row.errors = max_errors(state, spec.exact, grid);
        if (i > 0 && rep.dyadic) {
            const auto& prev = rep.rows.back().errors;
            for (std::size_t c = 0; c < row.errors.size(); ++c) {
                if (prev[c] > 0.0 && row.errors[c] > 0.0)
                    row.rates.emplace_back(std::log2(prev[c] / row.errors[c]));
                else
                    row.rates.emplace_back(std::nullopt);
            }
        }
        rep.rows.push_back(std::move(row));
    }
    rep.wall_seconds = seconds_since(start);
    return rep;
}

std::string convergence_csv(const ConvergenceReport& rep) {
    const std::size_t ncomp = rep.rows.empty() ? 0 : rep.rows.front().errors.size();
    std::string out = "cells,h";
    for (std::size_t c = 0; c < ncomp; ++c)
        out += fmt::format(",e_{0},rate_{0}", component_name(c));
    out += "\n";
    for (const auto& row : rep.rows) {
        out += fmt::format("{},{}", row.cells, format_number(row.h));
        for (std::size_t c = 0; c < ncomp; ++c) {
            out += "," + format_number(row.errors[c]) + ",";
            if (c < row.rates.size() && row.rates[c]) out += fmt::format("{:.2f}", *row.rates[c]);
        }
        out += "\n";
    }
    return out;
}

std::string convergence_manifest_json(const RunConfig& config, const ConvergenceReport& rep) {
    const ResolvedRun first = resolve(config, rep.rows.empty() ? std::nullopt
                                                                : std::optional(rep.rows.front().cells));
    nlohmann::json j = base_manifest(config, first);
    j["oracle_check"] = oracle_json(rep.oracle_check);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rep.rows) {
        nlohmann::json rates = nlohmann::json::array();
        for (const auto& x : r.rates) rates.push_back(x ? nlohmann::json(*x) : nlohmann::json(nullptr));
        rows.push_back({{"cells", r.cells}, {"h", r.h}, {"dt", r.steps.dt}, {"steps", r.steps.count},
                        {"errors", r.errors}, {"rates", rates}});
    }
    j["rows"] = rows;
    j["dyadic"] = rep.dyadic;
    if (!rep.notice.empty()) j["notice"] = rep.notice;
    j["wall_seconds"] = config.reproducible ? nlohmann::json(nullptr) : nlohmann::json(rep.wall_seconds);
    return j.dump(2);
}

std::filesystem::path default_table1_reference() {
    return std::filesystem::path(CCDTVD_DATA_DIR) / "table1_reference.csv";
}

std::vector<Table1Reference> load_table1_reference(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("table1_reference", fmt::format("cannot open '{}'", path.string()));
    std::vector<Table1Reference> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) v.push_back(parse_double("table1_reference", trim(cell)));
        if (v.size() != 8) throw ConfigError("table1_reference", fmt::format("bad row '{}'", line));
        rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
    }
    return rows;
}

Table1Result table1(const RunConfig& config, const std::filesystem::path& reference) {
    RunConfig c = config;
    c.example = 1;
    Table1Result out;
    const auto refs = load_table1_reference(reference);
    double t_end = 0.0;
    for (const auto& r : refs) t_end = std::max(t_end, r.t);
    if (!c.final_time) c.final_time = t_end;
    out.run = resolve(c);
    const ProblemSpec& spec = out.run.example.spec;
    const std::size_t m = out.run.resolution.cells[0];
    const double dt = out.run.steps.dt;

    std::map<std::size_t, std::vector<std::size_t>> wanted;  // step -> reference rows
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const double k = std::round(refs[i].t / dt);
        if (std::abs(k * dt - refs[i].t) > 1e-9 * refs[i].t || refs[i].t > spec.final_time)
            throw ConfigError("dt", fmt::format("t = {} is not reached by a whole number of steps", refs[i].t));
        const double node = refs[i].x * static_cast<double>(m);
        if (std::abs(node - std::round(node)) > 1e-9)
            throw ConfigError("cells", fmt::format("x = {} is not a grid node", refs[i].x));
        wanted[static_cast<std::size_t>(k)].push_back(i);
    }

    out.rows.resize(refs.size());
    RunOptions opts;
    opts.boundary_policy = c.boundary_policy;
    opts.observer = [&](std::size_t step, const FieldSet& s) {
        const auto it = wanted.find(step);
        if (it == wanted.end()) return;
        for (std::size_t i : it->second) {
            const auto node = static_cast<std::size_t>(std::round(refs[i].x * static_cast<double>(m)));
            out.rows[i].computed = s.components[0][node];
        }
    };
    const auto start = std::chrono::steady_clock::now();
    run(spec, out.run.resolution, out.run.steps, opts);
    out.wall_seconds = seconds_since(start);
    for (std::size_t i = 0; i < refs.size(); ++i) {
        out.rows[i].reference = refs[i];
        out.rows[i].series = spec.exact(Point{refs[i].x, 0.0, 0.0}, refs[i].t)[0];
    }
    return out;
}

std::string table1_csv(const Table1Result& result) {
    std::string out =
        "x,t,ccd_tvd,exact,abs_diff,hc,rhc,rpa,tvcf,published_ccd_tvd,published_exact\n";
    for (const auto& r : result.rows) {
        const auto& ref = r.reference;
        out += fmt::format("{:.2f},{:.2f},{:.6f},{:.6f},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n",
                           ref.x, ref.t, r.computed, r.series,
                           format_number(std::abs(r.computed - r.series)), ref.hc, ref.rhc, ref.rpa,
                           ref.tvcf, ref.ccd_tvd, ref.exact);
    }
    return out;
}

std::string derive_csv(const std::string& function, std::size_t cells, double left, double right) {
    constexpr double pi = std::numbers::pi;
    std::function<std::array<double, 3>(double)> f;
    if (function == "sin") {
        f = [pi](double x) {
            const double k = 2.0 * pi;
            return std::array<double, 3>{std::sin(k * x), k * std::cos(k * x), -k * k * std::sin(k * x)};
        };
    } else if (function == "exp") {
        f = [](double x) { return std::array<double, 3>{std::exp(x), std::exp(x), std::exp(x)}; };
    } else if (function.rfind("poly", 0) == 0) {
        const std::size_t k = parse_count("function", function.substr(4));
        const double kd = static_cast<double>(k);
        f = [k, kd](double x) {
            const double p2 = k >= 2 ? kd * (kd - 1.0) * std::pow(x, kd - 2.0) : 0.0;
            return std::array<double, 3>{std::pow(x, kd), kd * std::pow(x, kd - 1.0), p2};
        };
    } else {
        throw ConfigError("function", fmt::format("unknown function '{}' (sin, exp, polyK)", function));
    }
    if (cells < kMinCcdCells) throw ConfigError("cells", fmt::format("at least {} cells", kMinCcdCells));
    if (!(right > left)) throw ConfigError("right", "must exceed left");

    const GridAxis axis(cells, left, right);
    const CcdFactorization op(build_ccd_system(axis));
    std::vector<double> u(axis.n_nodes());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = f(axis.node(i))[0];
    const DerivativePair d = op.apply(u);

    std::string out = "x,u,du,d2u,du_exact,d2u_exact\n";
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto e = f(axis.node(i));
        out += fmt::format("{},{},{},{},{},{}\n", format_number(axis.node(i)), format_number(u[i]),
                           format_number(d.first[i]), format_number(d.second[i]),
                           format_number(e[1]), format_number(e[2]));
    }
    return out;
}

}  // namespace ccdtvd
