#include "ccdtvd/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ccdtvd/tvd_rk3.hpp"

namespace ccdtvd {

void validate(const ProblemSpec& spec) {
    if (spec.dimension < 1 || spec.dimension > 3)
        throw std::invalid_argument(fmt::format("dimension must be 1, 2 or 3, got {}", spec.dimension));
    for (int a = 0; a < spec.dimension; ++a) {
        const auto& iv = spec.domain[static_cast<std::size_t>(a)];
        if (!(iv.right > iv.left) || !std::isfinite(iv.left) || !std::isfinite(iv.right))
            throw std::invalid_argument(fmt::format("domain along axis {} is empty", a));
    }
    if (!(spec.inv_re > 0.0) || !std::isfinite(spec.inv_re))
        throw std::invalid_argument("inv_re must be positive");
    if (!(spec.final_time >= 0.0) || !std::isfinite(spec.final_time))
        throw std::invalid_argument("final_time must be non-negative");
    if (!spec.initial) throw std::invalid_argument("initial condition missing");
    if (!spec.boundary) throw std::invalid_argument("boundary data missing");
}

Resolution Resolution::uniform(int dimension, std::size_t cells_per_axis) {
    Resolution r;
    for (int a = 0; a < dimension && a < 3; ++a) r.cells[static_cast<std::size_t>(a)] = cells_per_axis;
    return r;
}

TimeSteps resolve_time_steps(double final_time, double dt) {
    if (!(final_time >= 0.0)) throw std::invalid_argument("final_time must be non-negative");
    if (final_time == 0.0) return {0, dt > 0.0 ? dt : 0.0};
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    const double ratio = final_time / dt;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(n * dt - final_time) > 1e-12 * final_time)
        throw std::invalid_argument(fmt::format(
            "dt = {} does not divide final time {} (ratio {}); choose dt = T/N", dt, final_time,
            ratio));
    return {static_cast<std::size_t>(n), final_time / n};
}

TimeSteps fixed_step_count(double final_time, std::size_t count) {
    if (!(final_time >= 0.0)) throw std::invalid_argument("final_time must be non-negative");
    if (final_time == 0.0) return {0, 0.0};
    if (count == 0) throw std::invalid_argument("step count must be positive");
    return {count, final_time / static_cast<double>(count)};
}

TensorGrid::TensorGrid(const ProblemSpec& spec, const Resolution& res, FactorizationCache& cache)
    : dimension_(spec.dimension) {
    validate(spec);
    for (int a = 0; a < dimension_; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        axes_.emplace_back(res.cells[ua], spec.domain[ua].left, spec.domain[ua].right);
        if (axes_.back().n_cells() < kMinCcdCells)
            throw std::invalid_argument(fmt::format(
                "axis {} has {} cells; at least {} are required", a, res.cells[ua], kMinCcdCells));
        ops_.push_back(cache.get(axes_.back()));
        shape_.nodes[ua] = axes_.back().n_nodes();
    }
    for (std::size_t n = 0; n < shape_.size(); ++n) {
        const auto idx = shape_.unflatten(n);
        for (int a = 0; a < dimension_; ++a) {
            const auto ua = static_cast<std::size_t>(a);
            if (idx[ua] == 0 || idx[ua] + 1 == shape_.nodes[ua]) {
                boundary_.push_back(n);
                break;
            }
        }
    }
}

Point TensorGrid::coordinate(std::size_t flat) const {
    const auto idx = shape_.unflatten(flat);
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < dimension_; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        p[ua] = axes_[ua].node(idx[ua]);
    }
    return p;
}

std::vector<double> TensorGrid::spacing() const {
    std::vector<double> h;
    for (const auto& ax : axes_) h.push_back(ax.spacing());
    return h;
}

FieldSet sample(const VectorField& f, const TensorGrid& grid, double t) {
    FieldSet out = make_field_set(grid.shape(), grid.dimension(), t);
    for (std::size_t n = 0; n < grid.shape().size(); ++n) {
        const Velocity v = f(grid.coordinate(n), t);
        for (std::size_t c = 0; c < out.dimension(); ++c) out.components[c][n] = v[c];
    }
    return out;
}

void impose_boundary(FieldSet& state, const VectorField& boundary, const TensorGrid& grid,
                     double t) {
    for (std::size_t n : grid.boundary_nodes()) {
        const Velocity v = boundary(grid.coordinate(n), t);
        for (std::size_t c = 0; c < state.dimension(); ++c) state.components[c][n] = v[c];
    }
}

void directional_derivatives(const ScalarField& f, int axis, const CcdFactorization& op,
                             ScalarField& first, ScalarField& second) {
    const GridShape& shape = f.shape();
    const auto ua = static_cast<std::size_t>(axis);
    const std::size_t m = shape.nodes[ua];
    if (m != op.nodes())
        throw std::invalid_argument(fmt::format(
            "directional_derivatives: axis {} has {} nodes, operator expects {}", axis, m,
            op.nodes()));
    if (!(first.shape() == shape)) first = ScalarField(shape);
    if (!(second.shape() == shape)) second = ScalarField(shape);

    const std::size_t stride = shape.stride(axis);
    std::vector<double> in(m), d1(m), d2(m), scratch(2 * m);
    for (std::size_t start = 0; start < shape.size(); ++start) {
        if (shape.unflatten(start)[ua] != 0) continue;
        for (std::size_t i = 0; i < m; ++i) in[i] = f[start + i * stride];
        op.apply(in, d1, d2, scratch);
        for (std::size_t i = 0; i < m; ++i) {
            first[start + i * stride] = d1[i];
            second[start + i * stride] = d2[i];
        }
    }
}

FieldSet burgers_rhs(const FieldSet& state, const TensorGrid& grid, double inv_re) {
    const int d = grid.dimension();
    if (state.dimension() != static_cast<std::size_t>(d))
        throw std::invalid_argument("burgers_rhs: state dimension does not match grid");
    FieldSet out = make_field_set(grid.shape(), d, state.time);
    ScalarField first(grid.shape()), second(grid.shape());
    const std::size_t size = grid.shape().size();

    for (std::size_t c = 0; c < state.dimension(); ++c) {
        auto& l = out.components[c];
        for (int a = 0; a < d; ++a) {
            directional_derivatives(state.components[c], a, grid.operator_for(a), first, second);
            const auto& ua = state.components[static_cast<std::size_t>(a)];
            for (std::size_t n = 0; n < size; ++n)
                l[n] += inv_re * second[n] - ua[n] * first[n];
        }
    }
    return out;
}

FieldSet run(const ProblemSpec& spec, const Resolution& res, const TimeSteps& steps,
             const RunOptions& options) {
    validate(spec);
    FactorizationCache& cache = options.cache ? *options.cache : default_factorization_cache();
    const TensorGrid grid(spec, res, cache);

    if (spec.final_time > 0.0) {
        if (steps.count == 0 || !(steps.dt > 0.0))
            throw std::invalid_argument("run: positive step count and dt required");
        const double span = static_cast<double>(steps.count) * steps.dt;
        if (std::abs(span - spec.final_time) > 1e-12 * spec.final_time)
            throw std::invalid_argument(fmt::format(
                "run: {} steps of {} cover {}, not the final time {}", steps.count, steps.dt,
                span, spec.final_time));
    }

    FieldSet u = sample(spec.initial, grid, 0.0);
    impose_boundary(u, spec.boundary, grid, 0.0);
    if (options.observer) options.observer(0, u);
    const double initial_scale = std::max(1.0, max_abs(u));
    const std::size_t count = spec.final_time > 0.0 ? steps.count : 0;

    auto rhs = [&](const FieldSet& s) { return burgers_rhs(s, grid, spec.inv_re); };
    for (std::size_t n = 0; n < count; ++n) {
        const double t_n = static_cast<double>(n) * steps.dt;
        const double t_next = n + 1 == count ? spec.final_time : static_cast<double>(n + 1) * steps.dt;
        auto hook = [&](FieldSet& s, int, double offset) {
            if (options.boundary_policy == BoundaryPolicy::stage)
                impose_boundary(s, spec.boundary, grid, t_n + offset);
        };
        try {
            u = tvd_rk3_step(u, steps.dt, rhs, hook);
        } catch (const NonFiniteStageError& e) {
            throw InstabilityError(n + 1, std::numeric_limits<double>::infinity(),
                                   fmt::format("step {} (t = {:.6g}): {}", n + 1, t_n, e.what()));
        }
        u.time = t_next;
        impose_boundary(u, spec.boundary, grid, t_next);
        const double mag = max_abs(u);
        if (!all_finite(u) || mag > 1e8 * initial_scale)
            throw InstabilityError(
                n + 1, all_finite(u) ? mag : std::numeric_limits<double>::infinity(),
                fmt::format("solution blew up at step {} (t = {:.6g}), max |u| = {:.3e}", n + 1,
                            t_next, mag));
        if (options.observer) options.observer(n + 1, u);
    }
    return u;
}

StabilityCheck stability_guard(const ProblemSpec& spec, const Resolution& res, double dt) {
    double hmin = std::numeric_limits<double>::infinity();
    for (int a = 0; a < spec.dimension; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const auto& iv = spec.domain[ua];
        hmin = std::min(hmin, (iv.right - iv.left) / static_cast<double>(res.cells[ua]));
    }
    StabilityCheck c;
    c.dt = dt;
    c.limit = hmin * hmin / (2.0 * spec.dimension * spec.inv_re);
    c.exceeds = dt > c.limit;
    if (c.exceeds)
        c.message = fmt::format(
            "dt = {:.3e} exceeds the explicit viscous limit h^2/(2 d inv_re) = {:.3e}", dt, c.limit);
    return c;
}

std::vector<double> max_errors(const FieldSet& state, const VectorField& exact,
                               const TensorGrid& grid) {
    std::vector<double> err(state.dimension(), 0.0);
    for (std::size_t n = 0; n < grid.shape().size(); ++n) {
        const Velocity v = exact(grid.coordinate(n), state.time);
        for (std::size_t c = 0; c < state.dimension(); ++c) {
            const double e = std::abs(state.components[c][n] - v[c]);
            if (std::isnan(e) || e > err[c]) err[c] = std::isnan(err[c]) ? err[c] : e;
        }
    }
    return err;
}

namespace {

bool interior(const GridShape& shape, int d, std::size_t flat) {
    const auto idx = shape.unflatten(flat);
    for (int a = 0; a < d; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        if (idx[ua] == 0 || idx[ua] + 1 == shape.nodes[ua]) return false;
    }
    return true;
}

}  // namespace

ResidualGate manufactured_residual(const ProblemSpec& spec, const Resolution& res, double t,
                                   double delta, double floor) {
    if (!spec.exact) throw std::invalid_argument("manufactured_residual: no exact solution");
    if (!(delta > 0.0) || t - delta < 0.0)
        throw std::invalid_argument("manufactured_residual: need 0 < delta <= t");
    const int d = spec.dimension;

    const TensorGrid coarse(spec, res);
    const FieldSet lc = burgers_rhs(sample(spec.exact, coarse, t), coarse, spec.inv_re);
    const FieldSet plus = sample(spec.exact, coarse, t + delta);
    const FieldSet minus = sample(spec.exact, coarse, t - delta);

    Resolution fine_res = res;
    for (int a = 0; a < d; ++a) fine_res.cells[static_cast<std::size_t>(a)] *= 2;
    const TensorGrid fine(spec, fine_res);
    const FieldSet lf = burgers_rhs(sample(spec.exact, fine, t), fine, spec.inv_re);

    ResidualGate g;
    const GridShape& cs = coarse.shape();
    for (std::size_t n = 0; n < cs.size(); ++n) {
        if (!interior(cs, d, n)) continue;
        const auto idx = cs.unflatten(n);
        std::array<std::size_t, 3> fi{0, 0, 0};
        for (int a = 0; a < d; ++a) fi[static_cast<std::size_t>(a)] = 2 * idx[static_cast<std::size_t>(a)];
        const std::size_t fn = fine.shape().index(fi[0], fi[1], fi[2]);
        for (std::size_t c = 0; c < lc.dimension(); ++c) {
            const double dudt = (plus.components[c][n] - minus.components[c][n]) / (2.0 * delta);
            g.residual = std::max(g.residual, std::abs(lc.components[c][n] - dudt));
            g.truncation = std::max(g.truncation, std::abs(lc.components[c][n] - lf.components[c][fn]));
        }
    }
    g.tolerance = std::max(2.0 * g.truncation, floor);
    g.passed = g.residual <= g.tolerance;
    return g;
}

}  // namespace ccdtvd
