#pragma once

// Viscous Burgers system u_t + (u . grad) u = inv_re * lap(u) in 1, 2 or 3
// dimensions, discretized with CCD in space and TVD-RK3 in time.

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccdtvd/ccd_operator.hpp"
#include "ccdtvd/field.hpp"
#include "ccdtvd/grid.hpp"

namespace ccdtvd {

using Point = std::array<double, 3>;
using Velocity = std::array<double, 3>;
/// Velocity at (point, time); components beyond the problem dimension are ignored.
using VectorField = std::function<Velocity(const Point&, double)>;

struct Interval {
    double left = 0.0;
    double right = 1.0;
};

struct ProblemSpec {
    std::string name;
    int dimension = 1;
    std::array<Interval, 3> domain{};
    double inv_re = 1.0;
    double final_time = 1.0;
    VectorField initial;   // evaluated at t = 0
    VectorField boundary;  // Dirichlet data for every component
    VectorField exact;     // optional
};

/// Throws std::invalid_argument describing the first problem found.
void validate(const ProblemSpec& spec);

/// Cells per axis; entries past the problem dimension are ignored.
struct Resolution {
    std::array<std::size_t, 3> cells{0, 0, 0};

    static Resolution uniform(int dimension, std::size_t cells_per_axis);
};

struct TimeSteps {
    std::size_t count = 0;
    double dt = 0.0;
};

/// N = round(T / dt). Rejects dt that does not divide T to 1e-12 relative;
/// T = 0 gives zero steps.
TimeSteps resolve_time_steps(double final_time, double dt);
/// Exactly `count` steps of T / count.
TimeSteps fixed_step_count(double final_time, std::size_t count);

enum class BoundaryPolicy {
    /// Dirichlet values imposed on u^{n+1} only.
    step,
    /// Also imposed on the intermediate RK states at t + dt and t + dt/2.
    stage,
};

/// Uniform tensor grid over the problem domain with shared CCD factorizations.
class TensorGrid {
public:
    TensorGrid(const ProblemSpec& spec, const Resolution& res,
               FactorizationCache& cache = default_factorization_cache());

    int dimension() const noexcept { return dimension_; }
    const GridShape& shape() const noexcept { return shape_; }
    const GridAxis& axis(int a) const { return axes_.at(static_cast<std::size_t>(a)); }
    const CcdFactorization& operator_for(int a) const {
        return *ops_.at(static_cast<std::size_t>(a));
    }
    Point coordinate(std::size_t flat) const;
    /// Flat indices of nodes on the domain boundary.
    const std::vector<std::size_t>& boundary_nodes() const noexcept { return boundary_; }
    std::vector<double> spacing() const;

private:
    int dimension_;
    std::vector<GridAxis> axes_;
    std::vector<std::shared_ptr<const CcdFactorization>> ops_;
    GridShape shape_;
    std::vector<std::size_t> boundary_;
};

FieldSet sample(const VectorField& f, const TensorGrid& grid, double t);
void impose_boundary(FieldSet& state, const VectorField& boundary, const TensorGrid& grid,
                     double t);

/// First and second derivatives of `f` along `axis`, one CCD solve per pencil.
void directional_derivatives(const ScalarField& f, int axis, const CcdFactorization& op,
                             ScalarField& first, ScalarField& second);

/// L(u) = -(u . grad) u + inv_re * lap(u) at every node.
FieldSet burgers_rhs(const FieldSet& state, const TensorGrid& grid, double inv_re);

class InstabilityError : public std::runtime_error {
public:
    InstabilityError(std::size_t step, double max_magnitude, const std::string& what)
        : std::runtime_error(what), step_(step), max_magnitude_(max_magnitude) {}
    std::size_t step() const noexcept { return step_; }
    double max_magnitude() const noexcept { return max_magnitude_; }

private:
    std::size_t step_;
    double max_magnitude_;
};

struct RunOptions {
    BoundaryPolicy boundary_policy = BoundaryPolicy::step;
    /// Called with (step index, state) after every completed step; step 0 is the initial state.
    std::function<void(std::size_t, const FieldSet&)> observer;
    FactorizationCache* cache = nullptr;
};

/// Advances the initial data to spec.final_time; the last step lands exactly on it.
FieldSet run(const ProblemSpec& spec, const Resolution& res, const TimeSteps& steps,
             const RunOptions& options = {});

struct StabilityCheck {
    double dt = 0.0;
    double limit = 0.0;  // h_min^2 / (2 d inv_re)
    bool exceeds = false;
    std::string message;
};

/// Advisory only: explicit viscous limit of the forward-Euler building block.
StabilityCheck stability_guard(const ProblemSpec& spec, const Resolution& res, double dt);

/// Max nodal |u_c - exact_c| per component.
std::vector<double> max_errors(const FieldSet& state, const VectorField& exact,
                               const TensorGrid& grid);

struct ResidualGate {
    double residual = 0.0;      // max |L_h(u*) - du*/dt| over interior nodes
    double truncation = 0.0;    // max |L_h(u*) - L_{h/2}(u*)| on shared interior nodes
    double tolerance = 0.0;     // max(2 * truncation, floor)
    bool passed = false;
};

/**
 * Manufactured-solution check of an exact field: the CCD right-hand side of
 * the sampled exact solution against its centered time derivative (step
 * `delta`). The allowance is the grid's own truncation level, estimated by
 * comparison with a grid of twice the resolution, but never below `floor`.
 */
ResidualGate manufactured_residual(const ProblemSpec& spec, const Resolution& res, double t,
                                   double delta = 1e-6, double floor = 1e-8);

}  // namespace ccdtvd
