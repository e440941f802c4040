#pragma once

// Closed-form and series reference solutions for the four benchmark problems,
// plus a pointwise PDE-residual check that every oracle must pass before its
// values are trusted.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccdtvd/burgers.hpp"

namespace ccdtvd {

/// Cosine-series coefficients of the Hopf-Cole potential for the 1D problem
/// u(x, 0) = sin(pi x) on [0, 1] with homogeneous Dirichlet data.
struct FourierCoefficients {
    double inv_re = 0.0;
    double a0 = 0.0;
    std::vector<double> a;  // a[n - 1] = a_n, n = 1..n_trunc
    double t_min = 0.0;     // tail bound holds for t >= t_min

    std::size_t n_trunc() const noexcept { return a.size(); }
};

/**
 * a0 = int_0^1 phi, a_n = 2 int_0^1 phi cos(n pi x), phi = exp(-(1 - cos pi x) / (2 pi inv_re)).
 * Composite 20-point Gauss-Legendre; panels double until two successive levels
 * agree to `quad_tol` for every coefficient. With n_max == 0 the truncation is
 * chosen as the smallest N >= 50 (doubling) with |a_N| exp(-N^2 pi^2 inv_re t_min) < 1e-14.
 */
FourierCoefficients compute_fourier_coefficients(double inv_re, std::size_t n_max = 0,
                                                 double quad_tol = 1e-13, double t_min = 0.05);

/// Throws for t <= 0 (use sin(pi x) there), t below coeffs.t_min, x outside
/// [0, 1] or an underflowing denominator.
double example1_exact(double x, double t, const FourierCoefficients& coeffs);

std::array<double, 2> example2_exact(double x, double y, double t, double inv_re);

/// Throws std::domain_error once 1 - 2 t^2 <= 0.
std::array<double, 2> example3_exact(double x, double y, double t);

enum class Example4Variant {
    residual_corrected,  // (x + y + z) / (1 + 3 t): satisfies the PDE
    as_printed,          // (x + y + z) / (1 + 3 t^2): does not
};

std::array<double, 3> example4_exact(double x, double y, double z, double t,
                                     Example4Variant variant);

/// u_t + (u . grad) u - inv_re lap(u) at one point, derivatives by Ridders'
/// extrapolated central differences (initial step min(0.1, t / 2) in time).
Velocity pde_residual(const VectorField& field, int dimension, double inv_re, const Point& x,
                      double t);

struct OracleCheck {
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool verified = false;
};

/// Pointwise residual over a uniform lattice of `points_per_axis` points per
/// axis (boundaries included) at each of `times`.
OracleCheck check_oracle(const ProblemSpec& spec, std::span<const double> times,
                         double tolerance, std::size_t points_per_axis = 5);

enum class StepRule {
    fixed_dt,       // dt given explicitly
    h_squared,      // dt = h_min^2
    cells_squared,  // N = M^2 steps, dt = T / M^2
};

std::string to_string(StepRule rule);
/// Accepts "explicit", "h2", "m2". Throws std::invalid_argument otherwise.
StepRule parse_step_rule(const std::string& text);

TimeSteps resolve_step_rule(StepRule rule, double dt, const ProblemSpec& spec,
                            const Resolution& res);

struct ExampleOptions {
    std::optional<double> inv_re;
    std::optional<double> final_time;
    Example4Variant variant = Example4Variant::residual_corrected;
};

struct ExampleCase {
    int id = 0;
    ProblemSpec spec;
    std::size_t default_cells = 0;
    StepRule step_rule = StepRule::fixed_dt;
    double dt = 0.0;                 // used by StepRule::fixed_dt
    double oracle_tolerance = 0.0;   // pointwise residual gate
    std::vector<double> gate_times;  // times at which the oracle is checked
    std::string oracle_name;
};

/// Examples 1-4 with their reference configuration. Throws for unknown ids.
ExampleCase make_example(int id, const ExampleOptions& options = {});

}  // namespace ccdtvd
