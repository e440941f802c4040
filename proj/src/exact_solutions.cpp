#include "ccdtvd/exact_solutions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

namespace ccdtvd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMinTerms = 50;
constexpr std::size_t kMaxTerms = 1u << 14;
constexpr std::size_t kMaxPanels = 1u << 12;
constexpr double kTailBound = 1e-14;

// Integrals of phi(x) cos(n pi x) over [0, 1] for n = 0..n_max on `panels` panels.
std::vector<double> cosine_moments(double inv_re, std::size_t n_max, std::size_t panels) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const double scale = 1.0 / (2.0 * kPi * inv_re);
    std::vector<double> out(n_max + 1, 0.0);
    const double w = 1.0 / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = static_cast<double>(p) * w;
        const double hi = lo + w;
        for (std::size_t n = 0; n <= n_max; ++n) {
            const double k = static_cast<double>(n) * kPi;
            out[n] += Rule::integrate(
                [&](double x) { return std::exp(-scale * (1.0 - std::cos(kPi * x))) * std::cos(k * x); },
                lo, hi);
        }
    }
    return out;
}

std::vector<double> converged_moments(double inv_re, std::size_t n_max, double tol) {
    std::size_t panels = 4;
    std::vector<double> prev = cosine_moments(inv_re, n_max, panels);
    while (panels < kMaxPanels) {
        panels *= 2;
        std::vector<double> next = cosine_moments(inv_re, n_max, panels);
        double diff = 0.0;
        for (std::size_t n = 0; n <= n_max; ++n) diff = std::max(diff, std::abs(next[n] - prev[n]));
        if (diff <= tol) return next;
        prev = std::move(next);
    }
    throw std::runtime_error(fmt::format(
        "Fourier quadrature did not reach {:.1e} with {} panels", tol, kMaxPanels));
}

double tail(const std::vector<double>& moments, std::size_t n, double inv_re, double t_min) {
    return 2.0 * std::abs(moments[n]) *
           std::exp(-static_cast<double>(n * n) * kPi * kPi * inv_re * t_min);
}

// Ridders' polynomial extrapolation of a finite-difference estimate D(step).
template <class Estimate>
double ridders(Estimate&& estimate, double h0) {
    constexpr int kTable = 10;
    constexpr double kShrink = 1.4;
    constexpr double kShrink2 = kShrink * kShrink;
    constexpr double kSafe = 2.0;
    double a[kTable][kTable];
    double h = h0;
    a[0][0] = estimate(h);
    double err = std::numeric_limits<double>::max();
    double ans = a[0][0];
    for (int i = 1; i < kTable; ++i) {
        h /= kShrink;
        a[0][i] = estimate(h);
        double fac = kShrink2;
        for (int j = 1; j <= i; ++j) {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= kShrink2;
            const double e = std::max(std::abs(a[j][i] - a[j - 1][i]),
                                      std::abs(a[j][i] - a[j - 1][i - 1]));
            if (e <= err) {
                err = e;
                ans = a[j][i];
            }
        }
        if (std::abs(a[i][i] - a[i - 1][i - 1]) >= kSafe * err) break;
    }
    return ans;
}

}  // namespace

FourierCoefficients compute_fourier_coefficients(double inv_re, std::size_t n_max,
                                                 double quad_tol, double t_min) {
    if (!(inv_re > 0.0) || !std::isfinite(inv_re))
        throw std::invalid_argument("compute_fourier_coefficients: inv_re must be positive");
    if (!(t_min > 0.0)) throw std::invalid_argument("compute_fourier_coefficients: t_min must be positive");

    std::vector<double> moments;
    if (n_max > 0) {
        moments = converged_moments(inv_re, n_max, quad_tol);
    } else {
        n_max = kMinTerms;
        for (;;) {
            moments = converged_moments(inv_re, n_max, quad_tol);
            if (tail(moments, n_max, inv_re, t_min) < kTailBound) break;
            if (n_max >= kMaxTerms)
                throw std::runtime_error("compute_fourier_coefficients: series tail bound unreachable");
            n_max *= 2;
        }
    }

    FourierCoefficients c;
    c.inv_re = inv_re;
    c.t_min = t_min;
    c.a0 = moments[0];
    c.a.resize(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) c.a[n - 1] = 2.0 * moments[n];
    return c;
}

namespace {

// Series of the 1D solution without domain checks; analytic in x, which the
// residual check relies on when it probes just outside [0, 1].
double example1_series(double x, double t, const FourierCoefficients& c) {
    double num = 0.0;
    double den = c.a0;
    for (std::size_t k = 0; k < c.a.size(); ++k) {
        const double n = static_cast<double>(k + 1);
        const double e = c.a[k] * std::exp(-n * n * kPi * kPi * c.inv_re * t);
        num += e * n * std::sin(n * kPi * x);
        den += e * std::cos(n * kPi * x);
    }
    if (std::abs(den) < 1e-300) throw std::overflow_error("example1_exact: denominator underflow");
    return 2.0 * kPi * c.inv_re * num / den;
}

}  // namespace

double example1_exact(double x, double t, const FourierCoefficients& c) {
    if (!(t > 0.0))
        throw std::domain_error("example1_exact: series needs t > 0; use sin(pi x) at t = 0");
    if (t < c.t_min)
        throw std::domain_error(fmt::format(
            "example1_exact: t = {} is below the coefficients' t_min = {}", t, c.t_min));
    if (x < 0.0 || x > 1.0) throw std::domain_error("example1_exact: x outside [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return example1_series(x, t, c);
}

std::array<double, 2> example2_exact(double x, double y, double t, double inv_re) {
    const double e = std::exp(-5.0 * kPi * kPi * inv_re * t);
    const double den = 2.0 + e * std::sin(2.0 * kPi * x) * std::sin(kPi * y);
    const double u = -4.0 * kPi * inv_re * e * std::cos(2.0 * kPi * x) * std::sin(kPi * y) / den;
    const double v = -2.0 * kPi * inv_re * e * std::sin(2.0 * kPi * x) * std::cos(kPi * y) / den;
    return {u, v};
}

std::array<double, 2> example3_exact(double x, double y, double t) {
    const double den = 1.0 - 2.0 * t * t;
    if (!(den > 0.0)) throw std::domain_error("example3_exact: solution blows up at t = 1/sqrt(2)");
    return {(x + y - 2.0 * x * t) / den, (x - y - 2.0 * y * t) / den};
}

std::array<double, 3> example4_exact(double x, double y, double z, double t,
                                     Example4Variant variant) {
    const double den = variant == Example4Variant::as_printed ? 1.0 + 3.0 * t * t : 1.0 + 3.0 * t;
    const double u = (x + y + z) / den;
    return {u, u, u};
}

Velocity pde_residual(const VectorField& f, int d, double inv_re, const Point& x, double t) {
    const double ht = std::min(0.1, 0.5 * t);
    if (!(ht > 0.0)) throw std::domain_error("pde_residual: need t > 0");
    const Velocity u = f(x, t);
    Velocity r{0.0, 0.0, 0.0};
    for (int c = 0; c < d; ++c) {
        const auto uc = static_cast<std::size_t>(c);
        auto comp = [&](const Point& p, double s) { return f(p, s)[uc]; };
        r[uc] = ridders([&](double h) { return (comp(x, t + h) - comp(x, t - h)) / (2.0 * h); }, ht);
        for (int a = 0; a < d; ++a) {
            const auto ua = static_cast<std::size_t>(a);
            auto shifted = [&](double h) {
                Point p = x;
                p[ua] += h;
                return comp(p, t);
            };
            const double d1 = ridders([&](double h) { return (shifted(h) - shifted(-h)) / (2.0 * h); }, 0.1);
            const double d2 = ridders(
                [&](double h) { return (shifted(h) - 2.0 * u[uc] + shifted(-h)) / (h * h); }, 0.1);
            r[uc] += u[ua] * d1 - inv_re * d2;
        }
    }
    return r;
}

OracleCheck check_oracle(const ProblemSpec& spec, std::span<const double> times, double tolerance,
                         std::size_t points_per_axis) {
    if (!spec.exact) throw std::invalid_argument("check_oracle: no exact solution");
    if (points_per_axis < 2) throw std::invalid_argument("check_oracle: need two points per axis");
    const int d = spec.dimension;
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= points_per_axis;

    OracleCheck out;
    out.tolerance = tolerance;
    for (double t : times) {
        for (std::size_t n = 0; n < total; ++n) {
            Point p{0.0, 0.0, 0.0};
            std::size_t rest = n;
            for (int a = 0; a < d; ++a) {
                const auto ua = static_cast<std::size_t>(a);
                const double s = static_cast<double>(rest % points_per_axis) /
                                 static_cast<double>(points_per_axis - 1);
                rest /= points_per_axis;
                p[ua] = spec.domain[ua].left + s * (spec.domain[ua].right - spec.domain[ua].left);
            }
            const Velocity r = pde_residual(spec.exact, d, spec.inv_re, p, t);
            for (int c = 0; c < d; ++c) {
                const double v = std::abs(r[static_cast<std::size_t>(c)]);
                if (!(v <= out.max_residual)) out.max_residual = v;
            }
        }
    }
    out.verified = out.max_residual <= tolerance;
    return out;
}

std::string to_string(StepRule rule) {
    switch (rule) {
        case StepRule::fixed_dt: return "explicit";
        case StepRule::h_squared: return "h2";
        case StepRule::cells_squared: return "m2";
    }
    return "?";
}

StepRule parse_step_rule(const std::string& text) {
    if (text == "explicit") return StepRule::fixed_dt;
    if (text == "h2") return StepRule::h_squared;
    if (text == "m2") return StepRule::cells_squared;
    throw std::invalid_argument(fmt::format("unknown dt rule '{}' (expected explicit, h2 or m2)", text));
}

TimeSteps resolve_step_rule(StepRule rule, double dt, const ProblemSpec& spec,
                            const Resolution& res) {
    switch (rule) {
        case StepRule::fixed_dt:
            return resolve_time_steps(spec.final_time, dt);
        case StepRule::h_squared: {
            double hmin = std::numeric_limits<double>::infinity();
            for (int a = 0; a < spec.dimension; ++a) {
                const auto ua = static_cast<std::size_t>(a);
                if (res.cells[ua] == 0) throw std::invalid_argument("resolution has an empty axis");
                hmin = std::min(hmin, (spec.domain[ua].right - spec.domain[ua].left) /
                                          static_cast<double>(res.cells[ua]));
            }
            return resolve_time_steps(spec.final_time, hmin * hmin);
        }
        case StepRule::cells_squared: {
            const std::size_t m = *std::max_element(res.cells.begin(), res.cells.begin() + spec.dimension);
            return fixed_step_count(spec.final_time, m * m);
        }
    }
    throw std::invalid_argument("unknown step rule");
}

ExampleCase make_example(int id, const ExampleOptions& options) {
    ExampleCase ex;
    ex.id = id;
    ProblemSpec& s = ex.spec;
    switch (id) {
        case 1: {
            s.name = "example1";
            s.dimension = 1;
            s.domain[0] = {0.0, 1.0};
            s.inv_re = options.inv_re.value_or(0.1);
            s.final_time = options.final_time.value_or(1.0);
            const double t_min = s.final_time > 0.0 ? std::min(0.05, 0.25 * s.final_time) : 0.05;
            auto coeffs = std::make_shared<const FourierCoefficients>(
                compute_fourier_coefficients(s.inv_re, 0, 1e-13, t_min));
            s.initial = [](const Point& p, double) { return Velocity{std::sin(kPi * p[0]), 0.0, 0.0}; };
            s.boundary = [](const Point&, double) { return Velocity{0.0, 0.0, 0.0}; };
            s.exact = [coeffs](const Point& p, double t) {
                if (t == 0.0) return Velocity{std::sin(kPi * p[0]), 0.0, 0.0};
                if (p[0] == 0.0 || p[0] == 1.0) return Velocity{0.0, 0.0, 0.0};
                if (t < coeffs->t_min) throw std::domain_error("example 1 oracle queried below t_min");
                return Velocity{example1_series(p[0], t, *coeffs), 0.0, 0.0};
            };
            ex.default_cells = 80;
            ex.step_rule = StepRule::fixed_dt;
            ex.dt = 1e-5;
            ex.oracle_tolerance = 1e-8;
            ex.oracle_name = "fourier-series";
            break;
        }
        case 2: {
            s.name = "example2";
            s.dimension = 2;
            s.domain[0] = {0.0, 1.0};
            s.domain[1] = {0.0, 1.0};
            s.inv_re = options.inv_re.value_or(0.1);
            s.final_time = options.final_time.value_or(1.0);
            const double nu = s.inv_re;
            s.exact = [nu](const Point& p, double t) {
                const auto [u, v] = example2_exact(p[0], p[1], t, nu);
                return Velocity{u, v, 0.0};
            };
            ex.default_cells = 16;
            ex.step_rule = StepRule::h_squared;
            ex.oracle_tolerance = 1e-8;
            ex.oracle_name = "closed-form";
            break;
        }
        case 3: {
            s.name = "example3";
            s.dimension = 2;
            s.domain[0] = {0.0, 0.5};
            s.domain[1] = {0.0, 0.5};
            s.inv_re = options.inv_re.value_or(0.1);
            s.final_time = options.final_time.value_or(0.1);
            s.exact = [](const Point& p, double t) {
                const auto [u, v] = example3_exact(p[0], p[1], t);
                return Velocity{u, v, 0.0};
            };
            ex.default_cells = 8;
            ex.step_rule = StepRule::cells_squared;
            ex.oracle_tolerance = 1e-10;
            ex.oracle_name = "closed-form";
            break;
        }
        case 4: {
            s.name = "example4";
            s.dimension = 3;
            s.domain = {Interval{0.0, 1.0}, Interval{0.0, 1.0}, Interval{0.0, 1.0}};
            s.inv_re = options.inv_re.value_or(0.08);
            s.final_time = options.final_time.value_or(1.0);
            const Example4Variant variant = options.variant;
            s.exact = [variant](const Point& p, double t) {
                const auto w = example4_exact(p[0], p[1], p[2], t, variant);
                return Velocity{w[0], w[1], w[2]};
            };
            ex.default_cells = 8;
            ex.step_rule = StepRule::h_squared;
            ex.oracle_tolerance = 1e-10;
            ex.oracle_name = variant == Example4Variant::as_printed ? "as-printed" : "residual-corrected";
            break;
        }
        default:
            throw std::invalid_argument(fmt::format("unknown example id {} (expected 1-4)", id));
    }
    if (id != 1) {
        s.initial = [f = s.exact](const Point& p, double) { return f(p, 0.0); };
        s.boundary = s.exact;
    }
    if (s.final_time > 0.0)
        ex.gate_times = {0.5 * s.final_time, s.final_time};
    return ex;
}

}  // namespace ccdtvd
