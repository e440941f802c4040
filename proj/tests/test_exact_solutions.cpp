#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ccdtvd/exact_solutions.hpp"
#include "oracles.hpp"

using namespace ccdtvd;

namespace {

constexpr double kPi = std::numbers::pi;

// Trapezoid rule on a periodic analytic integrand: exponentially accurate.
double trapezoid_moment(double inv_re, std::size_t n, std::size_t points) {
    const double s = 1.0 / (2.0 * kPi * inv_re);
    auto f = [&](double x) { return std::exp(-s * (1.0 - std::cos(kPi * x))) * std::cos(double(n) * kPi * x); };
    const double h = 1.0 / double(points);
    double sum = 0.5 * (f(0.0) + f(1.0));
    for (std::size_t i = 1; i < points; ++i) sum += f(double(i) * h);
    return sum * h;
}

// Independent evaluation of the Hopf-Cole series with its own truncation.
double series_oracle(double inv_re, double x, double t, std::size_t terms) {
    double num = 0.0, den = trapezoid_moment(inv_re, 0, 400);
    for (std::size_t n = 1; n <= terms; ++n) {
        const double an = 2.0 * trapezoid_moment(inv_re, n, 400);
        const double decay = std::exp(-double(n * n) * kPi * kPi * inv_re * t);
        num += an * decay * double(n) * std::sin(double(n) * kPi * x);
        den += an * decay * std::cos(double(n) * kPi * x);
    }
    return 2.0 * kPi * inv_re * num / den;
}

}  // namespace

TEST_SUITE("exact_solutions") {

TEST_CASE("Fourier coefficients against trapezoid quadrature") {
    const FourierCoefficients c = compute_fourier_coefficients(0.1);
    CHECK(c.a0 == doctest::Approx(trapezoid_moment(0.1, 0, 400)).epsilon(1e-13));
    for (std::size_t n = 1; n <= 30; ++n)
        CHECK(std::abs(c.a[n - 1] - 2.0 * trapezoid_moment(0.1, n, 400)) < 1e-13);
}

TEST_CASE("Fourier coefficients against modified Bessel functions") {
    for (double inv_re : {1.0, 0.1, 0.05}) {
        const FourierCoefficients c = compute_fourier_coefficients(inv_re);
        const double s = 1.0 / (2.0 * kPi * inv_re);
        CHECK(std::abs(c.a0 - std::exp(-s) * std::cyl_bessel_i(0.0, s)) < 1e-13);
        for (std::size_t n = 1; n <= 20; ++n)
            CHECK(std::abs(c.a[n - 1] - 2.0 * std::exp(-s) * std::cyl_bessel_i(double(n), s)) < 1e-13);
    }
}

TEST_CASE("weak nonlinearity limit") {
    const FourierCoefficients c = compute_fourier_coefficients(1e4, 10);
    CHECK(c.a0 == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(std::abs(c.a[1]) < 1e-8);
}

TEST_CASE("adaptive truncation satisfies its tail bound") {
    const FourierCoefficients c = compute_fourier_coefficients(0.1, 0, 1e-13, 0.05);
    REQUIRE(c.n_trunc() >= 50);
    const std::size_t n = c.n_trunc();
    CHECK(std::abs(c.a[n - 1]) * std::exp(-double(n * n) * kPi * kPi * 0.1 * 0.05) < 1e-14);
}

TEST_CASE("doubling the truncation leaves the series unchanged") {
    const FourierCoefficients c = compute_fourier_coefficients(0.1);
    const FourierCoefficients c2 = compute_fourier_coefficients(0.1, 2 * c.n_trunc());
    for (double x : {0.1, 0.25, 0.5, 0.75, 0.9})
        for (double t : {0.05, 0.4, 1.0})
            CHECK(std::abs(example1_exact(x, t, c) - example1_exact(x, t, c2)) < 1e-13);
}

TEST_CASE("series agrees with an independent series evaluation") {
    const FourierCoefficients c = compute_fourier_coefficients(0.1);
    for (double x : {0.25, 0.5, 0.75})
        for (double t : {0.4, 0.6, 0.8, 1.0})
            CHECK(std::abs(example1_exact(x, t, c) - series_oracle(0.1, x, t, 60)) < 1e-12);
}

TEST_CASE("series against the published exact column") {
    // Eleven of the twelve reference values agree to 2e-6; the entry at
    // (0.75, 0.6) is off by about 4e-6 from every independent evaluation.
    const FourierCoefficients c = compute_fourier_coefficients(0.1);
    struct Row { double x, t, exact; };
    const Row rows[] = {{0.25, 0.4, 0.308893}, {0.25, 0.6, 0.240739}, {0.25, 0.8, 0.195676},
                        {0.25, 1.0, 0.162564}, {0.50, 0.4, 0.569632}, {0.50, 0.6, 0.447205},
                        {0.50, 0.8, 0.359236}, {0.50, 1.0, 0.291916}, {0.75, 0.4, 0.625437},
                        {0.75, 0.8, 0.373923}, {0.75, 1.0, 0.287473}};
    for (const Row& r : rows) CHECK(std::abs(example1_exact(r.x, r.t, c) - r.exact) < 2e-6);
    const double odd = example1_exact(0.75, 0.6, c);
    CHECK(std::abs(odd - series_oracle(0.1, 0.75, 0.6, 60)) < 1e-12);
    CHECK(std::abs(odd - 0.487211) > 3e-6);
}

TEST_CASE("1D oracle domain checks") {
    const FourierCoefficients c = compute_fourier_coefficients(0.1);
    CHECK(example1_exact(0.0, 0.5, c) == 0.0);
    CHECK(example1_exact(1.0, 0.5, c) == 0.0);
    CHECK_THROWS(example1_exact(0.5, 0.0, c));
    CHECK_THROWS(example1_exact(0.5, -1.0, c));
    CHECK_THROWS(example1_exact(0.5, 0.01, c));
    CHECK_THROWS(example1_exact(1.5, 0.5, c));
}

TEST_CASE("2D trigonometric solution") {
    for (double t : {0.0, 0.3, 1.0}) {
        for (double y : {0.1, 0.4, 0.9}) {
            CHECK(std::abs(example2_exact(0.25, y, t, 0.1)[0]) <= 1e-15);
            CHECK(std::abs(example2_exact(0.5, y, t, 0.1)[1]) <= 1e-15);
        }
    }
    const ExampleCase ex = make_example(2);
    const double times[] = {0.5, 1.0};
    const OracleCheck chk = check_oracle(ex.spec, times, 1e-8);
    CHECK(chk.verified);
    CHECK(chk.max_residual <= 1e-8);
}

TEST_CASE("2D rational solution") {
    const ExampleCase ex = make_example(3);
    const double times[] = {0.05, 0.1};
    CHECK(check_oracle(ex.spec, times, 1e-10).verified);
    CHECK_NOTHROW(example3_exact(0.1, 0.2, 0.7));
    CHECK_THROWS_AS(example3_exact(0.1, 0.2, std::sqrt(0.5)), std::domain_error);
    CHECK_THROWS_AS(example3_exact(0.1, 0.2, 1.0), std::domain_error);
    const auto u = example3_exact(0.3, 0.2, 0.0);
    CHECK(u[0] == doctest::Approx(0.5));
    CHECK(u[1] == doctest::Approx(0.1));
}

TEST_CASE("3D linear solution: corrected and printed forms") {
    const auto u = example4_exact(0.5, 0.5, 0.5, 1.0, Example4Variant::residual_corrected);
    CHECK(u[0] == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(u[2] == u[0]);

    // For u = S / (1 + 3 t^2): residual = S (3 - 6 t) / (1 + 3 t^2)^2 per component.
    ExampleOptions printed;
    printed.variant = Example4Variant::as_printed;
    const ExampleCase bad = make_example(4, printed);
    const Velocity r = pde_residual(bad.spec.exact, 3, 0.08, Point{0.5, 0.5, 0.5}, 0.2);
    const double expect = 1.5 * 1.8 / (1.12 * 1.12);
    CHECK(r[0] == doctest::Approx(expect).epsilon(1e-8));
    CHECK(std::abs(pde_residual(bad.spec.exact, 3, 0.08, Point{0.5, 0.5, 0.5}, 0.5)[0]) < 1e-9);

    const ExampleCase good = make_example(4);
    const double times[] = {0.5, 1.0};
    CHECK(check_oracle(good.spec, times, 1e-10).verified);
    CHECK_FALSE(check_oracle(bad.spec, times, 1e-10).verified);
}

TEST_CASE("example registry") {
    CHECK_THROWS_AS(make_example(0), std::invalid_argument);
    CHECK_THROWS_AS(make_example(5), std::invalid_argument);
    const ExampleCase e1 = make_example(1);
    CHECK(e1.spec.dimension == 1);
    CHECK(e1.step_rule == StepRule::fixed_dt);
    CHECK(e1.dt == 1e-5);
    CHECK(e1.default_cells == 80);
    const ExampleCase e3 = make_example(3);
    CHECK(e3.spec.domain[0].right == 0.5);
    CHECK(e3.spec.final_time == 0.1);
    CHECK(resolve_step_rule(e3.step_rule, 0.0, e3.spec, Resolution::uniform(2, 8)).count == 64);
    const ExampleCase e2 = make_example(2);
    const TimeSteps s2 = resolve_step_rule(e2.step_rule, 0.0, e2.spec, Resolution::uniform(2, 16));
    CHECK(s2.count == 256);
    CHECK(s2.dt == doctest::Approx(1.0 / 256));
    CHECK(make_example(4).spec.inv_re == 0.08);
    CHECK(parse_step_rule("h2") == StepRule::h_squared);
    CHECK(to_string(StepRule::cells_squared) == "m2");
    CHECK_THROWS_AS(parse_step_rule("cfl"), std::invalid_argument);
}

}
