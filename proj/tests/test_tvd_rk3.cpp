#include <doctest.h>

#include <cmath>
#include <limits>

#include "ccdtvd/tvd_rk3.hpp"
#include "oracles.hpp"

using namespace ccdtvd;

TEST_SUITE("tvd_rk3") {

TEST_CASE("weights are convex combinations") {
    for (int k = 0; k < 3; ++k)
        CHECK(StageWeights::previous_weight[k] + StageWeights::base_weight[k] == 1.0);
}

TEST_CASE("zero right-hand side is a bitwise fixed point") {
    oracle::Gen gen(1);
    const auto u = gen.vector(50, -1e3, 1e3);
    const auto zero = [](const std::vector<double>& s) { return std::vector<double>(s.size(), 0.0); };
    const auto out = tvd_rk3_step(u, 0.37, zero);
    CHECK(out == u);
}

TEST_CASE("linear amplification factor is the cubic Taylor polynomial") {
    oracle::Gen gen(2);
    for (int trial = 0; trial < 50; ++trial) {
        const double lambda = gen.uniform(-3.0, 1.0), dt = gen.uniform(0.01, 0.8);
        const double z = lambda * dt;
        const double got = tvd_rk3_step(1.0, dt, [lambda](double v) { return lambda * v; });
        CHECK(got == doctest::Approx(1.0 + z + z * z / 2 + z * z * z / 6).epsilon(1e-14));
    }
}

TEST_CASE("u' = u over one step of 0.1") {
    const double got = tvd_rk3_step(1.0, 0.1, [](double v) { return v; });
    CHECK(got == doctest::Approx(1.1051666666666666).epsilon(1e-15));
}

TEST_CASE("third-order global convergence on a nonlinear problem") {
    // u' = -u^2, u(0) = 1  =>  u(t) = 1 / (1 + t)
    auto integrate = [](int n) {
        double u = 1.0;
        const double dt = 1.0 / n;
        for (int i = 0; i < n; ++i) u = tvd_rk3_step(u, dt, [](double v) { return -v * v; });
        return std::abs(u - 0.5);
    };
    const double e1 = integrate(20), e2 = integrate(40), e3 = integrate(80);
    CHECK(std::log2(e1 / e2) == doctest::Approx(3.0).epsilon(0.1 / 3));
    CHECK(std::log2(e2 / e3) == doctest::Approx(3.0).epsilon(0.1 / 3));
}

TEST_CASE("three rhs evaluations and two hooks per step") {
    int calls = 0;
    std::vector<std::pair<int, double>> hooks;
    auto rhs = [&calls](double v) {
        ++calls;
        return -v;
    };
    auto hook = [&hooks](double&, int stage, double offset) { hooks.emplace_back(stage, offset); };
    tvd_rk3_step(2.0, 0.3, rhs, hook);
    CHECK(calls == 3);
    REQUIRE(hooks.size() == 2);
    CHECK(hooks[0] == std::pair{1, 0.3});
    CHECK(hooks[1] == std::pair{2, 0.15});
}

TEST_CASE("hook modifications feed the next stage") {
    // Pinning the stages to 0 makes the last stage 1/3 u.
    auto hook = [](double& s, int, double) { s = 0.0; };
    const double got = tvd_rk3_step(3.0, 0.5, [](double) { return 0.0; }, hook);
    CHECK(got == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("non-finite stages are reported with their index") {
    int calls = 0;
    auto rhs = [&calls](double v) {
        return ++calls == 2 ? std::numeric_limits<double>::quiet_NaN() : v;
    };
    try {
        tvd_rk3_step(1.0, 0.1, rhs);
        FAIL("expected NonFiniteStageError");
    } catch (const NonFiniteStageError& e) {
        CHECK(e.stage() == 2);
    }
    CHECK_THROWS_AS(tvd_rk3_step(1.0, 1e300, [](double v) { return 1e300 * v; }), NonFiniteStageError);
}

}
