#pragma once

// Third-order TVD (strong-stability-preserving) Runge-Kutta step.
//
//   u1      = u + dt L(u)
//   u2      = 3/4 u + 1/4 u1 + 1/4 dt L(u1)
//   u^{n+1} = 1/3 u + 2/3 u2 + 2/3 dt L(u2)
//
// Each stage is evaluated in increment form u + c ((prev - u) + dt L(prev)),
// so a state with L == 0 comes back bit-for-bit unchanged.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ccdtvd/field.hpp"

namespace ccdtvd {

/// Convex (Shu-Osher) weights of the three stages. Stage k forms
/// previous_weight[k] * (prev + dt L(prev)) + (1 - previous_weight[k]) * u^n.
struct StageWeights {
    static constexpr std::array<double, 3> previous_weight{1.0, 1.0 / 4.0, 2.0 / 3.0};
    static constexpr std::array<double, 3> base_weight{0.0, 3.0 / 4.0, 1.0 / 3.0};
    /// Time of each intermediate state relative to t^n, in units of dt.
    static constexpr std::array<double, 2> stage_time{1.0, 0.5};
};

class NonFiniteStageError : public std::runtime_error {
public:
    explicit NonFiniteStageError(int stage)
        : std::runtime_error("non-finite value after RK stage " + std::to_string(stage)),
          stage_(stage) {}
    int stage() const noexcept { return stage_; }

private:
    int stage_;
};

inline void axpy(double& y, double a, double x) { y += a * x; }
inline bool all_finite(double x) { return std::isfinite(x); }

inline void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
    if (y.size() != x.size()) throw std::invalid_argument("axpy: size mismatch");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}
inline bool all_finite(const std::vector<double>& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

/// Stage hook that does nothing.
struct NoStageHook {
    template <class State>
    void operator()(State&, int, double) const noexcept {}
};

/**
 * One step of size dt. `rhs(state)` returns L(state) as a State and is called
 * exactly three times. `hook(state, stage, offset)` runs on u1 (stage 1,
 * offset dt) and u2 (stage 2, offset dt/2) before they are fed to `rhs`; it is
 * where stage boundary values may be imposed.
 *
 * State needs copy construction plus unqualified axpy(State&, double, const
 * State&) and all_finite(const State&).
 */
template <class State, class Rhs, class Hook = NoStageHook>
State tvd_rk3_step(const State& u, double dt, Rhs&& rhs, Hook&& hook = Hook{}) {
    State prev = u;
    for (int k = 0; k < 3; ++k) {
        State incr = prev;
        axpy(incr, -1.0, u);
        const State l = rhs(static_cast<const State&>(prev));
        if (!all_finite(l)) throw NonFiniteStageError(k + 1);
        axpy(incr, dt, l);

        State next = u;
        axpy(next, StageWeights::previous_weight[k], incr);
        if (!all_finite(next)) throw NonFiniteStageError(k + 1);
        if (k < 2) hook(next, k + 1, StageWeights::stage_time[k] * dt);
        prev = std::move(next);
    }
    return prev;
}

}  // namespace ccdtvd
