//==============================================================================
// gl_solver.hpp
// Semi-implicit integrator for the stochastic Ginzburg-Landau amplitude system
// on [-L, L)^2, split into real and imaginary parts:
//
//   dA^C/dT = 4 d2_X A^C + d2_Y A^C + A^C - 3(|A^R|^2+|A^I|^2) A^C + Xi^C
//
// IMEX step (x-diffusion and the linear growth term implicit):
//
//   ((1 - dT) I - 4 dT d2_X) A^{C,n+1}
//       = A^{C,n} + dT (d2_Y A^{C,n} - 3 |A^n|^2 A^{C,n} + Xi^C)
//
// solved row-wise by circulant_solve_x(a = 1-dT, b = -4dT, c = 0); needs
// dT < 1 so the implicit symbol stays positive.
//==============================================================================
#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "shpattern/errors.hpp"
#include "shpattern/grid.hpp"
#include "shpattern/noise.hpp"
#include "shpattern/spectral.hpp"

namespace shpattern {

inline constexpr double kBlowUpThreshold = 1e6;

struct GLState {
    RealField2D a_real;
    RealField2D a_imag;
    std::int64_t step = 0;
    double slow_time = 0.0;  // kept equal to step * delta_T exactly

    GLState() = default;
    GLState(RealField2D ar, RealField2D ai) : a_real(std::move(ar)), a_imag(std::move(ai)) {
        require_same_grid(a_real.grid, a_imag.grid, "GLState");
    }
};

struct GLConfig {
    Grid2D grid = Grid2D::square(100, kPi / 2);
    double delta_T = 1e-4;
    bool noise = true;
    std::uint64_t seed = 1;
    int m_R = 10;
    int m_I = 10;
    double noise_amplitude = 1.0;  // multiplier on Xi (scale relation is open)
    bool cubic = true;             // test hook: disable the explicit cubic
};

inline void validate(const GLConfig& cfg) {
    if (!(cfg.delta_T > 0.0) || !(cfg.delta_T < 1.0))
        throw ConfigError("gl: delta_T must lie in (0, 1)");
    if (cfg.m_R < 0 || cfg.m_I < 0) throw ConfigError("gl: truncation must be >= 0");
}

namespace detail {

inline void check_blowup(const RealField2D& f, std::int64_t step, const char* who) {
    const double m = max_abs(f);
    if (!(m <= kBlowUpThreshold) || !all_finite(f))
        throw BlowUp(step, m, std::string(who) + ": field exceeded blow-up threshold");
}

}  // namespace detail

// One IMEX step. xi_r/xi_i must be present iff cfg.noise is on.
inline GLState gl_step(const GLState& state, const GLConfig& cfg, const RealField2D* xi_r,
                       const RealField2D* xi_i) {
    validate(cfg);
    require_same_grid(state.a_real.grid, state.a_imag.grid, "gl_step");
    if (!(state.a_real.grid == cfg.grid))
        throw GridMismatch("gl_step: state grid differs from config grid");
    if (cfg.noise != (xi_r != nullptr) || cfg.noise != (xi_i != nullptr))
        throw ConfigError("gl_step: noise fields must be present iff noise is on");
    if (xi_r) require_same_grid(state.a_real.grid, xi_r->grid, "gl_step xi");
    if (xi_i) require_same_grid(state.a_real.grid, xi_i->grid, "gl_step xi");

    const double dT = cfg.delta_T;
    const RealField2D d2y_r = d2_axis(state.a_real, Axis::Y);
    const RealField2D d2y_i = d2_axis(state.a_imag, Axis::Y);

    GLState out;
    out.step = state.step + 1;
    out.slow_time = static_cast<double>(out.step) * dT;

    RealField2D rhs(cfg.grid);
    for (int comp = 0; comp < 2; ++comp) {
        const RealField2D& a = comp == 0 ? state.a_real : state.a_imag;
        const RealField2D& d2y = comp == 0 ? d2y_r : d2y_i;
        const RealField2D* xi = comp == 0 ? xi_r : xi_i;
        for (std::size_t i = 0; i < rhs.values.size(); ++i) {
            double expl = d2y.values[i];
            if (cfg.cubic) {
                const double sq = state.a_real.values[i] * state.a_real.values[i] +
                                  state.a_imag.values[i] * state.a_imag.values[i];
                expl -= 3.0 * sq * a.values[i];
            }
            if (xi) expl += cfg.noise_amplitude * xi->values[i];
            rhs.values[i] = a.values[i] + dT * expl;
        }
        RealField2D next = circulant_solve_x(1.0 - dT, -4.0 * dT, 0.0, rhs);
        detail::check_blowup(next, out.step, "gl_step");
        (comp == 0 ? out.a_real : out.a_imag) = std::move(next);
    }
    return out;
}

namespace detail {

// Map requested times onto exact step indices of the given step size.
inline std::vector<std::int64_t> snapshot_steps(const std::vector<double>& times, double dt,
                                                const char* who) {
    std::vector<std::int64_t> steps;
    steps.reserve(times.size());
    std::int64_t prev = -1;
    for (double t : times) {
        if (t < 0.0) throw ClockMismatch(std::string(who) + ": negative snapshot time");
        const std::int64_t n = std::llround(t / dt);
        if (std::abs(n * dt - t) > 1e-9 * std::max(1.0, std::abs(t)))
            throw ClockMismatch(std::string(who) + ": snapshot time is not a multiple of the step");
        if (n <= prev) throw ClockMismatch(std::string(who) + ": snapshot times must increase");
        prev = n;
        steps.push_back(n);
    }
    return steps;
}

}  // namespace detail

// Integrate from `initial`, drawing one registry increment of size delta_T per
// step when noise is on, and return the states at the requested slow times.
inline std::vector<GLState> run_gl(const GLConfig& cfg,
                                   std::pair<RealField2D, RealField2D> initial,
                                   const std::vector<double>& snapshots_at) {
    validate(cfg);
    const std::vector<std::int64_t> targets =
        detail::snapshot_steps(snapshots_at, cfg.delta_T, "run_gl");

    GLState state(std::move(initial.first), std::move(initial.second));
    if (!(state.a_real.grid == cfg.grid))
        throw GridMismatch("run_gl: initial data grid differs from config grid");

    BrownianRegistry registry(cfg.seed, cfg.m_R, cfg.m_I);
    const double L = cfg.grid.half_len_x;

    std::vector<GLState> out;
    out.reserve(targets.size());
    std::size_t next_target = 0;
    const std::int64_t last = targets.empty() ? 0 : targets.back();
    for (std::int64_t n = 0; n <= last; ++n) {
        if (next_target < targets.size() && targets[next_target] == n) {
            out.push_back(state);
            ++next_target;
        }
        if (n == last) break;
        if (cfg.noise) {
            const NoiseIncrement inc = registry.advance(cfg.delta_T);
            const auto [xi_r, xi_i] = assemble_xi_A(inc, cfg.grid, L);
            state = gl_step(state, cfg, &xi_r, &xi_i);
        } else {
            state = gl_step(state, cfg, nullptr, nullptr);
        }
    }
    return out;
}

}  // namespace shpattern
