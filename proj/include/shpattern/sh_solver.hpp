//==============================================================================
// sh_solver.hpp
// Semi-implicit integrator for the stochastic anisotropic Swift-Hohenberg
// equation on [-L/eps, L/eps)^2 in the (u, mu) formulation
//
//   du/dt = d2_x mu + d2_y u + eps^2 u - u^3 + eps * Xi_eps
//   mu    = -d2_x u - u^{n+1} - u^n        (time-split two in the scheme)
//
// Eliminating mu^{n+1} yields the row-wise x-implicit update
//
//   ((1 + dt) I + dt d2_x + dt d4_x) u^{n+1}
//     = u^n + dt (-d2_x u^n + d2_y u^n + eps^2 u^n - (u^n)^3 + eps Xi_eps)
//
// solved by circulant_solve_x(a = 1+dt, b = dt, c = dt), then mu^{n+1} is
// reconstructed. The shifted variant integrates v with the cubic (v + Z)^3 at
// eps = 1 and no direct noise, for the u = v + Z decomposition study.
//==============================================================================
#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "shpattern/errors.hpp"
#include "shpattern/gl_solver.hpp"
#include "shpattern/grid.hpp"
#include "shpattern/noise.hpp"
#include "shpattern/ou_process.hpp"
#include "shpattern/spectral.hpp"

namespace shpattern {

enum class SHMode { direct, shifted };

struct SHState {
    RealField2D u;
    RealField2D mu;
    std::int64_t step = 0;
    double fast_time = 0.0;  // kept equal to step * delta_t exactly

    SHState() = default;
    SHState(RealField2D u_, RealField2D mu_) : u(std::move(u_)), mu(std::move(mu_)) {
        require_same_grid(u.grid, mu.grid, "SHState");
    }
};

struct SHConfig {
    Grid2D grid = Grid2D::square(100, (kPi / 2) / 0.25);  // [-L/eps, L/eps)^2
    double delta_t = 1e-3;
    double eps = 0.25;
    double half_len = kPi / 2;  // the slow-scale L
    bool noise = true;
    SHMode mode = SHMode::direct;
    std::uint64_t seed = 1;
    int m_R = 10;
    int m_I = 10;
    double noise_amplitude = 1.0;
    bool cubic = true;  // test hook: disable the explicit cubic
};

inline void validate(const SHConfig& cfg) {
    if (!(cfg.delta_t > 0.0)) throw ConfigError("sh: delta_t must be positive");
    if (!(cfg.eps > 0.0) || cfg.eps > 1.0) throw ConfigError("sh: eps must lie in (0, 1]");
    if (!(cfg.half_len > 0.0)) throw ConfigError("sh: half_len must be positive");
    if (cfg.m_R < 0 || cfg.m_I < 0) throw ConfigError("sh: truncation must be >= 0");
    if (cfg.mode == SHMode::shifted && cfg.eps != 1.0)
        throw ConfigError("sh: shifted mode fixes eps = 1");
    const double want = cfg.half_len / cfg.eps;
    if (std::abs(cfg.grid.half_len_x - want) > 1e-9 * want ||
        std::abs(cfg.grid.half_len_y - want) > 1e-9 * want)
        throw GridMismatch("sh: grid must cover [-L/eps, L/eps)^2");
}

namespace detail {

// Shared IMEX core: cubic_arg supplies the field whose cube is damped
// ((u^n) for the direct scheme, (v^n + Z^n) for the shifted one).
inline RealField2D sh_core_step(const RealField2D& u, const RealField2D& cubic_arg,
                                const RealField2D* forcing, double dt, double eps_sq,
                                bool cubic) {
    const RealField2D d2x = d2_axis(u, Axis::X);
    const RealField2D d2y = d2_axis(u, Axis::Y);
    RealField2D rhs(u.grid);
    for (std::size_t i = 0; i < rhs.values.size(); ++i) {
        double expl = -d2x.values[i] + d2y.values[i] + eps_sq * u.values[i];
        if (cubic) {
            const double c = cubic_arg.values[i];
            expl -= c * c * c;
        }
        if (forcing) expl += forcing->values[i];
        rhs.values[i] = u.values[i] + dt * expl;
    }
    return circulant_solve_x(1.0 + dt, dt, dt, rhs);
}

inline RealField2D sh_mu(const RealField2D& u_next, const RealField2D& u_prev) {
    RealField2D mu = d2_axis(u_next, Axis::X);
    for (std::size_t i = 0; i < mu.values.size(); ++i)
        mu.values[i] = -mu.values[i] - u_next.values[i] - u_prev.values[i];
    return mu;
}

}  // namespace detail

// One direct-scheme step. xi_eps must be present iff cfg.noise is on; the
// update adds dt * eps * noise_amplitude * Xi_eps.
inline SHState sh_step(const SHState& state, const SHConfig& cfg, const RealField2D* xi_eps) {
    validate(cfg);
    if (!(state.u.grid == cfg.grid)) throw GridMismatch("sh_step: state grid differs from config");
    if (cfg.noise != (xi_eps != nullptr))
        throw ConfigError("sh_step: noise field must be present iff noise is on");

    RealField2D forcing(cfg.grid);
    const RealField2D* fptr = nullptr;
    if (xi_eps) {
        require_same_grid(state.u.grid, xi_eps->grid, "sh_step xi");
        for (std::size_t i = 0; i < forcing.values.size(); ++i)
            forcing.values[i] = cfg.eps * cfg.noise_amplitude * xi_eps->values[i];
        fptr = &forcing;
    }
    SHState out;
    out.step = state.step + 1;
    out.fast_time = static_cast<double>(out.step) * cfg.delta_t;
    out.u = detail::sh_core_step(state.u, state.u, fptr, cfg.delta_t, cfg.eps * cfg.eps,
                                 cfg.cubic);
    detail::check_blowup(out.u, out.step, "sh_step");
    out.mu = detail::sh_mu(out.u, state.u);
    return out;
}

// One shifted-scheme step for v: dv/dt = L_1 v - (v + Z)^3 at eps = 1, no
// direct noise. `z` is the stochastic convolution at the state's fast_time.
inline SHState sh_step_shifted(const SHState& state, const SHConfig& cfg, const RealField2D& z) {
    validate(cfg);
    if (cfg.mode != SHMode::shifted)
        throw ConfigError("sh_step_shifted: config mode must be 'shifted'");
    if (!(state.u.grid == cfg.grid))
        throw GridMismatch("sh_step_shifted: state grid differs from config");
    require_same_grid(state.u.grid, z.grid, "sh_step_shifted z");

    RealField2D shifted(cfg.grid);
    for (std::size_t i = 0; i < shifted.values.size(); ++i)
        shifted.values[i] = state.u.values[i] + z.values[i];

    SHState out;
    out.step = state.step + 1;
    out.fast_time = static_cast<double>(out.step) * cfg.delta_t;
    out.u = detail::sh_core_step(state.u, shifted, nullptr, cfg.delta_t, 1.0, cfg.cubic);
    detail::check_blowup(out.u, out.step, "sh_step_shifted");
    out.mu = detail::sh_mu(out.u, state.u);
    return out;
}

// mu at t = 0 from the continuous constraint mu = -d2_x u - 2u.
inline RealField2D initial_mu(const RealField2D& u0) {
    RealField2D mu = d2_axis(u0, Axis::X);
    for (std::size_t i = 0; i < mu.values.size(); ++i)
        mu.values[i] = -mu.values[i] - 2.0 * u0.values[i];
    return mu;
}

// Integrate from initial_u and return states at the requested fast times. In
// direct mode each step draws one registry increment of slow size eps^2 dt; in
// shifted mode Z is advanced mode-exactly alongside and sampled at step times.
inline std::vector<SHState> run_sh(const SHConfig& cfg, RealField2D initial_u,
                                   const std::vector<double>& snapshots_at) {
    validate(cfg);
    const std::vector<std::int64_t> targets =
        detail::snapshot_steps(snapshots_at, cfg.delta_t, "run_sh");

    SHState state(std::move(initial_u), RealField2D(cfg.grid));
    if (!(state.u.grid == cfg.grid))
        throw GridMismatch("run_sh: initial data grid differs from config grid");
    state.mu = initial_mu(state.u);

    BrownianRegistry registry(cfg.seed, cfg.m_R, cfg.m_I);
    OUState ou(cfg.seed, std::max(cfg.m_R, cfg.m_I), 1.0, cfg.half_len);

    std::vector<SHState> out;
    out.reserve(targets.size());
    std::size_t next_target = 0;
    const std::int64_t last = targets.empty() ? 0 : targets.back();
    for (std::int64_t n = 0; n <= last; ++n) {
        if (next_target < targets.size() && targets[next_target] == n) {
            out.push_back(state);
            ++next_target;
        }
        if (n == last) break;
        if (cfg.mode == SHMode::shifted) {
            const RealField2D z = z_field(ou, cfg.grid);
            state = sh_step_shifted(state, cfg, z);
            ou.step_exact(cfg.delta_t, cfg.noise);
        } else if (cfg.noise) {
            const NoiseIncrement inc = registry.advance(cfg.eps * cfg.eps * cfg.delta_t);
            const RealField2D xi = assemble_xi_u(inc, cfg.grid, cfg.eps, cfg.half_len);
            state = sh_step(state, cfg, &xi);
        } else {
            state = sh_step(state, cfg, nullptr);
        }
    }
    return out;
}

}  // namespace shpattern
