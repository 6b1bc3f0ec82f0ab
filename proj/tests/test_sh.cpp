// Swift-Hohenberg IMEX stepping: constant-field closed forms, scalar mode
// recurrences, anisotropy signature, cubic damping, the shifted variant, and
// run-level plumbing.
#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "shpattern/grid.hpp"
#include "shpattern/noise.hpp"
#include "shpattern/sh_solver.hpp"
#include "shpattern/spectral.hpp"

using namespace shpattern;

namespace {

RealField2D constant_field(const Grid2D& g, double c) {
    RealField2D f(g);
    for (auto& v : f.values) v = c;
    return f;
}

RealField2D index_cosine(const Grid2D& g, int k, bool along_x) {
    RealField2D f(g);
    for (int q = 0; q < g.n_y; ++q)
        for (int p = 0; p < g.n_x; ++p)
            f(p, q) = along_x ? std::cos(2.0 * kPi * k * p / g.n_x)
                              : std::cos(2.0 * kPi * k * q / g.n_y);
    return f;
}

SHConfig fast_cfg() {
    SHConfig cfg;
    cfg.grid = Grid2D::square(40, (kPi / 2) / 0.25);
    cfg.delta_t = 1e-3;
    cfg.eps = 0.25;
    cfg.noise = false;
    return cfg;
}

}  // namespace

TEST_CASE("sh_step zero and constant-field closed forms") {
    SHConfig cfg = fast_cfg();
    SHState zero{RealField2D(cfg.grid), RealField2D(cfg.grid)};
    SHState z1 = sh_step(zero, cfg, nullptr);
    CHECK(max_abs(z1.u) == 0.0);
    CHECK(max_abs(z1.mu) == 0.0);

    // u = c: all difference terms vanish, u' = (c + dt(eps^2 c - c^3))/(1+dt)
    const double c = 0.3, dt = cfg.delta_t, e2 = cfg.eps * cfg.eps;
    SHState st{constant_field(cfg.grid, c), initial_mu(constant_field(cfg.grid, c))};
    SHState out = sh_step(st, cfg, nullptr);
    const double want = (c + dt * (e2 * c - c * c * c)) / (1.0 + dt);
    for (double v : out.u.values) CHECK(std::abs(v - want) < 1e-13);
    // mu^{n+1} = -d2x u' - u' - u^n on constants
    for (double v : out.mu.values) CHECK(std::abs(v - (-want - c)) < 1e-13);
    CHECK(out.fast_time == Catch::Approx(dt));
}

TEST_CASE("sh_step single-mode rational multiplier (cubic disabled)") {
    SHConfig cfg = fast_cfg();
    cfg.cubic = false;
    for (int k : {1, 2, 5}) {
        SHState st{index_cosine(cfg.grid, k, true), RealField2D(cfg.grid)};
        st.mu = initial_mu(st.u);
        SHState out = sh_step(st, cfg, nullptr);
        const double s = x_symbol(k, cfg.grid.n_x, cfg.grid.dx());
        const double dt = cfg.delta_t, e2 = cfg.eps * cfg.eps;
        const double mult = (1.0 + dt * (-s + e2)) / (1.0 + dt * (1.0 + s + s * s));
        for (std::size_t i = 0; i < out.u.values.size(); ++i)
            CHECK(out.u.values[i] ==
                  Catch::Approx(mult * st.u.values[i]).margin(1e-12 * std::abs(mult)));
    }
}

TEST_CASE("sh first-order consistency vs the semi-discrete semigroup") {
    SHConfig cfg = fast_cfg();
    cfg.cubic = false;
    const int k = 3;
    const double s = x_symbol(k, cfg.grid.n_x, cfg.grid.dx());
    const double growth = -(1.0 + s) * (1.0 + s) + cfg.eps * cfg.eps;
    const double t_end = 0.5;
    std::vector<double> errors;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        cfg.delta_t = dt;
        const int n_steps = static_cast<int>(std::llround(t_end / dt));
        SHState st{index_cosine(cfg.grid, k, true), RealField2D(cfg.grid)};
        st.mu = initial_mu(st.u);
        for (int n = 0; n < n_steps; ++n) st = sh_step(st, cfg, nullptr);
        errors.push_back(std::abs(st.u(0, 0) - std::exp(growth * t_end)));
    }
    CHECK(errors[0] / errors[1] > 1.8);
    CHECK(errors[0] / errors[1] < 2.2);
    CHECK(errors[1] / errors[2] > 1.8);
    CHECK(errors[1] / errors[2] < 2.2);
}

TEST_CASE("anisotropy signature at the critical wavenumber") {
    // On [-L/eps, L/eps) the x-mode k = 2 sits at continuous wavenumber 1
    // (the pattern-forming band); with the eps^2 term it must grow per step,
    // while the same amplitude in a pure y-mode must decay.
    SHConfig cfg = fast_cfg();
    cfg.cubic = false;
    SHState xm{index_cosine(cfg.grid, 2, true), RealField2D(cfg.grid)};
    xm.mu = initial_mu(xm.u);
    SHState xo = sh_step(xm, cfg, nullptr);
    CHECK(std::abs(xo.u(0, 0)) > 1.0);  // amplification > 1

    SHState ym{index_cosine(cfg.grid, 2, false), RealField2D(cfg.grid)};
    ym.mu = initial_mu(ym.u);
    SHState yo = sh_step(ym, cfg, nullptr);
    CHECK(std::abs(yo.u(0, 0)) < 1.0);  // decay
}

TEST_CASE("cubic damping from u = 10") {
    SHConfig cfg = fast_cfg();
    cfg.grid = Grid2D::square(16, (kPi / 2) / 0.25);
    SHState st{constant_field(cfg.grid, 10.0), initial_mu(constant_field(cfg.grid, 10.0))};
    double prev = lp_norm(st.u, 2.0);
    for (int n = 0; n < 100; ++n) {
        st = sh_step(st, cfg, nullptr);
        const double cur = lp_norm(st.u, 2.0);
        REQUIRE(cur < prev);  // strictly decreasing
        prev = cur;
    }
}

TEST_CASE("deterministic L2 boundedness tripwire") {
    SHConfig cfg = fast_cfg();
    RealField2D u0 = index_cosine(cfg.grid, 2, true);
    const double norm0 = lp_norm(u0, 2.0);
    SHState st{u0, initial_mu(u0)};
    double sup = 0.0;
    for (int n = 0; n < 400; ++n) {
        st = sh_step(st, cfg, nullptr);
        sup = std::max(sup, lp_norm(st.u, 2.0));
    }
    CHECK(sup <= 10.0 * std::max(norm0, 1.0));
}

TEST_CASE("shifted step: degeneracy and constant-Z reduction") {
    SHConfig direct = fast_cfg();
    direct.grid = Grid2D::square(24, kPi / 2);
    direct.eps = 1.0;
    SHConfig shifted = direct;
    shifted.mode = SHMode::shifted;

    // Z = 0 makes the shifted update identical to the eps = 1 direct one
    RealField2D v0 = index_cosine(direct.grid, 1, true);
    SHState a{v0, initial_mu(v0)}, b{v0, initial_mu(v0)};
    RealField2D zero(direct.grid);
    for (int n = 0; n < 5; ++n) {
        a = sh_step(a, direct, nullptr);
        b = sh_step_shifted(b, shifted, zero);
    }
    CHECK(a.u.values == b.u.values);
    CHECK(a.mu.values == b.mu.values);

    // v = 0, Z = c: only the cubic fires, v' = -dt c^3 / (1 + dt)
    const double c = 0.7, dt = shifted.delta_t;
    SHState z0{RealField2D(direct.grid), RealField2D(direct.grid)};
    SHState z1 = sh_step_shifted(z0, shifted, constant_field(direct.grid, c));
    const double want = -dt * c * c * c / (1.0 + dt);
    for (double v : z1.u.values) CHECK(std::abs(v - want) < 1e-13);

    CHECK_THROWS_AS(sh_step_shifted(z0, direct, zero), ConfigError);
}

TEST_CASE("sh config and blow-up errors") {
    SHConfig cfg = fast_cfg();
    SHState st{RealField2D(cfg.grid), RealField2D(cfg.grid)};

    SHConfig bad = cfg;
    bad.eps = 1.5;
    CHECK_THROWS_AS(sh_step(st, bad, nullptr), ConfigError);
    bad = cfg;
    bad.delta_t = 0.0;
    CHECK_THROWS_AS(sh_step(st, bad, nullptr), ConfigError);
    bad = cfg;
    bad.mode = SHMode::shifted;  // eps != 1
    CHECK_THROWS_AS(sh_step(st, bad, nullptr), ConfigError);
    bad = cfg;
    bad.grid = Grid2D::square(40, kPi / 2);  // not [-L/eps, L/eps)
    CHECK_THROWS_AS(sh_step(st, bad, nullptr), GridMismatch);
    bad = cfg;
    bad.noise = true;
    CHECK_THROWS_AS(sh_step(st, bad, nullptr), ConfigError);

    SHState hs{constant_field(cfg.grid, 1e4), RealField2D(cfg.grid)};
    try {
        sh_step(hs, cfg, nullptr);
        FAIL("expected BlowUp");
    } catch (const BlowUp& b) {
        CHECK(b.step_index == 1);
        CHECK(b.max_value > kBlowUpThreshold);
    }
}

TEST_CASE("run_sh snapshots, reproducibility, and registry order") {
    SHConfig cfg = fast_cfg();
    cfg.noise = true;
    cfg.seed = 4242;
    cfg.m_R = 3;
    cfg.m_I = 3;

    SHConfig quiet = cfg;
    quiet.noise = false;
    auto zs = run_sh(quiet, RealField2D(cfg.grid), {0.0, 5e-3, 1e-2});
    REQUIRE(zs.size() == 3);
    for (const SHState& s : zs) CHECK(max_abs(s.u) == 0.0);

    // mu0 initialization from the continuous constraint
    RealField2D u0 = index_cosine(cfg.grid, 2, true);
    auto init = run_sh(quiet, u0, {0.0});
    REQUIRE(init.size() == 1);
    RealField2D mu0 = initial_mu(u0);
    CHECK(init[0].mu.values == mu0.values);

    auto r1 = run_sh(cfg, RealField2D(cfg.grid), {1e-2});
    auto r2 = run_sh(cfg, RealField2D(cfg.grid), {1e-2});
    REQUIRE(r1.size() == 1);
    CHECK(r1[0].u.values == r2[0].u.values);
    CHECK(max_abs(r1[0].u) > 0.0);

    // one increment of slow size eps^2 dt per step, assembled on the u grid
    BrownianRegistry reg(cfg.seed, cfg.m_R, cfg.m_I);
    SHState manual{RealField2D(cfg.grid), initial_mu(RealField2D(cfg.grid))};
    for (int n = 0; n < 10; ++n) {
        const NoiseIncrement inc = reg.advance(cfg.eps * cfg.eps * cfg.delta_t);
        const RealField2D xi = assemble_xi_u(inc, cfg.grid, cfg.eps, cfg.half_len);
        manual = sh_step(manual, cfg, &xi);
    }
    CHECK(manual.u.values == r1[0].u.values);

    CHECK_THROWS_AS(run_sh(cfg, RealField2D(cfg.grid), {1.5e-3, 1.0e-3}), ClockMismatch);
    CHECK_THROWS_AS(run_sh(cfg, RealField2D(cfg.grid), {0.00137}), ClockMismatch);
}

TEST_CASE("run_sh shifted mode consumes exact Z snapshots") {
    SHConfig cfg;
    cfg.grid = Grid2D::square(24, kPi / 2);
    cfg.eps = 1.0;
    cfg.half_len = kPi / 2;
    cfg.delta_t = 1e-3;
    cfg.mode = SHMode::shifted;
    cfg.noise = true;
    cfg.seed = 31337;
    cfg.m_R = 4;
    cfg.m_I = 4;

    auto r = run_sh(cfg, RealField2D(cfg.grid), {5e-3});
    REQUIRE(r.size() == 1);

    // replicate: OU advanced after each v-step, consuming Z at step times
    OUState ou(cfg.seed, 4, 1.0, cfg.half_len);
    SHState manual{RealField2D(cfg.grid), initial_mu(RealField2D(cfg.grid))};
    for (int n = 0; n < 5; ++n) {
        const RealField2D z = z_field(ou, cfg.grid);
        manual = sh_step_shifted(manual, cfg, z);
        ou.step_exact(cfg.delta_t);
    }
    CHECK(manual.u.values == r[0].u.values);
    CHECK(max_abs(r[0].u) > 0.0);
}
