//==============================================================================
// harness.hpp
// Experiment orchestration: comparison metrics, the shared-noise GL-vs-SH
// pipeline, the u = v + Z decomposition study, OU variance statistics, and the
// file-emitting drivers behind the CLI subcommands.
//==============================================================================
#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "shpattern/ansatz.hpp"
#include "shpattern/config.hpp"
#include "shpattern/errors.hpp"
#include "shpattern/gl_solver.hpp"
#include "shpattern/grid.hpp"
#include "shpattern/io.hpp"
#include "shpattern/noise.hpp"
#include "shpattern/ou_process.hpp"
#include "shpattern/rng.hpp"
#include "shpattern/sh_solver.hpp"
#include "shpattern/spectral.hpp"

namespace shpattern {

//----------------------------------------------------------------------------
// metrics
//----------------------------------------------------------------------------

// relative L^p distance, floored so an identically-zero reference cannot
// divide by zero
inline double approximation_error(const RealField2D& u_direct, const RealField2D& u_ansatz,
                                  double p) {
    require_same_grid(u_direct.grid, u_ansatz.grid, "approximation_error");
    RealField2D diff(u_direct.grid);
    for (std::size_t i = 0; i < diff.values.size(); ++i)
        diff.values[i] = u_direct.values[i] - u_ansatz.values[i];
    return lp_norm(diff, p) / std::max(lp_norm(u_ansatz, p), 1e-30);
}

// physical wavenumber pi k*/half_len_x of the strongest y-averaged x-mode,
// k = 0 excluded
inline double dominant_x_wavenumber(const RealField2D& u) {
    const Grid2D& g = u.grid;
    if (g.n_x < 4) throw ConfigError("dominant_x_wavenumber: need n_x >= 4");
    int best_k = 1;
    double best_e = -1.0;
    for (int k = 1; k <= g.n_x / 2; ++k) {
        double energy = 0.0;
        for (int q = 0; q < g.n_y; ++q) {
            double re = 0.0, im = 0.0;
            for (int p = 0; p < g.n_x; ++p) {
                const double ph = 2.0 * kPi * k * p / g.n_x;
                re += u(p, q) * std::cos(ph);
                im -= u(p, q) * std::sin(ph);
            }
            energy += re * re + im * im;
        }
        if (energy > best_e) {
            best_e = energy;
            best_k = k;
        }
    }
    return kPi * best_k / g.half_len_x;
}

struct EnergyDiagnostics {
    double l2sq = 0.0;
    double w12sq = 0.0;
    double l4quad = 0.0;
};

inline EnergyDiagnostics energy_diagnostics(const RealField2D& v) {
    EnergyDiagnostics e;
    const double l2 = lp_norm(v, 2.0);
    const double l4 = lp_norm(v, 4.0);
    const double w12 = sobolev_norm(v, 1.0, 2.0);
    e.l2sq = l2 * l2;
    e.w12sq = w12 * w12;
    e.l4quad = l4 * l4 * l4 * l4;
    return e;
}

//----------------------------------------------------------------------------
// OU variance statistics (ou-stats experiment, Ito isometry checks)
//----------------------------------------------------------------------------

struct OUStatRow {
    int mode_k = 0;
    int mode_l = 0;
    double lambda = 0.0;
    double t = 0.0;
    double empirical_var = 0.0;
    double exact_var = 0.0;
    double z_score = 0.0;
};

// Per-part empirical variance of the exact OU step at t in {0.1, 1.0} for the
// probe modes (0,0), (0,1), (2,1) at L = pi/2, eps = 1, against the closed
// form (e^{2 lambda t} - 1)/(2 lambda).
inline std::vector<OUStatRow> ou_stats_rows(std::uint64_t seed, int replicas) {
    if (replicas < 2) throw ConfigError("ou_stats: need at least 2 replicas");
    const double half_len = kPi / 2;
    struct Probe {
        int k, l;
        bool self_conj;
    };
    const Probe probes[] = {{0, 0, true}, {0, 1, false}, {2, 1, false}};
    const double times[] = {0.1, 1.0};

    // one pass per replica, sampling each probe at both times
    std::vector<std::vector<double>> samples(6);
    // mix64 first so nearby seeds index disjoint replica families
    for (int r = 0; r < replicas; ++r) {
        OUState st(mix64(seed) + static_cast<std::uint64_t>(r), 2, 1.0, half_len);
        for (int ti = 0; ti < 2; ++ti) {
            st.step_exact(ti == 0 ? times[0] : times[1] - times[0]);
            for (int pi = 0; pi < 3; ++pi) {
                std::complex<double> z{0.0, 0.0};
                for (const OUMode& m : st.modes())
                    if (m.k == probes[pi].k && m.l == probes[pi].l) z = m.z;
                samples[3 * ti + pi].push_back(z.real());
                if (!probes[pi].self_conj) samples[3 * ti + pi].push_back(z.imag());
            }
        }
    }
    std::vector<OUStatRow> rows;
    for (int ti = 0; ti < 2; ++ti)
        for (int pi = 0; pi < 3; ++pi) {
            const std::vector<double>& s = samples[3 * ti + pi];
            const double n = static_cast<double>(s.size());
            double mean = 0.0;
            for (double v : s) mean += v;
            mean /= n;
            double var = 0.0;
            for (double v : s) var += (v - mean) * (v - mean);
            var /= (n - 1.0);
            OUStatRow row;
            row.mode_k = probes[pi].k;
            row.mode_l = probes[pi].l;
            row.lambda = eigenvalue(row.mode_k, row.mode_l, 1.0, half_len) + 0.0;  // flush -0
            row.t = times[ti];
            row.empirical_var = var;
            row.exact_var = ito_variance(row.mode_k, row.mode_l, row.t, 1.0, half_len);
            row.z_score = (var - row.exact_var) / (row.exact_var * std::sqrt(2.0 / (n - 1.0)));
            rows.push_back(row);
        }
    return rows;
}

//----------------------------------------------------------------------------
// u = v + Z decomposition study on one shared Brownian realization
//----------------------------------------------------------------------------

struct DecompositionLevel {
    double delta_t = 0.0;
    double error = 0.0;  // ||u_direct - (v + Z)||_{L^2} at t_end
};

// The direct scheme consumes spectral Brownian increments; the shifted scheme
// consumes the stochastic convolution Z of that same noise. Both are driven
// from one tape sampled at the finest step h: per fine step and mode, the OU
// innovation eta = int e^{lambda(h-s)} dbeta and the plain increment dbeta are
// drawn jointly from their exact Gaussian law (E[eta dbeta] per part is
// c1 = (e^{lambda h}-1)/lambda), so every level integrates the same noise
// realization. Coarser levels aggregate consecutive increments and read Z at
// their own step times. Modes on the k-axis carry Brownian rate 2 and (0,0)
// rate 4 because the discrete noise sum weights the l = 0 row with the same
// prefactor as the mirrored rows.
inline std::vector<DecompositionLevel> decomposition_experiment(
    std::uint64_t seed, int n, double half_len, int m, double t_end,
    const std::vector<double>& delta_ts) {
    if (delta_ts.empty()) throw ConfigError("decomposition: need at least one level");
    const double h = delta_ts.back();
    if (!(h > 0.0)) throw ConfigError("decomposition: steps must be positive");
    std::vector<int> ratios;
    for (double dt : delta_ts) {
        const int r = static_cast<int>(std::llround(dt / h));
        if (r < 1 || std::abs(r * h - dt) > 1e-12 * dt)
            throw ClockMismatch("decomposition: levels must be integer multiples of the finest");
        ratios.push_back(r);
    }
    const int n_fine = static_cast<int>(std::llround(t_end / h));
    if (n_fine < 1 || std::abs(n_fine * h - t_end) > 1e-9 * t_end)
        throw ClockMismatch("decomposition: t_end must be a multiple of the finest step");

    const Grid2D grid = Grid2D::square(n, half_len);
    OUState ou(seed, m, 1.0, half_len);
    const std::size_t n_modes = ou.modes().size();

    // --- shared tape ---------------------------------------------------------
    std::vector<NoiseIncrement> incs(static_cast<std::size_t>(n_fine));
    std::vector<std::vector<std::complex<double>>> z_tape(static_cast<std::size_t>(n_fine) + 1);
    z_tape[0].assign(n_modes, {0.0, 0.0});
    GaussianStream gs(mix64(seed) ^ 0x2fd38c1a97b544e7ull);
    std::vector<std::complex<double>> eta(n_modes);
    for (int s = 0; s < n_fine; ++s) {
        NoiseIncrement& inc = incs[static_cast<std::size_t>(s)];
        inc.m_R = m;
        inc.m_I = m;
        inc.delta_slow = h;
        inc.d_real.assign(static_cast<std::size_t>(2 * m + 1) * (2 * m + 1), 0.0);
        inc.d_imag.assign(inc.d_real.size(), 0.0);
        for (std::size_t i = 0; i < n_modes; ++i) {
            const OUMode& md = ou.modes()[i];
            const double rate = md.self_conjugate ? 4.0 : (md.l == 0 ? 2.0 : 1.0);
            const double v = ito_variance_lambda(md.lambda, h);
            const double c1 =
                std::abs(md.lambda) < 1e-12 ? h : std::expm1(md.lambda * h) / md.lambda;
            const double resid = std::max(0.0, h - c1 * c1 / v);
            double eta_part[2] = {0.0, 0.0}, db_part[2] = {0.0, 0.0};
            const int parts = md.self_conjugate ? 1 : 2;
            for (int part = 0; part < parts; ++part) {
                eta_part[part] = gs.next() * std::sqrt(rate * v);
                db_part[part] = (c1 / v) * eta_part[part] + gs.next() * std::sqrt(rate * resid);
            }
            eta[i] = {eta_part[0], eta_part[1]};
            const std::size_t at = inc.index(md.k, md.l);
            if (md.self_conjugate) {
                inc.d_real[at] = db_part[0] / 2.0;  // field basis carries the factor 2
            } else {
                inc.d_real[at] = db_part[0];
                inc.d_imag[at] = db_part[1];
            }
        }
        ou.step_with_innovations(h, eta);
        z_tape[static_cast<std::size_t>(s) + 1].resize(n_modes);
        for (std::size_t i = 0; i < n_modes; ++i)
            z_tape[static_cast<std::size_t>(s) + 1][i] = ou.modes()[i].z;
    }

    auto z_at = [&](int fine_index) {
        OUState scratch(seed, m, 1.0, half_len);
        for (std::size_t i = 0; i < n_modes; ++i)
            scratch.modes()[i].z = z_tape[static_cast<std::size_t>(fine_index)][i];
        return z_field(scratch, grid);
    };
    const RealField2D z_final = z_at(n_fine);

    // --- per-level runs ------------------------------------------------------
    std::vector<DecompositionLevel> out;
    for (std::size_t lev = 0; lev < delta_ts.size(); ++lev) {
        const double dt = delta_ts[lev];
        const int r = ratios[lev];
        const int n_steps = n_fine / r;

        SHConfig direct;
        direct.grid = grid;
        direct.delta_t = dt;
        direct.eps = 1.0;
        direct.half_len = half_len;
        direct.noise = true;
        direct.m_R = m;
        direct.m_I = m;
        SHConfig shifted = direct;
        shifted.noise = false;
        shifted.mode = SHMode::shifted;

        SHState us{RealField2D(grid), RealField2D(grid)};
        SHState vs{RealField2D(grid), RealField2D(grid)};
        for (int i = 0; i < n_steps; ++i) {
            NoiseIncrement agg = incs[static_cast<std::size_t>(i) * r];
            for (int j = 1; j < r; ++j) {
                const NoiseIncrement& f = incs[static_cast<std::size_t>(i) * r + j];
                for (std::size_t a = 0; a < agg.d_real.size(); ++a) {
                    agg.d_real[a] += f.d_real[a];
                    agg.d_imag[a] += f.d_imag[a];
                }
            }
            agg.delta_slow = dt;
            const RealField2D xi = assemble_xi_u(agg, grid, 1.0, half_len);
            us = sh_step(us, direct, &xi);
            vs = sh_step_shifted(vs, shifted, z_at(i * r));
        }

        RealField2D diff(grid);
        for (std::size_t a = 0; a < diff.values.size(); ++a)
            diff.values[a] = us.u.values[a] - (vs.u.values[a] + z_final.values[a]);
        out.push_back({dt, lp_norm(diff, 2.0)});
    }
    return out;
}

//----------------------------------------------------------------------------
// file-emitting drivers
//----------------------------------------------------------------------------

struct RunReport {
    std::filesystem::path out_dir;
    std::vector<std::string> files;  // relative names, checksummed in the manifest
};

namespace detail {

inline std::string format_time_token(double t) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", t);
    return buf;
}

inline std::string checksum_hex(std::uint64_t sum) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(sum));
    return buf;
}

// Shared output-directory plumbing: the manifest is written up front with
// status=running, every emitted file is checksummed, and finalize() rewrites
// the manifest with status=complete plus a wall-clock note.
struct Emitter {
    std::filesystem::path dir;
    RunManifest manifest;
    std::vector<std::string> files;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    Emitter(const RunConfig& cfg, const std::filesystem::path& out_dir) : dir(out_dir) {
        std::filesystem::create_directories(dir);
        manifest.config = cfg;
        write_manifest(dir / "manifest.txt", manifest, false);
    }

    void note_file(const std::string& name) {
        files.push_back(name);
        manifest.checksums[name] = fnv1a64_file(dir / name);
    }

    void field(const std::string& base, const RealField2D& f) {
        write_field_raw(dir / (base + ".raw"), f);
        note_file(base + ".raw");
        write_pgm(dir / (base + ".pgm"), f);
        note_file(base + ".pgm");
        note_file(base + ".pgm.scale.txt");
    }

    void finalize() {
        const auto dt = std::chrono::steady_clock::now() - start;
        manifest.notes.push_back("wallclock_seconds=" +
                                 format_full(std::chrono::duration<double>(dt).count()));
        write_manifest(dir / "manifest.txt", manifest, true);
    }

    void abort_note(const BlowUp& b) {
        manifest.notes.push_back("blowup step=" + std::to_string(b.step_index) +
                                 " max=" + format_full(b.max_value));
        write_manifest(dir / "manifest.txt", manifest, false);
    }
};

inline std::ofstream open_text(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot open " + p.string());
    return out;
}

}  // namespace detail

// simulate-gl: step the amplitude system on the slow clock, logging the norm
// series every step and dumping snapshots at the requested slow times.
inline RunReport simulate_gl(const RunConfig& cfg) {
    GLConfig gl;
    gl.grid = Grid2D(cfg.n_x, cfg.n_y, cfg.L, cfg.L);
    gl.delta_T = cfg.delta_T;
    gl.noise = cfg.noise;
    gl.seed = cfg.seed;
    gl.m_R = cfg.m_R;
    gl.m_I = cfg.m_I;
    gl.noise_amplitude = cfg.noise_amplitude;
    validate(gl);
    const std::vector<std::int64_t> targets =
        detail::snapshot_steps(cfg.snapshots, cfg.delta_T, "simulate-gl");

    detail::Emitter em(cfg, cfg.out);
    auto series = detail::open_text(em.dir / "series.csv");
    series << "time,l2_a,max_a\n";

    auto a0 = build_initial_A(gl.grid);
    GLState state{std::move(a0.first), std::move(a0.second)};
    BrownianRegistry registry(cfg.seed, cfg.m_R, cfg.m_I);

    const std::int64_t last = targets.empty() ? 0 : targets.back();
    std::size_t next_target = 0;
    try {
        for (std::int64_t n = 0; n <= last; ++n) {
            const double l2r = lp_norm(state.a_real, 2.0);
            const double l2i = lp_norm(state.a_imag, 2.0);
            double max_mod = 0.0;
            for (std::size_t i = 0; i < state.a_real.values.size(); ++i)
                max_mod = std::max(max_mod, std::hypot(state.a_real.values[i],
                                                       state.a_imag.values[i]));
            series << format_full(state.slow_time) << ","
                   << format_full(std::sqrt(l2r * l2r + l2i * l2i)) << ","
                   << format_full(max_mod) << "\n";
            if (next_target < targets.size() && targets[next_target] == n) {
                const std::string tok = detail::format_time_token(state.slow_time);
                em.field("snap_T_" + tok + "_a_real", state.a_real);
                em.field("snap_T_" + tok + "_a_imag", state.a_imag);
                ++next_target;
            }
            if (n == last) break;
            if (cfg.noise) {
                const NoiseIncrement inc = registry.advance(cfg.delta_T);
                const auto [xr, xi] = assemble_xi_A(inc, gl.grid, cfg.L);
                state = gl_step(state, gl, &xr, &xi);
            } else {
                state = gl_step(state, gl, nullptr, nullptr);
            }
        }
    } catch (const BlowUp& b) {
        series.close();
        em.abort_note(b);
        throw;
    }
    series.close();
    em.note_file("series.csv");
    if (cfg.noise) {
        write_registry_dump(em.dir / "registry_final.bm", registry);
        em.note_file("registry_final.bm");
    }
    em.finalize();
    return {em.dir, em.files};
}

// simulate-sh: step the pattern equation on the fast clock (direct or shifted
// mode) and dump u and mu snapshots at the requested fast times.
inline RunReport simulate_sh(const RunConfig& cfg) {
    SHConfig sh;
    sh.eps = cfg.eps;
    sh.half_len = cfg.L;
    sh.grid = Grid2D(cfg.n_x, cfg.n_y, cfg.L / cfg.eps, cfg.L / cfg.eps);
    sh.delta_t = cfg.delta_t;
    sh.noise = cfg.noise;
    sh.seed = cfg.seed;
    sh.m_R = cfg.m_R;
    sh.m_I = cfg.m_I;
    sh.noise_amplitude = cfg.noise_amplitude;
    if (cfg.mode == "direct")
        sh.mode = SHMode::direct;
    else if (cfg.mode == "shifted")
        sh.mode = SHMode::shifted;
    else
        throw ConfigError("simulate-sh: mode must be 'direct' or 'shifted'");
    validate(sh);
    const std::vector<std::int64_t> targets =
        detail::snapshot_steps(cfg.snapshots, cfg.delta_t, "simulate-sh");

    detail::Emitter em(cfg, cfg.out);
    auto series = detail::open_text(em.dir / "series.csv");
    series << "time,l2_u,l4_u,max_u\n";

    const AnsatzMap map(cfg.eps, Grid2D(cfg.n_x, cfg.n_y, cfg.L, cfg.L), sh.grid);
    RealField2D u0 = build_initial_u(build_initial_A(map.a_grid), map);
    SHState state{u0, initial_mu(u0)};
    BrownianRegistry registry(cfg.seed, cfg.m_R, cfg.m_I);
    OUState ou(cfg.seed, std::max(cfg.m_R, cfg.m_I), 1.0, cfg.L);

    const std::int64_t last = targets.empty() ? 0 : targets.back();
    std::size_t next_target = 0;
    try {
        for (std::int64_t n = 0; n <= last; ++n) {
            series << format_full(state.fast_time) << "," << format_full(lp_norm(state.u, 2.0))
                   << "," << format_full(lp_norm(state.u, 4.0)) << ","
                   << format_full(max_abs(state.u)) << "\n";
            if (next_target < targets.size() && targets[next_target] == n) {
                const std::string tok = detail::format_time_token(state.fast_time);
                em.field("snap_t_" + tok + "_u", state.u);
                em.field("snap_t_" + tok + "_mu", state.mu);
                ++next_target;
            }
            if (n == last) break;
            if (sh.mode == SHMode::shifted) {
                const RealField2D z = z_field(ou, sh.grid);
                state = sh_step_shifted(state, sh, z);
                ou.step_exact(cfg.delta_t, cfg.noise);
            } else if (cfg.noise) {
                const NoiseIncrement inc = registry.advance(cfg.eps * cfg.eps * cfg.delta_t);
                const RealField2D xi = assemble_xi_u(inc, sh.grid, cfg.eps, cfg.L);
                state = sh_step(state, sh, &xi);
            } else {
                state = sh_step(state, sh, nullptr);
            }
        }
    } catch (const BlowUp& b) {
        series.close();
        em.abort_note(b);
        throw;
    }
    series.close();
    em.note_file("series.csv");
    if (cfg.noise && sh.mode == SHMode::direct) {
        write_registry_dump(em.dir / "registry_final.bm", registry);
        em.note_file("registry_final.bm");
    }
    em.finalize();
    return {em.dir, em.files};
}

// convert: read two amplitude dumps, apply the ansatz, dump the u field.
inline RunReport convert_experiment(const RunConfig& cfg) {
    if (cfg.a_real_path.empty() || cfg.a_imag_path.empty())
        throw ConfigError("convert: a_real_path and a_imag_path are required");
    const RealField2D ar = read_field_raw(cfg.a_real_path, cfg.L, cfg.L);
    const RealField2D ai = read_field_raw(cfg.a_imag_path, cfg.L, cfg.L);
    require_same_grid(ar.grid, ai.grid, "convert");
    const Grid2D u_grid(ar.grid.n_x, ar.grid.n_y, cfg.L / cfg.eps, cfg.L / cfg.eps);
    const AnsatzMap map(cfg.eps, ar.grid, u_grid);
    const RealField2D u = ansatz_to_u(ar, ai, map);

    detail::Emitter em(cfg, cfg.out);
    em.manifest.notes.push_back("input a_real " + cfg.a_real_path + " fnv1a64:" +
                                detail::checksum_hex(fnv1a64_file(cfg.a_real_path)));
    em.manifest.notes.push_back("input a_imag " + cfg.a_imag_path + " fnv1a64:" +
                                detail::checksum_hex(fnv1a64_file(cfg.a_imag_path)));
    em.field("u_ansatz", u);
    em.finalize();
    return {em.dir, em.files};
}

//----------------------------------------------------------------------------
// compare: GL on the slow clock vs direct SH on the fast clock, shared noise
//----------------------------------------------------------------------------

struct CompareRow {
    double slow_time = 0.0;
    double fast_time = 0.0;
    double err_abs_l2 = 0.0;
    double err_rel_l2 = 0.0;
    double err_max = 0.0;
    double wn_direct = 0.0;
    double wn_ansatz = 0.0;
    EnergyDiagnostics direct;
    EnergyDiagnostics ansatz;
};

struct CompareReport {
    double delta_t_used = 0.0;
    int substeps = 1;  // fast steps per slow step (shared-noise mode)
    std::vector<CompareRow> rows;
    RunReport files;
};

// Resolve the fast step so that eps^2 delta_t divides delta_T exactly:
// smallest integer m with delta_T/(m eps^2) <= the requested delta_t.
inline int compare_substeps(double delta_T, double eps, double requested_dt) {
    if (!(requested_dt > 0.0)) throw ConfigError("compare: delta_t must be positive");
    const double ratio = delta_T / (eps * eps * requested_dt);
    int m = static_cast<int>(std::ceil(ratio - 1e-9));
    if (m < 1) m = 1;
    return m;
}

inline CompareReport run_compare(const RunConfig& cfg) {
    // the fast step is always resolved to an exact divisor of the slow step,
    // expressed exactly as assemble_xi_u will derive it from the increments,
    // so matched times exist on both clocks without interpolation
    const int m_sub = compare_substeps(cfg.delta_T, cfg.eps, cfg.delta_t);
    const double dt_used = (cfg.delta_T / m_sub) / (cfg.eps * cfg.eps);

    GLConfig gl;
    gl.grid = Grid2D(cfg.n_x, cfg.n_y, cfg.L, cfg.L);
    gl.delta_T = cfg.delta_T;
    gl.noise = cfg.noise;
    gl.seed = cfg.seed;
    gl.m_R = cfg.m_R;
    gl.m_I = cfg.m_I;
    gl.noise_amplitude = cfg.noise_amplitude;
    validate(gl);

    SHConfig sh;
    sh.eps = cfg.eps;
    sh.half_len = cfg.L;
    sh.grid = Grid2D(cfg.n_x, cfg.n_y, cfg.L / cfg.eps, cfg.L / cfg.eps);
    sh.delta_t = dt_used;
    sh.noise = cfg.noise;
    sh.seed = cfg.seed;
    sh.m_R = cfg.m_R;
    sh.m_I = cfg.m_I;
    sh.noise_amplitude = cfg.noise_amplitude;
    validate(sh);

    // slow-clock snapshot indices; each maps to m_sub times as many fast steps
    const std::vector<std::int64_t> targets =
        detail::snapshot_steps(cfg.snapshots, cfg.delta_T, "compare");

    RunConfig resolved = cfg;
    resolved.delta_t = dt_used;
    detail::Emitter em(resolved, cfg.out);

    const AnsatzMap map(cfg.eps, gl.grid, sh.grid);
    auto a0 = build_initial_A(gl.grid);
    RealField2D u0 = build_initial_u(a0, map);
    GLState gls{a0.first, a0.second};
    SHState shs{u0, initial_mu(u0)};
    BrownianRegistry registry(cfg.seed, cfg.m_R, cfg.m_I);

    CompareReport report;
    report.delta_t_used = dt_used;
    report.substeps = m_sub;

    auto series = detail::open_text(em.dir / "series.csv");
    series << "T,t,err_abs_l2,err_rel_l2,err_max,wn_direct,wn_ansatz,"
              "l2sq_direct,w12sq_direct,l4quad_direct,"
              "l2sq_ansatz,w12sq_ansatz,l4quad_ansatz\n";

    const std::int64_t last = targets.empty() ? 0 : targets.back();
    std::size_t next_target = 0;
    try {
        for (std::int64_t n = 0; n <= last; ++n) {
            if (next_target < targets.size() && targets[next_target] == n) {
                const RealField2D u_ansatz = ansatz_to_u(gls.a_real, gls.a_imag, map);
                CompareRow row;
                row.slow_time = gls.slow_time;
                row.fast_time = shs.fast_time;
                RealField2D diff(sh.grid);
                for (std::size_t i = 0; i < diff.values.size(); ++i)
                    diff.values[i] = shs.u.values[i] - u_ansatz.values[i];
                row.err_abs_l2 = lp_norm(diff, 2.0);
                row.err_rel_l2 = approximation_error(shs.u, u_ansatz, 2.0);
                row.err_max = max_abs(diff);
                row.wn_direct = dominant_x_wavenumber(shs.u);
                row.wn_ansatz = dominant_x_wavenumber(u_ansatz);
                row.direct = energy_diagnostics(shs.u);
                row.ansatz = energy_diagnostics(u_ansatz);
                report.rows.push_back(row);
                series << format_full(row.slow_time) << "," << format_full(row.fast_time) << ","
                       << format_full(row.err_abs_l2) << "," << format_full(row.err_rel_l2)
                       << "," << format_full(row.err_max) << "," << format_full(row.wn_direct)
                       << "," << format_full(row.wn_ansatz) << ","
                       << format_full(row.direct.l2sq) << "," << format_full(row.direct.w12sq)
                       << "," << format_full(row.direct.l4quad) << ","
                       << format_full(row.ansatz.l2sq) << "," << format_full(row.ansatz.w12sq)
                       << "," << format_full(row.ansatz.l4quad) << "\n";
                const std::string tokT = detail::format_time_token(row.slow_time);
                const std::string tokt = detail::format_time_token(row.fast_time);
                em.field("snap_T_" + tokT + "_a_real", gls.a_real);
                em.field("snap_T_" + tokT + "_a_imag", gls.a_imag);
                em.field("snap_t_" + tokt + "_u", shs.u);
                em.field("snap_t_" + tokt + "_u_ansatz", u_ansatz);
                ++next_target;
            }
            if (n == last) break;

            if (cfg.noise) {
                // m_sub fast steps consume the exact increments one slow step sees
                NoiseIncrement pending;
                pending.m_R = cfg.m_R;
                pending.m_I = cfg.m_I;
                pending.d_real.assign(
                    static_cast<std::size_t>(2 * cfg.m_R + 1) * (2 * cfg.m_I + 1), 0.0);
                pending.d_imag.assign(pending.d_real.size(), 0.0);
                for (int j = 0; j < m_sub; ++j) {
                    const NoiseIncrement inc = registry.advance(cfg.delta_T / m_sub);
                    const RealField2D xi = assemble_xi_u(inc, sh.grid, cfg.eps, cfg.L);
                    shs = sh_step(shs, sh, &xi);
                    for (std::size_t a = 0; a < pending.d_real.size(); ++a) {
                        pending.d_real[a] += inc.d_real[a];
                        pending.d_imag[a] += inc.d_imag[a];
                    }
                }
                pending.delta_slow = cfg.delta_T;
                const auto [xr, xi] = assemble_xi_A(pending, gl.grid, cfg.L);
                gls = gl_step(gls, gl, &xr, &xi);
            } else {
                // independent solvers, same interleaving of the two clocks
                for (int j = 0; j < m_sub; ++j) shs = sh_step(shs, sh, nullptr);
                gls = gl_step(gls, gl, nullptr, nullptr);
            }
        }
    } catch (const BlowUp& b) {
        series.close();
        em.abort_note(b);
        throw;
    }
    series.close();
    em.note_file("series.csv");
    if (cfg.noise) {
        write_registry_dump(em.dir / "registry_final.bm", registry);
        em.note_file("registry_final.bm");
    }
    em.manifest.notes.push_back("delta_t_used=" + format_full(dt_used));
    em.manifest.notes.push_back("substeps_per_slow_step=" + std::to_string(m_sub));
    em.finalize();
    report.files = {em.dir, em.files};
    return report;
}

// ou-stats driver: CSV of the per-mode variance checks.
inline RunReport ou_stats_experiment(const RunConfig& cfg) {
    const std::vector<OUStatRow> rows = ou_stats_rows(cfg.seed, cfg.replicas);
    detail::Emitter em(cfg, cfg.out);
    auto csv = detail::open_text(em.dir / "ou_stats.csv");
    csv << "mode_k,mode_l,lambda,t,empirical_var,exact_var,z_score\n";
    for (const OUStatRow& r : rows)
        csv << r.mode_k << "," << r.mode_l << "," << format_full(r.lambda) << ","
            << format_full(r.t) << "," << format_full(r.empirical_var) << ","
            << format_full(r.exact_var) << "," << format_full(r.z_score) << "\n";
    csv.close();
    em.note_file("ou_stats.csv");
    em.finalize();
    return {em.dir, em.files};
}

}  // namespace shpattern
