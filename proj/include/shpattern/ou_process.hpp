//==============================================================================
// ou_process.hpp
// Exact mode-wise simulation of the stochastic convolution
//   Z(t) = Σ_{k,l} [∫₀^t e^{(t−s)λ_{k,l,ε}} dβ_{k,l}(s)] e_{k,l}
// with closed-form Itô-isometry variances, field reconstruction, and the
// Monte Carlo diagnostics (sup-norm statistic, Hölder quotient).
//
// Reality: only the half-space {l > 0} ∪ {l = 0, k > 0} ∪ {(0,0)} is sampled;
// the other half is the conjugate mirror, and the (0,0) mode is real. Each
// complex mode's real and imaginary parts carry variance ito_variance each
// (convention: β = β^R + iβ^I with independent unit-rate parts).
//
// Draws are keyed by (seed, k, l, part, step ordinal), not drawn sequentially:
// refining the truncation reuses identical low-mode draws, so truncation
// studies compare with common random numbers.
//==============================================================================
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "shpattern/errors.hpp"
#include "shpattern/grid.hpp"
#include "shpattern/rng.hpp"
#include "shpattern/spectral.hpp"

namespace shpattern {

// (e^{2λt} − 1)/(2λ), continued by t at λ = 0 (|λ| < 1e-12).
inline double ito_variance_lambda(double lambda, double t) {
    if (std::abs(lambda) < 1e-12) return t;
    return std::expm1(2.0 * lambda * t) / (2.0 * lambda);
}

inline double ito_variance(int k, int l, double t, double eps, double half_len) {
    if (t < 0.0) throw ConfigError("ito_variance: t must be >= 0");
    return ito_variance_lambda(eigenvalue(k, l, eps, half_len), t);
}

struct OUMode {
    int k = 0;
    int l = 0;
    double lambda = 0.0;
    double rate = 1.0;  // variance-rate multiplier of the driving Brownian parts
    bool self_conjugate = false;
    std::complex<double> z{0.0, 0.0};
};

class OUState {
  public:
    OUState(std::uint64_t seed, int trunc, double eps, double half_len)
        : seed_(seed), eps_(eps), half_len_(half_len), trunc_(trunc) {
        if (trunc < 0) throw ConfigError("OUState: truncation must be >= 0");
        for (int l = 0; l <= trunc; ++l)
            for (int k = -trunc; k <= trunc; ++k) {
                if (l == 0 && k < 0) continue;  // mirror of (−k, 0)
                OUMode m;
                m.k = k;
                m.l = l;
                m.lambda = eigenvalue(k, l, eps, half_len);
                m.self_conjugate = (k == 0 && l == 0);
                modes_.push_back(m);
            }
    }

    double time() const { return time_; }
    double eps() const { return eps_; }
    double half_len() const { return half_len_; }
    int truncation() const { return trunc_; }
    std::vector<OUMode>& modes() { return modes_; }
    const std::vector<OUMode>& modes() const { return modes_; }

    // Set Z_{k,l}; the conjugate partner is implied. (k,l) must lie in the
    // stored half-space ((0,0), l > 0, or l = 0 with k > 0).
    void set_mode(int k, int l, std::complex<double> value) {
        for (OUMode& m : modes_)
            if (m.k == k && m.l == l) {
                m.z = m.self_conjugate ? std::complex<double>(value.real(), 0.0) : value;
                return;
            }
        throw ConfigError("OUState::set_mode: mode not in stored half-space");
    }

    // Exact distributional step: Z ← e^{λΔ}Z + η with per-part variance
    // rate·(e^{2λΔ}−1)/(2λ). Draws come from the keyed counter stream.
    void step_exact(double delta, bool noise_on = true) {
        if (!(delta > 0.0)) throw ConfigError("step_exact: delta must be positive");
        for (OUMode& m : modes_) {
            const double decay = std::exp(m.lambda * delta);
            std::complex<double> eta{0.0, 0.0};
            if (noise_on) {
                const double sd = std::sqrt(m.rate * ito_variance_lambda(m.lambda, delta));
                const double re = sd * normal01(part_key(m.k, m.l, 0), ordinal_);
                const double im =
                    m.self_conjugate ? 0.0 : sd * normal01(part_key(m.k, m.l, 1), ordinal_);
                eta = {re, im};
            }
            m.z = decay * m.z + eta;
        }
        ++ordinal_;
        time_ += delta;
    }

    // Same update but with caller-supplied innovations (one per stored mode,
    // in modes() order); used by the shared-path decomposition experiment.
    void step_with_innovations(double delta, const std::vector<std::complex<double>>& eta) {
        if (eta.size() != modes_.size())
            throw ConfigError("step_with_innovations: innovation count mismatch");
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            const double decay = std::exp(modes_[i].lambda * delta);
            modes_[i].z = decay * modes_[i].z + eta[i];
            if (modes_[i].self_conjugate) modes_[i].z.imag(0.0);
        }
        ++ordinal_;
        time_ += delta;
    }

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t part_key(int k, int l, int part) const {
        std::uint64_t key = mix64(seed_ ^ 0x9d4f3a17c85b6e21ull);
        key = key_absorb(key, static_cast<std::uint64_t>(static_cast<std::int64_t>(k)));
        key = key_absorb(key, static_cast<std::uint64_t>(static_cast<std::int64_t>(l)));
        key = key_absorb(key, static_cast<std::uint64_t>(part));
        return key;
    }

    std::uint64_t seed_;
    double eps_;
    double half_len_;
    int trunc_;
    double time_ = 0.0;
    std::uint64_t ordinal_ = 0;
    std::vector<OUMode> modes_;
};

// Σ Z_{k,l} e_{k,l} at barycenters, e_{k,l} = (1/2L) e^{−iπ(kx+ly)/L}, summed
// over the full mirrored mode set. Returns the real part after checking the
// imaginary residue.
inline RealField2D z_field(const OUState& state, const Grid2D& grid) {
    const double L = state.half_len();
    const double tol = 1e-9 * std::max(1.0, L);
    if (std::abs(grid.half_len_x - L) > tol || std::abs(grid.half_len_y - L) > tol)
        throw GridMismatch("z_field: grid half-lengths do not match the OU domain");

    const int m = state.truncation();
    const int nm = 2 * m + 1;
    // per-k accumulation over l: inner[k+m][q] = Σ_l Z_{k,l} e^{−iπ l y_q/L}
    std::vector<std::complex<double>> ey(static_cast<std::size_t>(nm) * grid.n_y);
    for (int l = -m; l <= m; ++l)
        for (int q = 0; q < grid.n_y; ++q)
            ey[static_cast<std::size_t>(l + m) * grid.n_y + q] =
                std::polar(1.0, -kPi * l * grid.y(q) / L);
    std::vector<std::complex<double>> inner(static_cast<std::size_t>(nm) * grid.n_y,
                                            {0.0, 0.0});
    auto add_mode = [&](int k, int l, std::complex<double> z) {
        if (z.real() == 0.0 && z.imag() == 0.0) return;
        const std::complex<double>* yrow = &ey[static_cast<std::size_t>(l + m) * grid.n_y];
        std::complex<double>* irow = &inner[static_cast<std::size_t>(k + m) * grid.n_y];
        for (int q = 0; q < grid.n_y; ++q) irow[q] += z * yrow[q];
    };
    for (const OUMode& md : state.modes()) {
        add_mode(md.k, md.l, md.z);
        if (!md.self_conjugate) add_mode(-md.k, -md.l, std::conj(md.z));
    }

    std::vector<std::complex<double>> ex(static_cast<std::size_t>(nm) * grid.n_x);
    for (int k = -m; k <= m; ++k)
        for (int p = 0; p < grid.n_x; ++p)
            ex[static_cast<std::size_t>(k + m) * grid.n_x + p] =
                std::polar(1.0, -kPi * k * grid.x(p) / L);

    ComplexField2D cf(grid);
    for (int q = 0; q < grid.n_y; ++q) {
        std::complex<double>* orow = &cf.values[static_cast<std::size_t>(q) * grid.n_x];
        for (int k = -m; k <= m; ++k) {
            const std::complex<double> w = inner[static_cast<std::size_t>(k + m) * grid.n_y + q];
            if (w.real() == 0.0 && w.imag() == 0.0) continue;
            const std::complex<double>* xrow = &ex[static_cast<std::size_t>(k + m) * grid.n_x];
            for (int p = 0; p < grid.n_x; ++p) orow[p] += w * xrow[p];
        }
    }
    const double scale = 1.0 / (2.0 * L);
    RealField2D out(grid);
    double imag_max = 0.0;
    for (std::size_t i = 0; i < cf.values.size(); ++i) {
        imag_max = std::max(imag_max, std::abs(cf.values[i].imag()) * scale);
        out.values[i] = cf.values[i].real() * scale;
    }
    if (imag_max > 1e-10)
        throw RealityViolation("z_field: imaginary residue " + std::to_string(imag_max));
    return out;
}

struct SupLpConfig {
    std::uint64_t seed = 1;
    int trunc = 10;
    double eps = 1.0;
    double half_len = kPi / 2;
    Grid2D grid;
    double t_end = 1.0;
    double step = 0.05;
    bool noise = true;
};

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    int replicas = 0;
};

// Monte Carlo E sup_{t ≤ T} ‖Z(t)‖_{L^p}, exact OU paths sampled every `step`.
inline MeanStderr sup_lp_statistic(const SupLpConfig& cfg, double p, int replicas) {
    if (replicas < 2) throw ConfigError("sup_lp_statistic: need at least 2 replicas");
    const int n_steps = static_cast<int>(std::llround(cfg.t_end / cfg.step));
    double sum = 0.0, sumsq = 0.0;
    // mix64 first so nearby seeds index disjoint replica families
    for (int r = 0; r < replicas; ++r) {
        OUState st(mix64(cfg.seed) + static_cast<std::uint64_t>(r), cfg.trunc, cfg.eps,
                   cfg.half_len);
        double sup = 0.0;
        for (int s = 0; s < n_steps; ++s) {
            st.step_exact(cfg.step, cfg.noise);
            sup = std::max(sup, lp_norm(z_field(st, cfg.grid), p));
        }
        sum += sup;
        sumsq += sup * sup;
    }
    MeanStderr out;
    out.replicas = replicas;
    out.mean = sum / replicas;
    const double var = std::max(0.0, (sumsq - sum * sum / replicas) / (replicas - 1));
    out.stderr_ = std::sqrt(var / replicas);
    return out;
}

// max over pairs of ‖Z(t_i) − Z(t_j)‖_{L^p} / |t_i − t_j|^α.
inline double holder_quotient(const std::vector<std::pair<double, RealField2D>>& snapshots,
                              double alpha, double p) {
    if (snapshots.size() < 2) throw ConfigError("holder_quotient: need at least 2 snapshots");
    double best = 0.0;
    for (std::size_t i = 0; i < snapshots.size(); ++i)
        for (std::size_t j = i + 1; j < snapshots.size(); ++j) {
            const double dt = std::abs(snapshots[j].first - snapshots[i].first);
            if (dt == 0.0) continue;
            RealField2D diff(snapshots[i].second.grid);
            for (std::size_t n = 0; n < diff.values.size(); ++n)
                diff.values[n] = snapshots[j].second.values[n] - snapshots[i].second.values[n];
            best = std::max(best, lp_norm(diff, p) / std::pow(dt, alpha));
        }
    return best;
}

}  // namespace shpattern
