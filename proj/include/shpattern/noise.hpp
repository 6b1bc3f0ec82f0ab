//==============================================================================
// noise.hpp
// Seeded Brownian mode registry on the slow clock and assembly of the
// discretized noise fields: (Ξ^R, Ξ^I) driving the amplitude equation and the
// real field Ξ_ε driving the pattern equation. C_L = 1/(2L).
//
// Draw order (fixed, reproducible): k^R outer ascending, k^I inner ascending,
// Δβ^R before Δβ^I; one counter-based N(0, delta_slow) variate per draw.
//==============================================================================
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "shpattern/errors.hpp"
#include "shpattern/grid.hpp"
#include "shpattern/rng.hpp"
#include "shpattern/spectral.hpp"

namespace shpattern {

struct NoiseIncrement {
    int m_R = 0;
    int m_I = 0;
    double delta_slow = 0.0;
    std::vector<double> d_real;  // Δβ^R per mode, (k^R+m_R)·(2m_I+1) + (k^I+m_I)
    std::vector<double> d_imag;  // Δβ^I per mode, same layout

    std::size_t index(int kR, int kI) const {
        return static_cast<std::size_t>(kR + m_R) * (2 * m_I + 1) + (kI + m_I);
    }
};

class BrownianRegistry {
  public:
    BrownianRegistry(std::uint64_t seed, int m_R, int m_I)
        : seed_(seed), m_R_(m_R), m_I_(m_I), slow_time_(0.0),
          stream_(mix64(seed) ^ 0x5b8d3f2c91aa77e1ull),
          beta_real_(mode_count(), 0.0), beta_imag_(mode_count(), 0.0) {
        if (m_R < 0 || m_I < 0) throw ConfigError("BrownianRegistry: truncations must be >= 0");
    }

    // Restore from a serialized state (see io.hpp, header "SHPAT1-BM").
    BrownianRegistry(std::uint64_t seed, int m_R, int m_I, double slow_time,
                     std::uint64_t counter, std::vector<double> beta_real,
                     std::vector<double> beta_imag)
        : seed_(seed), m_R_(m_R), m_I_(m_I), slow_time_(slow_time),
          stream_(mix64(seed) ^ 0x5b8d3f2c91aa77e1ull, counter),
          beta_real_(std::move(beta_real)), beta_imag_(std::move(beta_imag)) {
        if (beta_real_.size() != mode_count() || beta_imag_.size() != mode_count())
            throw ConfigError("BrownianRegistry: restored path size mismatch");
    }

    std::size_t mode_count() const {
        return static_cast<std::size_t>(2 * m_R_ + 1) * (2 * m_I_ + 1);
    }

    NoiseIncrement advance(double delta_slow) {
        if (!(delta_slow > 0.0)) throw ConfigError("advance: delta_slow must be positive");
        NoiseIncrement inc;
        inc.m_R = m_R_;
        inc.m_I = m_I_;
        inc.delta_slow = delta_slow;
        inc.d_real.resize(mode_count());
        inc.d_imag.resize(mode_count());
        const double sd = std::sqrt(delta_slow);
        for (int kR = -m_R_; kR <= m_R_; ++kR)
            for (int kI = -m_I_; kI <= m_I_; ++kI) {
                const std::size_t i = inc.index(kR, kI);
                inc.d_real[i] = sd * stream_.next();
                inc.d_imag[i] = sd * stream_.next();
                beta_real_[i] += inc.d_real[i];
                beta_imag_[i] += inc.d_imag[i];
            }
        slow_time_ += delta_slow;
        return inc;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return stream_.counter(); }
    int m_R() const { return m_R_; }
    int m_I() const { return m_I_; }
    double slow_time() const { return slow_time_; }
    const std::vector<double>& beta_real() const { return beta_real_; }
    const std::vector<double>& beta_imag() const { return beta_imag_; }

  private:
    std::uint64_t seed_;
    int m_R_, m_I_;
    double slow_time_;
    GaussianStream stream_;
    std::vector<double> beta_real_, beta_imag_;
};

namespace detail {

inline void require_half_len(const Grid2D& g, double want, const char* where) {
    const double tol = 1e-9 * std::max(1.0, std::abs(want));
    if (std::abs(g.half_len_x - want) > tol || std::abs(g.half_len_y - want) > tol)
        throw GridMismatch(std::string(where) + ": grid half-lengths do not match the domain");
}

// phase[k + m][i] = e^{i π k coord_i / L}
inline std::vector<std::complex<double>> phase_table(int m, double half_len,
                                                     const std::vector<double>& coords) {
    std::vector<std::complex<double>> t(static_cast<std::size_t>(2 * m + 1) * coords.size());
    for (int k = -m; k <= m; ++k)
        for (std::size_t i = 0; i < coords.size(); ++i)
            t[static_cast<std::size_t>(k + m) * coords.size() + i] =
                std::polar(1.0, kPi * k * coords[i] / half_len);
    return t;
}

}  // namespace detail

// (Ξ^R, Ξ^I) for the amplitude equation on [−L, L)²:
//   Ξ^R + iΞ^I = (C_L/ΔT) Σ_{|k^R|≤m_R, |k^I|≤m_I} (Δβ^R + iΔβ^I) e^{iπ(k^R X + k^I Y)/L}
// which expands to the two displayed real sums (cos with Δβ^R, −sin with Δβ^I,
// and the companion with sin/cos swapped).
inline std::pair<RealField2D, RealField2D> assemble_xi_A(const NoiseIncrement& inc,
                                                         const Grid2D& grid, double half_len) {
    detail::require_half_len(grid, half_len, "assemble_xi_A");
    const auto ex = detail::phase_table(inc.m_R, half_len, detail::xs(grid));
    const auto ey = detail::phase_table(inc.m_I, half_len, detail::ys(grid));
    const int nR = 2 * inc.m_R + 1, nI = 2 * inc.m_I + 1;

    std::vector<std::complex<double>> inner(static_cast<std::size_t>(nR) * grid.n_y,
                                            {0.0, 0.0});
    for (int r = 0; r < nR; ++r)
        for (int i = 0; i < nI; ++i) {
            const std::size_t mi = static_cast<std::size_t>(r) * nI + i;
            const std::complex<double> d{inc.d_real[mi], inc.d_imag[mi]};
            if (d.real() == 0.0 && d.imag() == 0.0) continue;
            const std::complex<double>* yrow = &ey[static_cast<std::size_t>(i) * grid.n_y];
            std::complex<double>* irow = &inner[static_cast<std::size_t>(r) * grid.n_y];
            for (int q = 0; q < grid.n_y; ++q) irow[q] += d * yrow[q];
        }
    const double scale = (1.0 / (2.0 * half_len)) / inc.delta_slow;
    RealField2D xi_r(grid), xi_i(grid);
    for (int q = 0; q < grid.n_y; ++q)
        for (int r = 0; r < nR; ++r) {
            const std::complex<double> w = inner[static_cast<std::size_t>(r) * grid.n_y + q];
            if (w.real() == 0.0 && w.imag() == 0.0) continue;
            const std::complex<double>* xrow = &ex[static_cast<std::size_t>(r) * grid.n_x];
            double* rr = &xi_r.values[static_cast<std::size_t>(q) * grid.n_x];
            double* ri = &xi_i.values[static_cast<std::size_t>(q) * grid.n_x];
            for (int p = 0; p < grid.n_x; ++p) {
                const std::complex<double> v = w * xrow[p];
                rr[p] += v.real();
                ri[p] += v.imag();
            }
        }
    for (auto& v : xi_r.values) v *= scale;
    for (auto& v : xi_i.values) v *= scale;
    return {std::move(xi_r), std::move(xi_i)};
}

// Ξ_ε for the pattern equation on [−L/ε, L/ε)². k^I runs from 0 to m_I
// with the uniform prefactor 2C_L — the y-constant band is deliberately
// weighted like every other band:
//   Ξ_ε = (2C_L/Δt) Re Σ_{|k^R|≤m_R, 0≤k^I≤m_I} (Δβ^R − iΔβ^I) e^{iπ(k^R x + k^I y)/(L/ε)}
// with Δt = delta_slow/ε². The caller multiplies by ε per the u-scheme.
inline RealField2D assemble_xi_u(const NoiseIncrement& inc, const Grid2D& grid, double eps,
                                 double half_len) {
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("assemble_xi_u: eps must be in (0,1]");
    const double len_u = half_len / eps;
    detail::require_half_len(grid, len_u, "assemble_xi_u");
    const auto ex = detail::phase_table(inc.m_R, len_u, detail::xs(grid));
    const auto ey = detail::phase_table(inc.m_I, len_u, detail::ys(grid));
    const int nR = 2 * inc.m_R + 1, nI = 2 * inc.m_I + 1;
    const double delta_t = inc.delta_slow / (eps * eps);

    std::vector<std::complex<double>> inner(static_cast<std::size_t>(nR) * grid.n_y,
                                            {0.0, 0.0});
    for (int r = 0; r < nR; ++r)
        for (int kI = 0; kI <= inc.m_I; ++kI) {
            const std::size_t mi = static_cast<std::size_t>(r) * nI + (kI + inc.m_I);
            const std::complex<double> d{inc.d_real[mi], -inc.d_imag[mi]};
            if (d.real() == 0.0 && d.imag() == 0.0) continue;
            const std::complex<double>* yrow =
                &ey[static_cast<std::size_t>(kI + inc.m_I) * grid.n_y];
            std::complex<double>* irow = &inner[static_cast<std::size_t>(r) * grid.n_y];
            for (int q = 0; q < grid.n_y; ++q) irow[q] += d * yrow[q];
        }
    const double scale = (2.0 * (1.0 / (2.0 * half_len))) / delta_t;
    RealField2D xi(grid);
    for (int q = 0; q < grid.n_y; ++q)
        for (int r = 0; r < nR; ++r) {
            const std::complex<double> w = inner[static_cast<std::size_t>(r) * grid.n_y + q];
            if (w.real() == 0.0 && w.imag() == 0.0) continue;
            const std::complex<double>* xrow = &ex[static_cast<std::size_t>(r) * grid.n_x];
            double* row = &xi.values[static_cast<std::size_t>(q) * grid.n_x];
            for (int p = 0; p < grid.n_x; ++p)
                row[p] += w.real() * xrow[p].real() - w.imag() * xrow[p].imag();
        }
    for (auto& v : xi.values) v *= scale;
    return xi;
}

}  // namespace shpattern
