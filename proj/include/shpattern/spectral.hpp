//==============================================================================
// spectral.hpp
// Fourier-side machinery on the periodic cell-centered grid:
//   - eigenvalues λ_{k,l,ε} = −{(1 − (π/L)²k²)² + (π/L)²l² − ε²}
//   - transform against the basis e_{k,l}(x,y) = (1/√(4 Lx Ly)) e^{−iπ(kx/Lx + ly/Ly)}
//   - Galerkin projection onto |k|+|l| ≤ n, Sobolev multiplier norms
//   - the per-row circulant solver (a·I + b·d²x + c·d⁴x)⁻¹ both IMEX schemes use
//
// Normalization convention (documented, fixed):
//   forward:  c_{k,l} = (1/(n_x n_y)) Σ_{p,q} f_{p,q} · conj(e_{k,l}(x_p, y_q))
//             (midpoint quadrature of the inner product under the normalized
//              measure ν₂ = m₂ / (4 Lx Ly))
//   inverse:  f_{p,q} = (4 Lx Ly) Σ_{k,l} c_{k,l} · e_{k,l}(x_p, y_q)
//   Parseval: ‖f‖²_{L²(ν₂)} = (4 Lx Ly) · Σ_{k,l} |c_{k,l}|²
// With the half-cell offset x_p = −Lx + (p+0.5)dx these are exact inverses on
// the resolvable window k ∈ {−⌊n_x/2⌋, …, ⌈n_x/2⌉−1} (likewise l).
//==============================================================================
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "shpattern/errors.hpp"
#include "shpattern/grid.hpp"

namespace shpattern {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

struct ModeIndex {
    int k = 0;
    int l = 0;
};

inline double eigenvalue(int k, int l, double eps, double half_len) {
    if (half_len <= 0.0) throw ConfigError("eigenvalue: half_len must be positive");
    const double w = kPi / half_len;
    const double ax = 1.0 - w * w * static_cast<double>(k) * k;
    return -(ax * ax + w * w * static_cast<double>(l) * l - eps * eps);
}

// Symbol of the discrete d²_x stencil on mode k (n cells, spacing dx).
inline double x_symbol(int k, int n, double dx) {
    return 2.0 * (std::cos(2.0 * kPi * k / n) - 1.0) / (dx * dx);
}

inline double parseval_weight(const Grid2D& g) { return 4.0 * g.half_len_x * g.half_len_y; }

class SpectralCoeffs {
  public:
    SpectralCoeffs() = default;
    explicit SpectralCoeffs(const Grid2D& g) : grid_(g), c_(g.size(), {0.0, 0.0}) {}

    const Grid2D& grid() const { return grid_; }
    int k_min() const { return -(grid_.n_x / 2); }
    int k_max() const { return k_min() + grid_.n_x - 1; }
    int l_min() const { return -(grid_.n_y / 2); }
    int l_max() const { return l_min() + grid_.n_y - 1; }
    bool in_window(int k, int l) const {
        return k >= k_min() && k <= k_max() && l >= l_min() && l <= l_max();
    }

    std::complex<double>& at(int k, int l) {
        return c_[static_cast<std::size_t>(l - l_min()) * grid_.n_x + (k - k_min())];
    }
    const std::complex<double>& at(int k, int l) const {
        return c_[static_cast<std::size_t>(l - l_min()) * grid_.n_x + (k - k_min())];
    }
    std::vector<std::complex<double>>& raw() { return c_; }
    const std::vector<std::complex<double>>& raw() const { return c_; }

  private:
    Grid2D grid_;
    std::vector<std::complex<double>> c_;
};

namespace detail {

// table[ki][p] = e^{+iπ k x_p / L} / √(2L)  (the conjugate of the 1D basis
// factor); forward uses it as-is, inverse uses its conjugate.
inline std::vector<std::complex<double>> axis_table(int n, double half_len,
                                                    const std::vector<double>& coords,
                                                    int idx_min) {
    std::vector<std::complex<double>> t(static_cast<std::size_t>(n) * coords.size());
    const double scale = 1.0 / std::sqrt(2.0 * half_len);
    for (int ki = 0; ki < n; ++ki) {
        const int k = ki + idx_min;
        for (std::size_t p = 0; p < coords.size(); ++p)
            t[static_cast<std::size_t>(ki) * coords.size() + p] =
                std::polar(scale, kPi * k * coords[p] / half_len);
    }
    return t;
}

inline std::vector<double> xs(const Grid2D& g) {
    std::vector<double> v(g.n_x);
    for (int p = 0; p < g.n_x; ++p) v[p] = g.x(p);
    return v;
}
inline std::vector<double> ys(const Grid2D& g) {
    std::vector<double> v(g.n_y);
    for (int q = 0; q < g.n_y; ++q) v[q] = g.y(q);
    return v;
}

}  // namespace detail

inline SpectralCoeffs forward(const ComplexField2D& f) {
    const Grid2D& g = f.grid;
    if (g.n_x < 2 || g.n_y < 2) throw ConfigError("forward: grid sizes must be >= 2");
    SpectralCoeffs out(g);
    const auto tx = detail::axis_table(g.n_x, g.half_len_x, detail::xs(g), out.k_min());
    const auto ty = detail::axis_table(g.n_y, g.half_len_y, detail::ys(g), out.l_min());

    // stage[ki][q] = Σ_p f(p,q) conj(φ_k(x_p))
    std::vector<std::complex<double>> stage(static_cast<std::size_t>(g.n_x) * g.n_y);
    for (int ki = 0; ki < g.n_x; ++ki) {
        const std::complex<double>* row_t = &tx[static_cast<std::size_t>(ki) * g.n_x];
        for (int q = 0; q < g.n_y; ++q) {
            std::complex<double> acc{0.0, 0.0};
            const std::complex<double>* frow = &f.values[static_cast<std::size_t>(q) * g.n_x];
            for (int p = 0; p < g.n_x; ++p) acc += frow[p] * row_t[p];
            stage[static_cast<std::size_t>(ki) * g.n_y + q] = acc;
        }
    }
    const double norm = 1.0 / static_cast<double>(g.size());
    for (int li = 0; li < g.n_y; ++li) {
        const std::complex<double>* col_t = &ty[static_cast<std::size_t>(li) * g.n_y];
        for (int ki = 0; ki < g.n_x; ++ki) {
            std::complex<double> acc{0.0, 0.0};
            const std::complex<double>* srow = &stage[static_cast<std::size_t>(ki) * g.n_y];
            for (int q = 0; q < g.n_y; ++q) acc += srow[q] * col_t[q];
            out.raw()[static_cast<std::size_t>(li) * g.n_x + ki] = acc * norm;
        }
    }
    return out;
}

inline SpectralCoeffs forward(const RealField2D& f) {
    ComplexField2D c(f.grid);
    for (std::size_t i = 0; i < f.values.size(); ++i) c.values[i] = f.values[i];
    return forward(c);
}

inline ComplexField2D inverse(const SpectralCoeffs& coeffs) {
    const Grid2D& g = coeffs.grid();
    ComplexField2D out(g);
    const auto tx = detail::axis_table(g.n_x, g.half_len_x, detail::xs(g), coeffs.k_min());
    const auto ty = detail::axis_table(g.n_y, g.half_len_y, detail::ys(g), coeffs.l_min());

    // stage[ki][q] = Σ_l c(k,l) ψ_l(y_q); ψ_l = conj(table entry)
    std::vector<std::complex<double>> stage(static_cast<std::size_t>(g.n_x) * g.n_y,
                                            {0.0, 0.0});
    for (int li = 0; li < g.n_y; ++li) {
        const std::complex<double>* col_t = &ty[static_cast<std::size_t>(li) * g.n_y];
        const std::complex<double>* crow = &coeffs.raw()[static_cast<std::size_t>(li) * g.n_x];
        for (int ki = 0; ki < g.n_x; ++ki) {
            const std::complex<double> ck = crow[ki];
            if (ck.real() == 0.0 && ck.imag() == 0.0) continue;
            std::complex<double>* srow = &stage[static_cast<std::size_t>(ki) * g.n_y];
            for (int q = 0; q < g.n_y; ++q) srow[q] += ck * std::conj(col_t[q]);
        }
    }
    const double w = parseval_weight(g);
    for (int q = 0; q < g.n_y; ++q) {
        std::complex<double>* orow = &out.values[static_cast<std::size_t>(q) * g.n_x];
        for (int ki = 0; ki < g.n_x; ++ki) {
            const std::complex<double>* row_t = &tx[static_cast<std::size_t>(ki) * g.n_x];
            const std::complex<double> s = stage[static_cast<std::size_t>(ki) * g.n_y + q];
            if (s.real() == 0.0 && s.imag() == 0.0) continue;
            for (int p = 0; p < g.n_x; ++p) orow[p] += s * std::conj(row_t[p]);
        }
    }
    for (auto& v : out.values) v *= w;
    return out;
}

inline RealField2D real_part(const ComplexField2D& f) {
    RealField2D out(f.grid);
    for (std::size_t i = 0; i < f.values.size(); ++i) out.values[i] = f.values[i].real();
    return out;
}

// Max deviation from c_{−k,−l} = conj(c_{k,l}) over pairs inside the window.
inline double hermitian_residual(const SpectralCoeffs& c) {
    double r = 0.0;
    for (int l = c.l_min(); l <= c.l_max(); ++l)
        for (int k = c.k_min(); k <= c.k_max(); ++k) {
            if (!c.in_window(-k, -l)) continue;
            r = std::max(r, std::abs(c.at(-k, -l) - std::conj(c.at(k, l))));
        }
    return r;
}

inline ComplexField2D galerkin_project(const ComplexField2D& f, int n) {
    SpectralCoeffs c = forward(f);
    for (int l = c.l_min(); l <= c.l_max(); ++l)
        for (int k = c.k_min(); k <= c.k_max(); ++k)
            if (std::abs(k) + std::abs(l) > n) c.at(k, l) = {0.0, 0.0};
    return inverse(c);
}

inline RealField2D galerkin_project(const RealField2D& f, int n) {
    ComplexField2D c(f.grid);
    for (std::size_t i = 0; i < f.values.size(); ++i) c.values[i] = f.values[i];
    return real_part(galerkin_project(c, n));
}

// ‖(1 − 𝓛₀)^{s/2} f‖_{L^p}: multiplier ((1−(π/Lx)²k²)² + (π/Ly)²l² + 1)^{s/2}.
inline double sobolev_norm(const RealField2D& f, double s, double p) {
    if (p < 1.0) throw ConfigError("sobolev_norm: p must be >= 1");
    SpectralCoeffs c = forward(f);
    const double wx = kPi / f.grid.half_len_x;
    const double wy = kPi / f.grid.half_len_y;
    for (int l = c.l_min(); l <= c.l_max(); ++l)
        for (int k = c.k_min(); k <= c.k_max(); ++k) {
            const double ax = 1.0 - wx * wx * static_cast<double>(k) * k;
            const double base = ax * ax + wy * wy * static_cast<double>(l) * l + 1.0;
            c.at(k, l) *= std::pow(base, 0.5 * s);
        }
    return lp_norm(real_part(inverse(c)), p);
}

namespace detail {

// First row of (a·I + b·d²x + c·d⁴x)⁻¹ as a real circulant kernel. The DC
// response is pinned to 1/a so constants solve to r/a at roundoff even after
// thousands of repeated applications.
inline std::vector<double> circulant_inverse_kernel(double a, double b, double c, int n,
                                                    double dx) {
    std::vector<double> sym(n);
    double max_mag = 0.0;
    for (int k = 0; k < n; ++k) {
        const double s = x_symbol(k, n, dx);
        sym[k] = a + b * s + c * s * s;
        max_mag = std::max(max_mag, std::abs(sym[k]));
    }
    for (int k = 0; k < n; ++k)
        if (std::abs(sym[k]) < 1e-14 * max_mag)
            throw SingularOperator("circulant_solve_x: symbol vanishes at mode " +
                                   std::to_string(k));
    std::vector<double> cos_tab(n);
    for (int m = 0; m < n; ++m) cos_tab[m] = std::cos(2.0 * kPi * m / n);
    std::vector<double> ker(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += cos_tab[static_cast<int>((1LL * j * k) % n)] / sym[k];
        ker[j] = acc / n;
    }
    double sum = 0.0;
    for (double v : ker) sum += v;
    const double corr = (1.0 / sym[0] - sum) / n;
    for (double& v : ker) v += corr;
    return ker;
}

}  // namespace detail

// Solves (a·I + b·d²x + c·d⁴x) v = rhs independently on every y-row, where
// d⁴x = d²x ∘ d²x (square of the discrete stencil).
inline RealField2D circulant_solve_x(double a, double b, double c, const RealField2D& rhs) {
    const Grid2D& g = rhs.grid;
    const auto ker = detail::circulant_inverse_kernel(a, b, c, g.n_x, g.dx());
    RealField2D out(g);
    std::vector<double> buf(static_cast<std::size_t>(2) * g.n_x);
    for (int q = 0; q < g.n_y; ++q) {
        const double* row = &rhs.values[static_cast<std::size_t>(q) * g.n_x];
        for (int p = 0; p < g.n_x; ++p) {
            buf[p] = row[p];
            buf[p + g.n_x] = row[p];
        }
        double* orow = &out.values[static_cast<std::size_t>(q) * g.n_x];
        for (int p = 0; p < g.n_x; ++p) {
            double acc = 0.0;
            const double* b0 = &buf[p + g.n_x];  // buf[p - j + n_x] for j in [0, n_x)
            for (int j = 0; j < g.n_x; ++j) acc += ker[j] * b0[-j];
            orow[p] = acc;
        }
    }
    return out;
}

}  // namespace shpattern
