//==============================================================================
// grid.hpp
// Periodic cell-centered 2D grid on [−half_len_x, half_len_x) ×
// [−half_len_y, half_len_y), wrapped second-difference stencils, and L^p norms
// under the normalized measure (so the norm of the constant 1 is 1).
// Barycenter convention: x_p = −half_len_x + (p + 0.5)·dx, same in y.
//==============================================================================
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "shpattern/errors.hpp"

namespace shpattern {

struct Grid2D {
    int n_x = 0;
    int n_y = 0;
    double half_len_x = 0.0;
    double half_len_y = 0.0;

    Grid2D() = default;
    Grid2D(int nx, int ny, double hx, double hy)
        : n_x(nx), n_y(ny), half_len_x(hx), half_len_y(hy) {
        if (nx < 1 || ny < 1 || hx <= 0.0 || hy <= 0.0)
            throw ConfigError("Grid2D: need n_x, n_y >= 1 and positive half-lengths");
    }
    static Grid2D square(int n, double half_len) { return Grid2D(n, n, half_len, half_len); }

    double dx() const { return 2.0 * half_len_x / n_x; }
    double dy() const { return 2.0 * half_len_y / n_y; }
    double x(int p) const { return -half_len_x + (p + 0.5) * dx(); }
    double y(int q) const { return -half_len_y + (q + 0.5) * dy(); }
    std::size_t size() const { return static_cast<std::size_t>(n_x) * n_y; }

    friend bool operator==(const Grid2D& a, const Grid2D& b) {
        return a.n_x == b.n_x && a.n_y == b.n_y && a.half_len_x == b.half_len_x &&
               a.half_len_y == b.half_len_y;
    }
};

// i mod n with a non-negative result; wrap_index(-1, n) == n-1.
inline int wrap_index(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}

// Dense row-major storage, q (y) outer, p (x) inner.
template <class T>
struct Field2D {
    Grid2D grid;
    std::vector<T> values;

    Field2D() = default;
    explicit Field2D(const Grid2D& g, T fill = T{}) : grid(g), values(g.size(), fill) {}

    T& operator()(int p, int q) { return values[static_cast<std::size_t>(q) * grid.n_x + p]; }
    const T& operator()(int p, int q) const {
        return values[static_cast<std::size_t>(q) * grid.n_x + p];
    }
};

using RealField2D = Field2D<double>;
using ComplexField2D = Field2D<std::complex<double>>;

enum class Axis { X, Y };

// Wrapped centered second difference along one axis.
template <class T>
Field2D<T> d2_axis(const Field2D<T>& f, Axis axis) {
    const Grid2D& g = f.grid;
    Field2D<T> out(g);
    if (axis == Axis::X) {
        const double inv = 1.0 / (g.dx() * g.dx());
        for (int q = 0; q < g.n_y; ++q)
            for (int p = 0; p < g.n_x; ++p)
                out(p, q) = (f(wrap_index(p - 1, g.n_x), q) + f(wrap_index(p + 1, g.n_x), q) -
                             2.0 * f(p, q)) *
                            inv;
    } else {
        const double inv = 1.0 / (g.dy() * g.dy());
        for (int q = 0; q < g.n_y; ++q)
            for (int p = 0; p < g.n_x; ++p)
                out(p, q) = (f(p, wrap_index(q - 1, g.n_y)) + f(p, wrap_index(q + 1, g.n_y)) -
                             2.0 * f(p, q)) *
                            inv;
    }
    return out;
}

// ((1/(n_x n_y)) Σ |f|^p)^{1/p}: midpoint quadrature of the L^p norm under the
// normalized measure m₂/(4·half_len_x·half_len_y).
template <class T>
double lp_norm(const Field2D<T>& f, double p) {
    if (p < 1.0) throw ConfigError("lp_norm: p must be >= 1");
    double acc = 0.0;
    if (p == 2.0) {
        for (const T& v : f.values) acc += std::norm(std::complex<double>(v));
    } else {
        for (const T& v : f.values) acc += std::pow(std::abs(std::complex<double>(v)), p);
    }
    return std::pow(acc / static_cast<double>(f.grid.size()), 1.0 / p);
}

template <>
inline double lp_norm<double>(const Field2D<double>& f, double p) {
    if (p < 1.0) throw ConfigError("lp_norm: p must be >= 1");
    double acc = 0.0;
    if (p == 2.0) {
        for (double v : f.values) acc += v * v;
    } else if (p == 4.0) {
        for (double v : f.values) {
            const double v2 = v * v;
            acc += v2 * v2;
        }
    } else {
        for (double v : f.values) acc += std::pow(std::abs(v), p);
    }
    return std::pow(acc / static_cast<double>(f.grid.size()), 1.0 / p);
}

inline double max_abs(const RealField2D& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

inline bool all_finite(const RealField2D& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

inline void require_same_grid(const Grid2D& a, const Grid2D& b, const char* where) {
    if (!(a == b)) throw GridMismatch(std::string(where) + ": fields live on different grids");
}

}  // namespace shpattern
