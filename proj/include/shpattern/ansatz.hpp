//==============================================================================
// ansatz.hpp
// Amplitude-to-pattern conversion between the A-grid on [-L, L)^2 and the
// u-grid on [-L/eps, L/eps)^2:
//
//   u(x, y) = 2 eps (A^R(eps x, eps y) cos x - A^I(eps x, eps y) sin x)
//
// Both grids must have identical resolution; the scalings X = eps x, Y = eps y
// then put barycenters in exact 1:1 correspondence, so no interpolation is
// involved. Also provides the step initial data A^R = 1_{Y in (-L,0)},
// A^I = 1 - A^R used by the comparison pipeline.
//==============================================================================
#pragma once

#include <cmath>
#include <utility>

#include "shpattern/errors.hpp"
#include "shpattern/grid.hpp"

namespace shpattern {

struct AnsatzMap {
    double eps;
    Grid2D a_grid;
    Grid2D u_grid;

    AnsatzMap(double e, const Grid2D& a, const Grid2D& u) : eps(e), a_grid(a), u_grid(u) {
        if (!(eps > 0.0) || eps > 1.0) throw ConfigError("AnsatzMap: eps must lie in (0, 1]");
        if (a.n_x != u.n_x || a.n_y != u.n_y)
            throw GridMismatch("AnsatzMap: grids must have identical resolution");
        const double wx = a.half_len_x / eps, wy = a.half_len_y / eps;
        if (std::abs(u.half_len_x - wx) > 1e-9 * wx || std::abs(u.half_len_y - wy) > 1e-9 * wy)
            throw GridMismatch("AnsatzMap: u-grid half-length must be a-grid half-length / eps");
    }
};

// Pointwise carrier modulation at u-grid barycenters (cos/sin evaluated at the
// exact coordinates; the carrier is grid-periodic whenever the u-domain
// half-length L/eps is an integer multiple of pi).
inline RealField2D ansatz_to_u(const RealField2D& a_real, const RealField2D& a_imag,
                               const AnsatzMap& map) {
    if (!(a_real.grid == map.a_grid) || !(a_imag.grid == map.a_grid))
        throw GridMismatch("ansatz_to_u: amplitude fields must live on the a-grid");
    RealField2D u(map.u_grid);
    for (int p = 0; p < map.u_grid.n_x; ++p) {
        const double x = map.u_grid.x(p);
        const double cx = std::cos(x), sx = std::sin(x);
        for (int q = 0; q < map.u_grid.n_y; ++q)
            u(p, q) = 2.0 * map.eps * (a_real(p, q) * cx - a_imag(p, q) * sx);
    }
    return u;
}

// Step initial data: A^R the indicator of the lower half Y in (-L, 0), A^I its
// complement, decided at barycenters.
inline std::pair<RealField2D, RealField2D> build_initial_A(const Grid2D& a_grid) {
    RealField2D ar(a_grid), ai(a_grid);
    for (int q = 0; q < a_grid.n_y; ++q) {
        const double y = a_grid.y(q);
        const double lower = (y > -a_grid.half_len_y && y < 0.0) ? 1.0 : 0.0;
        for (int p = 0; p < a_grid.n_x; ++p) {
            ar(p, q) = lower;
            ai(p, q) = 1.0 - lower;
        }
    }
    return {std::move(ar), std::move(ai)};
}

inline RealField2D build_initial_u(const std::pair<RealField2D, RealField2D>& a0,
                                   const AnsatzMap& map) {
    return ansatz_to_u(a0.first, a0.second, map);
}

}  // namespace shpattern
