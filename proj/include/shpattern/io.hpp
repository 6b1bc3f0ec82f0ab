//==============================================================================
// io.hpp
// Binary field dumps, Brownian-registry dumps, PGM renders, checksums.
//
// Field dump layout ("SHPAT1"): a 32-byte ASCII header "SHPAT1 <nx> <ny>"
// padded with spaces through byte 30 and terminated by '\n' at byte 31,
// followed by nx*ny little-endian float64 values in row-major order (y outer,
// x inner). Domain half-lengths are not stored; readers supply them.
//
// Registry dump layout ("SHPAT1-BM"): the same 32-byte header style with
// magic "SHPAT1-BM <m_R> <m_I>", then u64 seed, u64 draw counter, f64 slow
// time, and the accumulated beta^R and beta^I path arrays (layout of
// NoiseIncrement::index).
//==============================================================================
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "shpattern/errors.hpp"
#include "shpattern/grid.hpp"
#include "shpattern/noise.hpp"

namespace shpattern {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = kFnvOffset) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("fnv1a64_file: cannot open " + path.string());
    std::uint64_t h = kFnvOffset;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    return h;
}

// full-precision, round-trip-parseable double formatting
inline std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::array<char, 32> dump_header(const std::string& text) {
    std::array<char, 32> h;
    h.fill(' ');
    if (text.size() > 30) throw IoError("dump header text too long");
    std::copy(text.begin(), text.end(), h.begin());
    h[31] = '\n';
    return h;
}

inline std::ifstream open_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

inline void read_exact(std::ifstream& in, void* dst, std::size_t n, const char* what) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw IoError(std::string("truncated dump while reading ") + what);
}

}  // namespace detail

inline void write_field_raw(const std::filesystem::path& path, const RealField2D& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_field_raw: cannot open " + path.string());
    const auto header = detail::dump_header("SHPAT1 " + std::to_string(f.grid.n_x) + " " +
                                            std::to_string(f.grid.n_y));
    out.write(header.data(), header.size());
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!out) throw IoError("write_field_raw: write failed for " + path.string());
}

inline RealField2D read_field_raw(const std::filesystem::path& path, double half_len_x,
                                  double half_len_y) {
    std::ifstream in = detail::open_binary(path);
    std::array<char, 32> header;
    detail::read_exact(in, header.data(), header.size(), "header");
    int nx = 0, ny = 0;
    if (std::sscanf(header.data(), "SHPAT1 %d %d", &nx, &ny) != 2 || nx < 1 || ny < 1)
        throw IoError("read_field_raw: bad header in " + path.string());
    RealField2D f(Grid2D(nx, ny, half_len_x, half_len_y));
    detail::read_exact(in, f.values.data(), f.values.size() * sizeof(double), "field data");
    return f;
}

inline void write_registry_dump(const std::filesystem::path& path,
                                const BrownianRegistry& reg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_registry_dump: cannot open " + path.string());
    const auto header = detail::dump_header("SHPAT1-BM " + std::to_string(reg.m_R()) + " " +
                                            std::to_string(reg.m_I()));
    out.write(header.data(), header.size());
    const std::uint64_t seed = reg.seed(), counter = reg.counter();
    const double t = reg.slow_time();
    out.write(reinterpret_cast<const char*>(&seed), sizeof seed);
    out.write(reinterpret_cast<const char*>(&counter), sizeof counter);
    out.write(reinterpret_cast<const char*>(&t), sizeof t);
    out.write(reinterpret_cast<const char*>(reg.beta_real().data()),
              static_cast<std::streamsize>(reg.beta_real().size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(reg.beta_imag().data()),
              static_cast<std::streamsize>(reg.beta_imag().size() * sizeof(double)));
    if (!out) throw IoError("write_registry_dump: write failed for " + path.string());
}

inline BrownianRegistry read_registry_dump(const std::filesystem::path& path) {
    std::ifstream in = detail::open_binary(path);
    std::array<char, 32> header;
    detail::read_exact(in, header.data(), header.size(), "header");
    int m_r = -1, m_i = -1;
    if (std::sscanf(header.data(), "SHPAT1-BM %d %d", &m_r, &m_i) != 2 || m_r < 0 || m_i < 0)
        throw IoError("read_registry_dump: bad header in " + path.string());
    std::uint64_t seed = 0, counter = 0;
    double t = 0.0;
    detail::read_exact(in, &seed, sizeof seed, "seed");
    detail::read_exact(in, &counter, sizeof counter, "counter");
    detail::read_exact(in, &t, sizeof t, "slow time");
    const std::size_t n = static_cast<std::size_t>(2 * m_r + 1) * (2 * m_i + 1);
    std::vector<double> br(n), bi(n);
    detail::read_exact(in, br.data(), n * sizeof(double), "beta_real");
    detail::read_exact(in, bi.data(), n * sizeof(double), "beta_imag");
    return BrownianRegistry(seed, m_r, m_i, t, counter, br, bi);
}

// 8-bit P5 render with per-field linear min-max scaling; the scale is recorded
// in "<path>.scale.txt" so renders stay reversible for inspection.
inline void write_pgm(const std::filesystem::path& path, const RealField2D& f) {
    double lo = f.values.empty() ? 0.0 : f.values[0], hi = lo;
    for (double v : f.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_pgm: cannot open " + path.string());
    out << "P5\n" << f.grid.n_x << " " << f.grid.n_y << "\n255\n";
    const double span = hi - lo;
    std::vector<unsigned char> row(static_cast<std::size_t>(f.grid.n_x));
    for (int q = 0; q < f.grid.n_y; ++q) {
        for (int p = 0; p < f.grid.n_x; ++p) {
            const double t = span > 0.0 ? (f(p, q) - lo) / span : 0.5;
            row[static_cast<std::size_t>(p)] =
                static_cast<unsigned char>(std::clamp(t * 255.0 + 0.5, 0.0, 255.0));
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError("write_pgm: write failed for " + path.string());
    std::ofstream scale(path.string() + ".scale.txt");
    if (!scale) throw IoError("write_pgm: cannot open scale sidecar");
    scale << "min=" << format_full(lo) << "\nmax=" << format_full(hi) << "\n";
}

}  // namespace shpattern
