//==============================================================================
// rng.hpp
// Counter-based Gaussian draws: a splitmix64-style 64-bit mixer used as a
// stateless PRF, plus Box-Muller. Every draw is a pure function of
// (key, counter), so streams replay bit-for-bit on any platform and draws can
// be keyed per mode / per step without storing generator state.
//==============================================================================
#pragma once

#include <cmath>
#include <cstdint>

namespace shpattern {

// Finalizing mixer from splitmix64 (Steele, Lea, Flood; public domain).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Order-dependent absorption for building keys out of several words.
inline std::uint64_t key_absorb(std::uint64_t key, std::uint64_t word) {
    return mix64(key ^ mix64(word));
}

// Map to (0, 1]; never 0, so log() below is finite.
inline double unit_open(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// One N(0,1) variate per (key, counter). Uses the cosine Box-Muller branch
// only; the sine partner is discarded to keep draw <-> counter one-to-one.
inline double normal01(std::uint64_t key, std::uint64_t counter) {
    const double u1 = unit_open(mix64(key ^ mix64(2 * counter)));
    const double u2 = unit_open(mix64(key ^ mix64(2 * counter + 1)));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Sequential stream view: the draw order *is* the counter order.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t key, std::uint64_t counter = 0)
        : key_(key), counter_(counter) {}

    double next() { return normal01(key_, counter_++); }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }
    void set_counter(std::uint64_t c) { counter_ = c; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace shpattern
