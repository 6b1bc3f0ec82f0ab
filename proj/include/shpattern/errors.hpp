//==============================================================================
// errors.hpp
// Exception taxonomy shared across the library. The CLI maps these onto its
// exit codes (config 2, blow-up 3, clock/grid mismatch 4).
//==============================================================================
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace shpattern {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct GridMismatch : std::runtime_error {
    explicit GridMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct SingularOperator : std::runtime_error {
    explicit SingularOperator(const std::string& what) : std::runtime_error(what) {}
};

struct RealityViolation : std::runtime_error {
    explicit RealityViolation(const std::string& what) : std::runtime_error(what) {}
};

struct ClockMismatch : std::runtime_error {
    explicit ClockMismatch(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a solver field exceeds the abort threshold (or goes non-finite).
struct BlowUp : std::runtime_error {
    std::int64_t step_index;
    double max_value;
    BlowUp(std::int64_t step, double value, const std::string& what)
        : std::runtime_error(what), step_index(step), max_value(value) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shpattern
