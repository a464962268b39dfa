#pragma once

#include <stdexcept>
#include <string>

namespace blockcov {

// Thrown by the adaptive quadrature when the subdivision budget is exhausted
// with the error estimate still above tolerance.
struct NonConvergence : std::runtime_error {
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by root bracketing when f(lo) and f(hi) have the same sign.
struct NoBracket : std::runtime_error {
    explicit NoBracket(const std::string& what) : std::runtime_error(what) {}
};

// Thrown instead of silently returning inf from special functions.
struct OverflowError : std::runtime_error {
    explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

// A joint-probability evaluation produced a value below -1e-9; signals a bug
// in the blocked-region measure, never a user error.
struct InvalidGeometry : std::runtime_error {
    explicit InvalidGeometry(const std::string& what) : std::runtime_error(what) {}
};

// Conditioning event has probability zero (e.g. NLoS serving under a
// path-loss model whose NLoS branch is identically zero).
struct DegenerateCondition : std::runtime_error {
    explicit DegenerateCondition(const std::string& what) : std::runtime_error(what) {}
};

// A conditional Monte Carlo estimate accepted fewer scenes than the minimum.
struct InsufficientSamples : std::runtime_error {
    explicit InsufficientSamples(const std::string& what) : std::runtime_error(what) {}
};

// Scenario configuration failed validation; message carries field context.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace blockcov
