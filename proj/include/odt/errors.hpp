#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace odt {

// Trap geometry admits no bound minimum (zero power, saddle-only landscape,
// or gravity spills the trap).
struct NoMinimumError : std::runtime_error {
    explicit NoMinimumError(const std::string& what) : std::runtime_error(what) {}
};

// Curvature at the located minimum has a non-positive eigenvalue, so harmonic
// frequencies are undefined.
struct DegenerateHessianError : std::runtime_error {
    explicit DegenerateHessianError(const std::string& what) : std::runtime_error(what) {}
};

// Requested truncation exceeds the largest potential level the sampled region
// can bound (e.g. above the saddle structure of the configuration).
struct BetaTooLargeError : std::runtime_error {
    explicit BetaTooLargeError(const std::string& what) : std::runtime_error(what) {}
};

// A Monte Carlo estimate failed to reach the requested statistical tolerance.
struct ToleranceNotMetError : std::runtime_error {
    explicit ToleranceNotMetError(const std::string& what) : std::runtime_error(what) {}
};

// ODE step size collapsed below the minimum allowed.
struct StiffnessError : std::runtime_error {
    explicit StiffnessError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration file problem, with 1-based line/column of the offending token.
struct ConfigError : std::runtime_error {
    int line = 0;
    int col = 0;
    ConfigError(const std::string& what, int line_, int col_)
        : std::runtime_error(what + " (line " + std::to_string(line_) + ", col " +
                             std::to_string(col_) + ")"),
          line(line_),
          col(col_) {}
};

}  // namespace odt
