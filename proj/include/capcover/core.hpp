#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace capcover {

// Shared floating tolerances. Geometry and flow comparisons use kTol;
// the LP solver has its own, slightly looser, feasibility tolerance.
inline constexpr double kTol = 1e-9;
inline constexpr double kLpFeasTol = 1e-7;

// Thrown when an internal invariant of the rounding machinery breaks.
// This always indicates a bug, never bad user input.
struct assertion_error : std::logic_error {
    explicit assertion_error(const std::string& what) : std::logic_error(what) {}
};

// Thrown when the LP solver gives up (pivot cap) rather than risk a
// silently wrong answer.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// A point that no ball can serve; the relaxation cannot be built.
struct coverage_error : std::runtime_error {
    explicit coverage_error(const std::string& what) : std::runtime_error(what) {}
};

// The relaxation itself has no feasible solution (capacity shortage).
struct infeasible_error : std::runtime_error {
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed files, unknown ids, mode/instance mismatches.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

inline void check(bool cond, const std::string& what) {
    if (!cond) throw assertion_error(what);
}

}  // namespace capcover
