#pragma once

// Articulated steering geometry. Shared by the plant's pose integration and
// the operator's radius planning; carries no machine state.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace slc {

/// Turning radius for articulation angle gamma with front/rear axle
/// distances l_f, l_r from the hinge:
///     R = (l_f + l_r cos gamma) / |sin gamma|
/// gamma = 0 returns +infinity (straight-line motion).
inline double turning_radius(double gamma, double l_f, double l_r) {
    if (gamma == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return (l_f + l_r * std::cos(gamma)) / std::fabs(std::sin(gamma));
}

/// Tightest radius the machine can drive.
inline double min_turning_radius(double gamma_max, double l_f, double l_r) {
    return turning_radius(gamma_max, l_f, l_r);
}

inline bool radius_feasible(double radius, double gamma_max, double l_f, double l_r) {
    return radius >= min_turning_radius(gamma_max, l_f, l_r);
}

/// Inverse of turning_radius on the monotone branch gamma in (0, gamma_max].
/// Closed form from R sin g - l_r cos g = l_f:
///     g = asin(l_f / hypot(R, l_r)) + atan2(l_r, R)
/// Throws when R is below the machine's minimum radius; that error is the
/// operator's trigger for the turn-limited phase.
inline double articulation_for_radius(double radius, double l_f, double l_r, double gamma_max) {
    if (std::isinf(radius)) {
        return 0.0;
    }
    if (!radius_feasible(radius, gamma_max, l_f, l_r)) {
        throw std::domain_error("articulation_for_radius: radius below the machine minimum");
    }
    return std::asin(l_f / std::hypot(radius, l_r)) + std::atan2(l_r, radius);
}

}  // namespace slc
