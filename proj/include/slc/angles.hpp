#pragma once

#include <cmath>
#include <numbers>

namespace slc {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle to (-pi, pi].
inline double normalize_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) {
        a += 2.0 * kPi;
    } else if (a > kPi) {
        a -= 2.0 * kPi;
    }
    return a;
}

/// Signed difference a - b, wrapped to (-pi, pi].
inline double angle_diff(double a, double b) {
    return normalize_angle(a - b);
}

inline constexpr double deg2rad(double deg) {
    return deg * std::numbers::pi / 180.0;
}

inline constexpr double rad2deg(double rad) {
    return rad * 180.0 / std::numbers::pi;
}

}  // namespace slc
