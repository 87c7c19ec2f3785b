#pragma once

// Test-only oracle: checks an approach solution by integrating a unit-speed
// path (RK4) that turns with curvature 1/r_c until perpendicular and then
// runs straight, independent of the closed-form route in the library.

#include <cmath>

#include "slc/geometry.hpp"

namespace slc_test {

struct ClosureResult {
    double position_residual;
    double heading_residual;
};

inline ClosureResult integrate_approach(double d, double theta, double z,
                                        const slc::ApproachSolution& sol) {
    double u = 0.0, v = z, psi = theta;
    const auto step = [&](double h, double curvature) {
        const double k1u = std::cos(psi), k1v = -std::sin(psi);
        const double p2 = psi + 0.5 * h * curvature;
        const double k2u = std::cos(p2), k2v = -std::sin(p2);
        const double k3u = k2u, k3v = k2v;
        const double p4 = psi + h * curvature;
        const double k4u = std::cos(p4), k4v = -std::sin(p4);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        psi += h * curvature;
    };
    if (sol.L_c > 0.0) {
        const int n = 4000;
        const double h = sol.L_c / n;
        for (int i = 0; i < n; ++i) step(h, 1.0 / sol.r_c);
    }
    if (sol.L_d > 0.0) {
        const int n = 100;
        const double h = sol.L_d / n;
        for (int i = 0; i < n; ++i) step(h, 0.0);
    }
    return {std::hypot(v, u - d), std::fabs(psi - slc::kPi / 2.0)};
}

}  // namespace slc_test
