#pragma once

// V-pattern path geometry for the short loading cycle.
//
// Workplace frame: the bank (pile face) lies along the +x axis, the load
// receiver along the +z axis, origin at their intersection. The machine works
// in the positive quadrant. Headings are measured counterclockwise from +x
// and kept in (-pi, pi].
//
// The theoretical path from the dig point (a, 0) to the dump point (0, b)
// consists of two circular arcs, mutually tangent and each tangent to the
// perpendicular line at its end point. The arc centers sit at (a + r_a, 0)
// and (0, b + r_b); the shared tangent has normal (cos alpha, -sin alpha),
// i.e. alpha is the tangent's angle against the receiver axis. The machine
// traverses the bank-side arc in reverse and the receiver-side arc forward,
// so its nose heading is continuous through the junction.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "slc/angles.hpp"

namespace slc {

struct Pose {
    double x = 0.0;      // m, workplace frame
    double z = 0.0;      // m, workplace frame
    double theta = 0.0;  // rad, heading in (-pi, pi]
};

struct WorkplaceLayout {
    double a = 15.0;                 // m, dig point distance from the origin along the bank
    double b = 15.0;                 // m, dump point distance from the origin along the receiver
    double receiver_halfwidth = 1.5; // m, lateral tolerance for arrival checks

    /// Machine pose at the dig point, nose into the bank.
    Pose dig_pose() const { return Pose{a, 0.0, -kPi / 2.0}; }
};

struct VPathRadii {
    double r_a = 0.0;  // m, bank-side arc
    double r_b = 0.0;  // m, receiver-side arc
};

struct VPathPlan {
    double r_a = 0.0;
    double r_b = 0.0;
    double alpha = 0.0;  // rad, shared-tangent orientation against the receiver axis, in (0, pi/2)
};

struct ApproachSolution {
    double r_c = 0.0;  // m, turning radius onto the final approach
    double L_c = 0.0;  // m, arc length
    double L_d = 0.0;  // m, straight-segment length; may be negative
    double L = 0.0;    // m, L_c + L_d
};

/// Arc radii for a given shared-tangent orientation.
///     r_a = ((a+b)(1+cos a)/sin a - (a-b)) / 2
///     r_b = ((a+b) cos a/(1-sin a) + (a-b)) / 2
/// Singular at alpha = 0 and alpha = pi/2; both are rejected, not clamped.
inline VPathRadii radii_general(double a, double b, double alpha) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("radii_general: a and b must be positive");
    }
    if (!(alpha > 0.0) || !(alpha < kPi / 2.0)) {
        throw std::domain_error("radii_general: alpha must lie strictly inside (0, pi/2)");
    }
    const double s = std::sin(alpha);
    const double c = std::cos(alpha);
    const double r_a = 0.5 * ((a + b) * (1.0 + c) / s - (a - b));
    const double r_b = 0.5 * ((a + b) * c / (1.0 - s) + (a - b));
    return {r_a, r_b};
}

/// Simplified radii for the equal-steer tangent (alpha = pi/4):
///     r_a = (a+b)/sqrt(2) + b
///     r_b = (a - b(1-sqrt(2))) / (2-sqrt(2))
inline VPathRadii radii_symmetric(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("radii_symmetric: a and b must be positive");
    }
    const double sqrt2 = std::numbers::sqrt2;
    const double r_a = (a + b) / sqrt2 + b;
    const double r_b = (a - b * (1.0 - sqrt2)) / (2.0 - sqrt2);
    return {r_a, r_b};
}

/// The aim-at-origin solution: radii such that the shared tangent passes
/// through the workplace origin, so a driver can keep the nose on the origin
/// while reversing. Equidistant layouts give alpha = pi/4.
///     r_a = b + ((a+b) sqrt((a+b)^2 + 4ab) - (a^2 - b^2)) / (4a)
///     r_b = a + ((a+b) sqrt((a+b)^2 + 4ab) + (a^2 - b^2)) / (4b)
///     cos alpha = (a + r_a) / (r_a + r_b)
inline VPathPlan plan_aim_at_origin(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("plan_aim_at_origin: a and b must be positive");
    }
    const double root = std::sqrt((a + b) * (a + b) + 4.0 * a * b);
    const double r_a = b + ((a + b) * root - (a * a - b * b)) / (4.0 * a);
    const double r_b = a + ((a + b) * root + (a * a - b * b)) / (4.0 * b);
    const double cos_alpha = (a + r_a) / (r_a + r_b);
    if (!(std::fabs(cos_alpha) <= 1.0)) {
        throw std::logic_error("plan_aim_at_origin: invariant violated, |cos alpha| > 1");
    }
    return {r_a, r_b, std::acos(cos_alpha)};
}

/// Heading of the vector from (x, z) to the origin, in (-pi, pi].
inline double bearing_to_origin(const Pose& pose) {
    if (pose.x == 0.0 && pose.z == 0.0) {
        throw std::domain_error("bearing_to_origin: undefined at the origin");
    }
    return normalize_angle(std::atan2(-pose.z, -pose.x));
}

/// True when the machine's direction of travel points at the origin within
/// tol. Travel direction is theta when moving forward and theta + pi when
/// reversing; calling with reversing=false therefore tests the nose heading
/// itself, which is what trails toward the origin while the loader backs
/// away along the planned tangent.
inline bool aims_at_origin(const Pose& pose, bool reversing, double tol) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("aims_at_origin: tol must be positive");
    }
    const double beta = bearing_to_origin(pose);
    const double travel = reversing ? normalize_angle(pose.theta + kPi) : pose.theta;
    return std::fabs(angle_diff(beta, travel)) <= tol;
}

/// Arc-plus-line distance to the receiver, in the approach frame: theta is
/// the nose heading against the receiver-parallel axis (pi/2 = perpendicular
/// arrival), d the lateral offset from the final straight approach line, z
/// the distance from the receiver line.
///     r_c = d / (1 - sin theta)
///     L_c = r_c (pi/2 - theta)
///     L_d = z - r_c cos theta
///     L   = L_c + L_d
/// L_d may come out negative; the caller picks the strategy.
inline ApproachSolution approach_solution(double d, double theta, double z) {
    if (!(d >= 0.0)) {
        throw std::domain_error("approach_solution: d must be non-negative");
    }
    if (!(theta >= 0.0) || !(theta < kPi / 2.0)) {
        throw std::domain_error("approach_solution: theta must lie in [0, pi/2)");
    }
    if (!(z >= 0.0)) {
        throw std::domain_error("approach_solution: z must be non-negative");
    }
    if (d == 0.0 && theta > 0.0) {
        throw std::domain_error("approach_solution: no tangent circle for d = 0 with theta > 0");
    }
    ApproachSolution sol;
    sol.r_c = d / (1.0 - std::sin(theta));
    sol.L_c = sol.r_c * (kPi / 2.0 - theta);
    sol.L_d = z - sol.r_c * std::cos(theta);
    sol.L = sol.L_c + sol.L_d;
    return sol;
}

// Constructed arc centers, junction and tangent direction of a V-path figure.
struct VPathFigure {
    double ox_a = 0.0, oz_a = 0.0;  // bank-side center (a + r_a, 0)
    double ox_b = 0.0, oz_b = 0.0;  // receiver-side center (0, b + r_b)
    double jx = 0.0, jz = 0.0;      // arc-arc junction (the theoretical reversing point)
    double nx = 0.0, nz = 0.0;      // unit normal of the shared tangent, (cos alpha, -sin alpha)
};

inline VPathFigure vpath_figure(const WorkplaceLayout& layout, const VPathPlan& plan) {
    VPathFigure fig;
    fig.ox_a = layout.a + plan.r_a;
    fig.oz_a = 0.0;
    fig.ox_b = 0.0;
    fig.oz_b = layout.b + plan.r_b;
    fig.nx = std::cos(plan.alpha);
    fig.nz = -std::sin(plan.alpha);
    const double dx = fig.ox_a - fig.ox_b;
    const double dz = fig.oz_a - fig.oz_b;
    const double dist = std::hypot(dx, dz);
    fig.jx = fig.ox_a - plan.r_a * dx / dist;
    fig.jz = fig.oz_a - plan.r_a * dz / dist;
    return fig;
}

struct TangencyResiduals {
    double line_arc_a = 0.0;
    double arc_arc = 0.0;
    double line_arc_b = 0.0;

    double max() const {
        return std::fmax(line_arc_a, std::fmax(arc_arc, line_arc_b));
    }
};

/// Gap/overlap distances at the figure's three tangency points. Each arc is
/// tested against the tangent line anchored at the other arc's claimed touch
/// point, so a perturbed radius or alpha registers at its own scale while
/// consistent plans stay at rounding level.
inline TangencyResiduals tangency_residuals(const WorkplaceLayout& layout, const VPathPlan& plan) {
    const VPathFigure fig = vpath_figure(layout, plan);
    TangencyResiduals res;

    const double dx = fig.ox_a - fig.ox_b;
    const double dz = fig.oz_a - fig.oz_b;
    res.arc_arc = std::fabs(std::hypot(dx, dz) - (plan.r_a + plan.r_b));

    // Touch points each circle claims on the shared tangent.
    const double tax = fig.ox_a - plan.r_a * fig.nx;
    const double taz = fig.oz_a - plan.r_a * fig.nz;
    const double tbx = fig.ox_b + plan.r_b * fig.nx;
    const double tbz = fig.oz_b + plan.r_b * fig.nz;

    res.line_arc_a = std::fabs((fig.ox_a - tbx) * fig.nx + (fig.oz_a - tbz) * fig.nz - plan.r_a);
    res.line_arc_b = std::fabs((fig.ox_b - tax) * fig.nx + (fig.oz_b - taz) * fig.nz + plan.r_b);
    return res;
}

/// Perpendicular distance from the origin to the plan's shared tangent line.
inline double tangent_origin_distance(const WorkplaceLayout& layout, const VPathPlan& plan) {
    const VPathFigure fig = vpath_figure(layout, plan);
    return std::fabs(fig.jx * fig.nx + fig.jz * fig.nz);
}

/// Machine poses along the theoretical path, arc-length parameterized with
/// step ds. Headings are nose headings: the bank-side arc is driven in
/// reverse, so the heading runs continuously from -pi/2 at the dig point
/// through -(pi/2 + alpha) at the junction to pi at the dump point. The
/// perpendicular straight legs are tangent exactly at the dig and dump
/// points and therefore contribute only the boundary poses.
inline std::vector<Pose> sample_vpath(const WorkplaceLayout& layout, const VPathPlan& plan,
                                      double ds) {
    if (!(ds > 0.0)) {
        throw std::invalid_argument("sample_vpath: ds must be positive");
    }
    const TangencyResiduals res = tangency_residuals(layout, plan);
    if (res.max() > 1e-6 * (layout.a + layout.b)) {
        throw std::runtime_error("sample_vpath: plan fails tangency closure");
    }
    const VPathFigure fig = vpath_figure(layout, plan);

    std::vector<Pose> poses;
    // Bank-side arc: circle angle phi from pi down to pi - alpha, nose = phi - 3pi/2.
    {
        const int n = std::max(1, static_cast<int>(std::ceil(plan.alpha * plan.r_a / ds)));
        for (int i = 0; i <= n; ++i) {
            const double phi = kPi - plan.alpha * static_cast<double>(i) / n;
            poses.push_back(Pose{fig.ox_a + plan.r_a * std::cos(phi),
                                 fig.oz_a + plan.r_a * std::sin(phi),
                                 normalize_angle(phi - 1.5 * kPi)});
        }
    }
    // Receiver-side arc: phi from -alpha down to -pi/2, nose = phi - pi/2.
    {
        const double sweep = kPi / 2.0 - plan.alpha;
        const int n = std::max(1, static_cast<int>(std::ceil(sweep * plan.r_b / ds)));
        for (int i = 1; i <= n; ++i) {
            const double phi = -plan.alpha - sweep * static_cast<double>(i) / n;
            poses.push_back(Pose{fig.ox_b + plan.r_b * std::cos(phi),
                                 fig.oz_b + plan.r_b * std::sin(phi),
                                 normalize_angle(phi - 0.5 * kPi)});
        }
    }
    return poses;
}

}  // namespace slc
