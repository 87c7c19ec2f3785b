#pragma once

// Deterministic planar wheel-loader plant: articulated kinematics,
// rate-limited actuators, first-order engine, and a torque-converter
// direction-reversal lag. Deliberately the simplest model that exhibits the
// behaviors the operator depends on; it is replaceable behind the channel
// pair without touching the operator side.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slc/channels.hpp"
#include "slc/kinematics.hpp"

namespace slc {

struct MachineParams {
    double l_f = 1.5;                     // m, front axle to hinge
    double l_r = 1.5;                     // m, rear axle to hinge
    double gamma_max = deg2rad(35.0);     // rad, articulation limit
    double gamma_rate = deg2rad(20.0);    // rad/s, steering slew at full signal
    double v_max_fwd = 3.0;               // m/s
    double v_max_rev = 3.0;               // m/s
    double accel_gain = 2.0;              // m/s^2 per unit throttle
    double brake_decel = 3.0;             // m/s^2 at full brake
    double coast_decel = 0.5;             // m/s^2, rolling/drivetrain drag
    double lift_rate_max = 0.12;          // m/s bucket-height rate at full lift
    double tilt_rate_max = 0.6;           // rad/s
    double lift_scale = 1.0;              // scales the effective lift rate
    double h_max = 4.0;                   // m
    double tilt_min = deg2rad(-45.0);     // rad, full forward tilt
    double tilt_max = deg2rad(50.0);      // rad, full back tilt
    double engine_idle = 800.0;           // rev/min
    double engine_max = 2100.0;           // rev/min
    double engine_tau = 0.5;              // s
    double reversal_tau = 0.8;            // s, converter lag on direction change
};

struct MachineState {
    Pose pose;
    double v = 0.0;              // m/s, signed, + forward
    double gamma = 0.0;          // rad
    double h = 0.0;              // m
    double phi = 0.0;            // rad
    double engine = 800.0;       // rev/min
    Direction direction = Direction::Neutral;
    double converter_lock = 0.0; // s of reversal lag remaining; never observable
};

inline MachineState plant_init(const MachineParams& p, const Pose& pose, double h0, double phi0) {
    if (!(h0 >= 0.0) || !(h0 <= p.h_max)) {
        throw std::invalid_argument("plant_init: h0 outside [0, h_max]");
    }
    if (!(phi0 >= p.tilt_min) || !(phi0 <= p.tilt_max)) {
        throw std::invalid_argument("plant_init: phi0 outside tilt range");
    }
    MachineState s;
    s.pose = pose;
    s.pose.theta = normalize_angle(pose.theta);
    s.h = h0;
    s.phi = phi0;
    s.engine = p.engine_idle;
    return s;
}

/// One explicit Euler step of length dt. Saturates, never throws, and is a
/// pure function of (state, controls, dt).
inline MachineState plant_step(const MachineState& state, const ControlSignals& u_raw, double dt,
                               const MachineParams& p) {
    const ControlSignals u = u_raw.clamped();
    MachineState s = state;

    // Engine: first-order toward idle + throttle * (max - idle).
    {
        const double target = p.engine_idle + u.throttle * (p.engine_max - p.engine_idle);
        s.engine += (dt / p.engine_tau) * (target - s.engine);
        s.engine = std::clamp(s.engine, p.engine_idle, p.engine_max);
    }

    // Direction selector; switching while rolling engages the converter lag.
    s.converter_lock = std::fmax(0.0, s.converter_lock - dt);
    if (u.direction != s.direction) {
        if (std::fabs(s.v) > 0.0) {
            s.converter_lock = p.reversal_tau;
        }
        s.direction = u.direction;
    }

    // Longitudinal. While the converter lag runs, engine thrust can only pull
    // v toward zero, not accelerate into the newly selected direction.
    {
        const double dir = static_cast<double>(direction_sign(s.direction));
        double thrust = p.accel_gain * u.throttle * dir;
        if (s.converter_lock > 0.0 && s.v * dir >= 0.0) {
            thrust = 0.0;
        }
        const double sgn_v = (s.v > 0.0) ? 1.0 : (s.v < 0.0 ? -1.0 : 0.0);
        const double dv = thrust - (p.brake_decel * u.brake + p.coast_decel) * sgn_v;
        double v_new = s.v + dv * dt;
        if (s.v != 0.0 && s.v * v_new < 0.0) {
            // Brake and drag stop at zero; only built-up thrust may cross.
            const bool powered = s.converter_lock <= 0.0 && thrust * v_new > 0.0;
            if (!powered) {
                v_new = 0.0;
            }
        }
        s.v = std::clamp(v_new, -p.v_max_rev, p.v_max_fwd);
    }

    // Articulation.
    s.gamma = std::clamp(s.gamma + u.steering * p.gamma_rate * dt, -p.gamma_max, p.gamma_max);

    // Pose: unicycle with curvature from the articulated turning radius.
    {
        const double radius = turning_radius(s.gamma, p.l_f, p.l_r);
        const double yaw_rate =
            std::isinf(radius) ? 0.0 : s.v * ((s.gamma > 0.0) ? 1.0 : -1.0) / radius;
        s.pose.x += s.v * std::cos(s.pose.theta) * dt;
        s.pose.z += s.v * std::sin(s.pose.theta) * dt;
        s.pose.theta = normalize_angle(s.pose.theta + yaw_rate * dt);
    }

    // Bucket actuators.
    s.h = std::clamp(s.h + u.lift * p.lift_rate_max * p.lift_scale * dt, 0.0, p.h_max);
    s.phi = std::clamp(s.phi + u.tilt * p.tilt_rate_max * dt, p.tilt_min, p.tilt_max);

    return s;
}

/// Projects the machine state onto the feedback channel set. Internal state
/// (the converter lag) never crosses the boundary.
inline FeedbackFrame observe(const MachineState& s) {
    FeedbackFrame fb;
    fb.pose = s.pose;
    fb.v = s.v;
    fb.engine = s.engine;
    fb.h = s.h;
    fb.phi = s.phi;
    fb.gamma = s.gamma;
    fb.direction = s.direction;
    return fb;
}

}  // namespace slc
