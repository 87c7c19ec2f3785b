#pragma once

// Event-driven operator model for the short loading cycle, phases 2-6 plus an
// initialisation phase. A finite state machine reads feedback frames and
// emits control signals; it plans the aim-at-origin V-pattern once, holds the
// bearing line while reversing, extrapolates the lifting/driving ratio to
// pick the reversing point, and drives the arc-plus-line approach to the
// receiver. It sees the machine only through the channel pair and through
// the steering geometry a driver would know (axle distances, articulation
// limit, braking capability).

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include "slc/channels.hpp"
#include "slc/geometry.hpp"
#include "slc/kinematics.hpp"

namespace slc {

enum class Phase {
    Init,            // 0
    TiltBack,        // 1a
    LeavingBank,     // 2
    TurnLimited,     // 2a
    Retardation,     // 3
    Reversing,       // 4
    TowardReceiver,  // 5
    ExtraLift,       // 5a
    Emptying,        // 6
    Done
};

inline const char* phase_label(Phase p) {
    switch (p) {
        case Phase::Init: return "0";
        case Phase::TiltBack: return "1a";
        case Phase::LeavingBank: return "2";
        case Phase::TurnLimited: return "2a";
        case Phase::Retardation: return "3";
        case Phase::Reversing: return "4";
        case Phase::TowardReceiver: return "5";
        case Phase::ExtraLift: return "5a";
        case Phase::Emptying: return "6";
        default: return "done";
    }
}

/// Position in the one-way phase graph; transitions never decrease it.
inline int phase_order(Phase p) { return static_cast<int>(p); }

struct OperatorConfig {
    WorkplaceLayout layout;

    double h_empty = 3.2;               // m, bucket height sufficient for emptying
    double h_init = 0.5;                // m, initialisation lift target
    double phi_init = deg2rad(20.0);    // rad, initialisation tilt target
    double v_safe = 0.5;                // m/s, |v| where forward engagement is safe
    double aim_tol = deg2rad(2.0);      // rad, bearing capture tolerance
    double ratio_window = 2.0;          // s, lifting/driving estimator window
    double margin = 0.3;                // m, arrival distance tolerance
    double empty_creep_throttle = 0.3;  // [0,1]
    double empty_duration = 4.0;        // s

    double brake_level = 0.5;           // [0,1], service brake in retardation
    double approach_throttle = 0.4;     // [0,1], throttle near the receiver
    double v_approach = 0.4;            // m/s, creep speed band near the receiver
    double aim_hold_gain = 2.0;         // rad/rad, bearing/heading hold steering gain
    double gamma_gain = 8.0;            // 1/rad, articulation servo gain
    double cross_track_gain = 0.4;      // 1/m, approach-line capture gain
    double approach_delta_max = deg2rad(15.0);  // rad, capture heading offset cap
    double extra_lift_timeout = 30.0;   // s, gives up on an unreachable h_empty

    // What the driver knows about the machine being driven.
    double l_f = 1.5;
    double l_r = 1.5;
    double gamma_max = deg2rad(35.0);
    double gamma_rate = deg2rad(20.0);
    double brake_decel = 3.0;
    double phi_back = deg2rad(50.0);    // rad, full tilt-back target
    double phi_dump = deg2rad(-45.0);   // rad, full forward-tilt target
};

/// Ring buffer of (time, travelled distance, bucket height) samples; the
/// slope dh/ds over the trailing window is the lifting/driving ratio.
struct EstimatorState {
    static constexpr std::size_t kCapacity = 512;
    struct Sample {
        double t = 0.0;
        double s = 0.0;
        double h = 0.0;
    };
    std::array<Sample, kCapacity> ring{};
    std::size_t head = 0;
    std::size_t count = 0;
    double window = 2.0;
    bool lifting = false;

    void feed(double t, double s, double h, bool lift_active) {
        if (count > 0) {
            Sample& newest = ring[(head + kCapacity - 1) % kCapacity];
            if (newest.t == t) {
                newest = {t, s, h};
                lifting = lift_active;
                return;
            }
        }
        ring[head] = {t, s, h};
        head = (head + 1) % kCapacity;
        count = std::min(count + 1, kCapacity);
        lifting = lift_active;
    }

    /// Windowed least-squares dh/ds. Zero while the lift lever is released or
    /// until the window holds two samples with measurable travel.
    double slope() const {
        if (!lifting || count < 2) {
            return 0.0;
        }
        const Sample& newest = ring[(head + kCapacity - 1) % kCapacity];
        const double t_min = newest.t - window;
        double n = 0.0, sum_s = 0.0, sum_h = 0.0, sum_ss = 0.0, sum_sh = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const Sample& q = ring[(head + kCapacity - 1 - i) % kCapacity];
            if (q.t < t_min) {
                break;
            }
            n += 1.0;
            sum_s += q.s;
            sum_h += q.h;
            sum_ss += q.s * q.s;
            sum_sh += q.s * q.h;
        }
        if (n < 2.0) {
            return 0.0;
        }
        const double var = sum_ss - sum_s * sum_s / n;
        if (var <= 1e-12) {
            return 0.0;
        }
        return (sum_sh - sum_s * sum_h / n) / var;
    }
};

/// Predicted bucket height after travelling l_total further at the current
/// lifting/driving ratio. Falls back to the current height when the
/// estimator has nothing to extrapolate from.
inline double estimate_height_at_arrival(const EstimatorState& est, double h, double l_total) {
    return h + est.slope() * l_total;
}

struct OperatorState {
    OperatorConfig cfg;
    Phase phase = Phase::Init;
    VPathPlan plan;
    EstimatorState estimator;
    double phase_entry_time = 0.0;
    double s_travel = 0.0;        // operator's own odometer, integral of |v| dt
    Pose reversing_pose;          // recorded at the 3 -> 4 transition
    bool have_reversing_pose = false;
    bool aim_captured = false;
    bool receiver_passed = false;
    bool decision_fired = false;  // reversing decision latched in phase 2/2a
    bool approach_aligned = false;
    bool error = false;
    std::string error_message;
};

/// approach_solution inputs derived from a workplace-frame pose: lateral
/// offset d from the final approach line z = b (positive above it), nose
/// angle against the receiver-parallel axis, and distance from the receiver
/// line.
struct ApproachInputs {
    double d = 0.0;
    double theta = 0.0;
    double z = 0.0;
};

inline ApproachInputs approach_inputs(const Pose& pose, const WorkplaceLayout& layout) {
    return {pose.z - layout.b, normalize_angle(-kPi / 2.0 - pose.theta), pose.x};
}

inline OperatorState operator_init(const OperatorConfig& cfg) {
    OperatorState st;
    st.cfg = cfg;
    st.plan = plan_aim_at_origin(cfg.layout.a, cfg.layout.b);
    st.estimator.window = cfg.ratio_window;
    return st;
}

namespace detail {

inline constexpr double kHeightTol = 0.02;        // m
inline constexpr double kTiltTol = deg2rad(1.0);  // rad
inline constexpr double kAlignTol = deg2rad(0.5); // rad

inline double servo_to_gamma(const OperatorState& st, const FeedbackFrame& fb, double target) {
    return std::clamp(st.cfg.gamma_gain * (target - fb.gamma), -1.0, 1.0);
}

inline double bang_bang(double target, double value, double tol) {
    if (value < target - tol) return 1.0;
    if (value > target + tol) return -1.0;
    return 0.0;
}

/// Lift discipline for phases 2-3 and 5: full lift until the bucket clears
/// the emptying height.
inline double lift_until_empty(const OperatorState& st, const FeedbackFrame& fb) {
    return (fb.h < st.cfg.h_empty) ? 1.0 : 0.0;
}

/// Nose-on-origin error, or nothing when the bearing is undefined.
inline std::optional<double> nose_bearing_error(const FeedbackFrame& fb) {
    if (fb.pose.x == 0.0 && fb.pose.z == 0.0) {
        return std::nullopt;
    }
    return angle_diff(fb.pose.theta, bearing_to_origin(fb.pose));
}

/// Shared control law of phases 2 and 2a: reverse at full throttle and lift,
/// steer onto the planned bank-side radius, and once the nose trails onto the
/// origin bearing hold that line with a dead-banded proportional correction.
inline ControlSignals leaving_bank_controls(OperatorState& st, const FeedbackFrame& fb) {
    ControlSignals u;
    u.direction = Direction::Reverse;
    u.throttle = 1.0;
    u.lift = lift_until_empty(st, fb);

    const auto err = nose_bearing_error(fb);
    if (!st.aim_captured && err && std::fabs(*err) <= st.cfg.aim_tol) {
        st.aim_captured = true;
    }

    double gamma_target;
    if (st.aim_captured && err) {
        if (std::fabs(*err) <= st.cfg.aim_tol / 2.0) {
            gamma_target = 0.0;
        } else {
            gamma_target =
                std::clamp(st.cfg.aim_hold_gain * *err, -st.cfg.gamma_max, st.cfg.gamma_max);
        }
    } else if (radius_feasible(st.plan.r_a, st.cfg.gamma_max, st.cfg.l_f, st.cfg.l_r)) {
        gamma_target = articulation_for_radius(st.plan.r_a, st.cfg.l_f, st.cfg.l_r,
                                               st.cfg.gamma_max);
    } else {
        gamma_target = st.cfg.gamma_max;
    }
    u.steering = servo_to_gamma(st, fb, gamma_target);
    return u;
}

/// Reversing decision bookkeeping shared by phases 2 and 2a. Feeds the
/// estimator once the loader has passed the receiver line, predicts the
/// arrival height over the remaining approach path plus the stopping
/// distance, and reports whether the prediction clears h_empty and whether
/// the required turning radius is drivable.
struct ReversingDecision {
    bool fired = false;
    bool feasible = false;
};

inline ReversingDecision evaluate_reversing_decision(OperatorState& st, const FeedbackFrame& fb,
                                                     double t, double lift_signal) {
    ReversingDecision out;
    if (!st.receiver_passed && fb.pose.z > st.cfg.layout.b) {
        st.receiver_passed = true;
    }
    if (!st.receiver_passed) {
        return out;
    }
    st.estimator.feed(t, st.s_travel, fb.h, lift_signal != 0.0);

    const ApproachInputs ap = approach_inputs(fb.pose, st.cfg.layout);
    if (!(ap.d > 0.0) || !(ap.theta >= 0.0) || !(ap.theta < kPi / 2.0) || !(ap.z > 0.0)) {
        return out;  // hold: the approach geometry is not solvable yet
    }
    const ApproachSolution sol = approach_solution(ap.d, ap.theta, ap.z);
    const double stopping = fb.v * fb.v / (2.0 * st.cfg.brake_decel);
    const double h_pred = estimate_height_at_arrival(st.estimator, fb.h, sol.L + stopping);
    if (h_pred >= st.cfg.h_empty) {
        st.decision_fired = true;
    }
    out.fired = st.decision_fired;
    out.feasible = radius_feasible(sol.r_c, st.cfg.gamma_max, st.cfg.l_f, st.cfg.l_r);
    return out;
}

}  // namespace detail

// --- Per-phase rules. Each emits this tick's controls and, at most, one
// --- transition. Unknown conditions hold the current phase.

inline ControlSignals phase_init_rule(OperatorState& st, const FeedbackFrame& fb,
                                      std::optional<Phase>& next) {
    ControlSignals u;
    u.direction = Direction::Neutral;
    u.throttle = 0.3;  // brings the engine up to working speed
    u.lift = detail::bang_bang(st.cfg.h_init, fb.h, detail::kHeightTol);
    u.tilt = detail::bang_bang(st.cfg.phi_init, fb.phi, detail::kTiltTol);
    if (u.lift == 0.0 && u.tilt == 0.0) {
        next = Phase::TiltBack;
    }
    return u;
}

/// Phase 1a: tilt the bucket back as far as possible, then leave the bank.
inline ControlSignals phase_1a_rule(OperatorState& st, const FeedbackFrame& fb,
                                    std::optional<Phase>& next) {
    ControlSignals u;
    u.direction = Direction::Neutral;
    if (fb.phi >= st.cfg.phi_back - detail::kTiltTol) {
        next = Phase::LeavingBank;
    } else {
        u.tilt = 1.0;
    }
    return u;
}

/// Phase 2: reverse out along the V-pattern under full lift. Past the
/// receiver line the lifting/driving extrapolation decides when to retard;
/// if the turn onto the approach is not yet drivable at that moment, the
/// cycle continues as turn-limited instead.
inline ControlSignals phase_2_rule(OperatorState& st, const FeedbackFrame& fb, double t,
                                   std::optional<Phase>& next) {
    ControlSignals u = detail::leaving_bank_controls(st, fb);
    const auto decision = detail::evaluate_reversing_decision(st, fb, t, u.lift);
    if (decision.fired) {
        next = decision.feasible ? Phase::Retardation : Phase::TurnLimited;
    }
    return u;
}

/// Phase 2a: same controls as phase 2; leaves for retardation as soon as the
/// required turning radius is drivable again.
inline ControlSignals phase_2a_rule(OperatorState& st, const FeedbackFrame& fb, double t,
                                    std::optional<Phase>& next) {
    ControlSignals u = detail::leaving_bank_controls(st, fb);
    const auto decision = detail::evaluate_reversing_decision(st, fb, t, u.lift);
    if (decision.fired && decision.feasible) {
        next = Phase::Retardation;
    }
    return u;
}

/// Phase 3: throttle released, service brakes on, articulation steered back
/// to zero, lift continuing. Ends when the speed is low enough to engage
/// forward.
inline ControlSignals phase_3_rule(OperatorState& st, const FeedbackFrame& fb,
                                   std::optional<Phase>& next) {
    ControlSignals u;
    u.direction = Direction::Reverse;
    u.throttle = 0.0;
    u.brake = st.cfg.brake_level;
    u.lift = detail::lift_until_empty(st, fb);
    u.steering = detail::servo_to_gamma(st, fb, 0.0);
    if (std::fabs(fb.v) <= st.cfg.v_safe) {
        next = Phase::Reversing;
    }
    return u;
}

/// Phase 4: forward is engaged while still rolling backwards; brakes off,
/// full throttle, lifting paused until speed builds up.
inline ControlSignals phase_4_rule(OperatorState& st, const FeedbackFrame& fb,
                                   std::optional<Phase>& next) {
    ControlSignals u;
    u.direction = Direction::Forward;
    u.throttle = 1.0;
    u.lift = 0.0;
    u.steering = detail::servo_to_gamma(st, fb, 0.0);
    if (fb.v > 0.0) {
        next = Phase::TowardReceiver;
    }
    return u;
}

/// Phase 5: drive the arc-plus-line approach. A negative straight-segment
/// length means the tangent circle would overshoot, so the loader holds a
/// straight course until the geometry turns practical. The turn is left
/// early enough for the articulation to unwind, after which a line-capture
/// rule closes the remaining lateral offset and keeps the bucket parallel to
/// the receiver; the speed is brought down to a creep before arrival.
inline ControlSignals phase_5_rule(OperatorState& st, const FeedbackFrame& fb,
                                   std::optional<Phase>& next) {
    ControlSignals u;
    u.direction = Direction::Forward;
    u.lift = detail::lift_until_empty(st, fb);

    const ApproachInputs ap = approach_inputs(fb.pose, st.cfg.layout);
    const double lateral = std::fabs(ap.d);
    const double turn_sign = (ap.d >= 0.0) ? -1.0 : 1.0;  // toward the approach line

    if (!st.approach_aligned) {
        // Heading still to be travelled while the articulation unwinds at
        // the slew rate; leaving the arc this early lands parallel.
        const double unwind = 0.5 * std::fabs(fb.gamma) *
                              (std::fabs(fb.gamma) / st.cfg.gamma_rate) * std::fmax(fb.v, 0.0) /
                              (st.cfg.l_f + st.cfg.l_r);
        if (kPi / 2.0 - ap.theta <= unwind + detail::kAlignTol || lateral <= 0.5) {
            st.approach_aligned = true;
        }
    }

    double gamma_target = 0.0;
    if (st.approach_aligned) {
        const double delta = std::clamp(std::atan(st.cfg.cross_track_gain * ap.d),
                                        -st.cfg.approach_delta_max, st.cfg.approach_delta_max);
        const double err = angle_diff(fb.pose.theta, normalize_angle(kPi + delta));
        gamma_target =
            std::clamp(-st.cfg.aim_hold_gain * err, -st.cfg.gamma_max, st.cfg.gamma_max);
    } else if (ap.theta >= 0.0 && ap.theta < kPi / 2.0 && lateral > 0.0 && ap.z > 0.0) {
        const ApproachSolution sol = approach_solution(lateral, ap.theta, ap.z);
        if (sol.L_d >= 0.0) {
            const double r_min =
                min_turning_radius(st.cfg.gamma_max, st.cfg.l_f, st.cfg.l_r);
            const double radius = std::fmax(sol.r_c, r_min);
            gamma_target = turn_sign * articulation_for_radius(radius, st.cfg.l_f, st.cfg.l_r,
                                                               st.cfg.gamma_max);
        }
    }
    u.steering = detail::servo_to_gamma(st, fb, gamma_target);

    // Cruise at full throttle, then bleed speed off inside the stopping zone.
    const double brake_cap = st.cfg.brake_level * st.cfg.brake_decel;
    const double stop_dist = fb.v * fb.v / (2.0 * brake_cap);
    if (ap.z <= st.cfg.margin + stop_dist || ap.z <= 2.0 * st.cfg.margin) {
        if (fb.v > st.cfg.v_approach) {
            u.throttle = 0.0;
            u.brake = st.cfg.brake_level;
        } else if (fb.v < 0.6 * st.cfg.v_approach) {
            u.throttle = st.cfg.approach_throttle;
        } else {
            u.throttle = 0.0;
        }
    } else {
        u.throttle = 1.0;
    }

    if (ap.z <= st.cfg.margin &&
        std::fabs(fb.pose.z - st.cfg.layout.b) <= st.cfg.layout.receiver_halfwidth) {
        next = (fb.h >= st.cfg.h_empty) ? Phase::Emptying : Phase::ExtraLift;
    }
    return u;
}

/// Phase 5a: hold the machine at the receiver and finish lifting.
inline ControlSignals phase_5a_rule(OperatorState& st, const FeedbackFrame& fb, double t,
                                    std::optional<Phase>& next) {
    ControlSignals u;
    u.direction = Direction::Forward;
    u.brake = 1.0;
    u.lift = 1.0;
    if (fb.h >= st.cfg.h_empty) {
        next = Phase::Emptying;
    } else if (t - st.phase_entry_time > st.cfg.extra_lift_timeout) {
        st.error = true;
        st.error_message = "extra-lift timeout: h_empty unreachable";
    }
    return u;
}

/// Phase 6: creep forward while raising the loading unit and tilting the
/// bucket out, then stop.
inline ControlSignals phase_6_rule(OperatorState& st, const FeedbackFrame& fb, double t,
                                   std::optional<Phase>& next) {
    ControlSignals u;
    u.direction = Direction::Forward;
    u.lift = 0.3;
    u.tilt = (fb.phi > st.cfg.phi_dump + detail::kTiltTol) ? -1.0 : 0.0;
    if (fb.v > 0.45) {
        u.throttle = 0.0;
        u.brake = 0.3;
    } else if (fb.v > 0.4) {
        u.throttle = 0.0;
    } else {
        u.throttle = st.cfg.empty_creep_throttle;
    }
    const double since = t - st.phase_entry_time;
    if (since >= st.cfg.empty_duration &&
        (u.tilt == 0.0 || since >= st.cfg.empty_duration + 15.0)) {
        next = Phase::Done;
    }
    return u;
}

namespace detail {

inline ControlSignals dispatch_phase_rule(OperatorState& st, const FeedbackFrame& fb, double t,
                                          std::optional<Phase>& next) {
    switch (st.phase) {
        case Phase::Init: return phase_init_rule(st, fb, next);
        case Phase::TiltBack: return phase_1a_rule(st, fb, next);
        case Phase::LeavingBank: return phase_2_rule(st, fb, t, next);
        case Phase::TurnLimited: return phase_2a_rule(st, fb, t, next);
        case Phase::Retardation: return phase_3_rule(st, fb, next);
        case Phase::Reversing: return phase_4_rule(st, fb, next);
        case Phase::TowardReceiver: return phase_5_rule(st, fb, next);
        case Phase::ExtraLift: return phase_5a_rule(st, fb, t, next);
        case Phase::Emptying: return phase_6_rule(st, fb, t, next);
        case Phase::Done: return ControlSignals{};
    }
    return ControlSignals{};
}

}  // namespace detail

/// One operator tick: dispatches the current phase rule and applies at most
/// one transition; the entry tick already acts under the new phase's rule.
/// Always returns in-range controls. After an error the operator goes
/// passive.
inline std::pair<OperatorState, ControlSignals> operator_tick(const OperatorState& prev,
                                                              const FeedbackFrame& fb, double t,
                                                              double dt) {
    OperatorState st = prev;
    ControlSignals u;
    if (st.error) {
        return {st, u};
    }
    st.s_travel += std::fabs(fb.v) * dt;

    std::optional<Phase> next;
    u = detail::dispatch_phase_rule(st, fb, t, next);
    if (next && phase_order(*next) > phase_order(st.phase)) {
        if (st.phase == Phase::Retardation && *next == Phase::Reversing) {
            st.reversing_pose = fb.pose;
            st.have_reversing_pose = true;
        }
        st.phase = *next;
        st.phase_entry_time = t;
        std::optional<Phase> deferred;  // a follow-up transition waits for the next tick
        u = detail::dispatch_phase_rule(st, fb, t, deferred);
    }
    return {st, u.clamped()};
}

}  // namespace slc
