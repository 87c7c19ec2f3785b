#pragma once

// The black-box channel pair between operator and machine. Nothing else
// crosses the boundary in either direction.

#include <algorithm>

#include "slc/geometry.hpp"

namespace slc {

enum class Direction { Forward, Reverse, Neutral };

inline int direction_sign(Direction d) {
    switch (d) {
        case Direction::Forward: return 1;
        case Direction::Reverse: return -1;
        default: return 0;
    }
}

inline const char* direction_label(Direction d) {
    switch (d) {
        case Direction::Forward: return "F";
        case Direction::Reverse: return "R";
        default: return "N";
    }
}

/// Control channel: throttle, brake, steering, lift, tilt plus the direction
/// selector.
struct ControlSignals {
    double throttle = 0.0;  // [0, 1]
    double brake = 0.0;     // [0, 1]
    double steering = 0.0;  // [-1, 1], fraction of the articulation slew rate
    double lift = 0.0;      // [-1, 1]
    double tilt = 0.0;      // [-1, 1]
    Direction direction = Direction::Neutral;

    bool valid() const {
        return throttle >= 0.0 && throttle <= 1.0 && brake >= 0.0 && brake <= 1.0 &&
               steering >= -1.0 && steering <= 1.0 && lift >= -1.0 && lift <= 1.0 &&
               tilt >= -1.0 && tilt <= 1.0;
    }

    ControlSignals clamped() const {
        ControlSignals u = *this;
        u.throttle = std::clamp(u.throttle, 0.0, 1.0);
        u.brake = std::clamp(u.brake, 0.0, 1.0);
        u.steering = std::clamp(u.steering, -1.0, 1.0);
        u.lift = std::clamp(u.lift, -1.0, 1.0);
        u.tilt = std::clamp(u.tilt, -1.0, 1.0);
        return u;
    }
};

/// Feedback channel: the seven observables the operator is allowed to see.
struct FeedbackFrame {
    Pose pose;
    double v = 0.0;       // m/s, signed, + forward
    double engine = 0.0;  // rev/min
    double h = 0.0;       // m, bucket height
    double phi = 0.0;     // rad, bucket angle, + tilted back
    double gamma = 0.0;   // rad, articulation angle
    Direction direction = Direction::Neutral;
};

}  // namespace slc
