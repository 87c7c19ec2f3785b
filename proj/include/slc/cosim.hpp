#pragma once

// Fixed-step co-simulation master. Operator and plant exchange only the
// channel pair: feedback sampled at step k produces the controls applied
// over [t_k, t_k+1). Any plant exposing observe()/step() over the channel
// types can sit on the machine side.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "slc/channels.hpp"
#include "slc/operator_model.hpp"
#include "slc/plant.hpp"

namespace slc {

enum class RunOutcome { Done, Timeout, OperatorError };

struct TraceRecord {
    double t = 0.0;
    Phase phase = Phase::Init;
    ControlSignals u;
    FeedbackFrame fb;
    double s_cum = 0.0;  // m, integral of |v| dt up to and including this step
};

struct TraceMeta {
    std::string config_digest;
    double dt = 0.01;
    std::string version = "1.0.0";
    std::string scenario;
};

struct Trace {
    TraceMeta meta;
    std::vector<TraceRecord> records;
    RunOutcome outcome = RunOutcome::Timeout;
    std::string error_message;
};

template <typename PlantModel>
Trace run_cycle_with(PlantModel& plant, OperatorState op, double dt, double t_max) {
    if (!(dt > 0.0) || !(t_max > 0.0)) {
        throw std::invalid_argument("run_cycle_with: dt and t_max must be positive");
    }
    Trace trace;
    trace.meta.dt = dt;
    double s_cum = 0.0;
    for (std::uint64_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (t >= t_max) {
            trace.outcome = RunOutcome::Timeout;
            trace.error_message = "t_max reached";
            break;
        }
        const FeedbackFrame fb = plant.observe();
        auto [op_next, u] = operator_tick(op, fb, t, dt);
        op = std::move(op_next);
        s_cum += std::fabs(fb.v) * dt;
        trace.records.push_back({t, op.phase, u, fb, s_cum});
        if (op.phase == Phase::Done) {
            trace.outcome = RunOutcome::Done;
            break;
        }
        if (op.error) {
            trace.outcome = RunOutcome::OperatorError;
            trace.error_message = op.error_message;
            break;
        }
        plant.step(u, dt);
    }
    return trace;
}

/// The default machine side: the kinematic plant behind the channel pair.
struct KinematicPlant {
    MachineParams params;
    MachineState state;

    FeedbackFrame observe() const { return slc::observe(state); }
    void step(const ControlSignals& u, double dt) { state = plant_step(state, u, dt, params); }
};

inline Trace run_cycle(const MachineParams& mp, const OperatorConfig& oc, double dt, double t_max,
                       double h0 = 0.0, double phi0 = 0.0) {
    KinematicPlant plant{mp, plant_init(mp, oc.layout.dig_pose(), h0, phi0)};
    return run_cycle_with(plant, operator_init(oc), dt, t_max);
}

}  // namespace slc
