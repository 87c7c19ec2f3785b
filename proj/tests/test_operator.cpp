#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <optional>
#include <random>

#include "slc/cosim.hpp"
#include "slc/operator_model.hpp"
#include "slc/plant.hpp"

using namespace slc;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

OperatorConfig config_for(double a, double b) {
    OperatorConfig cfg;
    cfg.layout.a = a;
    cfg.layout.b = b;
    return cfg;
}

OperatorState state_in(Phase phase, const OperatorConfig& cfg) {
    OperatorState st = operator_init(cfg);
    st.phase = phase;
    return st;
}

FeedbackFrame frame(double x, double z, double theta) {
    FeedbackFrame fb;
    fb.pose = {x, z, theta};
    return fb;
}

}  // namespace

TEST_CASE("operator_init plans the aim-at-origin path once", "[operator]") {
    const OperatorState equi = operator_init(config_for(10.0, 10.0));
    REQUIRE(equi.phase == Phase::Init);
    REQUIRE_THAT(equi.plan.alpha, WithinAbs(kPi / 4.0, 1e-12));

    const OperatorState wide = operator_init(config_for(20.0, 15.0));
    REQUIRE_THAT(wide.plan.alpha, WithinAbs(0.8867, 1e-3));
    REQUIRE(wide.estimator.slope() == 0.0);
}

TEST_CASE("estimator slope and arrival prediction", "[operator]") {
    EstimatorState est;
    est.window = 2.0;

    SECTION("linear form") {
        for (int i = 0; i <= 20; ++i) {
            est.feed(0.01 * i, 0.1 * i, 1.0 + 0.02 * i, true);  // dh/ds = 0.2
        }
        REQUIRE_THAT(est.slope(), WithinRel(0.2, 1e-9));
        REQUIRE_THAT(estimate_height_at_arrival(est, 1.0, 10.0), WithinRel(3.0, 1e-9));
    }

    SECTION("no samples means no extrapolation") {
        REQUIRE(est.slope() == 0.0);
        REQUIRE(estimate_height_at_arrival(est, 1.7, 50.0) == 1.7);
    }

    SECTION("released lift lever zeroes the slope") {
        for (int i = 0; i <= 20; ++i) {
            est.feed(0.01 * i, 0.1 * i, 1.0 + 0.02 * i, true);
        }
        est.feed(0.21, 2.1, 1.42, false);
        REQUIRE(est.slope() == 0.0);
    }

    SECTION("slope is a function of the window contents only") {
        for (int i = 0; i < 50; ++i) {
            est.feed(0.01 * i, 0.05 * i, 3.0 - 0.04 * i, true);  // stale, steeper, negative
        }
        for (int i = 0; i <= 300; ++i) {
            est.feed(10.0 + 0.01 * i, 10.0 + 0.1 * i, 1.0 + 0.02 * i, true);
        }
        REQUIRE_THAT(est.slope(), WithinRel(0.2, 1e-9));
    }

    SECTION("standstill samples yield zero slope") {
        for (int i = 0; i <= 20; ++i) {
            est.feed(0.01 * i, 5.0, 1.0 + 0.02 * i, true);
        }
        REQUIRE(est.slope() == 0.0);
    }
}

TEST_CASE("initialisation lifts and tilts toward the handover position", "[operator]") {
    const OperatorConfig cfg = config_for(15.0, 15.0);
    OperatorState st = state_in(Phase::Init, cfg);

    std::optional<Phase> next;
    FeedbackFrame fb = frame(15.0, 0.0, -kPi / 2.0);
    fb.h = 0.0;
    fb.phi = 0.0;
    ControlSignals u = phase_init_rule(st, fb, next);
    REQUIRE(u.lift == 1.0);
    REQUIRE(u.tilt == 1.0);
    REQUIRE(u.throttle > 0.0);
    REQUIRE(u.direction == Direction::Neutral);
    REQUIRE_FALSE(next.has_value());

    fb.h = cfg.h_init;
    fb.phi = cfg.phi_init;
    next.reset();
    u = phase_init_rule(st, fb, next);
    REQUIRE(next == Phase::TiltBack);
}

TEST_CASE("phase 1a tilts fully back then leaves the bank", "[operator]") {
    const OperatorConfig cfg = config_for(15.0, 15.0);
    OperatorState st = state_in(Phase::TiltBack, cfg);

    std::optional<Phase> next;
    FeedbackFrame fb = frame(15.0, 0.0, -kPi / 2.0);
    fb.phi = 0.3;
    ControlSignals u = phase_1a_rule(st, fb, next);
    REQUIRE(u.tilt == 1.0);
    REQUIRE_FALSE(next.has_value());

    fb.phi = cfg.phi_back;
    next.reset();
    u = phase_1a_rule(st, fb, next);
    REQUIRE(next == Phase::LeavingBank);

    // Rate-limit bound: full travel at tilt_rate_max finishes well inside
    // range / rate + 1 s.
    MachineParams mp;
    KinematicPlant plant{mp, plant_init(mp, cfg.layout.dig_pose(), cfg.h_init, cfg.phi_init)};
    OperatorState op = state_in(Phase::TiltBack, cfg);
    double t = 0.0;
    const double dt = 0.01;
    const double bound = (mp.tilt_max - cfg.phi_init) / mp.tilt_rate_max + 1.0;
    while (op.phase == Phase::TiltBack && t < bound + 1.0) {
        auto [op2, u2] = operator_tick(op, plant.observe(), t, dt);
        op = op2;
        plant.step(u2, dt);
        t += dt;
    }
    REQUIRE(op.phase == Phase::LeavingBank);
    REQUIRE(t <= bound);
}

TEST_CASE("phase 2 reverses with full lift and steers the planned radius", "[operator]") {
    const OperatorConfig cfg = config_for(15.0, 15.0);
    OperatorState st = state_in(Phase::LeavingBank, cfg);

    std::optional<Phase> next;
    FeedbackFrame fb = frame(15.0, 0.0, -kPi / 2.0);
    fb.h = cfg.h_init;
    const ControlSignals u = phase_2_rule(st, fb, 0.0, next);
    REQUIRE(u.direction == Direction::Reverse);
    REQUIRE(u.throttle == 1.0);
    REQUIRE(u.lift == 1.0);
    REQUIRE(u.steering > 0.0);
    REQUIRE_FALSE(next.has_value());
}

TEST_CASE("aim capture reverses the steering command toward zero articulation", "[operator]") {
    const OperatorConfig cfg = config_for(10.0, 10.0);
    OperatorState st = state_in(Phase::LeavingBank, cfg);

    const double gamma_plan =
        articulation_for_radius(st.plan.r_a, cfg.l_f, cfg.l_r, cfg.gamma_max);
    FeedbackFrame fb = frame(17.07, 17.07, -3.0 * kPi / 4.0);  // nose exactly on the origin
    fb.gamma = gamma_plan;
    fb.v = -2.0;
    fb.h = 1.0;

    std::optional<Phase> next;
    const ControlSignals u = phase_2_rule(st, fb, 10.0, next);
    REQUIRE(st.aim_captured);
    REQUIRE(u.steering < 0.0);
}

TEST_CASE("reversing decision picks retardation or the turn-limited phase", "[operator]") {
    const OperatorConfig cfg = config_for(10.0, 10.0);

    SECTION("feasible turn goes to retardation") {
        OperatorState st = state_in(Phase::LeavingBank, cfg);
        FeedbackFrame fb = frame(17.0, 17.0, -3.0 * kPi / 4.0);
        fb.h = cfg.h_empty;  // prediction clears immediately
        fb.v = -2.0;
        std::optional<Phase> next;
        phase_2_rule(st, fb, 10.0, next);
        REQUIRE(st.receiver_passed);
        REQUIRE(next == Phase::Retardation);
    }

    SECTION("infeasible turn goes turn-limited, then leaves when drivable") {
        OperatorState st = state_in(Phase::LeavingBank, cfg);
        FeedbackFrame fb = frame(10.4, 10.4, -3.0 * kPi / 4.0);  // just past the receiver
        fb.h = cfg.h_empty;
        fb.v = -2.0;
        std::optional<Phase> next;
        phase_2_rule(st, fb, 10.0, next);
        REQUIRE(next == Phase::TurnLimited);

        st.phase = Phase::TurnLimited;
        next.reset();
        FeedbackFrame far = frame(13.0, 13.0, -3.0 * kPi / 4.0);
        far.h = cfg.h_empty;
        far.v = -2.0;
        phase_2a_rule(st, far, 11.0, next);
        REQUIRE(next == Phase::Retardation);
    }

    SECTION("feasibility boundary just below and above the minimum radius") {
        // On the bearing line the required radius is d / (1 - sin(pi/4));
        // place the machine so it comes out at 0.9 and 1.1 of the minimum.
        const double r_min = min_turning_radius(cfg.gamma_max, cfg.l_f, cfg.l_r);
        const double k = 1.0 - std::sin(kPi / 4.0);

        OperatorState st = state_in(Phase::TurnLimited, cfg);
        st.receiver_passed = true;
        st.decision_fired = true;
        const double d_tight = 0.9 * r_min * k;
        FeedbackFrame fb = frame(10.0 + d_tight, 10.0 + d_tight, -3.0 * kPi / 4.0);
        fb.h = cfg.h_empty;
        fb.v = -2.0;
        std::optional<Phase> next;
        phase_2a_rule(st, fb, 10.0, next);
        REQUIRE_FALSE(next.has_value());

        const double d_ok = 1.1 * r_min * k;
        FeedbackFrame fb2 = frame(10.0 + d_ok, 10.0 + d_ok, -3.0 * kPi / 4.0);
        fb2.h = cfg.h_empty;
        fb2.v = -2.0;
        next.reset();
        phase_2a_rule(st, fb2, 10.1, next);
        REQUIRE(next == Phase::Retardation);
    }

    SECTION("estimator must fire before anything happens") {
        OperatorState st = state_in(Phase::LeavingBank, cfg);
        FeedbackFrame fb = frame(10.4, 10.4, -3.0 * kPi / 4.0);
        fb.h = 0.5;  // far from h_empty, no slope yet
        fb.v = -2.0;
        std::optional<Phase> next;
        phase_2_rule(st, fb, 10.0, next);
        REQUIRE_FALSE(next.has_value());
    }
}

TEST_CASE("phase 3 brakes, straightens and hands over at safe speed", "[operator]") {
    const OperatorConfig cfg = config_for(15.0, 15.0);
    OperatorState st = state_in(Phase::Retardation, cfg);

    std::optional<Phase> next;
    FeedbackFrame fb = frame(20.0, 20.0, -3.0 * kPi / 4.0);
    fb.v = -3.0;
    fb.gamma = 0.1;
    fb.h = 2.0;
    ControlSignals u = phase_3_rule(st, fb, next);
    REQUIRE(u.throttle == 0.0);
    REQUIRE(u.brake > 0.0);
    REQUIRE(u.lift == 1.0);
    REQUIRE(u.steering < 0.0);
    REQUIRE_FALSE(next.has_value());

    fb.v = -cfg.v_safe;
    next.reset();
    phase_3_rule(st, fb, next);
    REQUIRE(next == Phase::Reversing);
}

TEST_CASE("phase 4 engages forward while still rolling backwards", "[operator]") {
    const OperatorConfig cfg = config_for(15.0, 15.0);
    OperatorState st = state_in(Phase::Reversing, cfg);

    std::optional<Phase> next;
    FeedbackFrame fb = frame(20.0, 20.0, -3.0 * kPi / 4.0);
    fb.v = -0.2;
    ControlSignals u = phase_4_rule(st, fb, next);
    REQUIRE(u.direction == Direction::Forward);
    REQUIRE(u.brake == 0.0);
    REQUIRE(u.throttle == 1.0);
    REQUIRE(u.lift == 0.0);
    REQUIRE_FALSE(next.has_value());

    fb.v = 0.01;
    next.reset();
    phase_4_rule(st, fb, next);
    REQUIRE(next == Phase::TowardReceiver);
}

TEST_CASE("phase 5 strategy for the approach", "[operator]") {
    const OperatorConfig cfg = config_for(10.0, 10.0);

    SECTION("negative straight segment holds the heading") {
        OperatorState st = state_in(Phase::TowardReceiver, cfg);
        FeedbackFrame fb = frame(30.0, 30.0, -3.0 * kPi / 4.0);  // L_d < 0 out here
        fb.v = 1.0;
        fb.h = 1.0;
        std::optional<Phase> next;
        const ControlSignals u = phase_5_rule(st, fb, next);
        REQUIRE(u.steering == 0.0);
        REQUIRE(u.lift == 1.0);
        REQUIRE_FALSE(next.has_value());
    }

    SECTION("practical solution turns toward the receiver") {
        OperatorState st = state_in(Phase::TowardReceiver, cfg);
        FeedbackFrame fb = frame(17.0, 17.0, -3.0 * kPi / 4.0);
        fb.v = 1.0;
        fb.h = 1.0;
        std::optional<Phase> next;
        const ControlSignals u = phase_5_rule(st, fb, next);
        REQUIRE(u.steering < 0.0);
    }

    SECTION("lift stops exactly at the emptying height") {
        OperatorState st = state_in(Phase::TowardReceiver, cfg);
        FeedbackFrame fb = frame(17.0, 17.0, -3.0 * kPi / 4.0);
        fb.v = 1.0;
        fb.h = cfg.h_empty;
        std::optional<Phase> next;
        const ControlSignals u = phase_5_rule(st, fb, next);
        REQUIRE(u.lift == 0.0);
    }

    SECTION("arrival splits on bucket height") {
        OperatorState st = state_in(Phase::TowardReceiver, cfg);
        st.approach_aligned = true;
        FeedbackFrame fb = frame(0.2, 10.0, kPi);
        fb.v = 0.3;
        fb.h = cfg.h_empty + 0.1;
        std::optional<Phase> next;
        phase_5_rule(st, fb, next);
        REQUIRE(next == Phase::Emptying);

        OperatorState low = state_in(Phase::TowardReceiver, cfg);
        low.approach_aligned = true;
        fb.h = cfg.h_empty - 0.5;
        next.reset();
        phase_5_rule(low, fb, next);
        REQUIRE(next == Phase::ExtraLift);
    }
}

TEST_CASE("phase 5a lifts at standstill and times the rate arithmetic", "[operator]") {
    OperatorConfig cfg = config_for(10.0, 10.0);

    SECTION("already high enough transitions immediately") {
        OperatorState st = state_in(Phase::ExtraLift, cfg);
        FeedbackFrame fb = frame(0.2, 10.0, kPi);
        fb.h = cfg.h_empty;
        std::optional<Phase> next;
        phase_5a_rule(st, fb, 0.0, next);
        REQUIRE(next == Phase::Emptying);
    }

    SECTION("0.3 m of missing height at 0.25 m/s takes about 1.2 s") {
        MachineParams mp;
        mp.lift_rate_max = 0.25;
        OperatorState op = state_in(Phase::ExtraLift, cfg);
        op.phase_entry_time = 0.0;
        MachineState s = plant_init(mp, Pose{0.2, 10.0, kPi}, cfg.h_empty - 0.3, 0.3);
        const double dt = 0.01;
        double t = 0.0;
        while (op.phase == Phase::ExtraLift && t < 5.0) {
            auto [op2, u] = operator_tick(op, observe(s), t, dt);
            op = op2;
            s = plant_step(s, u, dt, mp);
            t += dt;
        }
        REQUIRE(op.phase == Phase::Emptying);
        REQUIRE_THAT(t, WithinAbs(1.2, 0.1));
    }

    SECTION("unreachable target raises the timeout error") {
        cfg.extra_lift_timeout = 1.0;
        OperatorState st = state_in(Phase::ExtraLift, cfg);
        st.phase_entry_time = 0.0;
        FeedbackFrame fb = frame(0.2, 10.0, kPi);
        fb.h = 1.0;
        std::optional<Phase> next;
        phase_5a_rule(st, fb, 2.0, next);
        REQUIRE(st.error);
        REQUIRE_FALSE(next.has_value());
    }
}

TEST_CASE("phase 6 empties the bucket on a slow creep and finishes", "[operator]") {
    const OperatorConfig cfg = config_for(10.0, 10.0);
    OperatorState st = state_in(Phase::Emptying, cfg);
    st.phase_entry_time = 0.0;

    std::optional<Phase> next;
    FeedbackFrame fb = frame(0.2, 10.0, kPi);
    fb.phi = 0.5;
    fb.v = 0.1;
    ControlSignals u = phase_6_rule(st, fb, 0.5, next);
    REQUIRE(u.tilt == -1.0);
    REQUIRE(u.throttle == cfg.empty_creep_throttle);
    REQUIRE_FALSE(next.has_value());

    fb.phi = cfg.phi_dump;
    next.reset();
    u = phase_6_rule(st, fb, 1.0, next);
    REQUIRE(u.tilt == 0.0);

    next.reset();
    phase_6_rule(st, fb, cfg.empty_duration + 0.01, next);
    REQUIRE(next == Phase::Done);
}

TEST_CASE("done emits neutral zero controls", "[operator]") {
    const OperatorConfig cfg = config_for(10.0, 10.0);
    OperatorState st = state_in(Phase::Done, cfg);
    const auto [st2, u] = operator_tick(st, frame(0.2, 10.0, kPi), 50.0, 0.01);
    REQUIRE(u.throttle == 0.0);
    REQUIRE(u.brake == 0.0);
    REQUIRE(u.steering == 0.0);
    REQUIRE(u.lift == 0.0);
    REQUIRE(u.tilt == 0.0);
    REQUIRE(u.direction == Direction::Neutral);
    REQUIRE(st2.phase == Phase::Done);
}

TEST_CASE("random feedback never breaks control bounds or phase order", "[operator][property]") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> coord(-40.0, 40.0);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    std::uniform_real_distribution<double> vel(-4.0, 4.0);
    std::uniform_real_distribution<double> height(0.0, 4.0);
    std::uniform_real_distribution<double> tilt(-0.8, 0.9);
    std::uniform_int_distribution<int> dir(0, 2);

    OperatorState op = operator_init(config_for(12.0, 9.0));
    const double dt = 0.01;
    for (int i = 0; i < 20000; ++i) {
        FeedbackFrame fb;
        fb.pose = {coord(rng), coord(rng), ang(rng)};
        fb.v = vel(rng);
        fb.h = height(rng);
        fb.phi = tilt(rng);
        fb.gamma = tilt(rng) * 0.7;
        fb.engine = 800.0 + 1300.0 * height(rng) / 4.0;
        fb.direction = static_cast<Direction>(dir(rng));
        const int order_before = phase_order(op.phase);
        auto [op2, u] = operator_tick(op, fb, i * dt, dt);
        REQUIRE(u.valid());
        REQUIRE(phase_order(op2.phase) >= order_before);
        op = op2;
    }
}
