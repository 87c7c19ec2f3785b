#pragma once

// Scenario configuration: line-based `section.key = value` text with '#'
// comments. Unknown keys are errors; every violated invariant is reported
// with the offending key. Angles live in *_deg keys.

#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "slc/num_format.hpp"
#include "slc/operator_model.hpp"
#include "slc/plant.hpp"

namespace slc {

struct SimSettings {
    double dt = 0.01;        // s
    double t_max = 300.0;    // s
    double h0 = 0.0;         // m, bucket height at the dig point
    double phi0 = 0.0;       // rad, bucket angle at the dig point
    std::string out_dir = "out";
    std::string name = "nominal";
};

struct ScenarioConfig {
    MachineParams machine;
    OperatorConfig op;
    SimSettings sim;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                      : message),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_ = 0;
};

namespace detail {

struct KeyBinding {
    std::function<double(const ScenarioConfig&)> get;
    std::function<void(ScenarioConfig&, double)> set;
    bool degrees = false;
};

inline const std::map<std::string, KeyBinding, std::less<>>& numeric_keys() {
    static const std::map<std::string, KeyBinding, std::less<>> keys = [] {
        std::map<std::string, KeyBinding, std::less<>> m;
        const auto add = [&m](const std::string& key, auto getter, auto setter, bool degrees) {
            m[key] = KeyBinding{getter, setter, degrees};
        };
#define SLC_KEY(NAME, FIELD, DEG)                                                   \
    add(NAME, [](const ScenarioConfig& c) { return c.FIELD; },                      \
        [](ScenarioConfig& c, double v) { c.FIELD = v; }, DEG)
        SLC_KEY("machine.l_f", machine.l_f, false);
        SLC_KEY("machine.l_r", machine.l_r, false);
        SLC_KEY("machine.gamma_max_deg", machine.gamma_max, true);
        SLC_KEY("machine.gamma_rate_deg", machine.gamma_rate, true);
        SLC_KEY("machine.v_max_fwd", machine.v_max_fwd, false);
        SLC_KEY("machine.v_max_rev", machine.v_max_rev, false);
        SLC_KEY("machine.accel_gain", machine.accel_gain, false);
        SLC_KEY("machine.brake_decel", machine.brake_decel, false);
        SLC_KEY("machine.coast_decel", machine.coast_decel, false);
        SLC_KEY("machine.lift_rate_max", machine.lift_rate_max, false);
        SLC_KEY("machine.tilt_rate_max", machine.tilt_rate_max, false);
        SLC_KEY("machine.lift_scale", machine.lift_scale, false);
        SLC_KEY("machine.h_max", machine.h_max, false);
        SLC_KEY("machine.tilt_min_deg", machine.tilt_min, true);
        SLC_KEY("machine.tilt_max_deg", machine.tilt_max, true);
        SLC_KEY("machine.engine_idle", machine.engine_idle, false);
        SLC_KEY("machine.engine_max", machine.engine_max, false);
        SLC_KEY("machine.engine_tau", machine.engine_tau, false);
        SLC_KEY("machine.reversal_tau", machine.reversal_tau, false);
        SLC_KEY("workplace.a", op.layout.a, false);
        SLC_KEY("workplace.b", op.layout.b, false);
        SLC_KEY("workplace.receiver_halfwidth", op.layout.receiver_halfwidth, false);
        SLC_KEY("operator.h_empty", op.h_empty, false);
        SLC_KEY("operator.h_init", op.h_init, false);
        SLC_KEY("operator.phi_init_deg", op.phi_init, true);
        SLC_KEY("operator.v_safe", op.v_safe, false);
        SLC_KEY("operator.aim_tol_deg", op.aim_tol, true);
        SLC_KEY("operator.ratio_window", op.ratio_window, false);
        SLC_KEY("operator.margin", op.margin, false);
        SLC_KEY("operator.empty_creep_throttle", op.empty_creep_throttle, false);
        SLC_KEY("operator.empty_duration", op.empty_duration, false);
        SLC_KEY("operator.brake_level", op.brake_level, false);
        SLC_KEY("operator.approach_throttle", op.approach_throttle, false);
        SLC_KEY("operator.v_approach", op.v_approach, false);
        SLC_KEY("operator.aim_hold_gain", op.aim_hold_gain, false);
        SLC_KEY("operator.gamma_gain", op.gamma_gain, false);
        SLC_KEY("operator.cross_track_gain", op.cross_track_gain, false);
        SLC_KEY("operator.approach_delta_max_deg", op.approach_delta_max, true);
        SLC_KEY("operator.extra_lift_timeout", op.extra_lift_timeout, false);
        SLC_KEY("sim.dt", sim.dt, false);
        SLC_KEY("sim.t_max", sim.t_max, false);
        SLC_KEY("sim.h0", sim.h0, false);
        SLC_KEY("sim.phi0_deg", sim.phi0, true);
#undef SLC_KEY
        return m;
    }();
    return keys;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace detail

/// The operator's machine knowledge mirrors the machine section; keeping it
/// derived means a config cannot describe a driver who knows a different
/// machine than the one being driven.
inline void finalize_config(ScenarioConfig& cfg) {
    cfg.op.l_f = cfg.machine.l_f;
    cfg.op.l_r = cfg.machine.l_r;
    cfg.op.gamma_max = cfg.machine.gamma_max;
    cfg.op.gamma_rate = cfg.machine.gamma_rate;
    cfg.op.brake_decel = cfg.machine.brake_decel;
    cfg.op.phi_back = cfg.machine.tilt_max;
    cfg.op.phi_dump = cfg.machine.tilt_min;
}

inline void validate_config(const ScenarioConfig& cfg) {
    const auto fail = [](const std::string& key, const std::string& why) {
        throw ConfigError(0, "invalid value for " + key + ": " + why);
    };
    const auto positive = [&fail](const std::string& key, double v) {
        if (!(v > 0.0)) fail(key, "must be strictly positive");
    };

    positive("machine.l_f", cfg.machine.l_f);
    positive("machine.l_r", cfg.machine.l_r);
    if (!(cfg.machine.gamma_max >= deg2rad(30.0) && cfg.machine.gamma_max <= deg2rad(45.0))) {
        fail("machine.gamma_max_deg", "must lie in [30, 45]");
    }
    positive("machine.gamma_rate_deg", cfg.machine.gamma_rate);
    positive("machine.v_max_fwd", cfg.machine.v_max_fwd);
    positive("machine.v_max_rev", cfg.machine.v_max_rev);
    positive("machine.accel_gain", cfg.machine.accel_gain);
    positive("machine.brake_decel", cfg.machine.brake_decel);
    positive("machine.coast_decel", cfg.machine.coast_decel);
    positive("machine.lift_rate_max", cfg.machine.lift_rate_max);
    positive("machine.tilt_rate_max", cfg.machine.tilt_rate_max);
    positive("machine.lift_scale", cfg.machine.lift_scale);
    positive("machine.h_max", cfg.machine.h_max);
    if (!(cfg.machine.tilt_min < cfg.machine.tilt_max)) {
        fail("machine.tilt_min_deg", "must be below machine.tilt_max_deg");
    }
    positive("machine.engine_idle", cfg.machine.engine_idle);
    if (!(cfg.machine.engine_max > cfg.machine.engine_idle)) {
        fail("machine.engine_max", "must exceed machine.engine_idle");
    }
    positive("machine.engine_tau", cfg.machine.engine_tau);
    positive("machine.reversal_tau", cfg.machine.reversal_tau);

    positive("workplace.a", cfg.op.layout.a);
    positive("workplace.b", cfg.op.layout.b);
    if (!(cfg.op.layout.receiver_halfwidth >= 0.0)) {
        fail("workplace.receiver_halfwidth", "must be non-negative");
    }

    if (!(cfg.op.h_empty > 0.0 && cfg.op.h_empty <= cfg.machine.h_max)) {
        fail("operator.h_empty", "must lie in (0, machine.h_max]");
    }
    if (!(cfg.op.h_init >= 0.0 && cfg.op.h_init <= cfg.machine.h_max)) {
        fail("operator.h_init", "must lie in [0, machine.h_max]");
    }
    if (!(cfg.op.phi_init >= cfg.machine.tilt_min && cfg.op.phi_init <= cfg.machine.tilt_max)) {
        fail("operator.phi_init_deg", "must lie inside the tilt range");
    }
    positive("operator.v_safe", cfg.op.v_safe);
    positive("operator.aim_tol_deg", cfg.op.aim_tol);
    positive("operator.ratio_window", cfg.op.ratio_window);
    positive("operator.margin", cfg.op.margin);
    if (!(cfg.op.empty_creep_throttle >= 0.0 && cfg.op.empty_creep_throttle <= 1.0)) {
        fail("operator.empty_creep_throttle", "must lie in [0, 1]");
    }
    positive("operator.empty_duration", cfg.op.empty_duration);
    if (!(cfg.op.brake_level > 0.0 && cfg.op.brake_level <= 1.0)) {
        fail("operator.brake_level", "must lie in (0, 1]");
    }
    if (!(cfg.op.approach_throttle > 0.0 && cfg.op.approach_throttle <= 1.0)) {
        fail("operator.approach_throttle", "must lie in (0, 1]");
    }
    positive("operator.v_approach", cfg.op.v_approach);
    positive("operator.aim_hold_gain", cfg.op.aim_hold_gain);
    positive("operator.gamma_gain", cfg.op.gamma_gain);
    positive("operator.cross_track_gain", cfg.op.cross_track_gain);
    if (!(cfg.op.approach_delta_max > 0.0 && cfg.op.approach_delta_max <= deg2rad(45.0))) {
        fail("operator.approach_delta_max_deg", "must lie in (0, 45]");
    }
    positive("operator.extra_lift_timeout", cfg.op.extra_lift_timeout);

    positive("sim.dt", cfg.sim.dt);
    positive("sim.t_max", cfg.sim.t_max);
    if (!(cfg.sim.h0 >= 0.0 && cfg.sim.h0 <= cfg.machine.h_max)) {
        fail("sim.h0", "must lie in [0, machine.h_max]");
    }
    if (!(cfg.sim.phi0 >= cfg.machine.tilt_min && cfg.sim.phi0 <= cfg.machine.tilt_max)) {
        fail("sim.phi0_deg", "must lie inside the tilt range");
    }
    if (cfg.sim.name.empty()) fail("sim.name", "must not be empty");
    if (cfg.sim.out_dir.empty()) fail("sim.out_dir", "must not be empty");
}

/// Parses config text over the defaults. Any byte sequence yields either a
/// valid config or a ConfigError carrying the offending line.
inline ScenarioConfig parse_config(std::string_view text) {
    ScenarioConfig cfg;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;

        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(line_no, "expected 'section.key = value'");
        }
        const std::string key{detail::trim(line.substr(0, eq))};
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "missing key");
        if (value.empty()) throw ConfigError(line_no, "missing value for " + key);

        if (key == "sim.out_dir") {
            cfg.sim.out_dir = std::string(value);
            continue;
        }
        if (key == "sim.name") {
            cfg.sim.name = std::string(value);
            continue;
        }
        const auto& keys = detail::numeric_keys();
        const auto it = keys.find(key);
        if (it == keys.end()) {
            throw ConfigError(line_no, "unknown key '" + key + "'");
        }
        double v = 0.0;
        try {
            v = parse_double(value);
        } catch (const std::exception&) {
            throw ConfigError(line_no, "not a number: '" + std::string(value) + "'");
        }
        it->second.set(cfg, it->second.degrees ? deg2rad(v) : v);
    }
    finalize_config(cfg);
    validate_config(cfg);
    return cfg;
}

/// Canonical text form of the effective config (sorted keys, g15 numbers).
inline std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream os;
    for (const auto& [key, binding] : detail::numeric_keys()) {
        const double v = binding.get(cfg);
        os << key << " = " << format_g15(binding.degrees ? rad2deg(v) : v) << '\n';
    }
    os << "sim.name = " << cfg.sim.name << '\n';
    os << "sim.out_dir = " << cfg.sim.out_dir << '\n';
    return os.str();
}

/// FNV-1a 64-bit digest of the canonical config text.
inline std::string config_digest(const ScenarioConfig& cfg) {
    const std::string text = serialize_config(cfg);
    std::uint64_t hash = 1469598103934665603ull;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[hash & 0xf];
        hash >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

}  // namespace slc
