#pragma once

// Scenario execution and the three adaptation experiments, shared between
// the command-line tool and the test suites.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "slc/config.hpp"
#include "slc/cosim.hpp"
#include "slc/metrics.hpp"

namespace slc {

struct RunResult {
    Trace trace;
    std::optional<CycleKpis> kpis;
    std::filesystem::path dir;
};

inline Trace simulate(const ScenarioConfig& cfg) {
    Trace trace = run_cycle(cfg.machine, cfg.op, cfg.sim.dt, cfg.sim.t_max, cfg.sim.h0,
                            cfg.sim.phi0);
    trace.meta.config_digest = config_digest(cfg);
    trace.meta.scenario = cfg.sim.name;
    return trace;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open " + path.string());
    }
    os << text;
    os.flush();
    if (!os) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

inline void write_standard_plots(const Trace& trace, const std::filesystem::path& dir,
                                 const std::string& name) {
    emit_svg(harmony_series(trace), dir / "harmony.svg",
             {"Harmony diagram (" + name + ")", "travelled distance [m]", "bucket height [m]",
              false});
    emit_svg(bucket_series(trace), dir / "bucket.svg",
             {"Bucket handling (" + name + ")", "bucket angle [rad]", "bucket height [m]",
              false});
    emit_svg(location_series(trace), dir / "location.svg",
             {"Machine location (" + name + ")", "x [m]", "z [m]", true});
}

/// Runs one scenario and writes trace.csv, the three diagnostic SVGs and
/// kpis.txt into <out_dir>/<name>/.
inline RunResult run_scenario(const ScenarioConfig& cfg) {
    RunResult result;
    result.trace = simulate(cfg);
    result.dir = std::filesystem::path(cfg.sim.out_dir) / cfg.sim.name;
    std::filesystem::create_directories(result.dir);
    emit_csv(result.trace, result.dir / "trace.csv");
    write_standard_plots(result.trace, result.dir, cfg.sim.name);
    if (result.trace.outcome == RunOutcome::Done) {
        result.kpis = cycle_kpis(result.trace);
        write_text_file(result.dir / "kpis.txt", kpis_text(*result.kpis, result.trace.meta));
    }
    return result;
}

inline int cmd_run(const ScenarioConfig& cfg, std::ostream& log = std::cout) {
    const RunResult result = run_scenario(cfg);
    switch (result.trace.outcome) {
        case RunOutcome::Done:
            log << "done: " << cfg.sim.name << " in "
                << format_g15(static_cast<double>(result.trace.records.size()) * cfg.sim.dt)
                << " s simulated, outputs in " << result.dir.string() << "\n";
            return 0;
        case RunOutcome::Timeout:
            log << "timeout: " << cfg.sim.name << " did not finish within "
                << format_g15(cfg.sim.t_max) << " s\n";
            return 1;
        default:
            log << "operator error: " << result.trace.error_message << "\n";
            return 1;
    }
}

namespace detail {

inline void append_kpi_row(std::ostringstream& os, const std::string& name,
                           const RunResult& run) {
    os << name << ": ";
    if (!run.kpis) {
        os << "incomplete run\n";
        return;
    }
    os << "reversing_distance_to_receiver=" << format_g15(run.kpis->reversing_distance_to_receiver)
       << " reversing_z=" << format_g15(run.kpis->reversing_pose.z)
       << " arrival_height=" << format_g15(run.kpis->arrival_height)
       << " cycle_time=" << format_g15(run.kpis->cycle_time)
       << " entered_2a=" << (run.kpis->entered_2a ? 1 : 0)
       << " entered_5a=" << (run.kpis->entered_5a ? 1 : 0) << '\n';
}

inline void write_experiment_overlays(const std::string& experiment, const RunResult& first,
                                      const RunResult& second, const std::string& first_name,
                                      const std::string& second_name,
                                      const std::filesystem::path& dir) {
    emit_svg_overlay({{first_name, location_series(first.trace)},
                      {second_name, location_series(second.trace)}},
                     dir / "location_overlay.svg",
                     {"Machine location (" + experiment + ")", "x [m]", "z [m]", true});
    emit_svg_overlay({{first_name, harmony_series(first.trace)},
                      {second_name, harmony_series(second.trace)}},
                     dir / "harmony_overlay.svg",
                     {"Harmony diagram (" + experiment + ")", "travelled distance [m]",
                      "bucket height [m]", false});
}

}  // namespace detail

/// Runs the scenario pair of the named adaptation experiment, writes overlay
/// plots and a comparison table, and checks the expected direction of
/// effect. Returns 0 when every assertion holds, 1 otherwise.
inline int cmd_experiment(const std::string& name, const ScenarioConfig& base,
                          std::ostream& log = std::cout) {
    ScenarioConfig first = base;
    ScenarioConfig second = base;
    std::string first_name, second_name;

    if (name == "layout") {
        first.sim.name = base.sim.name + "-layout-near";
        second.sim.name = base.sim.name + "-layout-far";
        second.op.layout.b = 1.5 * base.op.layout.b;
        first_name = "b = " + format_g15(first.op.layout.b) + " m";
        second_name = "b = " + format_g15(second.op.layout.b) + " m";
    } else if (name == "lift") {
        first.sim.name = base.sim.name + "-lift-full";
        first.machine.lift_scale = 1.0;
        second.sim.name = base.sim.name + "-lift-half";
        second.machine.lift_scale = 0.5;
        first_name = "lift_scale = 1.0";
        second_name = "lift_scale = 0.5";
    } else if (name == "bucketheight") {
        first.sim.name = base.sim.name + "-bucket-low";
        first.op.h_init = 0.5;
        second.sim.name = base.sim.name + "-bucket-high";
        second.op.h_init = 1.5;
        first_name = "h_init = 0.5 m";
        second_name = "h_init = 1.5 m";
    } else {
        log << "unknown experiment '" << name << "' (expected layout, lift or bucketheight)\n";
        return 2;
    }
    validate_config(first);
    validate_config(second);

    const RunResult a = run_scenario(first);
    const RunResult b = run_scenario(second);

    const std::filesystem::path dir =
        std::filesystem::path(base.sim.out_dir) / (base.sim.name + "-" + name);
    std::filesystem::create_directories(dir);
    detail::write_experiment_overlays(name, a, b, first_name, second_name, dir);

    std::ostringstream table;
    table << "experiment=" << name << '\n';
    detail::append_kpi_row(table, first_name, a);
    detail::append_kpi_row(table, second_name, b);

    bool pass = a.kpis.has_value() && b.kpis.has_value();
    if (pass && name == "lift") {
        pass = b.kpis->reversing_distance_to_receiver > a.kpis->reversing_distance_to_receiver;
        table << "check: reversing point farther from the receiver with halved lift speed: "
              << (pass ? "pass" : "fail") << '\n';
    } else if (pass && name == "bucketheight") {
        pass = b.kpis->reversing_pose.z < a.kpis->reversing_pose.z;
        table << "check: reversing point nearer the receiver with the higher bucket: "
              << (pass ? "pass" : "fail") << '\n';
    } else if (name == "layout") {
        table << "check: both layouts completed: " << (pass ? "pass" : "fail") << '\n';
    }
    if (!a.kpis || !b.kpis) {
        table << "check: at least one run did not complete\n";
    }

    write_text_file(dir / "comparison.txt", table.str());
    log << table.str();
    log << (pass ? "experiment passed\n" : "experiment failed\n");
    return pass ? 0 : 1;
}

/// Re-emits the diagnostic SVGs (and KPIs, when the trace is complete) from
/// an existing trace.csv.
inline int cmd_plot(const std::filesystem::path& csv_path, const std::filesystem::path& out_dir,
                    std::ostream& log = std::cout) {
    std::ifstream is(csv_path, std::ios::binary);
    if (!is) {
        log << "cannot open " << csv_path.string() << "\n";
        return 2;
    }
    const Trace trace = parse_trace_csv(is);
    if (trace.records.empty()) {
        log << "trace is empty\n";
        return 2;
    }
    std::filesystem::create_directories(out_dir);
    write_standard_plots(trace, out_dir, csv_path.stem().string());
    if (trace.outcome == RunOutcome::Done) {
        write_text_file(out_dir / "kpis.txt", kpis_text(cycle_kpis(trace), trace.meta));
    }
    log << "plots written to " << out_dir.string() << "\n";
    return 0;
}

}  // namespace slc
