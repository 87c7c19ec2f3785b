#pragma once

// Diagnostic series and cycle KPIs extracted from a trace, plus the CSV and
// SVG emitters. All projections are pure; file writes are the only effects.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slc/cosim.hpp"
#include "slc/num_format.hpp"
#include "slc/svg.hpp"

namespace slc {

/// Machine harmony diagram: bucket height over integrated |speed| (travelled
/// distance). The abscissa never rewinds through direction changes; pure
/// standstill lifting appears as a vertical segment.
inline std::vector<XY> harmony_series(const Trace& trace) {
    if (trace.records.empty()) {
        throw std::invalid_argument("harmony_series: empty trace");
    }
    std::vector<XY> out;
    out.reserve(trace.records.size());
    for (const auto& r : trace.records) {
        out.push_back({r.s_cum, r.fb.h});
    }
    return out;
}

/// Bucket handling diagram: bucket height over bucket angle.
inline std::vector<XY> bucket_series(const Trace& trace) {
    if (trace.records.empty()) {
        throw std::invalid_argument("bucket_series: empty trace");
    }
    std::vector<XY> out;
    out.reserve(trace.records.size());
    for (const auto& r : trace.records) {
        out.push_back({r.fb.phi, r.fb.h});
    }
    return out;
}

/// Machine location plot, (x, z) per record.
inline std::vector<XY> location_series(const Trace& trace) {
    if (trace.records.empty()) {
        throw std::invalid_argument("location_series: empty trace");
    }
    std::vector<XY> out;
    out.reserve(trace.records.size());
    for (const auto& r : trace.records) {
        out.push_back({r.fb.pose.x, r.fb.pose.z});
    }
    return out;
}

struct CycleKpis {
    double cycle_time = 0.0;
    Pose reversing_pose;
    double reversing_distance_to_receiver = 0.0;  // m, perpendicular distance to the receiver line
    double arrival_height = 0.0;                  // m, bucket height entering phase 6
    bool entered_2a = false;
    bool entered_5a = false;
    std::map<std::string, double> phase_durations;  // s, keyed by phase label
    double max_abs_gamma = 0.0;
};

inline CycleKpis cycle_kpis(const Trace& trace) {
    if (trace.outcome != RunOutcome::Done || trace.records.empty()) {
        throw std::runtime_error("cycle_kpis: trace did not reach the final phase");
    }
    CycleKpis k;
    const double dt = trace.meta.dt;
    k.cycle_time = static_cast<double>(trace.records.size()) * dt;

    bool have_reversing = false;
    bool have_arrival = false;
    Phase prev = trace.records.front().phase;
    for (const auto& r : trace.records) {
        k.phase_durations[phase_label(r.phase)] += dt;
        k.max_abs_gamma = std::fmax(k.max_abs_gamma, std::fabs(r.fb.gamma));
        if (r.phase == Phase::TurnLimited) k.entered_2a = true;
        if (r.phase == Phase::ExtraLift) k.entered_5a = true;
        if (!have_reversing && r.phase == Phase::Reversing) {
            k.reversing_pose = r.fb.pose;
            k.reversing_distance_to_receiver = std::fabs(r.fb.pose.x);
            have_reversing = true;
        }
        if (!have_arrival && r.phase == Phase::Emptying && prev != Phase::Emptying) {
            k.arrival_height = r.fb.h;
            have_arrival = true;
        }
        prev = r.phase;
    }
    return k;
}

// --- CSV ---

inline constexpr const char* kCsvHeader =
    "t,phase,throttle,brake,steering,lift,tilt,direction,x,z,theta,v,gamma,h,phi,engine,s_cum";

inline void emit_csv(const Trace& trace, std::ostream& os) {
    os << kCsvHeader << '\n';
    for (const auto& r : trace.records) {
        os << format_g15(r.t) << ',' << phase_label(r.phase) << ',' << format_g15(r.u.throttle)
           << ',' << format_g15(r.u.brake) << ',' << format_g15(r.u.steering) << ','
           << format_g15(r.u.lift) << ',' << format_g15(r.u.tilt) << ','
           << direction_label(r.u.direction) << ',' << format_g15(r.fb.pose.x) << ','
           << format_g15(r.fb.pose.z) << ',' << format_g15(r.fb.pose.theta) << ','
           << format_g15(r.fb.v) << ',' << format_g15(r.fb.gamma) << ',' << format_g15(r.fb.h)
           << ',' << format_g15(r.fb.phi) << ',' << format_g15(r.fb.engine) << ','
           << format_g15(r.s_cum) << '\n';
    }
}

inline void emit_csv(const Trace& trace, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("emit_csv: cannot open " + path.string());
    }
    emit_csv(trace, os);
    os.flush();
    if (!os) {
        throw std::runtime_error("emit_csv: write failed for " + path.string());
    }
}

inline Phase phase_from_label(const std::string& label) {
    for (int i = 0; i <= static_cast<int>(Phase::Done); ++i) {
        const Phase p = static_cast<Phase>(i);
        if (label == phase_label(p)) {
            return p;
        }
    }
    throw std::invalid_argument("unknown phase label: '" + label + "'");
}

inline Direction direction_from_label(const std::string& label) {
    if (label == "F") return Direction::Forward;
    if (label == "R") return Direction::Reverse;
    if (label == "N") return Direction::Neutral;
    throw std::invalid_argument("unknown direction label: '" + label + "'");
}

inline Trace parse_trace_csv(std::istream& is) {
    Trace trace;
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader) {
        throw std::runtime_error("parse_trace_csv: missing or unexpected header");
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() != 17) {
            throw std::runtime_error("parse_trace_csv: expected 17 columns, got " +
                                     std::to_string(cells.size()));
        }
        TraceRecord r;
        r.t = parse_double(cells[0]);
        r.phase = phase_from_label(cells[1]);
        r.u.throttle = parse_double(cells[2]);
        r.u.brake = parse_double(cells[3]);
        r.u.steering = parse_double(cells[4]);
        r.u.lift = parse_double(cells[5]);
        r.u.tilt = parse_double(cells[6]);
        r.u.direction = direction_from_label(cells[7]);
        r.fb.pose.x = parse_double(cells[8]);
        r.fb.pose.z = parse_double(cells[9]);
        r.fb.pose.theta = parse_double(cells[10]);
        r.fb.v = parse_double(cells[11]);
        r.fb.gamma = parse_double(cells[12]);
        r.fb.h = parse_double(cells[13]);
        r.fb.phi = parse_double(cells[14]);
        r.fb.engine = parse_double(cells[15]);
        r.s_cum = parse_double(cells[16]);
        r.fb.direction = r.u.direction;
        trace.records.push_back(r);
    }
    if (trace.records.size() >= 2) {
        trace.meta.dt = trace.records[1].t - trace.records[0].t;
    }
    if (!trace.records.empty() && trace.records.back().phase == Phase::Done) {
        trace.outcome = RunOutcome::Done;
    }
    return trace;
}

// --- SVG ---

struct PlotLabels {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool equal_aspect = false;
};

inline void emit_svg(const std::vector<XY>& series, const std::filesystem::path& path,
                     const PlotLabels& labels) {
    SvgPlot plot(labels.title, labels.x_label, labels.y_label);
    plot.set_equal_aspect(labels.equal_aspect);
    plot.add_series("", series);
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("emit_svg: cannot open " + path.string());
    }
    plot.write(os);
    os.flush();
    if (!os) {
        throw std::runtime_error("emit_svg: write failed for " + path.string());
    }
}

inline void emit_svg_overlay(const std::vector<std::pair<std::string, std::vector<XY>>>& series,
                             const std::filesystem::path& path, const PlotLabels& labels) {
    SvgPlot plot(labels.title, labels.x_label, labels.y_label);
    plot.set_equal_aspect(labels.equal_aspect);
    for (const auto& [name, points] : series) {
        plot.add_series(name, points);
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("emit_svg_overlay: cannot open " + path.string());
    }
    plot.write(os);
}

// --- KPI text ---

inline std::string kpis_text(const CycleKpis& k, const TraceMeta& meta) {
    std::ostringstream os;
    os << "scenario=" << meta.scenario << '\n';
    os << "config_digest=" << meta.config_digest << '\n';
    os << "dt=" << format_g15(meta.dt) << '\n';
    os << "version=" << meta.version << '\n';
    os << "cycle_time=" << format_g15(k.cycle_time) << '\n';
    os << "reversing_x=" << format_g15(k.reversing_pose.x) << '\n';
    os << "reversing_z=" << format_g15(k.reversing_pose.z) << '\n';
    os << "reversing_theta=" << format_g15(k.reversing_pose.theta) << '\n';
    os << "reversing_distance_to_receiver=" << format_g15(k.reversing_distance_to_receiver)
       << '\n';
    os << "arrival_height=" << format_g15(k.arrival_height) << '\n';
    os << "entered_2a=" << (k.entered_2a ? 1 : 0) << '\n';
    os << "entered_5a=" << (k.entered_5a ? 1 : 0) << '\n';
    os << "max_abs_gamma=" << format_g15(k.max_abs_gamma) << '\n';
    for (const auto& [label, duration] : k.phase_durations) {
        os << "duration_phase_" << label << '=' << format_g15(duration) << '\n';
    }
    return os.str();
}

}  // namespace slc
