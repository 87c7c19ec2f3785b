// Command-line front end: run a configured short-loading-cycle scenario,
// reproduce one of the adaptation experiments, or re-plot a recorded trace.
//
// Exit codes: 0 ok, 1 assertion/timeout/operator failure, 2 usage or I/O.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "slc/config.hpp"
#include "slc/scenario.hpp"

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct Overrides {
    std::optional<double> dt;
    std::optional<double> t_max;
    std::optional<std::string> out_dir;

    void apply(slc::ScenarioConfig& cfg) const {
        if (dt) cfg.sim.dt = *dt;
        if (t_max) cfg.sim.t_max = *t_max;
        if (out_dir) cfg.sim.out_dir = *out_dir;
        slc::validate_config(cfg);
    }
};

slc::ScenarioConfig load_config(const std::string& path, const Overrides& overrides) {
    slc::ScenarioConfig cfg = slc::parse_config(read_file(path));
    overrides.apply(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Short loading cycle simulator"};
    app.require_subcommand(1);

    Overrides overrides;
    std::string config_path;
    std::string experiment_name;
    std::string trace_path;
    std::string plot_out = "out/plots";

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--dt", overrides.dt, "time step override [s]");
        cmd->add_option("--t-max", overrides.t_max, "simulated time limit override [s]");
        cmd->add_option("--out", overrides.out_dir, "output directory override");
    };

    CLI::App* run = app.add_subcommand("run", "run one scenario");
    run->add_option("config", config_path, "scenario config file")->required();
    add_common(run);

    CLI::App* experiment = app.add_subcommand("experiment", "run an adaptation experiment pair");
    experiment->add_option("name", experiment_name, "layout | lift | bucketheight")->required();
    experiment->add_option("config", config_path, "base scenario config file")->required();
    add_common(experiment);

    CLI::App* plot = app.add_subcommand("plot", "re-emit plots from a trace.csv");
    plot->add_option("trace", trace_path, "trace.csv produced by 'run'")->required();
    plot->add_option("--out", plot_out, "output directory for the plots");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            return slc::cmd_run(load_config(config_path, overrides));
        }
        if (experiment->parsed()) {
            return slc::cmd_experiment(experiment_name, load_config(config_path, overrides));
        }
        if (plot->parsed()) {
            return slc::cmd_plot(trace_path, plot_out);
        }
    } catch (const slc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
