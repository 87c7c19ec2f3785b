#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "slc/scenario.hpp"

using namespace slc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("slc_scenario_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("cmd_run writes the artifact set and reports success", "[scenario]") {
    TempDir tmp;
    ScenarioConfig cfg = parse_config("");
    cfg.sim.out_dir = (tmp.path / "out").string();
    cfg.sim.t_max = 120.0;

    std::ostringstream log;
    REQUIRE(cmd_run(cfg, log) == 0);

    const fs::path dir = tmp.path / "out" / "nominal";
    REQUIRE(fs::exists(dir / "trace.csv"));
    REQUIRE(fs::exists(dir / "harmony.svg"));
    REQUIRE(fs::exists(dir / "bucket.svg"));
    REQUIRE(fs::exists(dir / "location.svg"));
    REQUIRE(fs::exists(dir / "kpis.txt"));

    SECTION("re-running produces byte-identical outputs") {
        const std::string first = slurp(dir / "trace.csv");
        REQUIRE(cmd_run(cfg, log) == 0);
        REQUIRE(slurp(dir / "trace.csv") == first);
    }
}

TEST_CASE("cmd_run reports a timeout as failure", "[scenario]") {
    TempDir tmp;
    ScenarioConfig cfg = parse_config("");
    cfg.sim.out_dir = (tmp.path / "out").string();
    cfg.sim.t_max = 0.5;

    std::ostringstream log;
    REQUIRE(cmd_run(cfg, log) == 1);
    REQUIRE(fs::exists(tmp.path / "out" / "nominal" / "trace.csv"));
    REQUIRE_FALSE(fs::exists(tmp.path / "out" / "nominal" / "kpis.txt"));
}

TEST_CASE("cmd_experiment rejects unknown names", "[scenario]") {
    std::ostringstream log;
    REQUIRE(cmd_experiment("speed", parse_config(""), log) == 2);
}

TEST_CASE("layout experiment completes for both receiver distances", "[scenario]") {
    TempDir tmp;
    ScenarioConfig cfg = parse_config("");
    cfg.sim.out_dir = (tmp.path / "out").string();
    cfg.sim.t_max = 200.0;

    std::ostringstream log;
    REQUIRE(cmd_experiment("layout", cfg, log) == 0);
    const fs::path dir = tmp.path / "out" / "nominal-layout";
    REQUIRE(fs::exists(dir / "location_overlay.svg"));
    REQUIRE(fs::exists(dir / "harmony_overlay.svg"));
    REQUIRE(fs::exists(dir / "comparison.txt"));
}

TEST_CASE("cmd_plot reproduces plots from a recorded trace", "[scenario]") {
    TempDir tmp;
    ScenarioConfig cfg = parse_config("");
    cfg.sim.out_dir = (tmp.path / "out").string();
    cfg.sim.t_max = 120.0;

    std::ostringstream log;
    REQUIRE(cmd_run(cfg, log) == 0);
    const fs::path csv = tmp.path / "out" / "nominal" / "trace.csv";
    const fs::path plot_dir = tmp.path / "plots";
    REQUIRE(cmd_plot(csv, plot_dir, log) == 0);
    REQUIRE(fs::exists(plot_dir / "harmony.svg"));
    REQUIRE(fs::exists(plot_dir / "bucket.svg"));
    REQUIRE(fs::exists(plot_dir / "location.svg"));
    REQUIRE(fs::exists(plot_dir / "kpis.txt"));
}
