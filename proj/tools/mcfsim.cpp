#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mcf/acceptance.hpp"
#include "mcf/config.hpp"
#include "mcf/report.hpp"
#include "mcf/scenarios.hpp"

namespace fs = std::filesystem;

namespace {

fs::path output_dir(const std::string& flag, const fs::path& fallback) {
    if (const char* env = std::getenv("MCF_OUTPUT_DIR"); env && *env) return env;
    if (!flag.empty()) return flag;
    return fallback;
}

int simulate(const std::string& config_path, const std::string& out_flag) {
    mcf::FlowConfig cfg;
    try {
        cfg = mcf::load_config(config_path);
    } catch (const mcf::ConfigError& e) {
        std::cerr << config_path << ": " << e.what() << "\n";
        return 1;
    }
    const fs::path dir = output_dir(out_flag, fs::path("runs") / fs::path(config_path).stem());
    try {
        const mcf::RunResult run = mcf::run_flow(cfg);
        const mcf::RunManifest manifest = mcf::write_run(cfg, run, dir, config_path);
        for (const auto& m : run.report.monitors)
            std::cout << m.name << ": " << mcf::to_string(m.verdict) << (m.note.empty() ? "" : " (" + m.note + ")") << "\n";
        std::cout << "status: " << (run.report.status == mcf::FlowStatus::completed ? "completed" : "singularity-stop")
                  << " at t = " << run.report.last_valid_time << "\n";
        std::cout << "wrote " << manifest.artifacts.size() << " files to " << dir.string() << "\n";
        return manifest.exit_status;
    } catch (const mcf::ConfigError& e) {
        std::cerr << config_path << ": " << e.what() << "\n";
        return 1;
    }
}

int verify(const std::string& subset, const std::string& out_flag) {
    std::vector<int> ids;
    try {
        ids = mcf::acceptance::parse_subset(subset);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    const auto outcome = mcf::acceptance::run_verify(ids, std::cout);
    const fs::path dir = output_dir(out_flag, fs::path("runs") / "verify");
    fs::create_directories(dir);
    std::ofstream(dir / "verify_report.json") << outcome.report.dump(2) << "\n";
    std::cout << (outcome.all_passed ? "all criteria passed" : "some criteria failed") << "; report "
              << (dir / "verify_report.json").string() << "\n";
    return outcome.all_passed ? 0 : 2;
}

void describe() {
    for (const auto& s : mcf::scenario_catalog()) {
        std::cout << s.id << "  " << s.summary << "\n    params:";
        for (const auto& [k, v] : s.defaults) std::cout << " " << k << "=" << v;
        std::cout << "\n    sizes:";
        for (int n : s.default_sizes) std::cout << " " << n;
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean curvature flow of submanifolds on structured grids"};
    app.require_subcommand(1);
    std::string out_flag;
    app.add_option("-o,--output", out_flag, "output directory (MCF_OUTPUT_DIR takes precedence)");

    std::string config_path;
    auto* sim = app.add_subcommand("simulate", "run a configured flow and write report, series and snapshots");
    sim->add_option("config", config_path, "JSON config file")->required();

    std::string subset;
    auto* ver = app.add_subcommand("verify", "run the acceptance suite");
    ver->add_option("--subset", subset, "criterion ids or names, comma separated");

    app.add_subcommand("describe-scenarios", "list scenario ids and their parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (sim->parsed()) return simulate(config_path, out_flag);
    if (ver->parsed()) return verify(subset, out_flag);
    describe();
    return 0;
}
