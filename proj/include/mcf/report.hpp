#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcf/config.hpp"
#include "mcf/flow.hpp"
#include "mcf/monitors.hpp"

namespace mcf {

struct DiagnosticsReport {
    nlohmann::ordered_json metadata;
    std::vector<StepRecord> steps;
    FlowStatus status = FlowStatus::completed;
    std::string stop_reason;
    double last_valid_time = 0.0;
    double initial_rperp2_sup = 0.0;
    std::vector<MonitorReport> monitors;

    /// fail if any monitor failed, pass otherwise
    Verdict overall() const;
    const MonitorReport* find(std::string_view name) const;
};

struct RunResult {
    Trajectory trajectory;
    DiagnosticsReport report;
};

/// Builds the scenario, integrates and attaches every configured monitor.
/// Throws ConfigError for monitor inputs that do not fit the scenario.
RunResult run_flow(const FlowConfig& cfg, Exec exec = Exec::parallel);

nlohmann::ordered_json to_json(const MonitorReport& m);
nlohmann::ordered_json to_json(const DiagnosticsReport& r);

/// "t,value" rows at full precision.
std::string series_csv(const Series& s);
std::string steps_csv(const std::vector<StepRecord>& steps);

/// Header comment lines followed by one row per node: parameter
/// coordinates then ambient coordinates.
std::string snapshot_text(const Snapshot& s);

struct RunManifest {
    std::string config;
    std::filesystem::path output_dir;
    std::vector<std::string> artifacts;  // relative to output_dir
    int exit_status = 0;
};

/// Writes effective_config.json, report.json, steps.csv, series/*.csv,
/// snapshots/*.txt (when enabled) and manifest.json.
RunManifest write_run(const FlowConfig& cfg, const RunResult& run, const std::filesystem::path& dir,
                      const std::string& config_label);

/// 0 all pass, 2 any monitor fail, 3 singularity stop with completion
/// required.
int exit_status(const FlowConfig& cfg, const DiagnosticsReport& r);

}  // namespace mcf
