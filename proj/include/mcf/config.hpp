#pragma once

// Run configuration: a JSON document (comments allowed) mapped onto a
// FlowConfig. Unknown keys are rejected. `to_json` emits the effective
// configuration with every default filled in, and re-parsing that output
// yields the same FlowConfig.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mcf/flow.hpp"
#include "mcf/scenarios.hpp"

namespace mcf {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0, int column = 0);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_, column_;
};

struct MonitorConfig {
    std::string id;                  // evolution, flatness, growth, sup, kato, density, area, expander
    nlohmann::ordered_json params;   // monitor-specific keys, validated at parse time
};

struct FlowConfig {
    ScenarioSpec scenario;
    double perturb_amplitude = 0.0;
    std::uint64_t perturb_seed = 0;

    Integrator integrator = Integrator::rk4;
    double cfl = 0.1;
    double t_end = 0.1;
    int snapshot_every = 10;
    bool normalized = false;
    int order = 2;
    double degeneracy_threshold = 1e-10;
    bool require_completion = false;
    bool write_snapshots = true;

    // shared monitor inputs, overridable per monitor
    int ell = 1;
    std::vector<std::vector<double>> basis;
    std::vector<int> omega;  // coordinate indices of the reference plane
    double p = 0.0;
    double c0 = 1.0;
    std::optional<double> t0;

    std::vector<MonitorConfig> monitors;

    FlowOptions flow_options(Exec exec = Exec::parallel) const;
    /// Name under which a monitor appears in the report.
    static std::string monitor_name(const MonitorConfig& mc);
};

/// Throws ConfigError; syntax errors carry 1-based line and column.
FlowConfig parse_config(std::string_view text);
FlowConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const FlowConfig& cfg);

/// FNV-1a of the compact effective configuration.
std::uint64_t config_hash(const FlowConfig& cfg);
std::string hex64(std::uint64_t v);

}  // namespace mcf
