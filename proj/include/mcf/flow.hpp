#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "mcf/geometry.hpp"
#include "mcf/grid.hpp"

namespace mcf {

enum class Integrator { explicit_euler, rk4 };

struct FlowOptions {
    Integrator integrator = Integrator::rk4;
    double cfl = 0.1;
    double t_end = 0.1;
    int snapshot_every = 10;
    bool normalized = false;  // evolve dF/ds = H - F instead of dF/dt = H
    int order = 2;
    Exec exec = Exec::parallel;
    // Record (t, t + dt, t + 2 dt) with a frozen step at every snapshot
    // event, for central time differences.
    bool record_triples = false;
    // Build the full derivative data for every snapshot.
    bool full_geometry = true;
    double degeneracy_threshold = 1e-10;
    double min_dt = 1e-12;

    void validate() const;
};

struct Snapshot {
    ImmersionGrid grid;
    std::shared_ptr<const GeometryState> geometry;
};

struct StepRecord {
    double t = 0.0;   // time after the step
    double dt = 0.0;
    double sup_A2 = 0.0;
    double sup_H = 0.0;
};

enum class FlowStatus { completed, singularity_stop };

struct Trajectory {
    std::vector<Snapshot> snapshots;           // strictly increasing times
    std::vector<std::array<std::size_t, 3>> triples;  // indices into snapshots
    std::vector<StepRecord> steps;
    FlowStatus status = FlowStatus::completed;
    std::string stop_reason;
    double last_valid_time = 0.0;
    bool normalized = false;
};

struct VelocityField {
    std::vector<double> V;             // (node, alpha)
    std::vector<std::vector<double>> shift_rate;  // per axis
    double sup_A2 = 0.0;
    double sup_H = 0.0;
    double min_metric_eigenvalue = 0.0;
};

/// Normal projection of g^{ij} F_ij, minus F for the normalised flow.
/// Throws ImmersionDegeneracy.
VelocityField velocity(const ImmersionGrid& im, const FlowOptions& opt);

/// Stable step bound cfl * h^2 * lambda_min(g).
double stable_dt(const ImmersionGrid& im, const FlowOptions& opt);

/// One explicit step; the time stamp advances by dt. Throws
/// ImmersionDegeneracy or std::runtime_error on non-finite data.
ImmersionGrid step(const ImmersionGrid& im, double dt, const FlowOptions& opt);

/// Runs to opt.t_end or to a singularity stop.
Trajectory integrate(const ImmersionGrid& initial, const FlowOptions& opt);

/// Maps an unnormalised trajectory to the normalised one:
/// F~ = F / sqrt(2t + 1), s = log(2t + 1) / 2.
Trajectory rescale_trajectory(const Trajectory& traj, int order, Exec exec = Exec::parallel);

/// sup over nodes of |F^perp - H|.
double expander_residual(const GeometryState& gs);

}  // namespace mcf
