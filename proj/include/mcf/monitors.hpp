#pragma once

// Read-only diagnostics over a finished (or stopped) trajectory.
//
// Every monitor returns a MonitorReport: a parameter record, one or more
// named time series and a verdict. Verdicts are pure functions of the
// series and the tolerance, so two identical trajectories give identical
// reports.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mcf/coordinates.hpp"
#include "mcf/evolution.hpp"
#include "mcf/flow.hpp"

namespace mcf {

enum class Verdict { pass, fail, not_applicable };
std::string_view to_string(Verdict v);

struct Series {
    std::string name;
    std::vector<double> t;
    std::vector<double> value;

    void push(double time, double v) {
        t.push_back(time);
        value.push_back(v);
    }
    double max() const;
    double min() const;
};

struct MonitorReport {
    std::string name;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::vector<Series> series;
    double tolerance = 0.0;
    Verdict verdict = Verdict::not_applicable;
    std::string note;

    const Series* find(std::string_view series_name) const;
};

struct EvolutionMonitorParams {
    std::optional<MForm> omega;
    double tolerance = 1e-2;
    double flat_threshold = 1e-3;
};
/// Requires triples in the trajectory; without them the verdict is
/// not-applicable. The |Rperp|^2 verdict uses the stated right-hand side;
/// the corrected one is recorded as an extra series.
MonitorReport evolution_monitor(const Trajectory& traj, const EvolutionMonitorParams& p = {}, Exec exec = Exec::parallel);

struct FlatnessParams {
    double factor = 10.0;
    std::optional<double> eps0;   // measured from the first snapshot when absent
    double eps0_floor = 1e-20;
    double flat_threshold = 1e-3;
};
MonitorReport flatness_monitor(const Trajectory& traj, const FlatnessParams& p = {});

struct GrowthParams {
    int ell = 1;
    std::vector<std::vector<double>> basis;
    double p = 0.0;
    double c0 = 1.0;
    double tolerance = 1e-3;
};
/// Slack u^2 / [c0 (1 + x^2 + (2m + 4(p - 1)) t)^p]. Throws
/// std::invalid_argument for p < 0 or c0 <= 0.
MonitorReport growth_monitor(const Trajectory& traj, const GrowthParams& p);

/// Coefficient of t in the growth bound.
double growth_time_coefficient(int m, double p);

enum class SupField { u2_eta_p, rperp_exp, A2v2, w_min, tA2, t2gradA2 };
std::string_view to_string(SupField f);
SupField sup_field_from_string(std::string_view s);

struct SupParams {
    SupField field = SupField::tA2;
    double tolerance = 1e-3;
    // u2_eta_p
    int ell = 1;
    std::vector<std::vector<double>> basis;
    double p = 0.0;
    // A2v2, w_min
    std::optional<MForm> omega;
    // rperp_exp: e^{-ct} with c = 2 * max sup|A|^2 unless given
    std::optional<double> rate;
    double absolute_floor = 1e-20;
};
MonitorReport sup_monitor(const Trajectory& traj, const SupParams& p);

struct KatoParams {
    int dimension = 0;  // 0: intrinsic m
    double tolerance = 1e-6;
    double flat_threshold = 1e-3;
    double min_norm = 1e-8;  // relative to sup |A|, nodes below are skipped
};

/// min over nodes of |grad^perp A|^2 - ((d + 2) / d) |grad |A||^2 and the
/// same quantity divided by 1 + |grad^perp A|^2.
struct KatoMargin {
    double margin = 0.0;
    double scaled = 0.0;
};
KatoMargin kato_margin(const GeometryState& gs, int dimension, double min_norm = 1e-8);
MonitorReport kato_monitor(const Trajectory& traj, const KatoParams& p = {});

enum class DensityExponent { intrinsic, ambient };  // m/2 or n/2
enum class DensityWeight { one, A2, H2, Rperp2 };
std::string_view to_string(DensityWeight w);
DensityWeight density_weight_from_string(std::string_view s);

struct DensityParams {
    double t0 = 1.0;
    std::vector<double> center;  // empty: origin
    DensityExponent exponent = DensityExponent::intrinsic;
    DensityWeight weight = DensityWeight::one;
    double tolerance = 1e-4;
};

/// Midpoint quadrature of f rho dmu at the snapshot time.
double gaussian_density(const GeometryState& gs, const DensityParams& p);

/// Throws std::invalid_argument when t0 does not exceed every recorded time
/// or the domain is equivariant.
MonitorReport density_monitor(const Trajectory& traj, const DensityParams& p);

MonitorReport area_monitor(const Trajectory& traj);

/// Expander residual along a normalised trajectory; pass iff non-increasing
/// within tolerance from one snapshot to the next.
MonitorReport expander_monitor(const Trajectory& traj, double tolerance = 1e-3);

/// Pass iff every value is at most `factor` times the maximum over the first
/// half of the time interval.
bool bounded_surrogate(const Series& s, double factor = 2.0);

/// Pass iff each value exceeds its predecessor by at most tol * max(1, |prev|).
bool non_increasing(const Series& s, double tol);

}  // namespace mcf
