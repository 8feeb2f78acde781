#include "mcf/report.hpp"

#include <cstdio>
#include <fstream>

namespace mcf {

using Json = nlohmann::ordered_json;

Verdict DiagnosticsReport::overall() const {
    for (const auto& m : monitors)
        if (m.verdict == Verdict::fail) return Verdict::fail;
    return Verdict::pass;
}

const MonitorReport* DiagnosticsReport::find(std::string_view name) const {
    for (const auto& m : monitors)
        if (m.name == name) return &m;
    return nullptr;
}

namespace {

template <class T>
T param_or(const Json& p, const char* key, T fallback) {
    return p.contains(key) ? p[key].get<T>() : fallback;
}

std::optional<MForm> omega_for(const FlowConfig& cfg, const Json& p, int n) {
    const auto idx = param_or<std::vector<int>>(p, "omega", cfg.omega);
    if (idx.empty()) return std::nullopt;
    try {
        return MForm::from_indices(n, idx);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("omega: ") + e.what());
    }
}

MonitorReport run_monitor(const FlowConfig& cfg, const MonitorConfig& mc, const Trajectory& traj, Exec exec) {
    const Json& p = mc.params;
    const int n = traj.snapshots.empty() ? 0 : traj.snapshots.front().grid.n;
    try {
        if (mc.id == "evolution") {
            EvolutionMonitorParams e;
            e.omega = omega_for(cfg, p, n);
            e.tolerance = param_or(p, "tolerance", e.tolerance);
            e.flat_threshold = param_or(p, "flatThreshold", e.flat_threshold);
            return evolution_monitor(traj, e, exec);
        }
        if (mc.id == "flatness") {
            FlatnessParams f;
            f.factor = param_or(p, "factor", f.factor);
            if (p.contains("eps0")) f.eps0 = p["eps0"].get<double>();
            f.flat_threshold = param_or(p, "flatThreshold", f.flat_threshold);
            return flatness_monitor(traj, f);
        }
        if (mc.id == "growth") {
            GrowthParams g;
            g.ell = param_or(p, "ell", cfg.ell);
            g.basis = param_or(p, "basis", cfg.basis);
            g.p = param_or(p, "p", cfg.p);
            g.c0 = param_or(p, "c0", cfg.c0);
            g.tolerance = param_or(p, "tolerance", g.tolerance);
            return growth_monitor(traj, g);
        }
        if (mc.id == "sup") {
            SupParams s;
            s.field = sup_field_from_string(p["field"].get<std::string>());
            s.tolerance = param_or(p, "tolerance", s.tolerance);
            s.ell = param_or(p, "ell", cfg.ell);
            s.basis = param_or(p, "basis", cfg.basis);
            s.p = param_or(p, "p", cfg.p);
            s.omega = omega_for(cfg, p, n);
            if (p.contains("rate")) s.rate = p["rate"].get<double>();
            return sup_monitor(traj, s);
        }
        if (mc.id == "kato") {
            KatoParams k;
            k.tolerance = param_or(p, "tolerance", k.tolerance);
            k.dimension = param_or(p, "dimension", k.dimension);
            k.flat_threshold = param_or(p, "flatThreshold", k.flat_threshold);
            return kato_monitor(traj, k);
        }
        if (mc.id == "density") {
            DensityParams d;
            if (p.contains("t0")) d.t0 = p["t0"].get<double>();
            else if (cfg.t0) d.t0 = *cfg.t0;
            else throw ConfigError("density monitor needs t0");
            d.center = param_or<std::vector<double>>(p, "center", {});
            d.exponent = param_or<std::string>(p, "exponent", "intrinsic") == "ambient" ? DensityExponent::ambient
                                                                                         : DensityExponent::intrinsic;
            d.weight = density_weight_from_string(param_or<std::string>(p, "weight", "one"));
            d.tolerance = param_or(p, "tolerance", d.tolerance);
            return density_monitor(traj, d);
        }
        if (mc.id == "area") return area_monitor(traj);
        if (mc.id == "expander") return expander_monitor(traj, param_or(p, "tolerance", 1e-3));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("monitor '" + FlowConfig::monitor_name(mc) + "': " + e.what());
    }
    throw ConfigError("unknown monitor '" + mc.id + "'");
}

}  // namespace

RunResult run_flow(const FlowConfig& cfg, Exec exec) {
    ImmersionGrid initial;
    double initial_rperp = 0.0;
    try {
        initial = make_scenario(cfg.scenario);
        if (cfg.perturb_amplitude > 0.0) {
            Perturbed pb = perturb(initial, cfg.perturb_amplitude, cfg.perturb_seed);
            initial = std::move(pb.grid);
            initial_rperp = pb.initial_rperp2_sup;
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    RunResult out;
    out.trajectory = integrate(initial, cfg.flow_options(exec));
    const Trajectory& tr = out.trajectory;
    if (cfg.perturb_amplitude == 0.0 && !tr.snapshots.empty()) initial_rperp = sup_norm(tr.snapshots.front().geometry->Rperp2);

    DiagnosticsReport& r = out.report;
    r.metadata["configHash"] = hex64(config_hash(cfg));
    r.metadata["scenario"] = cfg.scenario.id;
    r.metadata["grid"] = {{"m", initial.domain.m}, {"n", initial.n}, {"sizes", initial.domain.sizes}};
    r.metadata["integrator"] = cfg.integrator == Integrator::rk4 ? "rk4" : "explicitEuler";
    r.metadata["order"] = cfg.order;
    r.metadata["cflFactor"] = cfg.cfl;
    r.metadata["normalized"] = cfg.normalized;
    r.steps = tr.steps;
    r.status = tr.status;
    r.stop_reason = tr.stop_reason;
    r.last_valid_time = tr.last_valid_time;
    r.initial_rperp2_sup = initial_rperp;
    for (const auto& mc : cfg.monitors) r.monitors.push_back(run_monitor(cfg, mc, tr, exec));
    return out;
}

Json to_json(const MonitorReport& m) {
    Json j;
    j["name"] = m.name;
    j["params"] = m.params;
    j["tolerance"] = m.tolerance;
    j["verdict"] = to_string(m.verdict);
    if (!m.note.empty()) j["note"] = m.note;
    Json s = Json::object();
    for (const auto& ser : m.series) s[ser.name] = {{"t", ser.t}, {"value", ser.value}};
    j["series"] = s;
    return j;
}

Json to_json(const DiagnosticsReport& r) {
    Json j;
    j["metadata"] = r.metadata;
    j["status"] = r.status == FlowStatus::completed ? "completed" : "singularity-stop";
    if (!r.stop_reason.empty()) j["stopReason"] = r.stop_reason;
    j["lastValidTime"] = r.last_valid_time;
    j["initialRperp2Sup"] = r.initial_rperp2_sup;
    j["overall"] = to_string(r.overall());
    Json steps = Json::object();
    std::vector<double> t, dt, a2, h;
    for (const auto& s : r.steps) {
        t.push_back(s.t);
        dt.push_back(s.dt);
        a2.push_back(s.sup_A2);
        h.push_back(s.sup_H);
    }
    j["steps"] = {{"t", t}, {"dt", dt}, {"supA2", a2}, {"supH", h}};
    j["monitors"] = Json::array();
    for (const auto& m : r.monitors) j["monitors"].push_back(to_json(m));
    return j;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << text;
}

std::string file_safe(std::string s) {
    for (char& c : s)
        if (c == ':' || c == '/' || c == ' ') c = '_';
    return s;
}

}  // namespace

std::string series_csv(const Series& s) {
    std::string out = "t,value\n";
    for (std::size_t i = 0; i < s.t.size(); ++i) out += fmt(s.t[i]) + "," + fmt(s.value[i]) + "\n";
    return out;
}

std::string steps_csv(const std::vector<StepRecord>& steps) {
    std::string out = "t,dt,sup_A2,sup_H\n";
    for (const auto& s : steps) out += fmt(s.t) + "," + fmt(s.dt) + "," + fmt(s.sup_A2) + "," + fmt(s.sup_H) + "\n";
    return out;
}

std::string snapshot_text(const Snapshot& s) {
    const auto& im = s.grid;
    const auto& d = im.domain;
    std::string out = "# t " + fmt(im.time) + "\n# m " + std::to_string(d.m) + " n " + std::to_string(im.n) + "\n# sizes";
    for (int v : d.sizes) out += " " + std::to_string(v);
    out += "\n";
    const std::size_t nodes = d.node_count();
    for (std::size_t node = 0; node < nodes; ++node) {
        const auto idx = d.index_of(node);
        std::string row;
        for (int a = 0; a < d.m; ++a) row += (a ? " " : "") + fmt(d.coordinate(a, idx[a]));
        const double* F = im.point(node);
        for (int al = 0; al < im.n; ++al) row += " " + fmt(F[al]);
        out += row + "\n";
    }
    return out;
}

int exit_status(const FlowConfig& cfg, const DiagnosticsReport& r) {
    if (cfg.require_completion && r.status == FlowStatus::singularity_stop) return 3;
    return r.overall() == Verdict::fail ? 2 : 0;
}

RunManifest write_run(const FlowConfig& cfg, const RunResult& run, const std::filesystem::path& dir,
                      const std::string& config_label) {
    RunManifest m;
    m.config = config_label;
    m.output_dir = dir;
    auto emit = [&](const std::string& rel, const std::string& text) {
        write_file(dir / rel, text);
        m.artifacts.push_back(rel);
    };
    emit("effective_config.json", to_json(cfg).dump(2) + "\n");
    emit("report.json", to_json(run.report).dump(2) + "\n");
    emit("steps.csv", steps_csv(run.report.steps));
    for (const auto& mon : run.report.monitors)
        for (const auto& s : mon.series) emit("series/" + file_safe(mon.name) + "__" + file_safe(s.name) + ".csv", series_csv(s));
    if (cfg.write_snapshots) {
        const auto& snaps = run.trajectory.snapshots;
        for (std::size_t i = 0; i < snaps.size(); ++i) {
            char name[48];
            std::snprintf(name, sizeof name, "snapshots/snapshot_%04zu.txt", i);
            emit(name, snapshot_text(snaps[i]));
        }
    }
    m.exit_status = exit_status(cfg, run.report);
    m.artifacts.push_back("manifest.json");
    Json j;
    j["config"] = m.config;
    j["configHash"] = hex64(config_hash(cfg));
    j["artifacts"] = m.artifacts;
    j["exitStatus"] = m.exit_status;
    write_file(dir / "manifest.json", j.dump(2) + "\n");
    return m;
}

}  // namespace mcf
