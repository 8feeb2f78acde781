#include "mcf/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mcf/monitors.hpp"

namespace mcf {

using Json = nlohmann::ordered_json;

ConfigError::ConfigError(const std::string& what, int line, int column)
    : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"
                                  : what),
      line_(line),
      column_(column) {}

namespace {

const std::map<std::string, std::set<std::string>>& monitor_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"evolution", {"tolerance", "flatThreshold", "omega"}},
        {"flatness", {"factor", "eps0", "flatThreshold"}},
        {"growth", {"tolerance", "ell", "basis", "p", "c0"}},
        {"sup", {"field", "tolerance", "ell", "basis", "p", "omega", "rate"}},
        {"kato", {"tolerance", "dimension", "flatThreshold"}},
        {"density", {"t0", "center", "exponent", "weight", "tolerance"}},
        {"area", {}},
        {"expander", {"tolerance"}},
    };
    return keys;
}

const std::set<std::string>& top_keys() {
    static const std::set<std::string> keys = {
        "scenario", "perturbation", "integrator", "cflFactor", "tEnd", "snapshotEvery", "normalized", "order",
        "degeneracyThreshold", "requireCompletion", "writeSnapshots", "ell", "basis", "omega", "p", "c0", "t0",
        "monitors"};
    return keys;
}

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get_as(const Json& j, const std::string& path) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(path + ": wrong type (" + std::string(j.type_name()) + ")");
    }
}

double get_number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    return j.get<double>();
}

int get_int(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
    return j.get<int>();
}

void check_monitor(const MonitorConfig& mc, const std::string& where) {
    const Json& p = mc.params;
    auto num = [&](const char* key) -> std::optional<double> {
        if (!p.contains(key)) return std::nullopt;
        return get_number(p[key], where + "." + key);
    };
    if (auto t = num("tolerance"); t && *t < 0.0) throw ConfigError(where + ".tolerance: must be non-negative");
    if (auto v = num("p"); v && *v < 0.0) throw ConfigError(where + ".p: must be non-negative");
    if (auto v = num("c0"); v && *v <= 0.0) throw ConfigError(where + ".c0: must be positive");
    if (auto v = num("factor"); v && *v <= 0.0) throw ConfigError(where + ".factor: must be positive");
    num("flatThreshold");
    num("eps0");
    num("rate");
    num("t0");
    if (p.contains("ell")) get_int(p["ell"], where + ".ell");
    if (p.contains("dimension") && get_int(p["dimension"], where + ".dimension") < 0)
        throw ConfigError(where + ".dimension: must be non-negative");
    if (p.contains("basis")) get_as<std::vector<std::vector<double>>>(p["basis"], where + ".basis");
    if (p.contains("omega")) get_as<std::vector<int>>(p["omega"], where + ".omega");
    if (p.contains("center")) get_as<std::vector<double>>(p["center"], where + ".center");
    if (mc.id == "sup") {
        if (!p.contains("field")) throw ConfigError(where + ": sup monitor needs 'field'");
        try {
            sup_field_from_string(get_as<std::string>(p["field"], where + ".field"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + ".field: " + e.what());
        }
    }
    if (mc.id == "density") {
        if (p.contains("exponent")) {
            const auto e = get_as<std::string>(p["exponent"], where + ".exponent");
            if (e != "intrinsic" && e != "ambient") throw ConfigError(where + ".exponent: expected intrinsic or ambient");
        }
        if (p.contains("weight")) {
            try {
                density_weight_from_string(get_as<std::string>(p["weight"], where + ".weight"));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(where + ".weight: " + e.what());
            }
        }
    }
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

const ScenarioInfo& scenario_info(const std::string& id) {
    for (const auto& s : scenario_catalog())
        if (s.id == id) return s;
    throw ConfigError("unknown scenario '" + id + "'");
}

}  // namespace

std::string FlowConfig::monitor_name(const MonitorConfig& mc) {
    if (mc.id == "sup") return "sup:" + mc.params.at("field").get<std::string>();
    return mc.id;
}

FlowOptions FlowConfig::flow_options(Exec exec) const {
    FlowOptions o;
    o.integrator = integrator;
    o.cfl = cfl;
    o.t_end = t_end;
    o.snapshot_every = snapshot_every;
    o.normalized = normalized;
    o.order = order;
    o.exec = exec;
    o.degeneracy_threshold = degeneracy_threshold;
    o.record_triples = std::any_of(monitors.begin(), monitors.end(),
                                   [](const MonitorConfig& m) { return m.id == "evolution" || m.id == "density"; });
    return o;
}

FlowConfig parse_config(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        std::string msg = e.what();
        if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
        throw ConfigError("parse error: " + msg, line, col);
    }
    if (!j.is_object()) throw ConfigError("config must be an object");
    reject_unknown(j, top_keys(), "config");

    FlowConfig c;
    if (!j.contains("scenario")) throw ConfigError("missing 'scenario'");
    const Json& s = j["scenario"];
    if (!s.is_object()) throw ConfigError("scenario: expected an object");
    reject_unknown(s, {"id", "params", "sizes"}, "scenario");
    if (!s.contains("id")) throw ConfigError("scenario: missing 'id'");
    c.scenario.id = get_as<std::string>(s["id"], "scenario.id");
    const ScenarioInfo& info = scenario_info(c.scenario.id);
    c.scenario.params = info.defaults;
    if (s.contains("params")) {
        if (!s["params"].is_object()) throw ConfigError("scenario.params: expected an object");
        for (auto it = s["params"].begin(); it != s["params"].end(); ++it) {
            if (!info.defaults.count(it.key()))
                throw ConfigError("unknown key '" + it.key() + "' in scenario.params for " + c.scenario.id);
            c.scenario.params[it.key()] = get_number(it.value(), "scenario.params." + it.key());
        }
    }
    c.scenario.sizes = s.contains("sizes") ? get_as<std::vector<int>>(s["sizes"], "scenario.sizes") : info.default_sizes;

    if (j.contains("perturbation")) {
        const Json& p = j["perturbation"];
        if (!p.is_object()) throw ConfigError("perturbation: expected an object");
        reject_unknown(p, {"amplitude", "seed"}, "perturbation");
        if (p.contains("amplitude")) c.perturb_amplitude = get_number(p["amplitude"], "perturbation.amplitude");
        if (p.contains("seed")) c.perturb_seed = get_as<std::uint64_t>(p["seed"], "perturbation.seed");
    }
    if (j.contains("integrator")) {
        const auto name = get_as<std::string>(j["integrator"], "integrator");
        if (name == "rk4") c.integrator = Integrator::rk4;
        else if (name == "explicitEuler") c.integrator = Integrator::explicit_euler;
        else throw ConfigError("integrator: expected rk4 or explicitEuler, got '" + name + "'");
    }
    if (j.contains("cflFactor")) c.cfl = get_number(j["cflFactor"], "cflFactor");
    if (j.contains("tEnd")) c.t_end = get_number(j["tEnd"], "tEnd");
    if (j.contains("snapshotEvery")) c.snapshot_every = get_int(j["snapshotEvery"], "snapshotEvery");
    if (j.contains("normalized")) c.normalized = get_as<bool>(j["normalized"], "normalized");
    if (j.contains("order")) c.order = get_int(j["order"], "order");
    if (j.contains("degeneracyThreshold")) c.degeneracy_threshold = get_number(j["degeneracyThreshold"], "degeneracyThreshold");
    if (j.contains("requireCompletion")) c.require_completion = get_as<bool>(j["requireCompletion"], "requireCompletion");
    if (j.contains("writeSnapshots")) c.write_snapshots = get_as<bool>(j["writeSnapshots"], "writeSnapshots");
    if (j.contains("ell")) c.ell = get_int(j["ell"], "ell");
    if (j.contains("basis")) c.basis = get_as<std::vector<std::vector<double>>>(j["basis"], "basis");
    if (j.contains("omega")) c.omega = get_as<std::vector<int>>(j["omega"], "omega");
    if (j.contains("p")) c.p = get_number(j["p"], "p");
    if (j.contains("c0")) c.c0 = get_number(j["c0"], "c0");
    if (j.contains("t0") && !j["t0"].is_null()) c.t0 = get_number(j["t0"], "t0");

    if (!(c.cfl > 0.0 && c.cfl <= 0.5)) throw ConfigError("cflFactor must lie in (0, 0.5]");
    if (!(c.t_end > 0.0)) throw ConfigError("tEnd must be positive");
    if (c.snapshot_every < 1) throw ConfigError("snapshotEvery must be at least 1");
    if (c.order != 2 && c.order != 4) throw ConfigError("order must be 2 or 4");
    if (c.p < 0.0) throw ConfigError("p must be non-negative");
    if (!(c.c0 > 0.0)) throw ConfigError("c0 must be positive");
    if (c.perturb_amplitude < 0.0) throw ConfigError("perturbation.amplitude must be non-negative");

    if (j.contains("monitors")) {
        const Json& ms = j["monitors"];
        if (!ms.is_array()) throw ConfigError("monitors: expected an array");
        std::set<std::string> names;
        for (std::size_t i = 0; i < ms.size(); ++i) {
            const std::string where = "monitors[" + std::to_string(i) + "]";
            const Json& m = ms[i];
            if (!m.is_object() || !m.contains("id")) throw ConfigError(where + ": expected an object with 'id'");
            MonitorConfig mc;
            mc.id = get_as<std::string>(m["id"], where + ".id");
            auto known = monitor_keys().find(mc.id);
            if (known == monitor_keys().end()) throw ConfigError(where + ": unknown monitor '" + mc.id + "'");
            mc.params = Json::object();
            for (auto it = m.begin(); it != m.end(); ++it) {
                if (it.key() == "id") continue;
                if (!known->second.count(it.key()))
                    throw ConfigError("unknown key '" + it.key() + "' in " + where + " (" + mc.id + ")");
                mc.params[it.key()] = it.value();
            }
            check_monitor(mc, where);
            if (!names.insert(FlowConfig::monitor_name(mc)).second)
                throw ConfigError(where + ": monitor '" + FlowConfig::monitor_name(mc) + "' configured twice");
            c.monitors.push_back(std::move(mc));
        }
    }
    return c;
}

FlowConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Json to_json(const FlowConfig& c) {
    Json j;
    Json s;
    s["id"] = c.scenario.id;
    s["params"] = Json::object();
    for (const auto& [k, v] : c.scenario.params) s["params"][k] = v;
    s["sizes"] = c.scenario.sizes;
    j["scenario"] = s;
    j["perturbation"] = {{"amplitude", c.perturb_amplitude}, {"seed", c.perturb_seed}};
    j["integrator"] = c.integrator == Integrator::rk4 ? "rk4" : "explicitEuler";
    j["cflFactor"] = c.cfl;
    j["tEnd"] = c.t_end;
    j["snapshotEvery"] = c.snapshot_every;
    j["normalized"] = c.normalized;
    j["order"] = c.order;
    j["degeneracyThreshold"] = c.degeneracy_threshold;
    j["requireCompletion"] = c.require_completion;
    j["writeSnapshots"] = c.write_snapshots;
    j["ell"] = c.ell;
    j["basis"] = c.basis;
    j["omega"] = c.omega;
    j["p"] = c.p;
    j["c0"] = c.c0;
    j["t0"] = c.t0 ? Json(*c.t0) : Json(nullptr);
    j["monitors"] = Json::array();
    for (const auto& m : c.monitors) {
        Json e;
        e["id"] = m.id;
        for (auto it = m.params.begin(); it != m.params.end(); ++it) e[it.key()] = it.value();
        j["monitors"].push_back(e);
    }
    return j;
}

std::uint64_t config_hash(const FlowConfig& cfg) {
    const std::string text = to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
    return s;
}

}  // namespace mcf
