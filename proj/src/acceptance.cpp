#include "mcf/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mcf/evolution.hpp"
#include "mcf/monitors.hpp"
#include "mcf/scenarios.hpp"
#include "mcf/structure_checks.hpp"
#include "mcf/tensor_algebra.hpp"

namespace mcf::acceptance {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kRatioLow = 3.2;   // 4 - 20%
constexpr double kRatioHigh = 4.8;  // 4 + 20%
constexpr double kRoundoff = 1e-12;

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::string mark(bool ok) { return ok ? "ok  " : "FAIL"; }

// One refinement sequence: pass when every consecutive ratio sits in the band,
// or when the whole sequence is at roundoff level.
struct Refinement {
    std::vector<double> values;
    std::vector<double> ratios;
    bool roundoff = false;
    bool ok = false;
};

Refinement refine(const std::vector<double>& v) {
    Refinement r;
    r.values = v;
    r.roundoff = true;
    for (double x : v) r.roundoff = r.roundoff && x < kRoundoff;
    r.ok = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double q = v[i] > 0.0 ? v[i - 1] / v[i] : INFINITY;
        r.ratios.push_back(q);
        r.ok = r.ok && q >= kRatioLow && q <= kRatioHigh;
    }
    r.ok = r.ok || r.roundoff;
    return r;
}

std::string describe(const std::string& label, const Refinement& r) {
    std::string s = mark(r.ok) + " " + label + ":";
    for (double v : r.values) s += " " + sci(v);
    if (r.roundoff) {
        s += " (roundoff)";
    } else {
        s += " ratios";
        for (double q : r.ratios) s += " " + sci(q);
    }
    return s;
}

Json refinement_json(const Refinement& r) { return {{"values", r.values}, {"ratios", r.ratios}, {"roundoff", r.roundoff}}; }

FlowOptions options(int order, double t_end, int every) {
    FlowOptions o;
    o.order = order;
    o.t_end = t_end;
    o.snapshot_every = every;
    return o;
}

// ---------------------------------------------------------------------------

CriterionResult fuzz() {
    CriterionResult r;
    const int samples = 1000;
    double worst_identity = 0.0, worst_gradient = 0.0;
    for (int s = 0; s < samples; ++s) {
        const int m = 2 + s % 2;
        const int k = 1 + s % 3;
        const auto sample = random_fundamental_form(static_cast<std::uint64_t>(s), m, k, true);
        for (const auto& id : check_pointwise_identities(sample)) worst_identity = std::max(worst_identity, id.relative);
        for (const auto& id : gradient_values(sample).residuals) worst_gradient = std::max(worst_gradient, id.relative);
    }
    const bool ok1 = worst_identity < 1e-10, ok2 = worst_gradient < 1e-10;
    r.details.push_back(mark(ok1) + " identities (i)-(v) max relative residual " + sci(worst_identity) + " < 1e-10");
    r.details.push_back(mark(ok2) + " gradient decompositions max relative residual " + sci(worst_gradient) + " < 1e-10");
    r.values = {{"samples", samples}, {"identityMax", worst_identity}, {"gradientMax", worst_gradient}};
    r.passed = ok1 && ok2;
    return r;
}

CriterionResult structure() {
    CriterionResult r;
    std::vector<StructureResiduals> res;
    for (int N : {64, 128}) {
        GeometryOptions go;
        go.order = 2;
        res.push_back(check_structure_equations(build_geometry(product_torus(1.0, 2.0, N, N, 0.2), go)));
    }
    struct Field {
        const char* name;
        double StructureResiduals::*ptr;
        bool asserted;
    };
    const Field fields[] = {{"gauss", &StructureResiduals::gauss, true},
                            {"codazzi", &StructureResiduals::codazzi, true},
                            {"interchange", &StructureResiduals::interchange, true},
                            {"simons", &StructureResiduals::simons, true},
                            {"contracted_codazzi", &StructureResiduals::contracted_codazzi, false},
                            {"normality", &StructureResiduals::normality, false}};
    r.passed = true;
    for (const auto& f : fields) {
        const Refinement ref = refine({res[0].*f.ptr, res[1].*f.ptr});
        if (f.asserted) r.passed = r.passed && ref.ok;
        r.details.push_back(describe(std::string(f.name) + (f.asserted ? "" : " [reported]") + " 64/128", ref));
        r.values[f.name] = refinement_json(ref);
    }
    GeometryOptions go;
    const auto plain = check_structure_equations(build_geometry(product_torus(1.0, 2.0, 64, 64), go));
    const double plain_max = std::max({plain.gauss, plain.codazzi, plain.interchange, plain.simons});
    r.details.push_back("     unsheared parametrisation at 64: max residual " + sci(plain_max));
    r.values["unshearedMax"] = plain_max;
    return r;
}

CriterionResult shrinking() {
    CriterionResult r;
    const double tc = 0.4, tt = 0.3;
    const auto circ = integrate(circle(1.0, 3, 128), options(4, tc, 1000000));
    const auto& gc = circ.snapshots.back().grid;
    double ec = 0.0;
    for (std::size_t i = 0; i < gc.domain.node_count(); ++i) {
        const double* F = gc.point(i);
        ec = std::max(ec, std::abs(std::sqrt(F[0] * F[0] + F[1] * F[1] + F[2] * F[2]) - std::sqrt(1.0 - 2.0 * gc.time)));
    }
    const bool okc = circ.status == FlowStatus::completed && std::abs(gc.time - tc) < 1e-12 && ec <= 1e-5;
    r.details.push_back(mark(okc) + " circle radius error at t = 0.4: " + sci(ec) + " <= 1e-5");

    const auto tor = integrate(product_torus(1.0, 2.0, 64, 64), options(4, tt, 1000000));
    const auto& gt = tor.snapshots.back().grid;
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < gt.domain.node_count(); ++i) {
        const double* F = gt.point(i);
        e1 = std::max(e1, std::abs(std::hypot(F[0], F[1]) - std::sqrt(1.0 - 2.0 * gt.time)));
        e2 = std::max(e2, std::abs(std::hypot(F[2], F[3]) - std::sqrt(4.0 - 2.0 * gt.time)));
    }
    const bool okt = tor.status == FlowStatus::completed && std::abs(gt.time - tt) < 1e-12 && std::max(e1, e2) <= 1e-4;
    r.details.push_back(mark(okt) + " product torus radius errors at t = 0.3: " + sci(e1) + ", " + sci(e2) + " <= 1e-4");
    r.values = {{"circleError", ec}, {"torusErrors", {e1, e2}}};
    r.passed = okc && okt;
    return r;
}

CriterionResult flatness() {
    CriterionResult r;
    r.passed = true;
    struct Case {
        const char* name;
        ImmersionGrid grid;
        double horizon;
    };
    // horizon: 60% of the extinction time a^2 / 2 of the smaller circle factor
    const double s = std::sqrt(2.0);
    Case flat[] = {{"productTorus(1,2)", product_torus(1.0, 2.0, 64, 64), 0.6 * 0.5},
                   {"sphereTorus(2,0.2)", sphere_torus(2.0, 0.2, std::numbers::pi / 4, 64, 64), 0.6 * s * s / 2.0}};
    for (auto& c : flat) {
        const auto tr = integrate(c.grid, options(2, c.horizon, 20));
        const auto m = flatness_monitor(tr);
        const Series& sr = *m.find("sup_Rperp2");
        const bool ok = m.verdict == Verdict::pass && tr.status == FlowStatus::completed;
        r.passed = r.passed && ok;
        r.details.push_back(mark(ok) + " " + c.name + " to t = " + sci(c.horizon) + ": max sup|Rperp|^2 " + sci(sr.max()) +
                            " <= 10 x eps0 = " + sci(m.tolerance));
        r.values[c.name] = {{"horizon", c.horizon}, {"eps0", m.params["eps0"]}, {"max", sr.max()}};
    }
    const auto tg = integrate(generic_torus(1.0, 2.0, 0.3, 64, 64), options(2, 0.6 * 0.5, 20));
    const auto mg = flatness_monitor(tg);
    const Series& sg = *mg.find("sup_Rperp2");
    const double retained = sg.min() / sg.value.front();
    const bool okg = retained >= 0.5 && mg.verdict == Verdict::not_applicable && tg.status == FlowStatus::completed;
    r.passed = r.passed && okg;
    r.details.push_back(mark(okg) + " genericTorus control: initial " + sci(sg.value.front()) + ", min " + sci(sg.min()) +
                        ", retained fraction " + sci(retained) + " >= 0.5");
    r.values["genericTorus"] = {{"initial", sg.value.front()}, {"min", sg.min()}};
    return r;
}

CriterionResult evolution() {
    CriterionResult r;
    r.passed = true;
    struct Quantity {
        const char* name;
        bool asserted;
    };
    for (const char* scen : {"epsGraph(0.3)", "genericTorus"}) {
        std::vector<EvolutionResidual> res;
        for (int N : {32, 64, 128}) {
            const ImmersionGrid im = std::string(scen) == "genericTorus" ? generic_torus(1.0, 2.0, 0.3, N, N) : eps_graph(0.3, N, N);
            FlowOptions o = options(2, 1.0, 1000000);
            o.record_triples = true;
            o.t_end = 2.0 * stable_dt(im, o);
            const auto tr = integrate(im, o);
            const auto& t = tr.triples.at(0);
            EvolutionOptions eo;
            eo.omega = MForm::from_indices(4, {0, 1});
            res.push_back(evolution_residuals(tr.snapshots[t[0]], tr.snapshots[t[1]], tr.snapshots[t[2]], eo));
        }
        auto collect = [&](auto getter) {
            std::vector<double> v;
            for (const auto& e : res) v.push_back(getter(e));
            return v;
        };
        Json block;
        auto check = [&](const std::string& label, const std::vector<double>& v, bool asserted) {
            const Refinement ref = refine(v);
            if (asserted) r.passed = r.passed && ref.ok;
            r.details.push_back(describe(std::string(scen) + " " + label + (asserted ? "" : " [reported]"), ref));
            block[label] = refinement_json(ref);
        };
        check("|A|^2", collect([](const EvolutionResidual& e) { return e.A2; }), true);
        check("|H|^2", collect([](const EvolutionResidual& e) { return e.H2; }), true);
        if (res.front().w) {
            check("w", collect([](const EvolutionResidual& e) { return e.w.value_or(NAN); }), true);
        } else {
            r.details.push_back("n/a  " + std::string(scen) + " w: normal bundle not flat");
        }
        check("|Rperp|^2", collect([](const EvolutionResidual& e) { return e.Rperp2_stated; }), true);
        check("|Rperp|^2 with gradient cross term", collect([](const EvolutionResidual& e) { return e.Rperp2_corrected; }), false);
        check("metric", collect([](const EvolutionResidual& e) { return e.metric; }), false);
        check("volume", collect([](const EvolutionResidual& e) { return e.volume; }), false);
        r.values[scen] = block;
    }
    return r;
}

CriterionResult growth() {
    CriterionResult r;
    r.passed = true;
    struct Case {
        const char* name;
        ImmersionGrid grid;
        double t_end;
        int ell;
        double c0;
    };
    Case cases[] = {{"productTorus(1,2)", product_torus(1.0, 2.0, 64, 64), 0.3, 2, 4.0},
                    {"equivariantCylinder", equivariant_cylinder(64, 64), 0.2, 1, 9.0}};
    for (auto& c : cases) {
        const auto tr = integrate(c.grid, options(2, c.t_end, 20));
        GrowthParams g;
        g.ell = c.ell;
        g.p = 0.0;
        g.c0 = c.c0;
        const auto m = growth_monitor(tr, g);
        const double coef = m.params["timeCoefficient"].get<double>();
        const double expected = 2.0 * 2 + 4.0 * (0.0 - 1.0);
        const bool ok = m.verdict == Verdict::pass && m.find("slack")->max() <= 1.0 + 1e-3 && coef == expected &&
                        tr.status == FlowStatus::completed;
        r.passed = r.passed && ok;
        r.details.push_back(mark(ok) + " " + c.name + " (ell, p, c0) = (" + std::to_string(c.ell) + ", 0, " + sci(c.c0) +
                            ") max slack " + sci(m.find("slack")->max()) + " <= 1 + 1e-3, t-coefficient " + sci(coef));
        r.values[c.name] = {{"maxSlack", m.find("slack")->max()}, {"timeCoefficient", coef}};
    }
    bool coef_ok = true;
    for (double p : {0.0, 0.5, 1.0, 2.5})
        for (int m : {1, 2, 3}) coef_ok = coef_ok && growth_time_coefficient(m, p) == 2.0 * m + 4.0 * (p - 1.0);
    r.passed = r.passed && coef_ok;
    r.details.push_back(mark(coef_ok) + " t-coefficient 2m + 4(p - 1) for m in {1,2,3}, p in {0, 0.5, 1, 2.5}");
    return r;
}

CriterionResult graphical() {
    CriterionResult r;
    const auto tr = integrate(eps_graph(0.3, 64, 64), options(2, 0.5, 20));
    SupParams sp;
    sp.omega = MForm::from_indices(4, {0, 1});
    sp.field = SupField::A2v2;
    const auto av = sup_monitor(tr, sp);
    const bool ok_av = av.verdict == Verdict::pass && non_increasing(av.series.front(), 1e-3);
    r.details.push_back(mark(ok_av) + " sup |A|^2 v^2 non-increasing within 1e-3: " + sci(av.series.front().value.front()) +
                        " -> " + sci(av.series.front().value.back()));
    const auto k = kato_monitor(tr);
    const bool ok_k = k.verdict == Verdict::pass && k.find("scaled_margin")->min() >= -1e-6;
    r.details.push_back(mark(ok_k) + " Kato margin (intrinsic m) min " + sci(k.find("margin")->min()) + ", scaled " +
                        sci(k.find("scaled_margin")->min()) + " >= -1e-6");
    sp.field = SupField::tA2;
    const auto ta = sup_monitor(tr, sp);
    const bool ok_t = ta.verdict == Verdict::pass;
    r.details.push_back(mark(ok_t) + " t|A|^2 bounded: max " + sci(ta.series.front().max()));
    const bool ok_run = tr.status == FlowStatus::completed;
    r.values = {{"A2v2", av.series.front().value},
                {"katoMin", k.find("scaled_margin")->min()},
                {"tA2Max", ta.series.front().max()}};
    r.passed = ok_av && ok_k && ok_t && ok_run;
    return r;
}

CriterionResult monotonicity() {
    CriterionResult r;
    FlowOptions oc = options(4, 0.4, 25);
    oc.full_geometry = false;
    const auto tc = integrate(circle(1.0, 3, 128), oc);
    DensityParams d;
    d.t0 = 0.5;
    const auto dc = density_monitor(tc, d);
    const Series& sc = *dc.find("density");
    const double spread = sc.max() - sc.min();
    const bool okc = spread <= 1e-4 && tc.status == FlowStatus::completed;
    r.details.push_back(mark(okc) + " circle, t0 = 0.5, m/2 exponent: density " + sci(sc.value.front()) + ", spread " +
                        sci(spread) + " <= 1e-4");

    FlowOptions ot = options(2, 0.3, 1);
    ot.full_geometry = false;
    const auto tt = integrate(product_torus(1.0, 2.0, 64, 64), ot);
    d.t0 = 0.6;
    const auto dt = density_monitor(tt, d);
    const Series& st = *dt.find("density");
    double worst = -INFINITY;
    for (std::size_t i = 1; i < st.value.size(); ++i) worst = std::max(worst, st.value[i] - st.value[i - 1]);
    const bool okt = dt.verdict == Verdict::pass && worst <= 1e-4 && tt.status == FlowStatus::completed;
    r.details.push_back(mark(okt) + " productTorus, t0 = 0.6: " + std::to_string(st.value.size()) +
                        " snapshots, largest per-step change " + sci(worst) + " <= 1e-4");
    r.values = {{"circleDensity", sc.value.front()}, {"circleSpread", spread}, {"torusMaxIncrease", worst}};
    r.passed = okc && okt;
    return r;
}

CriterionResult normalized() {
    CriterionResult r;
    r.passed = true;
    const auto omega = MForm::from_indices(4, {0, 1});
    Json block = Json::array();
    for (double s : {0.5, 1.0}) {
        FlowOptions ou = options(2, 0.5 * (std::exp(2.0 * s) - 1.0), 1000000);
        const auto un = rescale_trajectory(integrate(eps_graph(0.3, 32, 32), ou), 2);
        FlowOptions on = options(2, s, 1000000);
        on.normalized = true;
        const auto dn = integrate(eps_graph(0.3, 32, 32), on);
        const auto& a = *un.snapshots.back().geometry;
        const auto& b = *dn.snapshots.back().geometry;
        const GraphW wa = graph_w(a, omega), wb = graph_w(b, omega);
        double dA = 0.0, dw = 0.0;
        for (std::size_t i = 0; i < a.nodes; ++i) {
            dA = std::max(dA, std::abs(a.A2[i] - b.A2[i]));
            dw = std::max(dw, std::abs(wa.w[i] - wb.w[i]));
        }
        const bool ok = std::abs(a.time - s) < 1e-9 && std::abs(b.time - s) < 1e-9 && dA <= 1e-2 && dw <= 1e-2;
        r.passed = r.passed && ok;
        r.details.push_back(mark(ok) + " s = " + sci(s) + ": max |dA~^2| " + sci(dA) + ", max |dw| " + sci(dw) + " <= 1e-2");
        block.push_back({{"s", s}, {"A2", dA}, {"w", dw}});
    }
    FlowOptions on = options(2, 1.0, 50);
    on.normalized = true;
    const auto dn = integrate(eps_graph(0.3, 32, 32), on);
    const auto ex = expander_monitor(dn, 1e-3);
    const bool oke = ex.verdict == Verdict::pass;
    r.passed = r.passed && oke;
    r.details.push_back(mark(oke) + " expander residual non-increasing within 1e-3 over s in [0, 1]: " +
                        sci(ex.series.front().value.front()) + " -> " + sci(ex.series.front().value.back()));
    r.values = {{"fields", block}, {"expander", ex.series.front().value}};
    return r;
}

Json result_json(const CriterionResult& r) {
    return {{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"details", r.details}, {"values", r.values}};
}

}  // namespace

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {1, "fuzz", "algebraic identity fuzzing", 5},
        {2, "structure", "structure equations converge at second order", 30},
        {3, "shrinking", "shrinking laws of circle and product torus", 60},
        {4, "flatness", "flat normal bundles stay flat", 300},
        {5, "evolution", "evolution-equation residuals quarter under refinement", 600},
        {6, "growth", "growth bound preserved", 120},
        {7, "graphical", "graphical monitors", 180},
        {8, "monotonicity", "Gaussian density monotonicity", 120},
        {9, "normalized", "normalised flow consistency", 300},
        {10, "determinism", "verify is deterministic", 0},
    };
    return list;
}

std::vector<int> parse_subset(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        bool found = false;
        for (const auto& c : criteria())
            if (item == c.name || item == std::to_string(c.id)) {
                out.push_back(c.id);
                found = true;
            }
        if (!found) throw std::invalid_argument("unknown criterion '" + item + "'");
    }
    return out;
}

CriterionResult run_criterion(int id) {
    const Criterion* c = nullptr;
    for (const auto& x : criteria())
        if (x.id == id) c = &x;
    if (!c || id == 10) throw std::invalid_argument("run_criterion: unknown or composite criterion " + std::to_string(id));
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    switch (id) {
        case 1: r = fuzz(); break;
        case 2: r = structure(); break;
        case 3: r = shrinking(); break;
        case 4: r = flatness(); break;
        case 5: r = evolution(); break;
        case 6: r = growth(); break;
        case 7: r = graphical(); break;
        case 8: r = monotonicity(); break;
        case 9: r = normalized(); break;
    }
    r.id = id;
    r.title = c->title;
    r.budget_seconds = c->budget_seconds;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds > r.budget_seconds) {
        r.passed = false;
        r.details.push_back("FAIL runtime over budget");
    }
    return r;
}

std::string verdict_line(const CriterionResult& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "criterion %2d %s  %s (%.1f s", r.id, r.passed ? "PASS" : "FAIL", r.title.c_str(),
                  r.seconds);
    std::string s = buf;
    if (r.budget_seconds > 0) s += " of " + std::to_string(static_cast<int>(r.budget_seconds)) + " s budget";
    return s + ")";
}

VerifyOutcome run_verify(const std::vector<int>& subset_in, std::ostream& log) {
    std::vector<int> subset = subset_in;
    if (subset.empty())
        for (const auto& c : criteria()) subset.push_back(c.id);
    bool want_determinism = false;
    std::vector<int> plain;
    for (int id : subset) {
        if (id == 10) want_determinism = true;
        else if (std::find(plain.begin(), plain.end(), id) == plain.end()) plain.push_back(id);
    }
    VerifyOutcome out;
    out.report["criteria"] = Json::array();
    auto run_all = [&](std::vector<CriterionResult>* keep, bool print) {
        Json arr = Json::array();
        for (int id : plain) {
            CriterionResult r = run_criterion(id);
            if (print) {
                log << verdict_line(r) << "\n";
                for (const auto& d : r.details) log << "    " << d << "\n";
                log.flush();
            }
            arr.push_back(result_json(r));
            if (keep) keep->push_back(std::move(r));
        }
        return arr;
    };
    const Json first = run_all(&out.results, true);
    for (const auto& j : first) out.report["criteria"].push_back(j);
    if (want_determinism) {
        if (plain.empty()) {
            for (int id = 1; id <= 9; ++id) plain.push_back(id);
        }
        const auto start = std::chrono::steady_clock::now();
        const Json a = out.results.empty() ? run_all(nullptr, false) : first;
        const Json b = run_all(nullptr, false);
        CriterionResult r;
        r.id = 10;
        r.title = "verify is deterministic";
        r.passed = a.dump() == b.dump();
        r.details.push_back(mark(r.passed) + " two runs of criteria " + std::to_string(plain.size()) +
                            " produce byte-identical reports (" + std::to_string(a.dump().size()) + " bytes)");
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        log << verdict_line(r) << "\n";
        for (const auto& d : r.details) log << "    " << d << "\n";
        out.report["criteria"].push_back(result_json(r));
        out.results.push_back(std::move(r));
    }
    out.all_passed = true;
    for (const auto& r : out.results) out.all_passed = out.all_passed && r.passed;
    out.report["allPassed"] = out.all_passed;
    return out;
}

}  // namespace mcf::acceptance
