#include "mcf/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mcf {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::not_applicable: return "not-applicable";
    }
    return "?";
}

double Series::max() const {
    double s = -std::numeric_limits<double>::infinity();
    for (double v : value) s = std::max(s, v);
    return s;
}

double Series::min() const {
    double s = std::numeric_limits<double>::infinity();
    for (double v : value) s = std::min(s, v);
    return s;
}

const Series* MonitorReport::find(std::string_view series_name) const {
    for (const auto& s : series)
        if (s.name == series_name) return &s;
    return nullptr;
}

bool bounded_surrogate(const Series& s, double factor) {
    if (s.value.empty()) return true;
    const double half = s.t.front() + 0.5 * (s.t.back() - s.t.front());
    double first = 0.0;
    for (std::size_t i = 0; i < s.value.size(); ++i)
        if (s.t[i] <= half) first = std::max(first, s.value[i]);
    return s.max() <= factor * first;
}

bool non_increasing(const Series& s, double tol) {
    for (std::size_t i = 1; i < s.value.size(); ++i)
        if (s.value[i] > s.value[i - 1] + tol * std::max(1.0, std::abs(s.value[i - 1]))) return false;
    return true;
}

namespace {

const GeometryState& geom(const Snapshot& s) {
    if (!s.geometry) throw std::invalid_argument("monitor: snapshot without geometry");
    return *s.geometry;
}

nlohmann::ordered_json form_json(const MForm& w) {
    nlohmann::ordered_json j;
    j["n"] = w.n;
    j["tuples"] = w.tuples;
    j["values"] = w.values;
    return j;
}

}  // namespace

MonitorReport evolution_monitor(const Trajectory& traj, const EvolutionMonitorParams& p, Exec exec) {
    MonitorReport r;
    r.name = "evolution";
    r.tolerance = p.tolerance;
    r.params["flatThreshold"] = p.flat_threshold;
    if (p.omega) r.params["omega"] = form_json(*p.omega);
    Series metric{"metric", {}, {}}, volume{"volume", {}, {}}, h2{"H2", {}, {}}, a2{"A2", {}, {}};
    Series rs{"Rperp2", {}, {}}, rc{"Rperp2_corrected", {}, {}}, w{"w", {}, {}};
    EvolutionOptions eo;
    eo.omega = p.omega;
    eo.flat_threshold = p.flat_threshold;
    eo.exec = exec;
    for (const auto& tri : traj.triples) {
        const auto e = evolution_residuals(traj.snapshots[tri[0]], traj.snapshots[tri[1]], traj.snapshots[tri[2]], eo);
        metric.push(e.t, e.metric);
        volume.push(e.t, e.volume);
        h2.push(e.t, e.H2);
        a2.push(e.t, e.A2);
        rs.push(e.t, e.Rperp2_stated);
        rc.push(e.t, e.Rperp2_corrected);
        if (e.w) w.push(e.t, *e.w);
    }
    if (traj.triples.empty()) {
        r.note = "no snapshot triples recorded";
        return r;
    }
    bool ok = true;
    for (const Series* s : {&metric, &volume, &h2, &a2, &rs, &w})
        for (double v : s->value) ok = ok && v <= p.tolerance;
    r.series = {metric, volume, h2, a2, rs, rc};
    if (!w.value.empty()) r.series.push_back(w);
    r.verdict = ok ? Verdict::pass : Verdict::fail;
    return r;
}

MonitorReport flatness_monitor(const Trajectory& traj, const FlatnessParams& p) {
    MonitorReport r;
    r.name = "flatness";
    Series rp{"sup_Rperp2", {}, {}}, a2{"sup_A2", {}, {}};
    for (const auto& s : traj.snapshots) {
        const auto& g = geom(s);
        rp.push(g.time, sup_norm(g.Rperp2));
        a2.push(g.time, sup_norm(g.A2));
    }
    r.series = {rp, a2};
    const double initial = rp.value.empty() ? 0.0 : rp.value.front();
    const double eps0 = std::max(p.eps0.value_or(initial), p.eps0_floor);
    r.tolerance = p.factor * eps0;
    r.params["factor"] = p.factor;
    r.params["eps0"] = eps0;
    r.params["eps0Measured"] = !p.eps0.has_value();
    r.params["flatThreshold"] = p.flat_threshold;
    if (rp.value.empty()) {
        r.note = "empty trajectory";
        return r;
    }
    if (initial > p.flat_threshold) {
        r.note = "initial normal bundle not flat";
        return r;
    }
    r.verdict = rp.max() <= r.tolerance ? Verdict::pass : Verdict::fail;
    return r;
}

double growth_time_coefficient(int m, double p) { return 2.0 * m + 4.0 * (p - 1.0); }

MonitorReport growth_monitor(const Trajectory& traj, const GrowthParams& p) {
    if (p.p < 0.0) throw std::invalid_argument("growth monitor: p must be non-negative");
    if (!(p.c0 > 0.0)) throw std::invalid_argument("growth monitor: c0 must be positive");
    MonitorReport r;
    r.name = "growth";
    r.tolerance = p.tolerance;
    Series slack{"slack", {}, {}};
    int m = 0;
    for (const auto& s : traj.snapshots) {
        const auto& g = geom(s);
        m = g.m;
        const double coef = growth_time_coefficient(g.m, p.p);
        const CoordinateSplit cs = coordinate_split(g, p.ell, p.basis);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.nodes; ++i) {
            const double bound = p.c0 * std::pow(1.0 + cs.x2[i] + coef * g.time, p.p);
            worst = std::max(worst, cs.u2[i] / bound);
        }
        slack.push(g.time, worst);
    }
    r.params["ell"] = p.ell;
    r.params["p"] = p.p;
    r.params["c0"] = p.c0;
    r.params["timeCoefficient"] = growth_time_coefficient(m, p.p);
    if (!p.basis.empty()) r.params["basis"] = p.basis;
    r.series = {slack};
    if (slack.value.empty()) return r;
    if (slack.value.front() > 1.0 + p.tolerance) {
        r.note = "initial data violates the bound";
        return r;
    }
    r.verdict = slack.max() <= 1.0 + p.tolerance ? Verdict::pass : Verdict::fail;
    return r;
}

std::string_view to_string(SupField f) {
    switch (f) {
        case SupField::u2_eta_p: return "u2_eta_p";
        case SupField::rperp_exp: return "rperp_exp";
        case SupField::A2v2: return "A2v2";
        case SupField::w_min: return "w_min";
        case SupField::tA2: return "tA2";
        case SupField::t2gradA2: return "t2gradA2";
    }
    return "?";
}

SupField sup_field_from_string(std::string_view s) {
    for (auto f : {SupField::u2_eta_p, SupField::rperp_exp, SupField::A2v2, SupField::w_min, SupField::tA2,
                   SupField::t2gradA2})
        if (to_string(f) == s) return f;
    throw std::invalid_argument("unknown sup field '" + std::string(s) + "'");
}

MonitorReport sup_monitor(const Trajectory& traj, const SupParams& p) {
    MonitorReport r;
    r.name = "sup:" + std::string(to_string(p.field));
    r.tolerance = p.tolerance;
    r.params["field"] = to_string(p.field);
    Series s{std::string(to_string(p.field)), {}, {}};
    const bool needs_graph = p.field == SupField::A2v2 || p.field == SupField::w_min;
    if (needs_graph && !p.omega) throw std::invalid_argument("sup monitor: field requires omega");
    if (p.field == SupField::u2_eta_p && p.p < 0.0) throw std::invalid_argument("sup monitor: p must be non-negative");

    double rate = 0.0;
    if (p.field == SupField::rperp_exp) {
        double a = 0.0;
        for (const auto& snap : traj.snapshots) a = std::max(a, sup_norm(geom(snap).A2));
        rate = p.rate.value_or(2.0 * a);
        r.params["rate"] = rate;
    }
    if (p.field == SupField::u2_eta_p) {
        r.params["ell"] = p.ell;
        r.params["p"] = p.p;
    }
    if (p.omega) r.params["omega"] = form_json(*p.omega);

    for (const auto& snap : traj.snapshots) {
        const auto& g = geom(snap);
        const double t = g.time;
        double v = 0.0;
        switch (p.field) {
            case SupField::u2_eta_p: {
                const CoordinateSplit cs = coordinate_split(g, p.ell, p.basis);
                const double coef = growth_time_coefficient(g.m, p.p);
                for (std::size_t i = 0; i < g.nodes; ++i)
                    v = std::max(v, cs.u2[i] * std::pow(1.0 + coef * t + cs.x2[i], -p.p));
                break;
            }
            case SupField::rperp_exp: v = std::exp(-rate * t) * sup_norm(g.Rperp2); break;
            case SupField::A2v2:
            case SupField::w_min: {
                const GraphW gw = graph_w(g, *p.omega);
                if (!gw.all_graphical) {
                    r.series = {s};
                    r.note = "snapshot at t = " + std::to_string(t) + " is not graphical";
                    return r;
                }
                if (p.field == SupField::A2v2) {
                    for (std::size_t i = 0; i < g.nodes; ++i) v = std::max(v, g.A2[i] * gw.v[i] * gw.v[i]);
                } else {
                    v = *std::min_element(gw.w.begin(), gw.w.end());
                }
                break;
            }
            case SupField::tA2: v = t * sup_norm(g.A2); break;
            case SupField::t2gradA2:
                if (g.grad_perp_A2.empty()) throw std::invalid_argument("sup monitor: snapshot lacks derivative data");
                v = t * t * sup_norm(g.grad_perp_A2);
                break;
        }
        s.push(t, v);
    }
    r.series = {s};
    if (s.value.empty()) return r;
    bool ok = true;
    switch (p.field) {
        case SupField::tA2:
        case SupField::t2gradA2:
            r.params["surrogate"] = "max <= 2 x max over first half";
            ok = bounded_surrogate(s, 2.0);
            break;
        case SupField::w_min: ok = s.min() >= s.value.front() * (1.0 - p.tolerance); break;
        default: ok = s.max() <= s.value.front() * (1.0 + p.tolerance) + p.absolute_floor; break;
    }
    r.verdict = ok ? Verdict::pass : Verdict::fail;
    return r;
}

KatoMargin kato_margin(const GeometryState& gs, int dimension, double min_norm) {
    if (gs.grad_perp_A.empty()) throw std::invalid_argument("kato: geometry lacks derivative data");
    const int m = gs.m, n = gs.n, mm = m * m;
    const double d = dimension > 0 ? dimension : m;
    const double kappa = (d + 2.0) / d;
    const double cutoff = min_norm * std::sqrt(sup_norm(gs.A2));
    KatoMargin out{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (std::size_t node = 0; node < gs.nodes; ++node) {
        const double a2 = gs.A2[node];
        if (std::sqrt(a2) <= cutoff) continue;
        const double* gi = gs.ginv_at(node);
        const double* A = gs.A_at(node);
        const double* D = gs.grad_perp_A.data() + node * m * mm * n;
        // grad_l |A| = <A, grad_l A> / |A|
        double gl[3] = {0.0, 0.0, 0.0};
        for (int l = 0; l < m; ++l)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    for (int p = 0; p < m; ++p)
                        for (int q = 0; q < m; ++q) {
                            const double w = gi[i * m + p] * gi[j * m + q];
                            double dot = 0.0;
                            for (int al = 0; al < n; ++al) dot += A[(i * m + j) * n + al] * D[((l * m + p) * m + q) * n + al];
                            gl[l] += w * dot;
                        }
        double grad_norm2 = 0.0;
        for (int l = 0; l < m; ++l)
            for (int k = 0; k < m; ++k) grad_norm2 += gi[l * m + k] * gl[l] * gl[k];
        grad_norm2 /= a2;
        const double full = gs.grad_perp_A2[node];
        const double margin = full - kappa * grad_norm2;
        out.margin = std::min(out.margin, margin);
        out.scaled = std::min(out.scaled, margin / (1.0 + full));
    }
    if (!std::isfinite(out.margin)) out = {0.0, 0.0};
    return out;
}

MonitorReport kato_monitor(const Trajectory& traj, const KatoParams& p) {
    MonitorReport r;
    r.name = "kato";
    r.tolerance = p.tolerance;
    Series margin{"margin", {}, {}}, scaled{"scaled_margin", {}, {}};
    bool flat = true;
    int m = 0;
    for (const auto& snap : traj.snapshots) {
        const auto& g = geom(snap);
        m = g.m;
        flat = flat && sup_norm(g.Rperp2) <= p.flat_threshold;
        const KatoMargin k = kato_margin(g, p.dimension, p.min_norm);
        margin.push(g.time, k.margin);
        scaled.push(g.time, k.scaled);
    }
    const int d = p.dimension > 0 ? p.dimension : m;
    r.params["dimension"] = d;
    r.params["constant"] = (d + 2.0) / d;
    r.params["flatThreshold"] = p.flat_threshold;
    r.series = {margin, scaled};
    if (!flat) {
        r.note = "normal bundle not flat";
        return r;
    }
    if (margin.value.empty()) return r;
    r.verdict = scaled.min() >= -p.tolerance ? Verdict::pass : Verdict::fail;
    return r;
}

std::string_view to_string(DensityWeight w) {
    switch (w) {
        case DensityWeight::one: return "one";
        case DensityWeight::A2: return "A2";
        case DensityWeight::H2: return "H2";
        case DensityWeight::Rperp2: return "Rperp2";
    }
    return "?";
}

DensityWeight density_weight_from_string(std::string_view s) {
    for (auto w : {DensityWeight::one, DensityWeight::A2, DensityWeight::H2, DensityWeight::Rperp2})
        if (to_string(w) == s) return w;
    throw std::invalid_argument("unknown density weight '" + std::string(s) + "'");
}

namespace {

const std::vector<double>* weight_field(const GeometryState& gs, DensityWeight w) {
    switch (w) {
        case DensityWeight::one: return nullptr;
        case DensityWeight::A2: return &gs.A2;
        case DensityWeight::H2: return &gs.H2;
        case DensityWeight::Rperp2: return &gs.Rperp2;
    }
    return nullptr;
}

double kernel(const GeometryState& gs, std::size_t node, const DensityParams& p, double tau) {
    const double* F = gs.F.data() + node * gs.n;
    double y2 = 0.0;
    for (int al = 0; al < gs.n; ++al) {
        const double y = F[al] - (p.center.empty() ? 0.0 : p.center[al]);
        y2 += y * y;
    }
    const double dim = p.exponent == DensityExponent::intrinsic ? gs.m : gs.n;
    return std::pow(4.0 * std::numbers::pi * tau, -0.5 * dim) * std::exp(-y2 / (4.0 * tau));
}

double cell_volume(const GeometryState& gs) {
    double cell = 1.0;
    for (int d = 0; d < gs.m; ++d) cell *= gs.domain.spacing(d);
    return cell;
}

void check_center(const GeometryState& gs, const DensityParams& p) {
    if (!p.center.empty() && static_cast<int>(p.center.size()) != gs.n)
        throw std::invalid_argument("density: center has wrong dimension");
}

}  // namespace

double gaussian_density(const GeometryState& gs, const DensityParams& p) {
    const double tau = p.t0 - gs.time;
    if (!(tau > 0.0)) throw std::invalid_argument("density: t0 must exceed the snapshot time");
    check_center(gs, p);
    const auto* f = weight_field(gs, p.weight);
    double s = 0.0;
    for (std::size_t node = 0; node < gs.nodes; ++node)
        s += (f ? (*f)[node] : 1.0) * kernel(gs, node, p, tau) * gs.sqrt_det[node];
    return s * cell_volume(gs);
}

MonitorReport density_monitor(const Trajectory& traj, const DensityParams& p) {
    MonitorReport r;
    r.name = "density";
    r.tolerance = p.tolerance;
    r.params["t0"] = p.t0;
    r.params["center"] = p.center.empty() ? std::vector<double>{} : p.center;
    r.params["exponent"] = p.exponent == DensityExponent::intrinsic ? "intrinsic" : "ambient";
    r.params["weight"] = to_string(p.weight);
    for (const auto& snap : traj.snapshots) {
        const auto& g = geom(snap);
        if (g.domain.equivariant()) throw std::invalid_argument("density: equivariant domains are not compact");
        if (!(p.t0 > g.time)) throw std::invalid_argument("density: t0 must exceed every recorded time");
    }
    if (traj.normalized) {
        r.note = "normalised trajectory";
        return r;
    }
    Series dens{"density", {}, {}};
    for (const auto& snap : traj.snapshots) dens.push(snap.grid.time, gaussian_density(geom(snap), p));

    // identity d/dt int f rho = int (df/dt - lap f) rho - int f |H + F^perp / (2 tau)|^2 rho
    Series ident{"identity_residual", {}, {}};
    if (p.exponent == DensityExponent::intrinsic) {
        for (const auto& tri : traj.triples) {
            const auto& g0 = geom(traj.snapshots[tri[0]]);
            const auto& gs = geom(traj.snapshots[tri[1]]);
            const auto& g2 = geom(traj.snapshots[tri[2]]);
            const double dt = 0.5 * (g2.time - g0.time);
            const double tau = p.t0 - gs.time;
            const double lhs = (gaussian_density(g2, p) - gaussian_density(g0, p)) / (2.0 * dt);
            const auto* f = weight_field(gs, p.weight);
            std::vector<double> lap;
            if (f) lap = laplacian(gs, *f);
            const int n = gs.n;
            std::vector<double> y(n), yp(n);
            double rhs = 0.0;
            for (std::size_t node = 0; node < gs.nodes; ++node) {
                for (int al = 0; al < n; ++al) y[al] = gs.F[node * n + al] - (p.center.empty() ? 0.0 : p.center[al]);
                project_normal(gs, node, y.data(), yp.data());
                double drift = 0.0;
                for (int al = 0; al < n; ++al) {
                    const double v = gs.H[node * n + al] + yp[al] / (2.0 * tau);
                    drift += v * v;
                }
                double heat = 0.0, fv = 1.0;
                if (f) {
                    const auto* f0 = weight_field(g0, p.weight);
                    const auto* f2 = weight_field(g2, p.weight);
                    heat = ((*f2)[node] - (*f0)[node]) / (2.0 * dt) - lap[node];
                    fv = (*f)[node];
                }
                rhs += (heat - fv * drift) * kernel(gs, node, p, tau) * gs.sqrt_det[node];
            }
            rhs *= cell_volume(gs);
            ident.push(gs.time, std::abs(lhs - rhs));
        }
    }
    r.series = {dens};
    if (!ident.value.empty()) r.series.push_back(ident);
    if (p.exponent != DensityExponent::intrinsic) {
        r.note = "monotonicity asserted only for the intrinsic exponent";
        return r;
    }
    if (p.weight != DensityWeight::one) {
        r.note = "monotonicity asserted only for f = 1";
        return r;
    }
    r.verdict = non_increasing(dens, p.tolerance) ? Verdict::pass : Verdict::fail;
    return r;
}

MonitorReport area_monitor(const Trajectory& traj) {
    MonitorReport r;
    r.name = "area";
    Series s{"area", {}, {}};
    for (const auto& snap : traj.snapshots) s.push(snap.grid.time, geom(snap).area());
    r.series = {s};
    if (s.value.size() < 2) return r;
    bool ok = true;
    for (std::size_t i = 1; i < s.value.size(); ++i) ok = ok && s.value[i] < s.value[i - 1];
    r.verdict = ok ? Verdict::pass : Verdict::fail;
    return r;
}

MonitorReport expander_monitor(const Trajectory& traj, double tolerance) {
    MonitorReport r;
    r.name = "expander";
    r.tolerance = tolerance;
    Series s{"residual", {}, {}};
    for (const auto& snap : traj.snapshots) s.push(snap.grid.time, expander_residual(geom(snap)));
    r.series = {s};
    if (!traj.normalized) {
        r.note = "trajectory is not normalised";
        return r;
    }
    if (s.value.empty()) return r;
    r.verdict = non_increasing(s, tolerance) ? Verdict::pass : Verdict::fail;
    return r;
}

}  // namespace mcf
