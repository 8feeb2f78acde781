#include "mcf/evolution.hpp"

#include "mcf/tensor_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcf {

RperpReaction rperp_terms(const GeometryState& gs, Exec exec) {
    const int m = gs.m, n = gs.n, mm = m * m;
    if (gs.grad_A.empty()) throw std::invalid_argument("rperp_terms: geometry lacks derivative data");
    RperpReaction out;
    out.grad_Rperp2.assign(gs.nodes, 0.0);
    out.reaction.assign(gs.nodes, 0.0);
    out.cross.assign(gs.nodes, 0.0);
    for_each_node(exec, gs.nodes, [&](std::size_t node) {
        // ambient components play the role of the normal index
        FundamentalFormSample s(m, n);
        s.enable_gradient();
        const double* g = gs.g_at(node);
        const double* A = gs.A_at(node);
        const double* DA = gs.grad_A.data() + node * m * mm * n;
        for (int i = 0; i < mm; ++i) s.g[i] = g[i];
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < i; ++j) s.g_at(i, j) = s.g_at(j, i) = 0.5 * (g[i * m + j] + g[j * m + i]);
        for (int al = 0; al < n; ++al)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    s.A_at(al, i, j) = 0.5 * (A[(i * m + j) * n + al] + A[(j * m + i) * n + al]);
                    for (int l = 0; l < m; ++l)
                        s.dA_at(l, al, i, j) = 0.5 * (DA[((l * m + i) * m + j) * n + al] + DA[((l * m + j) * m + i) * n + al]);
                }
        const auto ids = check_pointwise_identities(s);
        // 8 RRR - 2 Riem.R.R + 8 c.R.R + 4 b.R.R
        out.reaction[node] = 8.0 * ids[2].lhs - 2.0 * ids[0].lhs + 8.0 * ids[1].lhs + 4.0 * ids[3].lhs;
        out.grad_Rperp2[node] = gradient_values(s).residuals[0].lhs;

        const DerivedInvariants d = derive_invariants(s);
        const double* gi = gs.ginv_at(node);
        // U^a_k{}^i{}_p = g^{ii'} grad_k A^a_{i'p},  Z^{b k j p} fully raised
        std::vector<double> U(n * m * mm, 0.0), Z(n * m * mm, 0.0), T(n * m * mm, 0.0);
        auto at = [&](int a, int k, int i, int p) { return ((a * m + k) * m + i) * m + p; };
        for (int a = 0; a < n; ++a)
            for (int k = 0; k < m; ++k)
                for (int i = 0; i < m; ++i)
                    for (int p = 0; p < m; ++p)
                        for (int q = 0; q < m; ++q) U[at(a, k, i, p)] += gi[i * m + q] * s.dA_at(k, a, q, p);
        for (int a = 0; a < n; ++a)
            for (int k = 0; k < m; ++k)
                for (int i = 0; i < m; ++i)
                    for (int p = 0; p < m; ++p)
                        for (int q = 0; q < m; ++q) T[at(a, k, i, p)] += gi[p * m + q] * U[at(a, k, i, q)];
        for (int a = 0; a < n; ++a)
            for (int k = 0; k < m; ++k)
                for (int i = 0; i < m; ++i)
                    for (int p = 0; p < m; ++p)
                        for (int q = 0; q < m; ++q) Z[at(a, k, i, p)] += gi[k * m + q] * T[at(a, q, i, p)];
        double cross = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        const double r = d.Rperp_at(a, b, i, j);
                        if (r == 0.0) continue;
                        double s2 = 0.0;
                        for (int k = 0; k < m; ++k)
                            for (int p = 0; p < m; ++p) s2 += U[at(a, k, i, p)] * Z[at(b, k, j, p)];
                        cross += r * s2;
                    }
        out.cross[node] = cross;
    });
    return out;
}

namespace {

double sup_diff(const std::vector<double>& lhs, const std::vector<double>& rhs) {
    double s = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) s = std::max(s, std::abs(lhs[i] - rhs[i]));
    return s;
}

std::vector<double> central(const std::vector<double>& a, const std::vector<double>& c, double dt) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (c[i] - a[i]) / (2.0 * dt);
    return out;
}

}  // namespace

EvolutionResidual evolution_residuals(const Snapshot& s0, const Snapshot& s1, const Snapshot& s2,
                                      const EvolutionOptions& opt) {
    const double d1 = s1.grid.time - s0.grid.time, d2 = s2.grid.time - s1.grid.time;
    if (!(d1 > 0.0) || std::abs(d1 - d2) > 1e-9 * d1)
        throw std::invalid_argument("evolution_residuals: snapshots are not uniformly spaced");
    if (!s0.geometry || !s1.geometry || !s2.geometry)
        throw std::invalid_argument("evolution_residuals: snapshots without geometry");
    const GeometryState& g0 = *s0.geometry;
    const GeometryState& gs = *s1.geometry;
    const GeometryState& g2 = *s2.geometry;
    if (gs.grad_A.empty()) throw std::invalid_argument("evolution_residuals: middle snapshot lacks derivative data");
    const double dt = 0.5 * (d1 + d2);
    const int m = gs.m, n = gs.n, mm = m * m;
    const std::size_t N = gs.nodes;
    const Exec exec = opt.exec;

    EvolutionResidual r;
    r.t = gs.time;
    r.dt = dt;

    {
        const auto dg = central(g0.g, g2.g, dt);
        std::vector<double> rhs(gs.a.size());
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -2.0 * gs.a[i];
        r.metric = sup_diff(dg, rhs);
        const auto dmu = central(g0.sqrt_det, g2.sqrt_det, dt);
        std::vector<double> vr(N);
        for (std::size_t i = 0; i < N; ++i) vr[i] = -gs.H2[i] * gs.sqrt_det[i];
        r.volume = sup_diff(dmu, vr);
    }

    // |H|^2
    {
        Differencer diff(gs.domain, gs.order);
        const auto lap = laplacian(gs, gs.H2, exec);
        std::vector<double> rhs(N);
        for_each_node(exec, N, [&](std::size_t node) {
            const double* gi = gs.ginv_at(node);
            const double* dF = gs.dF_at(node);
            const double* a = gs.a.data() + node * mm;
            double dH[3 * 16];
            for (int i = 0; i < m; ++i) diff.first(gs.H.data(), n, i, node, dH + i * n);
            // X_i = d_i H + a_i^l F_l
            std::vector<double> X(m * n);
            for (int i = 0; i < m; ++i)
                for (int al = 0; al < n; ++al) {
                    double v = dH[i * n + al];
                    for (int l = 0; l < m; ++l)
                        for (int p = 0; p < m; ++p) v += a[i * m + p] * gi[p * m + l] * dF[l * n + al];
                    X[i * n + al] = v;
                }
            double x2 = 0.0, a2 = 0.0;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    double d = 0.0;
                    for (int al = 0; al < n; ++al) d += X[i * n + al] * X[j * n + al];
                    x2 += gi[i * m + j] * d;
                    for (int p = 0; p < m; ++p)
                        for (int q = 0; q < m; ++q) a2 += gi[i * m + p] * gi[j * m + q] * a[i * m + j] * a[p * m + q];
                }
            rhs[node] = lap[node] - 2.0 * x2 + 2.0 * a2;
        });
        r.H2 = sup_diff(central(g0.H2, g2.H2, dt), rhs);
    }

    // |A|^2
    {
        const auto lap = laplacian(gs, gs.A2, exec);
        std::vector<double> rhs(N);
        for_each_node(exec, N, [&](std::size_t node) {
            const double* gi = gs.ginv_at(node);
            const double* A = gs.A_at(node);
            // T^{ab} = A^a_{ij} A^{b ij}, ambient a, b
            double quartic = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    double t = 0.0;
                    for (int i = 0; i < m; ++i)
                        for (int j = 0; j < m; ++j)
                            for (int p = 0; p < m; ++p)
                                for (int q = 0; q < m; ++q)
                                    t += gi[i * m + p] * gi[j * m + q] * A[(i * m + j) * n + a] * A[(p * m + q) * n + b];
                    quartic += t * t;
                }
            rhs[node] = lap[node] - 2.0 * gs.grad_perp_A2[node] + 2.0 * quartic + 2.0 * gs.Rperp2[node];
        });
        r.A2 = sup_diff(central(g0.A2, g2.A2, dt), rhs);
    }

    // |Rperp|^2
    {
        const auto lap = laplacian(gs, gs.Rperp2, exec);
        const RperpReaction terms = rperp_terms(gs, exec);
        std::vector<double> stated(N), corrected(N);
        for (std::size_t node = 0; node < N; ++node) {
            stated[node] = lap[node] - 2.0 * terms.grad_Rperp2[node] + terms.reaction[node];
            corrected[node] = stated[node] - 8.0 * terms.cross[node];
        }
        const auto lhs = central(g0.Rperp2, g2.Rperp2, dt);
        r.Rperp2_stated = sup_diff(lhs, stated);
        r.Rperp2_corrected = sup_diff(lhs, corrected);
    }

    // w, only under the flat normal bundle hypothesis
    if (opt.omega && sup_norm(gs.Rperp2) <= opt.flat_threshold) {
        const GraphW w0 = graph_w(g0, *opt.omega), w1 = graph_w(gs, *opt.omega), w2 = graph_w(g2, *opt.omega);
        const auto lap = laplacian(gs, w1.w, exec);
        std::vector<double> rhs(N);
        for (std::size_t node = 0; node < N; ++node) rhs[node] = lap[node] + w1.w[node] * gs.A2[node];
        r.w = sup_diff(central(w0.w, w2.w, dt), rhs);
    }
    return r;
}

}  // namespace mcf
