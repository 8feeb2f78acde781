#include "mcf/structure_checks.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mcf {

namespace {

void raise_max(double& acc, double v) { acc = std::max(acc, std::abs(v)); }

}  // namespace

StructureResiduals check_structure_equations(const GeometryState& gs, Exec exec) {
    const int m = gs.m, n = gs.n, mm = m * m, m3 = mm * m;
    const std::size_t N = gs.nodes;

    Differencer diff(gs.domain, gs.order);
    std::vector<double> dH(N * m * n);
    for_each_node(exec, N, [&](std::size_t node) {
        for (int l = 0; l < m; ++l) diff.first(gs.H.data(), n, l, node, dH.data() + (node * m + l) * n);
    });
    const auto ddA = covariant_gradient(gs, gs.grad_A, 3, n, exec);
    const auto ddH = covariant_gradient(gs, dH, 1, n, exec);
    const auto dRic = covariant_gradient(gs, gs.ricci, 2, 1, exec);

    std::vector<StructureResiduals> per(N);
    for_each_node(exec, N, [&](std::size_t node) {
        StructureResiduals& r = per[node];
        const double* gi = gs.ginv_at(node);
        const double* dF = gs.dF_at(node);
        const double* A = gs.A_at(node);
        const double* Rl = gs.riemann.data() + node * mm * mm;
        const double* Ric = gs.ricci.data() + node * mm;
        const double* DA = gs.grad_A.data() + node * m3 * n;
        const double* DDA = ddA.data() + node * mm * mm * n;
        const double* DH = dH.data() + node * m * n;
        const double* DDH = ddH.data() + node * mm * n;
        const double* DR = dRic.data() + node * m3;
        auto Av = [&](int i, int j, int al) { return A[(i * m + j) * n + al]; };
        auto dot = [&](int i, int j, int p, int q) {
            double s = 0.0;
            for (int al = 0; al < n; ++al) s += Av(i, j, al) * Av(p, q, al);
            return s;
        };
        auto Rlow = [&](int i, int j, int k, int l) { return Rl[((i * m + j) * m + k) * m + l]; };
        auto Rup = [&](int p, int j, int k, int l) {  // R^p_{jkl}
            double s = 0.0;
            for (int q = 0; q < m; ++q) s += gi[p * m + q] * Rlow(q, j, k, l);
            return s;
        };
        auto RicUp = [&](int p, int l) {  // R^p_l
            double s = 0.0;
            for (int q = 0; q < m; ++q) s += gi[p * m + q] * Ric[q * m + l];
            return s;
        };
        // F_l X^l for a Latin upper-index vector X given with a lower index
        auto tangent = [&](const std::vector<double>& low, int al) {
            double s = 0.0;
            for (int p = 0; p < m; ++p)
                for (int q = 0; q < m; ++q) s += dF[p * n + al] * gi[p * m + q] * low[q];
            return s;
        };

        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) {
                    double s = 0.0;
                    for (int al = 0; al < n; ++al) s += Av(i, j, al) * dF[k * n + al];
                    raise_max(r.normality, s);
                }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l)
                        raise_max(r.gauss, Rlow(i, j, k, l) - (dot(i, k, j, l) - dot(i, l, j, k)));

        // Codazzi: grad_i A_jk - grad_j A_ik - F_l R^l_{kji}
        std::vector<double> low(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) {
                    for (int q = 0; q < m; ++q) low[q] = Rlow(q, k, j, i);
                    for (int al = 0; al < n; ++al)
                        raise_max(r.codazzi, DA[((i * m + j) * m + k) * n + al] - DA[((j * m + i) * m + k) * n + al] -
                                                 tangent(low, al));
                }
        // contracted: g^{ik} grad_i A_jk - grad_j H - F_l R^l_j
        for (int j = 0; j < m; ++j) {
            for (int q = 0; q < m; ++q) low[q] = Ric[q * m + j];
            for (int al = 0; al < n; ++al) {
                double s = 0.0;
                for (int i = 0; i < m; ++i)
                    for (int k = 0; k < m; ++k) s += gi[i * m + k] * DA[((i * m + j) * m + k) * n + al];
                raise_max(r.contracted_codazzi, s - DH[j * n + al] - tangent(low, al));
            }
        }
        auto dda = [&](int i, int j, int l, int k, int al) { return DDA[(((i * m + j) * m + l) * m + k) * n + al]; };
        // interchange on A
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int l = 0; l < m; ++l)
                    for (int k = 0; k < m; ++k)
                        for (int al = 0; al < n; ++al) {
                            double v = dda(i, j, l, k, al) - dda(j, i, l, k, al);
                            for (int p = 0; p < m; ++p) v += Rup(p, l, i, j) * Av(p, k, al) + Rup(p, k, i, j) * Av(l, p, al);
                            raise_max(r.interchange, v);
                        }
        // Simons
        for (int l = 0; l < m; ++l)
            for (int k = 0; k < m; ++k) {
                for (int p = 0; p < m; ++p)
                    low[p] = DR[(l * m + p) * m + k] + DR[(k * m + p) * m + l] - DR[(p * m + l) * m + k];
                for (int al = 0; al < n; ++al) {
                    double v = 0.0;
                    for (int i = 0; i < m; ++i)
                        for (int j = 0; j < m; ++j) v += gi[i * m + j] * dda(i, j, l, k, al);
                    v -= DDH[(l * m + k) * n + al];
                    for (int p = 0; p < m; ++p) v -= RicUp(p, l) * Av(p, k, al) + RicUp(p, k) * Av(p, l, al);
                    for (int j = 0; j < m; ++j)
                        for (int p = 0; p < m; ++p) {
                            double w = 0.0;  // R_l{}^j{}_k{}^p
                            for (int s = 0; s < m; ++s)
                                for (int t = 0; t < m; ++t) w += gi[j * m + s] * gi[p * m + t] * Rlow(l, s, k, t);
                            v += 2.0 * Av(j, p, al) * w;
                        }
                    v -= tangent(low, al);
                    raise_max(r.simons, v);
                }
            }
        raise_max(r.scalar_trace, gs.scalar[node] - (gs.H2[node] - gs.A2[node]));
    });

    StructureResiduals out;
    for (const auto& r : per) {
        out.normality = std::max(out.normality, r.normality);
        out.gauss = std::max(out.gauss, r.gauss);
        out.codazzi = std::max(out.codazzi, r.codazzi);
        out.contracted_codazzi = std::max(out.contracted_codazzi, r.contracted_codazzi);
        out.interchange = std::max(out.interchange, r.interchange);
        out.simons = std::max(out.simons, r.simons);
        out.scalar_trace = std::max(out.scalar_trace, r.scalar_trace);
    }
    return out;
}

AlgebraicChecks check_algebraic(const GeometryState& gs) {
    const int m = gs.m, n = gs.n, mm = m * m;
    AlgebraicChecks out;
    std::vector<double> PA(mm * n);
    for (std::size_t node = 0; node < gs.nodes; ++node) {
        const double* gi = gs.ginv_at(node);
        double ta = 0.0, tb = 0.0;
        for (int i = 0; i < mm; ++i) {
            ta += gi[i] * gs.a[node * mm + i];
            tb += gi[i] * gs.b[node * mm + i];
        }
        out.trace_a = std::max(out.trace_a, std::abs(ta - gs.H2[node]) / (1.0 + gs.H2[node]));
        out.trace_b = std::max(out.trace_b, std::abs(tb - gs.A2[node]) / (1.0 + gs.A2[node]));

        // ambient route: bm = g^{-1} b, cm_{al be} = g^{-1} A_al g^{-1} A_be with P_N A
        const double* A = gs.A_at(node);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                std::vector<double> sym(n);
                for (int al = 0; al < n; ++al) sym[al] = 0.5 * (A[(i * m + j) * n + al] + A[(j * m + i) * n + al]);
                project_normal(gs, node, sym.data(), PA.data() + (i * m + j) * n);
            }
        // M_al = g^{-1} A^al as (al, i, j)
        std::vector<double> M(n * mm, 0.0);
        for (int al = 0; al < n; ++al)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    for (int p = 0; p < m; ++p) M[(al * m + i) * m + j] += gi[i * m + p] * PA[(p * m + j) * n + al];
        std::vector<double> B(mm, 0.0);
        double cc = 0.0;
        std::vector<double> C(mm);
        for (int al = 0; al < n; ++al)
            for (int be = 0; be < n; ++be) {
                std::fill(C.begin(), C.end(), 0.0);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        for (int p = 0; p < m; ++p) C[i * m + j] += M[(al * m + i) * m + p] * M[(be * m + p) * m + j];
                if (al == be)
                    for (int i = 0; i < mm; ++i) B[i] += C[i];
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) cc += C[i * m + j] * C[j * m + i];
            }
        double b2 = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) b2 += B[i * m + j] * B[j * m + i];
        const double ambient = 2.0 * b2 - 2.0 * cc;
        const double framed = gs.Rperp2[node];
        out.frame_independence =
            std::max(out.frame_independence, std::abs(ambient - framed) / (1.0 + std::max(std::abs(ambient), std::abs(framed))));
    }
    return out;
}

}  // namespace mcf
