#include "mcf/geometry.hpp"

#include "mcf/tensor_algebra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mcf {

namespace {

int ipow(int b, int e) {
    int r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// g^{..} contraction of two tensors with `rank` lower indices and ncomp flat components.
double full_inner(const double* X, const double* Y, int rank, int ncomp, const double* gi, int m) {
    const int count = ipow(m, rank);
    double sum = 0.0;
    for (int u = 0; u < count; ++u)
        for (int v = 0; v < count; ++v) {
            double w = 1.0;
            int uu = u, vv = v;
            for (int s = 0; s < rank; ++s) {
                w *= gi[(uu % m) * m + (vv % m)];
                uu /= m;
                vv /= m;
            }
            if (w == 0.0) continue;
            double dot = 0.0;
            for (int c = 0; c < ncomp; ++c) dot += X[u * ncomp + c] * Y[v * ncomp + c];
            sum += w * dot;
        }
    return sum;
}

}  // namespace

double GeometryState::area() const {
    double cell = 1.0;
    for (int d = 0; d < m; ++d) cell *= domain.spacing(d);
    double s = 0.0;
    for (double v : sqrt_det) s += v;
    return s * cell;
}

double sup_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

void project_normal(const GeometryState& gs, std::size_t node, const double* v, double* out) {
    const int m = gs.m, n = gs.n;
    const double* dF = gs.dF_at(node);
    const double* gi = gs.ginv_at(node);
    std::vector<double> t(m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int al = 0; al < n; ++al) t[i] += dF[i * n + al] * v[al];
    for (int al = 0; al < n; ++al) out[al] = v[al];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double w = gi[i * m + j] * t[j];
            for (int al = 0; al < n; ++al) out[al] -= w * dF[i * n + al];
        }
}

std::vector<double> covariant_gradient(const GeometryState& gs, const std::vector<double>& field, int rank, int ncomp,
                                       Exec exec) {
    const int m = gs.m;
    const int block = ipow(m, rank) * ncomp;
    if (field.size() != gs.nodes * static_cast<std::size_t>(block))
        throw std::invalid_argument("covariant_gradient: field size does not match rank/ncomp");
    Differencer diff(gs.domain, gs.order);
    std::vector<double> out(gs.nodes * m * block);
    for_each_node(exec, gs.nodes, [&](std::size_t node) {
        const double* T = field.data() + node * block;
        const double* Gam = gs.christoffel.data() + node * m * m * m;
        for (int l = 0; l < m; ++l) {
            double* o = out.data() + (node * m + l) * block;
            diff.first(field.data(), block, l, node, o);
            const int count = ipow(m, rank);
            for (int u = 0; u < count; ++u) {
                int scale = 1;
                for (int s = 0; s < rank; ++s) {
                    const int is = (u / scale) % m;
                    const int base = u - is * scale;
                    for (int p = 0; p < m; ++p) {
                        const double G = Gam[(p * m + l) * m + is];
                        if (G == 0.0) continue;
                        const double* Tp = T + (base + p * scale) * ncomp;
                        for (int c = 0; c < ncomp; ++c) o[u * ncomp + c] -= G * Tp[c];
                    }
                    scale *= m;
                }
            }
        }
    });
    return out;
}

std::vector<double> laplacian(const GeometryState& gs, const std::vector<double>& f, Exec exec) {
    const int m = gs.m;
    const auto df = covariant_gradient(gs, f, 0, 1, exec);
    const auto ddf = covariant_gradient(gs, df, 1, 1, exec);
    std::vector<double> out(gs.nodes, 0.0);
    for_each_node(exec, gs.nodes, [&](std::size_t node) {
        const double* gi = gs.ginv_at(node);
        double s = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) s += gi[i * m + j] * ddf[node * m * m + i * m + j];
        out[node] = s;
    });
    return out;
}

GeometryState build_geometry(const ImmersionGrid& im, const GeometryOptions& opt) {
    im.domain.validate(im.n);
    const int m = im.domain.m, n = im.n;
    if (n <= m) throw std::invalid_argument("build_geometry: ambient dimension must exceed m");
    if (im.F.size() != im.node_count() * n) throw std::invalid_argument("build_geometry: F has wrong size");

    GeometryState gs;
    gs.domain = im.domain;
    gs.m = m;
    gs.n = n;
    gs.k = n - m;
    gs.order = opt.order;
    gs.time = im.time;
    gs.nodes = im.node_count();
    gs.F = im.F;
    const std::size_t N = gs.nodes;
    const int k = gs.k, mm = m * m;
    const Differencer diff(im.domain, opt.order);
    const Exec exec = opt.exec;

    // Pass 1: tangent vectors, metric.
    gs.dF.assign(N * m * n, 0.0);
    gs.g.assign(N * mm, 0.0);
    gs.ginv.assign(N * mm, 0.0);
    gs.sqrt_det.assign(N, 0.0);
    std::vector<double> Fdd(N * mm * n, 0.0);
    for_each_node(exec, N, [&](std::size_t node) {
        double* dF = gs.dF.data() + node * m * n;
        for (int i = 0; i < m; ++i) {
            diff.first(im.F.data(), n, i, node, dF + i * n, true);
            diff.second(im.F.data(), n, i, node, Fdd.data() + (node * mm + i * m + i) * n, true);
        }
        Eigen::MatrixXd g(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double s = 0.0;
                for (int al = 0; al < n; ++al) s += dF[i * n + al] * dF[j * n + al];
                g(i, j) = s;
            }
        const double det = g.determinant();
        if (!(det >= opt.degeneracy_threshold)) throw ImmersionDegeneracy(node, det, "metric construction");
        const Eigen::MatrixXd gi = g.inverse();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                gs.g[node * mm + i * m + j] = g(i, j);
                gs.ginv[node * mm + i * m + j] = 0.5 * (gi(i, j) + gi(j, i));
            }
        gs.sqrt_det[node] = std::sqrt(det);
    });
    if (m > 1) {
        for_each_node(exec, N, [&](std::size_t node) {
            std::vector<double> dj(m * n), di(m * n);
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j) {
                    diff.first(gs.dF.data(), m * n, j, node, dj.data());
                    diff.first(gs.dF.data(), m * n, i, node, di.data());
                    for (int al = 0; al < n; ++al) {
                        const double v = 0.5 * (dj[i * n + al] + di[j * n + al]);
                        Fdd[(node * mm + i * m + j) * n + al] = v;
                        Fdd[(node * mm + j * m + i) * n + al] = v;
                    }
                }
        });
    }

    // Pass 2: connection, second fundamental form, normal data.
    gs.christoffel.assign(N * m * mm, 0.0);
    gs.A.assign(N * mm * n, 0.0);
    gs.H.assign(N * n, 0.0);
    gs.frame.assign(N * k * n, 0.0);
    gs.A_normal.assign(N * k * mm, 0.0);
    gs.Rperp.assign(N * k * k * mm, 0.0);
    gs.c.assign(N * k * k * mm, 0.0);
    gs.a.assign(N * mm, 0.0);
    gs.b.assign(N * mm, 0.0);
    gs.A2.assign(N, 0.0);
    gs.H2.assign(N, 0.0);
    gs.Rperp2.assign(N, 0.0);
    for_each_node(exec, N, [&](std::size_t node) {
        std::vector<double> dg(m * mm);
        for (int l = 0; l < m; ++l) diff.first(gs.g.data(), mm, l, node, dg.data() + l * mm);
        const double* gi = gs.ginv_at(node);
        double* Gam = gs.christoffel.data() + node * m * mm;
        for (int p = 0; p < m; ++p)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    double s = 0.0;
                    for (int q = 0; q < m; ++q)
                        s += gi[p * m + q] * (dg[i * mm + q * m + j] + dg[j * mm + q * m + i] - dg[q * mm + i * m + j]);
                    Gam[(p * m + i) * m + j] = 0.5 * s;
                }
        const double* dF = gs.dF_at(node);
        double* A = gs.A.data() + node * mm * n;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int al = 0; al < n; ++al) {
                    double v = Fdd[(node * mm + i * m + j) * n + al];
                    for (int p = 0; p < m; ++p) v -= Gam[(p * m + i) * m + j] * dF[p * n + al];
                    A[(i * m + j) * n + al] = v;
                }
        double* H = gs.H.data() + node * n;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int al = 0; al < n; ++al) H[al] += gi[i * m + j] * A[(i * m + j) * n + al];
        double h2 = 0.0;
        for (int al = 0; al < n; ++al) h2 += H[al] * H[al];
        gs.H2[node] = h2;

        // a_ij = <H, A_ij>, b_ij = g^{pq} <A_ip, A_qj>, |A|^2.
        double* a = gs.a.data() + node * mm;
        double* b = gs.b.data() + node * mm;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double s = 0.0;
                for (int al = 0; al < n; ++al) s += H[al] * A[(i * m + j) * n + al];
                a[i * m + j] = s;
                double t = 0.0;
                for (int p = 0; p < m; ++p)
                    for (int q = 0; q < m; ++q) {
                        double d = 0.0;
                        for (int al = 0; al < n; ++al) d += A[(i * m + p) * n + al] * A[(q * m + j) * n + al];
                        t += gi[p * m + q] * d;
                    }
                b[i * m + j] = t;
            }
        double A2 = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) A2 += gi[i * m + j] * b[j * m + i];
        gs.A2[node] = A2;

        // Normal frame: project the ambient axes, least aligned first, then
        // modified Gram-Schmidt.
        std::vector<std::vector<double>> cand(n, std::vector<double>(n, 0.0));
        std::vector<double> norm(n, 0.0);
        for (int e = 0; e < n; ++e) {
            std::vector<double> ax(n, 0.0);
            ax[e] = 1.0;
            project_normal(gs, node, ax.data(), cand[e].data());
            for (double v : cand[e]) norm[e] += v * v;
        }
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return norm[x] > norm[y]; });
        double* fr = gs.frame.data() + node * k * n;
        int found = 0;
        for (int e : order) {
            if (found == k) break;
            std::vector<double> v = cand[e];
            for (int pass = 0; pass < 2; ++pass)
                for (int f = 0; f < found; ++f) {
                    double d = 0.0;
                    for (int al = 0; al < n; ++al) d += v[al] * fr[f * n + al];
                    for (int al = 0; al < n; ++al) v[al] -= d * fr[f * n + al];
                }
            // keep the frame inside the normal space after Gram-Schmidt round-off
            std::vector<double> w(n);
            project_normal(gs, node, v.data(), w.data());
            double len = 0.0;
            for (double x : w) len += x * x;
            len = std::sqrt(len);
            if (len < 1e-6) continue;
            for (int al = 0; al < n; ++al) fr[found * n + al] = w[al] / len;
            ++found;
        }
        if (found < k) throw ImmersionDegeneracy(node, 0.0, "normal frame construction");

        FundamentalFormSample s(m, k);
        for (int i = 0; i < mm; ++i) s.g[i] = gs.g[node * mm + i];
        for (int x = 0; x < k; ++x)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    double v = 0.0;
                    for (int al = 0; al < n; ++al) v += fr[x * n + al] * 0.5 * (A[(i * m + j) * n + al] + A[(j * m + i) * n + al]);
                    s.A_at(x, i, j) = v;
                    gs.A_normal[node * k * mm + (x * m + i) * m + j] = v;
                }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < i; ++j) {
                const double v = 0.5 * (s.g_at(i, j) + s.g_at(j, i));
                s.g_at(i, j) = s.g_at(j, i) = v;
            }
        const DerivedInvariants d = derive_invariants(s);
        std::copy(d.Rperp.begin(), d.Rperp.end(), gs.Rperp.begin() + node * k * k * mm);
        std::copy(d.c.begin(), d.c.end(), gs.c.begin() + node * k * k * mm);
        gs.Rperp2[node] = d.Rperp2;
    });

    if (opt.first_pass_only) return gs;

    // Pass 3: derivatives of A, curvature of the induced metric.
    gs.grad_A = covariant_gradient(gs, gs.A, 2, n, exec);
    std::vector<double> b_mixed(N * mm, 0.0);
    for (std::size_t node = 0; node < N; ++node) {
        const double* gi = gs.ginv_at(node);
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q) {
                double s = 0.0;
                for (int r = 0; r < m; ++r) s += gi[p * m + r] * gs.b[node * mm + r * m + q];
                b_mixed[node * mm + p * m + q] = s;
            }
    }
    gs.riemann.assign(N * mm * mm, 0.0);
    gs.ricci.assign(N * mm, 0.0);
    gs.scalar.assign(N, 0.0);
    gs.grad_perp_A.assign(N * m * mm * n, 0.0);
    gs.grad_A2.assign(N, 0.0);
    gs.grad_perp_A2.assign(N, 0.0);
    gs.lambda.assign(N * m * mm, 0.0);
    for_each_node(exec, N, [&](std::size_t node) {
        const int m3 = m * mm;
        std::vector<double> dGam(m * m3), db(m * mm);
        for (int l = 0; l < m; ++l) {
            diff.first(gs.christoffel.data(), m3, l, node, dGam.data() + l * m3);
            diff.first(b_mixed.data(), mm, l, node, db.data() + l * mm);
        }
        const double* Gam = gs.christoffel.data() + node * m3;
        const double* g = gs.g_at(node);
        const double* gi = gs.ginv_at(node);
        auto G = [&](int p, int i, int j) { return Gam[(p * m + i) * m + j]; };
        auto dG = [&](int l, int p, int i, int j) { return dGam[l * m3 + (p * m + i) * m + j]; };
        // R^p_{jkl} = d_k G^p_{lj} - d_l G^p_{kj} + G^p_{kq} G^q_{lj} - G^p_{lq} G^q_{kj}
        std::vector<double> Rup(mm * mm, 0.0);
        for (int p = 0; p < m; ++p)
            for (int j = 0; j < m; ++j)
                for (int kk = 0; kk < m; ++kk)
                    for (int l = 0; l < m; ++l) {
                        double v = dG(kk, p, l, j) - dG(l, p, kk, j);
                        for (int q = 0; q < m; ++q) v += G(p, kk, q) * G(q, l, j) - G(p, l, q) * G(q, kk, j);
                        Rup[((p * m + j) * m + kk) * m + l] = v;
                    }
        double* Rl = gs.riemann.data() + node * mm * mm;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int kk = 0; kk < m; ++kk)
                    for (int l = 0; l < m; ++l) {
                        double v = 0.0;
                        for (int p = 0; p < m; ++p) v += g[i * m + p] * Rup[((p * m + j) * m + kk) * m + l];
                        Rl[((i * m + j) * m + kk) * m + l] = v;
                    }
        double* Ric = gs.ricci.data() + node * mm;
        double sc = 0.0;
        for (int l = 0; l < m; ++l)
            for (int j = 0; j < m; ++j) {
                double v = 0.0;
                for (int i = 0; i < m; ++i)
                    for (int kk = 0; kk < m; ++kk) v += gi[i * m + kk] * Rl[((i * m + l) * m + kk) * m + j];
                Ric[l * m + j] = v;
            }
        for (int l = 0; l < m; ++l)
            for (int j = 0; j < m; ++j) sc += gi[l * m + j] * Ric[l * m + j];
        gs.scalar[node] = sc;

        // lambda_i{}^p{}_k = nabla_i b^p_k
        const double* bm = b_mixed.data() + node * mm;
        for (int i = 0; i < m; ++i)
            for (int p = 0; p < m; ++p)
                for (int kk = 0; kk < m; ++kk) {
                    double v = db[i * mm + p * m + kk];
                    for (int q = 0; q < m; ++q) v += G(p, i, q) * bm[q * m + kk] - G(q, i, kk) * bm[p * m + q];
                    gs.lambda[node * m3 + (i * m + p) * m + kk] = v;
                }

        // grad-perp A = grad A + <A_ij, A_lp> g^{pq} F_q
        const double* A = gs.A_at(node);
        const double* dF = gs.dF_at(node);
        const double* DA = gs.grad_A.data() + node * m * mm * n;
        double* DP = gs.grad_perp_A.data() + node * m * mm * n;
        for (int l = 0; l < m; ++l)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    double* o = DP + ((l * m + i) * m + j) * n;
                    const double* in = DA + ((l * m + i) * m + j) * n;
                    for (int al = 0; al < n; ++al) o[al] = in[al];
                    for (int p = 0; p < m; ++p) {
                        double d = 0.0;
                        for (int al = 0; al < n; ++al) d += A[(i * m + j) * n + al] * A[(l * m + p) * n + al];
                        for (int q = 0; q < m; ++q) {
                            const double w = d * gi[p * m + q];
                            for (int al = 0; al < n; ++al) o[al] += w * dF[q * n + al];
                        }
                    }
                }
        gs.grad_A2[node] = full_inner(DA, DA, 3, n, gi, m);
        gs.grad_perp_A2[node] = full_inner(DP, DP, 3, n, gi, m);
    });
    return gs;
}

}  // namespace mcf
