#pragma once

// Brute-force loop evaluations used as independent references. Everything is
// transported to an orthonormal tangent frame (g = L L^T, P = L^{-T}) so the
// contractions below are plain index sums.

#include "mcf/tensor_algebra.hpp"

#include <cmath>
#include <vector>

namespace oracle {

struct Frame {
    int m, k;
    std::vector<double> A;  // (a,i,j)
    std::vector<double> D;  // (l,a,i,j)
    double& a(int x, int i, int j) { return A[(x * m + i) * m + j]; }
    double a(int x, int i, int j) const { return A[(x * m + i) * m + j]; }
    double d(int l, int x, int i, int j) const { return D[((l * k + x) * m + i) * m + j]; }
};

inline std::vector<double> cholesky_inverse_transpose(const mcf::FundamentalFormSample& s) {
    const int m = s.m;
    std::vector<double> L(m * m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
            double sum = s.g_at(i, j);
            for (int p = 0; p < j; ++p) sum -= L[i * m + p] * L[j * m + p];
            L[i * m + j] = (i == j) ? std::sqrt(sum) : sum / L[j * m + j];
        }
    // Linv by forward substitution, then P = Linv^T.
    std::vector<double> Li(m * m, 0.0);
    for (int c = 0; c < m; ++c)
        for (int i = 0; i < m; ++i) {
            double sum = (i == c) ? 1.0 : 0.0;
            for (int p = 0; p < i; ++p) sum -= L[i * m + p] * Li[p * m + c];
            Li[i * m + c] = sum / L[i * m + i];
        }
    std::vector<double> P(m * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) P[i * m + j] = Li[j * m + i];
    return P;
}

inline Frame to_frame(const mcf::FundamentalFormSample& s) {
    const int m = s.m, k = s.k;
    const auto P = cholesky_inverse_transpose(s);
    Frame f{m, k, std::vector<double>(k * m * m, 0.0), {}};
    for (int x = 0; x < k; ++x)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double v = 0;
                for (int p = 0; p < m; ++p)
                    for (int q = 0; q < m; ++q) v += P[p * m + i] * P[q * m + j] * s.A_at(x, p, q);
                f.a(x, i, j) = v;
            }
    if (s.has_gradient()) {
        f.D.assign(m * k * m * m, 0.0);
        for (int l = 0; l < m; ++l)
            for (int x = 0; x < k; ++x)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        double v = 0;
                        for (int r = 0; r < m; ++r)
                            for (int p = 0; p < m; ++p)
                                for (int q = 0; q < m; ++q)
                                    v += P[r * m + l] * P[p * m + i] * P[q * m + j] * s.dA_at(r, x, p, q);
                        f.D[((l * k + x) * m + i) * m + j] = v;
                    }
    }
    return f;
}

struct Loops {
    int m, k;
    std::vector<double> b, c, R, Riem;
    Frame f;

    explicit Loops(const mcf::FundamentalFormSample& s) : m(s.m), k(s.k), f(to_frame(s)) {
        b.assign(m * m, 0.0);
        c.assign(k * k * m * m, 0.0);
        R.assign(k * k * m * m, 0.0);
        Riem.assign(m * m * m * m, 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int x = 0; x < k; ++x)
                    for (int p = 0; p < m; ++p) B(i, j) += f.a(x, i, p) * f.a(x, p, j);
        for (int x = 0; x < k; ++x)
            for (int y = 0; y < k; ++y)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j)
                        for (int p = 0; p < m; ++p) C(x, y, i, j) += f.a(x, i, p) * f.a(y, p, j);
        for (int x = 0; x < k; ++x)
            for (int y = 0; y < k; ++y)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) Rp(x, y, i, j) = C(x, y, i, j) - C(x, y, j, i);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int p = 0; p < m; ++p)
                    for (int q = 0; q < m; ++q)
                        for (int x = 0; x < k; ++x)
                            Rm(i, j, p, q) += f.a(x, i, p) * f.a(x, j, q) - f.a(x, i, q) * f.a(x, j, p);
    }

    double& B(int i, int j) { return b[i * m + j]; }
    double& C(int x, int y, int i, int j) { return c[((x * k + y) * m + i) * m + j]; }
    double& Rp(int x, int y, int i, int j) { return R[((x * k + y) * m + i) * m + j]; }
    double& Rm(int i, int j, int p, int q) { return Riem[((i * m + j) * m + p) * m + q]; }
    double T(int x, int y) {
        double t = 0;
        for (int p = 0; p < m; ++p) t += C(x, y, p, p);
        return t;
    }

    double A2() {
        double s = 0;
        for (double v : f.A) s += v * v;
        return s;
    }
    double Rperp2() {
        double s = 0;
        for (double v : R) s += v * v;
        return s;
    }
    double b2() {
        double s = 0;
        for (double v : b) s += v * v;
        return s;
    }
    double cc() {
        double s = 0;
        for (int x = 0; x < k; ++x)
            for (int y = 0; y < k; ++y)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) s += C(x, y, i, j) * C(y, x, i, j);
        return s;
    }

    std::vector<double> gammas() {
        std::vector<double> G(7, 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int p = 0; p < m; ++p) G[0] += B(i, j) * B(p, i) * B(j, p);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int mm = 0; mm < m; ++mm)
                    for (int kk = 0; kk < m; ++kk)
                        for (int x = 0; x < k; ++x) G[1] += B(i, j) * B(mm, kk) * f.a(x, kk, j) * f.a(x, mm, i);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int x = 0; x < k; ++x)
                    for (int y = 0; y < k; ++y) G[2] += B(i, j) * C(x, y, j, i) * T(y, x);
        for (int j = 0; j < m; ++j)
            for (int l = 0; l < m; ++l)
                for (int kk = 0; kk < m; ++kk)
                    for (int x = 0; x < k; ++x)
                        for (int y = 0; y < k; ++y) G[3] += B(j, l) * C(x, y, j, kk) * C(y, x, l, kk);
        for (int x = 0; x < k; ++x)
            for (int y = 0; y < k; ++y)
                for (int z = 0; z < k; ++z)
                    for (int j = 0; j < m; ++j)
                        for (int l = 0; l < m; ++l) {
                            G[4] += T(x, z) * C(y, z, j, l) * C(y, x, l, j);
                            for (int i = 0; i < m; ++i) {
                                G[5] += C(x, z, l, i) * C(y, z, j, l) * C(y, x, i, j);
                                G[6] += C(x, y, i, j) * C(z, x, j, l) * C(y, z, l, i);
                            }
                        }
        return G;
    }

    // Left sides of the five pointwise identities.
    std::vector<double> identity_lhs() {
        std::vector<double> L(5, 0.0);
        for (int x = 0; x < k; ++x)
            for (int y = 0; y < k; ++y)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        for (int p = 0; p < m; ++p)
                            for (int q = 0; q < m; ++q) L[0] += Rp(x, y, i, j) * Rp(x, y, p, q) * Rm(i, j, p, q);
                        for (int z = 0; z < k; ++z) {
                            L[1] += T(x, z) * Rp(x, y, i, j) * Rp(z, y, i, j);
                            for (int l = 0; l < m; ++l) L[2] += Rp(x, y, i, j) * Rp(x, z, i, l) * Rp(y, z, j, l);
                        }
                        for (int p = 0; p < m; ++p) L[3] += B(i, j) * Rp(x, y, p, i) * Rp(x, y, p, j);
                    }
        L[4] = Rperp2();
        return L;
    }

    // G1..G4 as printed, plus G3 with transposed c indices.
    std::vector<double> gs() {
        std::vector<double> G(5, 0.0);
        const int n = m;
        for (int l = 0; l < n; ++l)
            for (int x = 0; x < k; ++x)
                for (int i = 0; i < n; ++i)
                    for (int mm = 0; mm < n; ++mm)
                        for (int kk = 0; kk < n; ++kk) G[0] += B(mm, kk) * f.d(l, x, i, kk) * f.d(l, x, i, mm);
        for (int l = 0; l < n; ++l)
            for (int x = 0; x < k; ++x)
                for (int y = 0; y < k; ++y)
                    for (int i = 0; i < n; ++i)
                        for (int mm = 0; mm < n; ++mm)
                            for (int kk = 0; kk < n; ++kk) {
                                G[2] += C(x, y, mm, kk) * f.d(l, x, i, kk) * f.d(l, y, i, mm);
                                G[4] += C(x, y, kk, mm) * f.d(l, x, i, kk) * f.d(l, y, i, mm);
                                for (int j = 0; j < n; ++j) {
                                    G[1] += f.a(y, kk, j) * f.a(x, i, mm) * f.d(l, x, i, kk) * f.d(l, y, mm, j);
                                    G[3] += f.a(y, kk, j) * f.a(y, i, mm) * f.d(l, x, i, kk) * f.d(l, x, j, mm);
                                }
                            }
        return G;
    }

    // |grad Rperp|^2, |grad b|^2, grad c : grad c from the product rule.
    std::vector<double> gradient_lhs() {
        std::vector<double> out(3, 0.0);
        for (int l = 0; l < m; ++l) {
            std::vector<double> dc(k * k * m * m, 0.0);
            auto DC = [&](int x, int y, int i, int j) -> double& { return dc[((x * k + y) * m + i) * m + j]; };
            for (int x = 0; x < k; ++x)
                for (int y = 0; y < k; ++y)
                    for (int i = 0; i < m; ++i)
                        for (int j = 0; j < m; ++j)
                            for (int p = 0; p < m; ++p)
                                DC(x, y, i, j) += f.d(l, x, i, p) * f.a(y, p, j) + f.a(x, i, p) * f.d(l, y, p, j);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    double db = 0;
                    for (int x = 0; x < k; ++x) {
                        db += DC(x, x, i, j);
                        for (int y = 0; y < k; ++y) {
                            const double dr = DC(x, y, i, j) - DC(x, y, j, i);
                            out[0] += dr * dr;
                            out[2] += DC(x, y, i, j) * DC(y, x, i, j);
                        }
                    }
                    out[1] += db * db;
                }
        }
        return out;
    }
};

}  // namespace oracle
