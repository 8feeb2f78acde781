#include "mcf/tensor_algebra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mcf {

using Mat = Eigen::MatrixXd;

FundamentalFormSample::FundamentalFormSample(int m_, int k_) : m(m_), k(k_) {
    if (m < 1 || k < 1) throw std::invalid_argument("FundamentalFormSample: m and k must be >= 1");
    g.assign(static_cast<std::size_t>(m * m), 0.0);
    for (int i = 0; i < m; ++i) g[i * m + i] = 1.0;
    A.assign(static_cast<std::size_t>(k * m * m), 0.0);
}

void FundamentalFormSample::enable_gradient() {
    grad_A.assign(static_cast<std::size_t>(m * k * m * m), 0.0);
}

namespace {

Mat metric_of(const FundamentalFormSample& s) {
    Mat g(s.m, s.m);
    for (int i = 0; i < s.m; ++i)
        for (int j = 0; j < s.m; ++j) g(i, j) = s.g_at(i, j);
    return g;
}

Mat slice_of(const FundamentalFormSample& s, int a) {
    Mat A(s.m, s.m);
    for (int i = 0; i < s.m; ++i)
        for (int j = 0; j < s.m; ++j) A(i, j) = s.A_at(a, i, j);
    return A;
}

Mat grad_slice_of(const FundamentalFormSample& s, int l, int a) {
    Mat D(s.m, s.m);
    for (int i = 0; i < s.m; ++i)
        for (int j = 0; j < s.m; ++j) D(i, j) = s.dA_at(l, a, i, j);
    return D;
}

// Mixed-tensor view of a sample: M_a = g^{-1} A^a and the pairwise products.
struct MixedForm {
    int m = 0;
    int k = 0;
    Mat ginv;
    std::vector<Mat> M;  // k
    std::vector<Mat> C;  // k*k, C[a*k+b] = M_a M_b
    std::vector<Mat> R;  // k*k, C_ab - C_ba
    Mat B;               // sum_a M_a M_a
    Mat T;               // T(a,b) = tr(M_a M_b)

    const Mat& c(int a, int b) const { return C[a * k + b]; }
    const Mat& r(int a, int b) const { return R[a * k + b]; }
};

MixedForm mixed_form(const FundamentalFormSample& s) {
    s.validate();
    MixedForm f;
    f.m = s.m;
    f.k = s.k;
    f.ginv = metric_of(s).inverse();
    f.M.reserve(s.k);
    for (int a = 0; a < s.k; ++a) f.M.push_back(f.ginv * slice_of(s, a));
    f.C.resize(s.k * s.k);
    f.R.resize(s.k * s.k);
    f.T = Mat::Zero(s.k, s.k);
    f.B = Mat::Zero(s.m, s.m);
    for (int a = 0; a < s.k; ++a)
        for (int b = 0; b < s.k; ++b) {
            f.C[a * s.k + b] = f.M[a] * f.M[b];
            f.T(a, b) = f.C[a * s.k + b].trace();
        }
    for (int a = 0; a < s.k; ++a) {
        f.B += f.c(a, a);
        for (int b = 0; b < s.k; ++b) f.R[a * s.k + b] = f.c(a, b) - f.c(b, a);
    }
    return f;
}

double trace_of_product(const Mat& X, const Mat& Y) { return (X.array() * Y.transpose().array()).sum(); }

}  // namespace

void FundamentalFormSample::validate() const {
    if (m < 1 || k < 1) throw std::invalid_argument("sample: m and k must be >= 1");
    if (g.size() != static_cast<std::size_t>(m * m) || A.size() != static_cast<std::size_t>(k * m * m))
        throw std::invalid_argument("sample: array sizes do not match (m, k)");
    if (!grad_A.empty() && grad_A.size() != static_cast<std::size_t>(m * k * m * m))
        throw std::invalid_argument("sample: gradient array size does not match (m, k)");
    const double tol = 1e-12;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < i; ++j) {
            if (std::abs(g_at(i, j) - g_at(j, i)) > tol * (1.0 + std::abs(g_at(i, j))))
                throw std::invalid_argument("sample: metric is not symmetric");
            for (int a = 0; a < k; ++a) {
                if (std::abs(A_at(a, i, j) - A_at(a, j, i)) > tol * (1.0 + std::abs(A_at(a, i, j))))
                    throw std::invalid_argument("sample: A is not symmetric in (i,j)");
                if (has_gradient())
                    for (int l = 0; l < m; ++l)
                        if (std::abs(dA_at(l, a, i, j) - dA_at(l, a, j, i)) > tol * (1.0 + std::abs(dA_at(l, a, i, j))))
                            throw std::invalid_argument("sample: grad A is not symmetric in (i,j)");
            }
        }
    Eigen::LLT<Mat> llt(metric_of(*this));
    if (llt.info() != Eigen::Success) throw std::invalid_argument("sample: metric is not positive definite");
    for (double x : g)
        if (!std::isfinite(x)) throw std::invalid_argument("sample: non-finite metric entry");
    for (double x : A)
        if (!std::isfinite(x)) throw std::invalid_argument("sample: non-finite A entry");
}

DerivedInvariants derive_invariants(const FundamentalFormSample& s) {
    const MixedForm f = mixed_form(s);
    const int m = s.m, k = s.k;
    const Mat g = metric_of(s);
    DerivedInvariants d;
    d.m = m;
    d.k = k;
    d.H.resize(k);
    Mat a = Mat::Zero(m, m);
    for (int x = 0; x < k; ++x) {
        d.H[x] = f.M[x].trace();
        a += d.H[x] * slice_of(s, x);
    }
    const Mat b = g * f.B;
    d.a.assign(a.data(), a.data() + m * m);  // symmetric, storage order irrelevant
    d.b.resize(m * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) d.b[i * m + j] = 0.5 * (b(i, j) + b(j, i));
    d.c.resize(static_cast<std::size_t>(k * k * m * m));
    d.Rperp.resize(d.c.size());
    for (int x = 0; x < k; ++x)
        for (int y = 0; y < k; ++y) {
            const Mat cl = g * f.c(x, y);
            const Mat rl = g * f.r(x, y);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    const std::size_t idx = static_cast<std::size_t>(((x * k + y) * m + i) * m + j);
                    d.c[idx] = cl(i, j);
                    d.Rperp[idx] = rl(i, j);
                }
        }
    const Mat ahat = f.ginv * a;
    for (int x = 0; x < k; ++x) {
        d.A2 += f.T(x, x);
        d.H2 += d.H[x] * d.H[x];
        for (int y = 0; y < k; ++y) d.Rperp2 -= trace_of_product(f.r(x, y), f.r(x, y));
    }
    d.a2 = trace_of_product(ahat, ahat);
    d.b2 = trace_of_product(f.B, f.B);
    return d;
}

std::array<double, 7> gamma_values(const FundamentalFormSample& s) {
    const MixedForm f = mixed_form(s);
    const int k = s.k;
    std::array<double, 7> G{};
    const Mat B2 = f.B * f.B;
    G[0] = trace_of_product(B2, f.B);
    for (int a = 0; a < k; ++a) {
        const Mat BM = f.B * f.M[a];
        G[1] += trace_of_product(BM, BM);
        for (int b = 0; b < k; ++b) {
            const Mat& Cab = f.c(a, b);
            G[2] += f.T(a, b) * trace_of_product(f.B, Cab);
            G[3] += trace_of_product(f.B * Cab, Cab);
            for (int c = 0; c < k; ++c) {
                G[4] += f.T(a, c) * trace_of_product(f.c(b, c), f.c(b, a));
                G[5] += trace_of_product(f.c(b, c) * f.c(a, c), f.c(b, a));
                G[6] += trace_of_product(Cab * f.c(c, a), f.c(b, c));
            }
        }
    }
    return G;
}

IdentityResidual make_residual(std::string name, double lhs, double rhs) {
    IdentityResidual r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.absolute = std::abs(lhs - rhs);
    r.relative = r.absolute / (1.0 + std::max(std::abs(lhs), std::abs(rhs)));
    return r;
}

std::vector<IdentityResidual> check_pointwise_identities(const FundamentalFormSample& s) {
    const MixedForm f = mixed_form(s);
    const auto G = gamma_values(s);
    const int k = s.k;

    double riem_term = 0.0, trace_term = 0.0, triple = 0.0, b_term = 0.0, rperp2 = 0.0, cc = 0.0;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            const Mat& Rab = f.r(a, b);
            // Riemann built from A by the Gauss equation, contracted against Rperp twice.
            for (int c = 0; c < k; ++c) {
                const Mat RM = Rab * f.M[c];
                riem_term -= 2.0 * trace_of_product(RM, RM);
                trace_term -= f.T(a, c) * trace_of_product(Rab, f.r(c, b));
                triple += trace_of_product(Rab * f.r(a, c), f.r(b, c));
            }
            b_term -= trace_of_product(f.B * Rab, Rab);
            rperp2 -= trace_of_product(Rab, Rab);
            cc += trace_of_product(f.c(a, b), f.c(a, b));
        }
    const double b2 = trace_of_product(f.B, f.B);

    std::vector<IdentityResidual> out;
    out.push_back(make_residual("Rperp.Rperp.Riem = 4(G6-G7)", riem_term, 4.0 * (G[5] - G[6])));
    out.push_back(make_residual("c.Rperp.Rperp = 2(G3-G5)", trace_term, 2.0 * (G[2] - G[4])));
    out.push_back(make_residual("Rperp.Rperp.Rperp = G1-3G4+3G6-G7", triple, G[0] - 3.0 * G[3] + 3.0 * G[5] - G[6]));
    out.push_back(make_residual("b.Rperp.Rperp = 2(G2-G4)", b_term, 2.0 * (G[1] - G[3])));
    out.push_back(make_residual("|Rperp|^2 = 2|b|^2 - 2c:c", rperp2, 2.0 * b2 - 2.0 * cc));
    return out;
}

GradientValues gradient_values(const FundamentalFormSample& s) {
    if (!s.has_gradient()) throw std::invalid_argument("gradient_values: sample has no gradient");
    const MixedForm f = mixed_form(s);
    const int m = s.m, k = s.k;

    std::vector<Mat> N(static_cast<std::size_t>(m * k));
    for (int l = 0; l < m; ++l)
        for (int a = 0; a < k; ++a) N[l * k + a] = f.ginv * grad_slice_of(s, l, a);
    auto n = [&](int l, int a) -> const Mat& { return N[l * k + a]; };

    GradientValues out;
    double grad_r = 0.0, grad_b = 0.0, grad_c = 0.0;
    for (int l = 0; l < m; ++l)
        for (int lp = 0; lp < m; ++lp) {
            const double w = f.ginv(l, lp);
            if (w == 0.0) continue;
            Mat dB_l = Mat::Zero(m, m), dB_lp = Mat::Zero(m, m);
            for (int a = 0; a < k; ++a) {
                dB_l += n(l, a) * f.M[a] + f.M[a] * n(l, a);
                dB_lp += n(lp, a) * f.M[a] + f.M[a] * n(lp, a);
                out.G[0] += w * trace_of_product(n(l, a) * f.B, n(lp, a));
                for (int b = 0; b < k; ++b) {
                    out.G[1] += w * trace_of_product(n(l, a) * f.M[b], n(lp, b) * f.M[a]);
                    out.G[2] += w * trace_of_product(n(l, a) * f.c(b, a), n(lp, b));
                    out.G3_transposed += w * trace_of_product(n(l, a) * f.c(a, b), n(lp, b));
                    out.G[3] += w * trace_of_product(n(l, a) * f.M[b], n(lp, a) * f.M[b]);

                    const Mat dC_l = n(l, a) * f.M[b] + f.M[a] * n(l, b);
                    const Mat dC_lp = n(lp, a) * f.M[b] + f.M[a] * n(lp, b);
                    const Mat dCt_l = n(l, b) * f.M[a] + f.M[b] * n(l, a);
                    const Mat dCt_lp = n(lp, b) * f.M[a] + f.M[b] * n(lp, a);
                    grad_c += w * trace_of_product(dC_l, dC_lp);
                    grad_r -= w * trace_of_product(dC_l - dCt_l, dC_lp - dCt_lp);
                }
            }
            grad_b += w * trace_of_product(dB_l, dB_lp);
        }
    const auto& G = out.G;
    out.residuals.push_back(make_residual("|grad Rperp|^2 = 4(G1+G2-G3-G4)", grad_r, 4.0 * (G[0] + G[1] - G[2] - G[3])));
    out.residuals.push_back(make_residual("|grad b|^2 = 2(G2+G3)", grad_b, 2.0 * (G[1] + out.G3_transposed)));
    out.residuals.push_back(make_residual("grad c : grad c = 2(G3+G4)", grad_c, 2.0 * (G[2] + G[3])));
    return out;
}

double trace_pair_norm2(const FundamentalFormSample& s) {
    const MixedForm f = mixed_form(s);
    return f.T.squaredNorm();
}

FundamentalFormSample random_fundamental_form(std::uint64_t seed, int m, int k, bool with_gradient) {
    FundamentalFormSample s(m, k);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto symmetric_fill = [&](auto&& at) {
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                const double v = unit(rng);
                at(i, j) = v;
                at(j, i) = v;
            }
    };
    for (int a = 0; a < k; ++a) symmetric_fill([&](int i, int j) -> double& { return s.A_at(a, i, j); });
    if (with_gradient) {
        s.enable_gradient();
        for (int l = 0; l < m; ++l)
            for (int a = 0; a < k; ++a)
                symmetric_fill([&](int i, int j) -> double& { return s.dA_at(l, a, i, j); });
    }
    for (;;) {
        std::vector<double> S(static_cast<std::size_t>(m * m));
        symmetric_fill([&](int i, int j) -> double& { return S[i * m + j]; });
        for (int i = 0; i < m * m; ++i) s.g[i] = 0.2 * S[i] + ((i % (m + 1)) == 0 ? 1.0 : 0.0);
        if (Eigen::LLT<Mat>(metric_of(s)).info() == Eigen::Success && metric_of(s).eigenvalues().real().minCoeff() > 0.0)
            break;
    }
    return s;
}

}  // namespace mcf
