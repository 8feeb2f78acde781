#include "doctest.h"
#include "oracle.hpp"

#include "mcf/tensor_algebra.hpp"

#include <cmath>
#include <stdexcept>

using namespace mcf;

namespace {

double rel(double x, double y) { return std::abs(x - y) / (1.0 + std::max(std::abs(x), std::abs(y))); }

}  // namespace

TEST_CASE("Rperp vanishes for a single normal direction or a single tangent direction") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto d = derive_invariants(random_fundamental_form(seed, 3, 1, false));
        for (double v : d.Rperp) CHECK(v == 0.0);
        auto e = derive_invariants(random_fundamental_form(seed, 1, 3, false));
        for (double v : e.Rperp) CHECK(v == 0.0);
        CHECK(e.Rperp2 == 0.0);
    }
}

TEST_CASE("hand sample: A1 = diag(1,0), A2 = antidiag(1,1)") {
    FundamentalFormSample s(2, 2);
    s.A_at(0, 0, 0) = 1.0;
    s.A_at(1, 0, 1) = s.A_at(1, 1, 0) = 1.0;
    auto d = derive_invariants(s);
    // worked by hand: c^{12}_{12} = 1, c^{12}_{21} = 0
    CHECK(d.Rperp_at(0, 1, 0, 1) == doctest::Approx(1.0));
    CHECK(d.Rperp_at(1, 0, 0, 1) == doctest::Approx(-1.0));
    CHECK(d.Rperp2 == doctest::Approx(4.0));
    CHECK(d.b2 == doctest::Approx(5.0));
    oracle::Loops L(s);
    CHECK(L.Rperp2() == doctest::Approx(4.0));
    CHECK(2.0 * L.b2() - 2.0 * L.cc() == doctest::Approx(4.0));
}

TEST_CASE("derived invariants match the loop oracle and satisfy their invariants") {
    for (int m = 1; m <= 3; ++m)
        for (int k = 1; k <= 3; ++k)
            for (std::uint64_t seed = 0; seed < 25; ++seed) {
                auto s = random_fundamental_form(seed * 31 + m * 7 + k, m, k, false);
                auto d = derive_invariants(s);
                oracle::Loops L(s);
                CHECK(rel(d.Rperp2, L.Rperp2()) < 1e-12);
                CHECK(rel(d.A2, L.A2()) < 1e-12);
                CHECK(rel(d.b2, L.b2()) < 1e-12);
                double tr_a = 0, tr_b = 0;
                std::vector<double> gi(m * m);
                {
                    // g^{-1} via the oracle frame: g^{-1} = P P^T
                    auto P = oracle::cholesky_inverse_transpose(s);
                    for (int i = 0; i < m; ++i)
                        for (int j = 0; j < m; ++j) {
                            double v = 0;
                            for (int p = 0; p < m; ++p) v += P[i * m + p] * P[j * m + p];
                            gi[i * m + j] = v;
                        }
                }
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        tr_a += gi[i * m + j] * d.a[i * m + j];
                        tr_b += gi[i * m + j] * d.b[i * m + j];
                        CHECK(d.a[i * m + j] == doctest::Approx(d.a[j * m + i]).epsilon(1e-12));
                        CHECK(d.b[i * m + j] == doctest::Approx(d.b[j * m + i]).epsilon(1e-12));
                    }
                CHECK(rel(tr_a, d.H2) < 1e-12);
                CHECK(rel(tr_b, d.A2) < 1e-12);
                for (int x = 0; x < k; ++x)
                    for (int y = 0; y < k; ++y)
                        for (int i = 0; i < m; ++i)
                            for (int j = 0; j < m; ++j) {
                                CHECK(std::abs(d.Rperp_at(x, y, i, j) + d.Rperp_at(y, x, i, j)) < 1e-13);
                                CHECK(std::abs(d.Rperp_at(x, y, i, j) + d.Rperp_at(x, y, j, i)) < 1e-13);
                            }
                CHECK(trace_pair_norm2(s) <= d.A2 * d.A2 * (1.0 + 1e-12));
            }
}

TEST_CASE("b is positive semidefinite") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto s = random_fundamental_form(seed, 3, 2, false);
        auto d = derive_invariants(s);
        // x^T b x for a few fixed vectors
        const double xs[3][3] = {{1, 0, 0}, {1, -2, 0.5}, {0.3, 0.7, -1}};
        for (auto& x : xs) {
            double q = 0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) q += x[i] * d.b[i * 3 + j] * x[j];
            CHECK(q >= -1e-13);
        }
    }
}

TEST_CASE("non SPD metric is rejected") {
    FundamentalFormSample s(2, 1);
    s.g_at(0, 1) = s.g_at(1, 0) = 2.0;
    CHECK_THROWS_AS(derive_invariants(s), std::invalid_argument);
    FundamentalFormSample t(2, 1);
    t.A_at(0, 0, 1) = 1.0;
    CHECK_THROWS_AS(derive_invariants(t), std::invalid_argument);
}

TEST_CASE("gamma values: zero form, degree six homogeneity, loop oracle") {
    FundamentalFormSample z(3, 2);
    for (double v : gamma_values(z)) CHECK(v == 0.0);

    auto s = random_fundamental_form(42, 2, 2, false);
    auto G = gamma_values(s);
    oracle::Loops L(s);
    auto ref = L.gammas();
    for (int i = 0; i < 7; ++i) CHECK(rel(G[i], ref[i]) < 1e-13);

    auto t = s;
    const double lam = 1.7;
    for (double& v : t.A) v *= lam;
    auto Gt = gamma_values(t);
    for (int i = 0; i < 7; ++i) CHECK(rel(Gt[i], std::pow(lam, 6) * G[i]) < 1e-12);
    auto d = derive_invariants(s), dt = derive_invariants(t);
    CHECK(rel(dt.Rperp2, std::pow(lam, 4) * d.Rperp2) < 1e-12);
    CHECK(rel(dt.b2, std::pow(lam, 4) * d.b2) < 1e-12);
}

TEST_CASE("gamma values against the loop oracle across dimensions") {
    for (int m = 2; m <= 3; ++m)
        for (int k = 1; k <= 3; ++k)
            for (std::uint64_t seed = 100; seed < 120; ++seed) {
                auto s = random_fundamental_form(seed, m, k, false);
                auto G = gamma_values(s);
                auto ref = oracle::Loops(s).gammas();
                for (int i = 0; i < 7; ++i) CHECK(rel(G[i], ref[i]) < 1e-12);
            }
}

TEST_CASE("pointwise identities: both sides against the loop oracle") {
    for (int m = 2; m <= 3; ++m)
        for (int k = 1; k <= 3; ++k)
            for (std::uint64_t seed = 0; seed < 30; ++seed) {
                auto s = random_fundamental_form(seed + 1000, m, k, false);
                auto res = check_pointwise_identities(s);
                oracle::Loops L(s);
                auto lhs = L.identity_lhs();
                auto G = L.gammas();
                const double rhs[5] = {4 * (G[5] - G[6]), 2 * (G[2] - G[4]), G[0] - 3 * G[3] + 3 * G[5] - G[6],
                                       2 * (G[1] - G[3]), 2 * L.b2() - 2 * L.cc()};
                REQUIRE(res.size() == 5);
                for (int i = 0; i < 5; ++i) {
                    CHECK(rel(res[i].lhs, lhs[i]) < 1e-12);
                    CHECK(rel(res[i].rhs, rhs[i]) < 1e-10);
                    CHECK(rel(lhs[i], rhs[i]) < 1e-10);
                    CHECK(res[i].relative < 1e-10);
                }
            }
}

TEST_CASE("identities with k = 1 have both sides zero") {
    auto s = random_fundamental_form(5, 3, 1, false);
    for (const auto& r : check_pointwise_identities(s)) {
        CHECK(std::abs(r.lhs) < 1e-12);
        CHECK(std::abs(r.rhs) < 1e-12);
    }
}

TEST_CASE("commuting shape operators give Gamma2 = Gamma4") {
    FundamentalFormSample s(3, 2);
    const double d1[3] = {1.0, -0.4, 2.5}, d2[3] = {0.3, 1.1, -0.7};
    for (int i = 0; i < 3; ++i) {
        s.A_at(0, i, i) = d1[i];
        s.A_at(1, i, i) = d2[i];
    }
    auto d = derive_invariants(s);
    CHECK(d.Rperp2 == 0.0);
    auto G = gamma_values(s);
    CHECK(G[1] != 0.0);
    CHECK(G[3] != 0.0);
    CHECK(rel(G[1], G[3]) < 1e-14);
    auto res = check_pointwise_identities(s);
    CHECK(res[0].lhs == 0.0);
    CHECK(res[2].lhs == 0.0);
    CHECK(res[4].lhs == 0.0);
    CHECK(res[3].absolute < 1e-12 * (1.0 + std::abs(G[1])));
}

TEST_CASE("gradient contractions") {
    SUBCASE("zero gradient") {
        auto s = random_fundamental_form(3, 2, 2, false);
        s.enable_gradient();
        auto gv = gradient_values(s);
        for (double v : gv.G) CHECK(v == 0.0);
        for (const auto& r : gv.residuals) CHECK(r.lhs == 0.0);
    }
    SUBCASE("missing gradient is rejected") {
        CHECK_THROWS_AS(gradient_values(random_fundamental_form(3, 2, 2, false)), std::invalid_argument);
    }
    SUBCASE("loop oracle") {
        for (int m = 2; m <= 3; ++m)
            for (int k = 1; k <= 3; ++k)
                for (std::uint64_t seed = 0; seed < 20; ++seed) {
                    auto s = random_fundamental_form(seed + 77, m, k, true);
                    auto gv = gradient_values(s);
                    oracle::Loops L(s);
                    auto G = L.gs();
                    for (int i = 0; i < 4; ++i) CHECK(rel(gv.G[i], G[i]) < 1e-12);
                    CHECK(rel(gv.G3_transposed, G[4]) < 1e-12);
                    auto lhs = L.gradient_lhs();
                    for (int i = 0; i < 3; ++i) {
                        CHECK(rel(gv.residuals[i].lhs, lhs[i]) < 1e-12);
                        CHECK(gv.residuals[i].relative < 1e-10);
                    }
                    CHECK(rel(lhs[0], 4 * (G[0] + G[1] - G[2] - G[3])) < 1e-10);
                    CHECK(rel(lhs[1], 2 * (G[1] + G[4])) < 1e-10);
                    CHECK(rel(lhs[2], 2 * (G[2] + G[3])) < 1e-10);
                }
    }
    SUBCASE("k = 1: gradient of Rperp vanishes") {
        auto s = random_fundamental_form(11, 3, 1, true);
        auto gv = gradient_values(s);
        CHECK(std::abs(gv.residuals[0].lhs) < 1e-13);
        CHECK(std::abs(gv.residuals[0].rhs) < 1e-12);
    }
}

TEST_CASE("random samples are deterministic, valid and seed dependent") {
    auto a = random_fundamental_form(0, 2, 2, true);
    auto b = random_fundamental_form(0, 2, 2, true);
    CHECK(a.g == b.g);
    CHECK(a.A == b.A);
    CHECK(a.grad_A == b.grad_A);
    CHECK_NOTHROW(a.validate());
    auto c = random_fundamental_form(1, 2, 2, true);
    CHECK(c.A != a.A);
    for (double v : a.A) CHECK(std::abs(v) <= 1.0);
}
