#pragma once

// Pointwise multilinear algebra of a second fundamental form.
//
// A sample is a single fibre: an induced metric g (m x m, SPD) and the
// second fundamental form A^a_{ij} written in an orthonormal normal frame
// (a = 0..k-1), so Greek indices are raised and lowered with the identity.
// Latin indices are raised with g^{-1}.
//
// All full contractions below are evaluated through mixed (1,1) tensors
// M_a = g^{-1} A^a, which turns every invariant into a trace of a matrix
// product.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mcf {

struct FundamentalFormSample {
    int m = 0;  // intrinsic dimension
    int k = 0;  // codimension
    std::vector<double> g;       // m*m, row major
    std::vector<double> A;       // (a, i, j), k*m*m
    std::vector<double> grad_A;  // (l, a, i, j), m*k*m*m; empty when absent

    FundamentalFormSample() = default;
    FundamentalFormSample(int m_, int k_);

    double& g_at(int i, int j) { return g[i * m + j]; }
    double g_at(int i, int j) const { return g[i * m + j]; }
    double& A_at(int a, int i, int j) { return A[(a * m + i) * m + j]; }
    double A_at(int a, int i, int j) const { return A[(a * m + i) * m + j]; }
    double& dA_at(int l, int a, int i, int j) { return grad_A[((l * k + a) * m + i) * m + j]; }
    double dA_at(int l, int a, int i, int j) const { return grad_A[((l * k + a) * m + i) * m + j]; }

    bool has_gradient() const { return !grad_A.empty(); }
    void enable_gradient();

    /// Throws std::invalid_argument if g is not SPD or A / grad_A is not
    /// symmetric in (i, j).
    void validate() const;
};

struct DerivedInvariants {
    int m = 0;
    int k = 0;
    std::vector<double> H;      // k
    std::vector<double> a;      // m*m, a_ij = H^b A^b_ij
    std::vector<double> b;      // m*m, b_ij = A^c_ik A^{c k}_j
    std::vector<double> c;      // (a, b, i, j): c^{ab}_ij = A^a_ik A^{b k}_j
    std::vector<double> Rperp;  // (a, b, i, j): normal curvature
    double A2 = 0.0;
    double H2 = 0.0;
    double a2 = 0.0;
    double b2 = 0.0;
    double Rperp2 = 0.0;

    double Rperp_at(int x, int y, int i, int j) const { return Rperp[((x * k + y) * m + i) * m + j]; }
    double c_at(int x, int y, int i, int j) const { return c[((x * k + y) * m + i) * m + j]; }
};

DerivedInvariants derive_invariants(const FundamentalFormSample& s);

/// Gamma_1 .. Gamma_7 (index 0..6).
std::array<double, 7> gamma_values(const FundamentalFormSample& s);

struct IdentityResidual {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double absolute = 0.0;
    double relative = 0.0;  // absolute / (1 + max(|lhs|, |rhs|))
};

IdentityResidual make_residual(std::string name, double lhs, double rhs);

/// The five algebraic identities between normal curvature contractions and
/// the Gamma invariants. The intrinsic curvature in the first identity is
/// obtained from A through the Gauss equation.
std::vector<IdentityResidual> check_pointwise_identities(const FundamentalFormSample& s);

struct GradientValues {
    std::array<double, 4> G{};
    // G_3 with the c-indices transposed; this is the contraction that enters
    // the |grad b|^2 decomposition.
    double G3_transposed = 0.0;
    std::vector<IdentityResidual> residuals;  // |grad Rperp|^2, |grad b|^2, grad c : grad c
};

/// Requires s.has_gradient(); throws std::invalid_argument otherwise.
GradientValues gradient_values(const FundamentalFormSample& s);

/// |A^{a m}_n A^{b n}_m|^2, the quartic term of the |A|^2 evolution.
double trace_pair_norm2(const FundamentalFormSample& s);

/// Deterministic pseudo-random sample: entries uniform in [-1, 1],
/// symmetrised in (i, j); g = I + 0.2 * S resampled until SPD.
FundamentalFormSample random_fundamental_form(std::uint64_t seed, int m, int k, bool with_gradient);

}  // namespace mcf
