#pragma once

// Per-node geometry of a sampled immersion.
//
// Storage is node-major. Latin indices run over the m parameter axes, Greek
// over the n ambient coordinates; normal-frame indices (a, b) run over the
// k = n - m columns of the local orthonormal normal frame.

#include <cstddef>
#include <vector>

#include "mcf/grid.hpp"
#include "mcf/parallel.hpp"

namespace mcf {

struct GeometryState {
    ParameterDomain domain;
    int m = 0, n = 0, k = 0;
    int order = 2;
    double time = 0.0;
    std::size_t nodes = 0;

    std::vector<double> F;           // (node, alpha)
    std::vector<double> dF;          // (node, i, alpha)
    std::vector<double> g, ginv;     // (node, i, j)
    std::vector<double> sqrt_det;    // (node)
    std::vector<double> christoffel; // (node, p, i, j) = Gamma^p_ij
    std::vector<double> A;           // (node, i, j, alpha)
    std::vector<double> H;           // (node, alpha)
    std::vector<double> frame;       // (node, a, alpha)
    std::vector<double> A_normal;    // (node, a, i, j)
    std::vector<double> Rperp;       // (node, a, b, i, j)
    std::vector<double> c;           // (node, a, b, i, j)
    std::vector<double> a, b;        // (node, i, j)
    std::vector<double> riemann;     // (node, i, j, k, l), all lower
    std::vector<double> ricci;       // (node, i, j)
    std::vector<double> scalar;      // (node)
    std::vector<double> grad_A;      // (node, l, i, j, alpha)
    std::vector<double> grad_perp_A; // (node, l, i, j, alpha)
    std::vector<double> lambda;      // (node, i, p, k) = nabla_i b^p_k
    std::vector<double> A2, H2, Rperp2, grad_A2, grad_perp_A2;  // (node)

    int m2() const { return m * m; }
    const double* g_at(std::size_t node) const { return g.data() + node * m * m; }
    const double* ginv_at(std::size_t node) const { return ginv.data() + node * m * m; }
    const double* dF_at(std::size_t node) const { return dF.data() + node * m * n; }
    const double* A_at(std::size_t node) const { return A.data() + node * m * m * n; }
    const double* H_at(std::size_t node) const { return H.data() + node * n; }

    /// Metric-weighted area, sum of sqrt(det g) times the parameter cell volume.
    double area() const;
};

struct GeometryOptions {
    int order = 2;
    Exec exec = Exec::parallel;
    // Skip the third-derivative quantities (Riemann, grad A, lambda).
    bool first_pass_only = false;
    double degeneracy_threshold = 1e-10;
};

/// Throws ImmersionDegeneracy naming the first node whose det g falls below
/// the threshold.
GeometryState build_geometry(const ImmersionGrid& im, const GeometryOptions& opt = {});

/// Covariant gradient of a field carrying `rank` lower Latin indices followed
/// by `ncomp` flat components. Output layout (node, l, i_1..i_rank, comp).
std::vector<double> covariant_gradient(const GeometryState& gs, const std::vector<double>& field, int rank, int ncomp,
                                       Exec exec = Exec::parallel);

/// Laplace-Beltrami of a scalar field via two covariant gradients.
std::vector<double> laplacian(const GeometryState& gs, const std::vector<double>& f, Exec exec = Exec::parallel);

/// Normal projection of an ambient vector at a node.
void project_normal(const GeometryState& gs, std::size_t node, const double* v, double* out);

/// Per-node field accessors used by monitors and export.
double sup_norm(const std::vector<double>& v);

}  // namespace mcf
