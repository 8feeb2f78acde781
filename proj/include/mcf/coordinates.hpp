#pragma once

#include <vector>

#include "mcf/geometry.hpp"

namespace mcf {

struct CoordinateSplit {
    int ell = 0;
    std::vector<double> u;        // (node, i) for i = ell .. n-1, in the supplied basis
    std::vector<double> x2;       // (node) squared length of the first ell coordinates
    std::vector<double> u2;       // (node) squared length of the remaining coordinates
    std::vector<double> F2;       // (node)
    std::vector<double> grad_u2;  // (node) sum over all n coordinates of |grad u_i|^2
};

/// basis: n orthonormal vectors of length n (row i is e_i); empty means the
/// standard basis. Throws std::invalid_argument for non-orthonormal input or
/// ell outside [1, n].
CoordinateSplit coordinate_split(const GeometryState& gs, int ell, const std::vector<std::vector<double>>& basis = {});

/// A constant m-form on R^n, stored by strictly increasing index tuples.
struct MForm {
    int n = 0;
    int m = 0;
    std::vector<std::vector<int>> tuples;
    std::vector<double> values;

    static MForm from_indices(int n, const std::vector<int>& idx);
    /// omega = e^1 ^ ... ^ e^m of an orthonormal family spanning a plane.
    static MForm from_plane(const std::vector<std::vector<double>>& vectors);

    double norm() const;
    /// Throws std::invalid_argument unless |omega| = 1 within 1e-12.
    void validate() const;
    double evaluate(const double* vectors, int stride) const;  // m vectors, stride apart
};

struct GraphW {
    std::vector<double> w;
    std::vector<double> v;           // 1 / w where graphical, NaN elsewhere
    std::vector<unsigned char> graphical;
    bool all_graphical = true;
};

GraphW graph_w(const GeometryState& gs, const MForm& omega);

}  // namespace mcf
