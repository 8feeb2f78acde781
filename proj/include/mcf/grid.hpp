#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcf/parallel.hpp"

namespace mcf {

struct ParameterDomain {
    int m = 0;
    std::vector<int> sizes;
    std::vector<double> periods;
    // shifts[d] is the ambient translation picked up when axis d wraps once;
    // empty or all zero means plain periodicity.
    std::vector<std::vector<double>> shifts;

    /// Throws std::invalid_argument on inconsistent data or sizes < 8.
    void validate(int n) const;

    std::size_t node_count() const;
    double spacing(int axis) const { return periods[axis] / sizes[axis]; }
    double min_spacing() const;
    bool equivariant() const;

    std::array<int, 3> index_of(std::size_t node) const;
    std::size_t node_of(const std::array<int, 3>& idx) const;
    double coordinate(int axis, int i) const { return spacing(axis) * i; }
    std::size_t stride(int axis) const;
};

struct ImmersionGrid {
    ParameterDomain domain;
    int n = 0;
    std::vector<double> F;  // node-major, n components per node
    double time = 0.0;

    std::size_t node_count() const { return domain.node_count(); }
    const double* point(std::size_t node) const { return F.data() + node * n; }
    double* point(std::size_t node) { return F.data() + node * n; }
};

class ImmersionDegeneracy : public std::runtime_error {
public:
    ImmersionDegeneracy(std::size_t node, double det, const std::string& where);
    std::size_t node() const { return node_; }
    double det() const { return det_; }

private:
    std::size_t node_;
    double det_;
};

/// Central difference stencils of order 2 or 4 along one axis.
class Differencer {
public:
    Differencer(const ParameterDomain& dom, int order);

    int order() const { return order_; }

    /// First derivative of a node-major field with ncomp components. When
    /// shift is given, the per-axis equivariance translations are added on
    /// wrap (only meaningful for the immersion itself).
    void first(const double* field, int ncomp, int axis, std::size_t node, double* out, bool with_shift = false) const;
    /// Pure second derivative along one axis.
    void second(const double* field, int ncomp, int axis, std::size_t node, double* out, bool with_shift = false) const;

    /// Full first-derivative field: out[(node * m + axis) * ncomp + c].
    std::vector<double> gradient_field(const std::vector<double>& field, int ncomp, Exec exec) const;

private:
    void apply(const double* field, int ncomp, int axis, std::size_t node, double* out, bool with_shift,
               const int* offsets, const double* weights, int width, double scale) const;

    ParameterDomain dom_;
    int order_;
    std::vector<std::size_t> strides_;
    std::vector<double> inv_h_;
};

}  // namespace mcf
