#include "mcf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mcf {

void ParameterDomain::validate(int n) const {
    if (m < 1 || m > 3) throw std::invalid_argument("domain: intrinsic dimension must be 1, 2 or 3");
    if (static_cast<int>(sizes.size()) != m || static_cast<int>(periods.size()) != m)
        throw std::invalid_argument("domain: sizes and periods need one entry per axis");
    for (int d = 0; d < m; ++d) {
        if (sizes[d] < 8) throw std::invalid_argument("domain: every axis needs at least 8 nodes");
        if (!(periods[d] > 0.0)) throw std::invalid_argument("domain: periods must be positive");
    }
    if (!shifts.empty()) {
        if (static_cast<int>(shifts.size()) != m) throw std::invalid_argument("domain: one shift vector per axis");
        for (const auto& s : shifts)
            if (!s.empty() && static_cast<int>(s.size()) != n)
                throw std::invalid_argument("domain: shift vectors must have ambient dimension");
    }
}

std::size_t ParameterDomain::node_count() const {
    std::size_t c = 1;
    for (int s : sizes) c *= static_cast<std::size_t>(s);
    return c;
}

double ParameterDomain::min_spacing() const {
    double h = spacing(0);
    for (int d = 1; d < m; ++d) h = std::min(h, spacing(d));
    return h;
}

bool ParameterDomain::equivariant() const {
    for (const auto& s : shifts)
        for (double v : s)
            if (v != 0.0) return true;
    return false;
}

std::size_t ParameterDomain::stride(int axis) const {
    std::size_t s = 1;
    for (int d = m - 1; d > axis; --d) s *= static_cast<std::size_t>(sizes[d]);
    return s;
}

std::array<int, 3> ParameterDomain::index_of(std::size_t node) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int d = m - 1; d >= 0; --d) {
        idx[d] = static_cast<int>(node % sizes[d]);
        node /= sizes[d];
    }
    return idx;
}

std::size_t ParameterDomain::node_of(const std::array<int, 3>& idx) const {
    std::size_t node = 0;
    for (int d = 0; d < m; ++d) node = node * sizes[d] + static_cast<std::size_t>(idx[d]);
    return node;
}

namespace {

std::string describe(std::size_t node, double det, const std::string& where) {
    std::ostringstream os;
    os << "immersion degeneracy at node " << node << " (det g = " << det << ")";
    if (!where.empty()) os << " during " << where;
    return os.str();
}

constexpr int kOff2[] = {-1, 1};
constexpr double kW1o2[] = {-0.5, 0.5};
constexpr int kOff2s[] = {-1, 0, 1};
constexpr double kW2o2[] = {1.0, -2.0, 1.0};
constexpr int kOff4[] = {-2, -1, 1, 2};
constexpr double kW1o4[] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
constexpr int kOff4s[] = {-2, -1, 0, 1, 2};
constexpr double kW2o4[] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};

}  // namespace

ImmersionDegeneracy::ImmersionDegeneracy(std::size_t node, double det, const std::string& where)
    : std::runtime_error(describe(node, det, where)), node_(node), det_(det) {}

Differencer::Differencer(const ParameterDomain& dom, int order) : dom_(dom), order_(order) {
    if (order != 2 && order != 4) throw std::invalid_argument("stencil order must be 2 or 4");
    for (int d = 0; d < dom.m; ++d) {
        strides_.push_back(dom.stride(d));
        inv_h_.push_back(1.0 / dom.spacing(d));
    }
}

void Differencer::apply(const double* field, int ncomp, int axis, std::size_t node, double* out, bool with_shift,
                        const int* offsets, const double* weights, int width, double scale) const {
    const int N = dom_.sizes[axis];
    const std::size_t stride = strides_[axis];
    const int i = static_cast<int>((node / stride) % N);
    const std::size_t base = node - static_cast<std::size_t>(i) * stride;
    const std::vector<double>* shift =
        (with_shift && !dom_.shifts.empty() && !dom_.shifts[axis].empty()) ? &dom_.shifts[axis] : nullptr;
    for (int c = 0; c < ncomp; ++c) out[c] = 0.0;
    for (int s = 0; s < width; ++s) {
        const int j = i + offsets[s];
        const int wraps = (j >= 0) ? j / N : -((-j + N - 1) / N);
        const int jw = j - wraps * N;
        const double* f = field + (base + static_cast<std::size_t>(jw) * stride) * ncomp;
        const double w = weights[s];
        for (int c = 0; c < ncomp; ++c) out[c] += w * f[c];
        if (shift && wraps != 0)
            for (int c = 0; c < ncomp; ++c) out[c] += w * wraps * (*shift)[c];
    }
    for (int c = 0; c < ncomp; ++c) out[c] *= scale;
}

void Differencer::first(const double* field, int ncomp, int axis, std::size_t node, double* out, bool with_shift) const {
    const double s = inv_h_[axis];
    if (order_ == 2)
        apply(field, ncomp, axis, node, out, with_shift, kOff2, kW1o2, 2, s);
    else
        apply(field, ncomp, axis, node, out, with_shift, kOff4, kW1o4, 4, s);
}

void Differencer::second(const double* field, int ncomp, int axis, std::size_t node, double* out, bool with_shift) const {
    const double s = inv_h_[axis] * inv_h_[axis];
    if (order_ == 2)
        apply(field, ncomp, axis, node, out, with_shift, kOff2s, kW2o2, 3, s);
    else
        apply(field, ncomp, axis, node, out, with_shift, kOff4s, kW2o4, 5, s);
}

std::vector<double> Differencer::gradient_field(const std::vector<double>& field, int ncomp, Exec exec) const {
    const int m = dom_.m;
    std::vector<double> out(field.size() * m);
    for_each_node(exec, dom_.node_count(), [&](std::size_t node) {
        for (int d = 0; d < m; ++d) first(field.data(), ncomp, d, node, out.data() + (node * m + d) * ncomp);
    });
    return out;
}

}  // namespace mcf
