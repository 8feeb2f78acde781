#include "mcf/coordinates.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcf {

namespace {

std::vector<std::vector<double>> standard_basis(int n) {
    std::vector<std::vector<double>> e(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) e[i][i] = 1.0;
    return e;
}

void check_orthonormal(const std::vector<std::vector<double>>& basis, int n) {
    if (static_cast<int>(basis.size()) != n) throw std::invalid_argument("coordinate_split: basis needs n vectors");
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(basis[i].size()) != n) throw std::invalid_argument("coordinate_split: basis vector of wrong length");
        for (int j = 0; j <= i; ++j) {
            double d = 0.0;
            for (int al = 0; al < n; ++al) d += basis[i][al] * basis[j][al];
            if (std::abs(d - (i == j ? 1.0 : 0.0)) > 1e-12) throw std::invalid_argument("coordinate_split: basis is not orthonormal");
        }
    }
}

}  // namespace

CoordinateSplit coordinate_split(const GeometryState& gs, int ell, const std::vector<std::vector<double>>& basis_in) {
    const int n = gs.n, m = gs.m;
    if (ell < 1 || ell > n) throw std::invalid_argument("coordinate_split: ell must lie in [1, n]");
    const auto basis = basis_in.empty() ? standard_basis(n) : basis_in;
    check_orthonormal(basis, n);
    CoordinateSplit out;
    out.ell = ell;
    const std::size_t N = gs.nodes;
    out.u.assign(N * (n - ell), 0.0);
    out.x2.assign(N, 0.0);
    out.u2.assign(N, 0.0);
    out.F2.assign(N, 0.0);
    out.grad_u2.assign(N, 0.0);
    for (std::size_t node = 0; node < N; ++node) {
        const double* F = gs.F.data() + node * n;
        const double* dF = gs.dF_at(node);
        const double* gi = gs.ginv_at(node);
        for (int i = 0; i < n; ++i) {
            double c = 0.0;
            for (int al = 0; al < n; ++al) c += basis[i][al] * F[al];
            if (i < ell)
                out.x2[node] += c * c;
            else {
                out.u[node * (n - ell) + (i - ell)] = c;
                out.u2[node] += c * c;
            }
            // grad u_i = <e_i, F_p> dx^p
            double du[3] = {0, 0, 0};
            for (int p = 0; p < m; ++p)
                for (int al = 0; al < n; ++al) du[p] += basis[i][al] * dF[p * n + al];
            for (int p = 0; p < m; ++p)
                for (int q = 0; q < m; ++q) out.grad_u2[node] += gi[p * m + q] * du[p] * du[q];
        }
        for (int al = 0; al < n; ++al) out.F2[node] += F[al] * F[al];
    }
    return out;
}

MForm MForm::from_indices(int n, const std::vector<int>& idx) {
    MForm f;
    f.n = n;
    f.m = static_cast<int>(idx.size());
    std::vector<int> t = idx;
    std::sort(t.begin(), t.end());
    if (std::adjacent_find(t.begin(), t.end()) != t.end()) throw std::invalid_argument("m-form: repeated index");
    for (int i : t)
        if (i < 0 || i >= n) throw std::invalid_argument("m-form: index out of range");
    // sign of the sorting permutation
    double sign = 1.0;
    std::vector<int> s = idx;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
            if (s[i] > s[j]) sign = -sign;
    f.tuples.push_back(t);
    f.values.push_back(sign);
    return f;
}

MForm MForm::from_plane(const std::vector<std::vector<double>>& vectors) {
    if (vectors.empty()) throw std::invalid_argument("m-form: need at least one vector");
    MForm f;
    f.m = static_cast<int>(vectors.size());
    f.n = static_cast<int>(vectors[0].size());
    std::vector<int> idx(f.m);
    // all increasing tuples
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == f.m) {
            Eigen::MatrixXd M(f.m, f.m);
            for (int r = 0; r < f.m; ++r)
                for (int c = 0; c < f.m; ++c) M(r, c) = vectors[r][cur[c]];
            const double d = M.determinant();
            if (d != 0.0) {
                f.tuples.push_back(cur);
                f.values.push_back(d);
            }
            return;
        }
        for (int i = start; i < f.n; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    f.validate();
    return f;
}

double MForm::norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

void MForm::validate() const {
    if (std::abs(norm() - 1.0) > 1e-12) throw std::invalid_argument("m-form must have unit norm");
    for (const auto& t : tuples) {
        if (static_cast<int>(t.size()) != m) throw std::invalid_argument("m-form: tuple of wrong degree");
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] < 0 || t[i] >= n) throw std::invalid_argument("m-form: index out of range");
            if (i > 0 && t[i] <= t[i - 1]) throw std::invalid_argument("m-form: tuples must be strictly increasing");
        }
    }
}

double MForm::evaluate(const double* vectors, int stride) const {
    double s = 0.0;
    Eigen::MatrixXd M(m, m);
    for (std::size_t t = 0; t < tuples.size(); ++t) {
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c) M(r, c) = vectors[r * stride + tuples[t][c]];
        s += values[t] * M.determinant();
    }
    return s;
}

GraphW graph_w(const GeometryState& gs, const MForm& omega) {
    omega.validate();
    if (omega.n != gs.n || omega.m != gs.m) throw std::invalid_argument("graph_w: form degree or dimension mismatch");
    GraphW out;
    out.w.resize(gs.nodes);
    out.v.resize(gs.nodes);
    out.graphical.resize(gs.nodes);
    for (std::size_t node = 0; node < gs.nodes; ++node) {
        const double w = omega.evaluate(gs.dF_at(node), gs.n) / gs.sqrt_det[node];
        out.w[node] = w;
        const bool ok = w > 0.0;
        out.graphical[node] = ok ? 1 : 0;
        out.v[node] = ok ? 1.0 / w : std::numeric_limits<double>::quiet_NaN();
        if (!ok) out.all_graphical = false;
    }
    return out;
}

}  // namespace mcf
