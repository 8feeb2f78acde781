#include "mcf/flow.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mcf {

void FlowOptions::validate() const {
    if (!(cfl > 0.0 && cfl <= 0.5)) throw std::invalid_argument("flow: cfl must lie in (0, 0.5]");
    if (!(t_end > 0.0)) throw std::invalid_argument("flow: t_end must be positive");
    if (snapshot_every < 1) throw std::invalid_argument("flow: snapshot_every must be >= 1");
    if (order != 2 && order != 4) throw std::invalid_argument("flow: stencil order must be 2 or 4");
}

namespace {

constexpr int kMaxM = 3;
constexpr int kMaxN = 8;
using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxM, kMaxM>;

}  // namespace

VelocityField velocity(const ImmersionGrid& im, const FlowOptions& opt) {
    const int m = im.domain.m, n = im.n, mm = m * m;
    if (m > kMaxM || n > kMaxN) throw std::invalid_argument("velocity: dimensions exceed the supported range");
    const std::size_t N = im.node_count();
    const Differencer diff(im.domain, opt.order);
    std::vector<double> dF(N * m * n), Fii(N * m * n);
    for_each_node(opt.exec, N, [&](std::size_t node) {
        for (int i = 0; i < m; ++i) {
            diff.first(im.F.data(), n, i, node, dF.data() + (node * m + i) * n, true);
            diff.second(im.F.data(), n, i, node, Fii.data() + (node * m + i) * n, true);
        }
    });
    VelocityField out;
    out.V.assign(N * n, 0.0);
    std::vector<double> a2(N), hn(N), lam(N);
    for_each_node(opt.exec, N, [&](std::size_t node) {
        const double* t = dF.data() + node * m * n;
        double Fdd[kMaxM * kMaxM * kMaxN];
        double tmp[kMaxM * kMaxN];
        for (int i = 0; i < m; ++i)
            for (int al = 0; al < n; ++al) Fdd[(i * m + i) * n + al] = Fii[(node * m + i) * n + al];
        // mixed derivatives: symmetrised first differences of the tangent field
        for (int j = 1; j < m; ++j) {
            diff.first(dF.data(), m * n, j, node, tmp);
            for (int i = 0; i < j; ++i)
                for (int al = 0; al < n; ++al) Fdd[(i * m + j) * n + al] = tmp[i * n + al];
        }
        for (int i = 1; i < m; ++i) {
            diff.first(dF.data(), m * n, i, node, tmp);
            for (int j = 0; j < i; ++j)
                for (int al = 0; al < n; ++al) {
                    const double v = 0.5 * (Fdd[(j * m + i) * n + al] + tmp[j * n + al]);
                    Fdd[(j * m + i) * n + al] = v;
                    Fdd[(i * m + j) * n + al] = v;
                }
        }
        SmallMat g(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double s = 0.0;
                for (int al = 0; al < n; ++al) s += t[i * n + al] * t[j * n + al];
                g(i, j) = s;
            }
        double det = 0.0;
        SmallMat gi(m, m);
        if (m == 1) {
            det = g(0, 0);
            gi(0, 0) = 1.0 / det;
            lam[node] = det;
        } else if (m == 2) {
            det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
            gi << g(1, 1) / det, -g(0, 1) / det, -g(1, 0) / det, g(0, 0) / det;
            const double half_tr = 0.5 * (g(0, 0) + g(1, 1));
            const double disc = std::sqrt(0.25 * (g(0, 0) - g(1, 1)) * (g(0, 0) - g(1, 1)) + g(0, 1) * g(1, 0));
            lam[node] = half_tr - disc;
        } else {
            det = g.determinant();
            gi = g.inverse();
            lam[node] = Eigen::SelfAdjointEigenSolver<SmallMat>(g, Eigen::EigenvaluesOnly).eigenvalues()(0);
        }
        if (!(det >= opt.degeneracy_threshold)) throw ImmersionDegeneracy(node, det, "velocity evaluation");
        for (int ij = 0; ij < mm; ++ij) {
            double* v = Fdd + ij * n;
            double c[kMaxM] = {0.0, 0.0, 0.0};
            for (int i = 0; i < m; ++i)
                for (int al = 0; al < n; ++al) c[i] += t[i * n + al] * v[al];
            for (int i = 0; i < m; ++i) {
                double w = 0.0;
                for (int j = 0; j < m; ++j) w += gi(i, j) * c[j];
                for (int al = 0; al < n; ++al) v[al] -= w * t[i * n + al];
            }
        }
        double* V = out.V.data() + node * n;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int al = 0; al < n; ++al) V[al] += gi(i, j) * Fdd[(i * m + j) * n + al];
        double h2 = 0.0;
        for (int al = 0; al < n; ++al) h2 += V[al] * V[al];
        hn[node] = std::sqrt(h2);
        double A2 = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int p = 0; p < m; ++p)
                    for (int q = 0; q < m; ++q) {
                        double d = 0.0;
                        for (int al = 0; al < n; ++al) d += Fdd[(i * m + j) * n + al] * Fdd[(p * m + q) * n + al];
                        A2 += gi(i, p) * gi(j, q) * d;
                    }
        a2[node] = A2;
        if (opt.normalized) {
            const double* F = im.point(node);
            for (int al = 0; al < n; ++al) V[al] -= F[al];
        }
    });
    out.sup_A2 = *std::max_element(a2.begin(), a2.end());
    out.sup_H = *std::max_element(hn.begin(), hn.end());
    out.min_metric_eigenvalue = *std::min_element(lam.begin(), lam.end());
    out.shift_rate.resize(im.domain.shifts.size());
    for (std::size_t d = 0; d < im.domain.shifts.size(); ++d) {
        out.shift_rate[d] = im.domain.shifts[d];
        for (double& v : out.shift_rate[d]) v = opt.normalized ? -v : 0.0;
    }
    return out;
}

double stable_dt(const ImmersionGrid& im, const FlowOptions& opt) {
    const VelocityField v = velocity(im, opt);
    const double h = im.domain.min_spacing();
    return opt.cfl * h * h * v.min_metric_eigenvalue;
}

namespace {

ImmersionGrid axpy(const ImmersionGrid& base, double w, const VelocityField& v) {
    ImmersionGrid out = base;
    for (std::size_t i = 0; i < out.F.size(); ++i) out.F[i] += w * v.V[i];
    for (std::size_t d = 0; d < out.domain.shifts.size(); ++d)
        for (std::size_t c = 0; c < out.domain.shifts[d].size(); ++c) out.domain.shifts[d][c] += w * v.shift_rate[d][c];
    return out;
}

void require_finite(const ImmersionGrid& im) {
    for (double x : im.F)
        if (!std::isfinite(x)) throw std::runtime_error("non-finite coordinates");
}

}  // namespace

ImmersionGrid step(const ImmersionGrid& im, double dt, const FlowOptions& opt) {
    ImmersionGrid out;
    if (opt.integrator == Integrator::explicit_euler) {
        out = axpy(im, dt, velocity(im, opt));
    } else {
        const VelocityField k1 = velocity(im, opt);
        const VelocityField k2 = velocity(axpy(im, 0.5 * dt, k1), opt);
        const VelocityField k3 = velocity(axpy(im, 0.5 * dt, k2), opt);
        const VelocityField k4 = velocity(axpy(im, dt, k3), opt);
        out = im;
        for (std::size_t i = 0; i < out.F.size(); ++i)
            out.F[i] += dt / 6.0 * (k1.V[i] + 2.0 * k2.V[i] + 2.0 * k3.V[i] + k4.V[i]);
        for (std::size_t d = 0; d < out.domain.shifts.size(); ++d)
            for (std::size_t c = 0; c < out.domain.shifts[d].size(); ++c)
                out.domain.shifts[d][c] += dt / 6.0 *
                    (k1.shift_rate[d][c] + 2.0 * k2.shift_rate[d][c] + 2.0 * k3.shift_rate[d][c] + k4.shift_rate[d][c]);
    }
    out.time = im.time + dt;
    require_finite(out);
    return out;
}

namespace {

Snapshot make_snapshot(const ImmersionGrid& im, const FlowOptions& opt) {
    GeometryOptions g;
    g.order = opt.order;
    g.exec = opt.exec;
    g.first_pass_only = !opt.full_geometry;
    g.degeneracy_threshold = opt.degeneracy_threshold;
    return Snapshot{im, std::make_shared<const GeometryState>(build_geometry(im, g))};
}

}  // namespace

Trajectory integrate(const ImmersionGrid& initial, const FlowOptions& opt) {
    opt.validate();
    Trajectory traj;
    traj.normalized = opt.normalized;
    traj.last_valid_time = initial.time;
    const double t_end = initial.time + opt.t_end;
    const double t_eps = 1e-12 * std::max(1.0, std::abs(t_end));
    const double h = initial.domain.min_spacing();

    ImmersionGrid cur = initial;
    VelocityField v;  // velocity data of cur
    auto stop = [&](const std::string& why) {
        traj.status = FlowStatus::singularity_stop;
        traj.stop_reason = why;
        return false;
    };
    // Advance cur by dt, refresh v and log the step.
    auto advance = [&](double dt) -> bool {
        try {
            ImmersionGrid next = step(cur, dt, opt);
            VelocityField nv = velocity(next, opt);
            cur = std::move(next);
            v = std::move(nv);
        } catch (const ImmersionDegeneracy& e) {
            return stop(e.what());
        } catch (const std::runtime_error& e) {
            return stop(e.what());
        }
        traj.last_valid_time = cur.time;
        traj.steps.push_back({cur.time, dt, v.sup_A2, v.sup_H});
        return true;
    };
    auto record = [&]() -> bool {
        try {
            traj.snapshots.push_back(make_snapshot(cur, opt));
        } catch (const ImmersionDegeneracy& e) {
            return stop(e.what());
        }
        return true;
    };
    auto next_dt = [&]() { return opt.cfl * h * h * v.min_metric_eigenvalue; };
    auto snapshot_event = [&]() -> bool {
        if (!record()) return false;
        if (!opt.record_triples) return true;
        const std::size_t first = traj.snapshots.size() - 1;
        const double dt = next_dt();
        if (cur.time + 2.0 * dt > t_end + t_eps) return true;
        for (int r = 0; r < 2; ++r)
            if (!advance(dt) || !record()) return false;
        traj.triples.push_back({first, first + 1, first + 2});
        return true;
    };

    try {
        v = velocity(cur, opt);
    } catch (const ImmersionDegeneracy& e) {
        stop(e.what());
        return traj;
    }
    if (!snapshot_event()) return traj;
    long since_snapshot = 0;
    while (cur.time < t_end - t_eps) {
        double dt = next_dt();
        if (!(dt >= opt.min_dt) || !std::isfinite(dt)) {
            stop("step size collapsed below the minimum");
            break;
        }
        dt = std::min(dt, t_end - cur.time);
        if (!advance(dt)) break;
        if (++since_snapshot >= opt.snapshot_every || cur.time >= t_end - t_eps) {
            since_snapshot = 0;
            if (!snapshot_event()) break;
        }
    }
    // keep the last valid state
    if (traj.status == FlowStatus::singularity_stop && !traj.snapshots.empty() &&
        traj.snapshots.back().grid.time < traj.last_valid_time) {
        try {
            traj.snapshots.push_back(make_snapshot(cur, opt));
        } catch (const ImmersionDegeneracy&) {
        }
    }
    return traj;
}

Trajectory rescale_trajectory(const Trajectory& traj, int order, Exec exec) {
    if (traj.normalized) throw std::invalid_argument("rescale_trajectory: input is already normalised");
    Trajectory out;
    out.normalized = true;
    out.status = traj.status;
    out.stop_reason = traj.stop_reason;
    out.last_valid_time = 0.5 * std::log(2.0 * traj.last_valid_time + 1.0);
    out.triples = traj.triples;
    GeometryOptions g;
    g.order = order;
    g.exec = exec;
    for (const auto& snap : traj.snapshots) {
        ImmersionGrid im = snap.grid;
        const double scale = 1.0 / std::sqrt(2.0 * im.time + 1.0);
        for (double& x : im.F) x *= scale;
        for (auto& s : im.domain.shifts)
            for (double& x : s) x *= scale;
        im.time = 0.5 * std::log(2.0 * im.time + 1.0);
        g.first_pass_only = snap.geometry && snap.geometry->riemann.empty();
        out.snapshots.push_back(Snapshot{im, std::make_shared<const GeometryState>(build_geometry(im, g))});
    }
    for (const auto& st : traj.steps) {
        const double scale2 = 2.0 * st.t + 1.0;
        out.steps.push_back({0.5 * std::log(scale2), 0.0, st.sup_A2 * scale2, st.sup_H * std::sqrt(scale2)});
    }
    for (std::size_t i = 0; i < out.steps.size(); ++i)
        out.steps[i].dt = out.steps[i].t - (i == 0 ? 0.5 * std::log(2.0 * (traj.steps[0].t - traj.steps[0].dt) + 1.0)
                                                   : out.steps[i - 1].t);
    return out;
}

double expander_residual(const GeometryState& gs) {
    const int n = gs.n;
    std::vector<double> pf(n), ph(n);
    double sup = 0.0;
    for (std::size_t node = 0; node < gs.nodes; ++node) {
        project_normal(gs, node, gs.F.data() + node * n, pf.data());
        project_normal(gs, node, gs.H_at(node), ph.data());
        double s = 0.0;
        for (int al = 0; al < n; ++al) s += (pf[al] - ph[al]) * (pf[al] - ph[al]);
        sup = std::max(sup, std::sqrt(s));
    }
    return sup;
}

}  // namespace mcf
