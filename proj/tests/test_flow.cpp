#include "doctest.h"

#include "mcf/flow.hpp"
#include "mcf/monitors.hpp"
#include "mcf/scenarios.hpp"

#include <cmath>

using namespace mcf;

namespace {

double radius_error(const ImmersionGrid& im, double expected) {
    double e = 0.0;
    for (std::size_t i = 0; i < im.node_count(); ++i) {
        const double* F = im.point(i);
        double r2 = 0.0;
        for (int al = 0; al < im.n; ++al) r2 += F[al] * F[al];
        e = std::max(e, std::abs(std::sqrt(r2) - expected));
    }
    return e;
}

double max_gap(const ImmersionGrid& a, const ImmersionGrid& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.F.size(); ++i) e = std::max(e, std::abs(a.F[i] - b.F[i]));
    return e;
}

ImmersionGrid run_fixed(const ImmersionGrid& start, double dt, int steps, const FlowOptions& opt) {
    ImmersionGrid cur = start;
    for (int s = 0; s < steps; ++s) cur = step(cur, dt, opt);
    return cur;
}

}  // namespace

TEST_CASE("the flat plane is a fixed point") {
    FlowOptions opt;
    opt.t_end = 0.2;
    const auto start = plane(2, 4, 16);
    const auto tr = integrate(start, opt);
    CHECK(tr.status == FlowStatus::completed);
    const auto& last = tr.snapshots.back().grid;
    CHECK(last.time == doctest::Approx(0.2));
    CHECK(max_gap(last, start) < 1e-14);
    CHECK(last.domain.shifts == start.domain.shifts);
}

TEST_CASE("shrinking circle follows r(t)^2 = 1 - 2t") {
    FlowOptions opt;
    opt.order = 4;
    opt.t_end = 0.4;
    const auto tr = integrate(circle(1.0, 3, 64), opt);
    REQUIRE(tr.status == FlowStatus::completed);
    for (const auto& s : tr.snapshots) CHECK(radius_error(s.grid, std::sqrt(1.0 - 2.0 * s.grid.time)) < 1e-5);
    CHECK(tr.snapshots.back().grid.time == doctest::Approx(0.4));
}

TEST_CASE("time integrators reach their nominal order") {
    const auto start = circle(1.0, 3, 32);
    const double T = 0.04;
    for (auto integ : {Integrator::explicit_euler, Integrator::rk4}) {
        FlowOptions opt;
        opt.integrator = integ;
        const double dt = 0.004;
        const auto x1 = run_fixed(start, dt, 10, opt);
        const auto x2 = run_fixed(start, dt / 2, 20, opt);
        const auto x4 = run_fixed(start, dt / 4, 40, opt);
        const double ratio = max_gap(x1, x2) / max_gap(x2, x4);
        const double expected = integ == Integrator::rk4 ? 16.0 : 2.0;
        CHECK(ratio == doctest::Approx(expected).epsilon(0.1));
        CHECK(x4.time == doctest::Approx(T));
    }
}

TEST_CASE("stable step scales with h^2 and the cfl factor") {
    FlowOptions opt;
    // order-2 metric of the unit circle is (sin h / h)^2, so dt = cfl sin^2 h
    const double a = stable_dt(circle(1.0, 3, 32), opt);
    const double b = stable_dt(circle(1.0, 3, 64), opt);
    CHECK(a == doctest::Approx(0.1 * std::pow(std::sin(2 * M_PI / 32), 2)).epsilon(1e-12));
    CHECK(b == doctest::Approx(0.1 * std::pow(std::sin(2 * M_PI / 64), 2)).epsilon(1e-12));
    opt.cfl = 0.05;
    CHECK(stable_dt(circle(1.0, 3, 32), opt) == doctest::Approx(a / 2));
    opt.cfl = 0.0;
    CHECK_THROWS_AS(opt.validate(), std::invalid_argument);
}

TEST_CASE("a coarse torus stops before the extinction time of a circle") {
    FlowOptions opt;
    opt.t_end = 0.6;
    const auto tr = integrate(product_torus(1.0, 2.0, 16, 16), opt);
    CHECK(tr.status == FlowStatus::singularity_stop);
    CHECK_FALSE(tr.stop_reason.empty());
    CHECK(tr.last_valid_time < 0.5);
    CHECK(tr.last_valid_time > 0.4);
    CHECK(tr.snapshots.back().grid.time == doctest::Approx(tr.last_valid_time).epsilon(1e-12));
}

TEST_CASE("integration is deterministic and serial matches parallel") {
    FlowOptions opt;
    opt.t_end = 0.05;
    const auto start = generic_torus(1.0, 2.0, 0.3, 32, 32);
    const auto a = integrate(start, opt);
    const auto b = integrate(start, opt);
    opt.exec = Exec::serial;
    const auto c = integrate(start, opt);
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    REQUIRE(a.snapshots.size() == c.snapshots.size());
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
        CHECK(a.snapshots[i].grid.F == b.snapshots[i].grid.F);
        CHECK(a.snapshots[i].grid.F == c.snapshots[i].grid.F);
        CHECK(a.snapshots[i].geometry->Rperp2 == c.snapshots[i].geometry->Rperp2);
    }
}

TEST_CASE("equivariant shifts survive the flow") {
    FlowOptions opt;
    opt.t_end = 0.05;
    const auto start = eps_graph(0.3, 16, 16);
    const auto tr = integrate(start, opt);
    CHECK(tr.snapshots.back().grid.domain.shifts == start.domain.shifts);
}

TEST_CASE("rescaled circle has radius sqrt((1 - 2t) / (1 + 2t))") {
    FlowOptions opt;
    opt.order = 4;
    opt.t_end = 0.3;
    const auto tr = integrate(circle(1.0, 3, 64), opt);
    const auto nr = rescale_trajectory(tr, 4);
    CHECK(nr.normalized);
    REQUIRE(nr.snapshots.size() == tr.snapshots.size());
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
        const double t = tr.snapshots[i].grid.time;
        CHECK(nr.snapshots[i].grid.time == doctest::Approx(0.5 * std::log(2 * t + 1)));
        CHECK(radius_error(nr.snapshots[i].grid, std::sqrt((1 - 2 * t) / (1 + 2 * t))) < 1e-5);
    }
}

TEST_CASE("normalized flow") {
    SUBCASE("plane stays flat and in its own span") {
        FlowOptions opt;
        opt.normalized = true;
        opt.t_end = 0.2;
        const auto tr = integrate(plane(2, 4, 16), opt);
        for (const auto& s : tr.snapshots) {
            CHECK(sup_norm(s.geometry->A2) < 1e-24);
            for (std::size_t i = 0; i < s.grid.node_count(); ++i) {
                CHECK(s.grid.point(i)[2] == 0.0);
                CHECK(s.grid.point(i)[3] == 0.0);
            }
        }
    }
    SUBCASE("expander residual vanishes on the plane and is 2 on the unit circle") {
        GeometryOptions g;
        g.order = 4;
        CHECK(expander_residual(build_geometry(plane(2, 4, 16), g)) < 1e-12);
        CHECK(expander_residual(build_geometry(circle(1.0, 3, 128), g)) == doctest::Approx(2.0).epsilon(1e-6));
    }
}

TEST_CASE("area decreases along the flow") {
    FlowOptions opt;
    opt.t_end = 0.1;
    opt.snapshot_every = 5;
    const auto tr = integrate(generic_torus(1.0, 2.0, 0.3, 32, 32), opt);
    const auto rep = area_monitor(tr);
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.series.front().value.size() == tr.snapshots.size());
}

TEST_CASE("triples are equally spaced and frozen in step") {
    FlowOptions opt;
    opt.t_end = 0.05;
    opt.record_triples = true;
    const auto tr = integrate(circle(1.0, 3, 64), opt);
    REQUIRE_FALSE(tr.triples.empty());
    for (const auto& tri : tr.triples) {
        const double t0 = tr.snapshots[tri[0]].grid.time, t1 = tr.snapshots[tri[1]].grid.time,
                     t2 = tr.snapshots[tri[2]].grid.time;
        CHECK(t1 - t0 == doctest::Approx(t2 - t1).epsilon(1e-9));
        CHECK(t0 < t1);
    }
    for (std::size_t i = 1; i < tr.snapshots.size(); ++i)
        CHECK(tr.snapshots[i].grid.time > tr.snapshots[i - 1].grid.time);
}
