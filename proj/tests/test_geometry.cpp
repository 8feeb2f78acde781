#include "doctest.h"

#include "mcf/geometry.hpp"
#include "mcf/scenarios.hpp"
#include "mcf/structure_checks.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

using namespace mcf;

namespace {

GeometryState geometry(const ImmersionGrid& im, int order = 2, Exec exec = Exec::parallel) {
    GeometryOptions o;
    o.order = order;
    o.exec = exec;
    return build_geometry(im, o);
}

double max_abs_diff(const std::vector<double>& a, double value) {
    double s = 0.0;
    for (double x : a) s = std::max(s, std::abs(x - value));
    return s;
}

}  // namespace

TEST_CASE("parameter domain validation") {
    ParameterDomain d;
    d.m = 2;
    d.sizes = {16, 4};
    d.periods = {1.0, 1.0};
    CHECK_THROWS_AS(d.validate(3), std::invalid_argument);
    d.sizes = {16, 16};
    CHECK_NOTHROW(d.validate(3));
    CHECK(d.node_count() == 256);
    for (std::size_t node : {0ul, 17ul, 255ul}) CHECK(d.node_of(d.index_of(node)) == node);
    d.m = 4;
    CHECK_THROWS_AS(d.validate(3), std::invalid_argument);
}

TEST_CASE("central differences converge at their nominal order") {
    // d/dx sin(x) on a periodic grid against the exact cosine
    for (int order : {2, 4}) {
        double err[2];
        for (int r = 0; r < 2; ++r) {
            const int N = 32 << r;
            ImmersionGrid im = circle(1.0, 3, N);
            Differencer diff(im.domain, order);
            double e = 0.0;
            for (std::size_t node = 0; node < static_cast<std::size_t>(N); ++node) {
                double out[3];
                diff.first(im.F.data(), 3, 0, node, out, false);
                e = std::max(e, std::abs(out[1] - std::cos(im.domain.coordinate(0, static_cast<int>(node)))));
            }
            err[r] = e;
        }
        const double expected = order == 2 ? 4.0 : 16.0;
        CHECK(err[0] / err[1] == doctest::Approx(expected).epsilon(0.05));
    }
}

TEST_CASE("circle of radius r: |A|^2 = 1/r^2 and H = -F/r^2") {
    const double r = 1.5;
    const auto gs = geometry(circle(r, 4, 128), 4);
    CHECK(max_abs_diff(gs.A2, 1.0 / (r * r)) < 1e-6);
    CHECK(max_abs_diff(gs.H2, 1.0 / (r * r)) < 1e-6);
    for (std::size_t node = 0; node < gs.nodes; node += 17)
        for (int al = 0; al < 4; ++al) CHECK(gs.H[node * 4 + al] == doctest::Approx(-gs.F[node * 4 + al] / (r * r)).epsilon(1e-6));
    CHECK(sup_norm(gs.Rperp2) == 0.0);
    CHECK(gs.area() == doctest::Approx(2 * std::numbers::pi * r).epsilon(1e-6));
}

TEST_CASE("product torus S1(1) x S1(2): |A|^2 = 1.25, flat normal bundle") {
    const auto coarse = geometry(product_torus(1.0, 2.0, 32, 32), 4);
    const auto gs = geometry(product_torus(1.0, 2.0, 64, 64), 4);
    CHECK(max_abs_diff(gs.A2, 1.25) < 5e-5);
    CHECK(max_abs_diff(gs.H2, 1.25) < 5e-5);
    CHECK(max_abs_diff(coarse.A2, 1.25) / max_abs_diff(gs.A2, 1.25) == doctest::Approx(16.0).epsilon(0.1));
    CHECK(sup_norm(gs.Rperp2) < 1e-10);
    // flat intrinsic metric
    CHECK(sup_norm(gs.scalar) < 1e-8);
}

TEST_CASE("sphere torus lies on the sphere and has a nearly flat normal bundle") {
    const auto im = sphere_torus(2.0, 0.2, std::numbers::pi / 4, 32, 32);
    double worst = 0.0;
    for (std::size_t i = 0; i < im.domain.node_count(); ++i) {
        const double* F = im.point(i);
        worst = std::max(worst, std::abs(F[0] * F[0] + F[1] * F[1] + F[2] * F[2] + F[3] * F[3] - 4.0));
    }
    CHECK(worst < 1e-12);
    const double r32 = sup_norm(geometry(im).Rperp2);
    const double r64 = sup_norm(geometry(sphere_torus(2.0, 0.2, std::numbers::pi / 4, 64, 64)).Rperp2);
    CHECK(r32 > 0.0);
    CHECK(r32 / r64 > 3.2);  // vanishes under refinement
}

TEST_CASE("generic torus has a non-flat normal bundle of size about 0.1") {
    const auto gs = geometry(generic_torus(1.0, 2.0, 0.3, 64, 64));
    CHECK(sup_norm(gs.Rperp2) == doctest::Approx(0.0909).epsilon(0.01));
}

TEST_CASE("epsGraph(0) is the flat plane") {
    const auto gs = geometry(eps_graph(0.0, 16, 16));
    CHECK(sup_norm(gs.A2) < 1e-24);
    CHECK(sup_norm(gs.H) < 1e-12);
    const auto pl = geometry(plane(2, 4, 16));
    const auto res = check_structure_equations(pl);
    for (double v : {res.normality, res.gauss, res.codazzi, res.contracted_codazzi, res.interchange, res.simons})
        CHECK(v < 1e-13);
}

TEST_CASE("Laplacian of the position vector is the mean curvature vector") {
    const auto gs = geometry(generic_torus(1.0, 2.0, 0.3, 64, 64), 4);
    double worst = 0.0;
    for (int al = 0; al < gs.n; ++al) {
        std::vector<double> f(gs.nodes);
        for (std::size_t i = 0; i < gs.nodes; ++i) f[i] = gs.F[i * gs.n + al];
        const auto lap = laplacian(gs, f);
        for (std::size_t i = 0; i < gs.nodes; ++i) worst = std::max(worst, std::abs(lap[i] - gs.H[i * gs.n + al]));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("normal-frame quantities do not depend on the chosen frame") {
    for (const auto& im : {generic_torus(1.0, 2.0, 0.3, 32, 32), eps_graph(0.3, 32, 32)}) {
        const auto chk = check_algebraic(geometry(im));
        CHECK(chk.frame_independence < 1e-12);
        CHECK(chk.trace_a < 1e-12);
        CHECK(chk.trace_b < 1e-12);
    }
}

TEST_CASE("degenerate immersions are rejected with the offending node") {
    ImmersionGrid im = product_torus(1.0, 2.0, 16, 16);
    for (std::size_t i = 0; i < im.domain.node_count(); ++i) {
        im.point(i)[2] = 0.0;
        im.point(i)[3] = 0.0;
    }
    CHECK_THROWS_AS(geometry(im), ImmersionDegeneracy);
}

TEST_CASE("scenario catalogue and construction errors") {
    CHECK(scenario_catalog().size() == 7);
    for (const auto& info : scenario_catalog()) {
        ScenarioSpec s{info.id, {}, {}};
        const auto im = make_scenario(s);
        CHECK(im.domain.sizes == info.default_sizes);
    }
    CHECK_THROWS_AS(make_scenario({"klein", {}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(make_scenario({"productTorus", {{"c", 1.0}}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(make_scenario({"productTorus", {{"shear", 1.5}}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(make_scenario({"productTorus", {{"a", -1.0}}, {}}), std::invalid_argument);
}

TEST_CASE("equivariant cylinder profile and shift") {
    const auto im = equivariant_cylinder(32, 16);
    CHECK(im.domain.equivariant());
    CHECK(im.domain.shifts[0][0] == doctest::Approx(2 * std::numbers::pi));
    for (double x : {0.0, 1.0, 3.0}) CHECK(cylinder_profile(x) == doctest::Approx(2.0 + std::cos(x)));
}

TEST_CASE("perturbation") {
    const auto base = product_torus(1.0, 2.0, 32, 32);
    SUBCASE("amplitude zero is the identity") {
        const auto p = perturb(base, 0.0, 7);
        CHECK(p.grid.F == base.F);
    }
    SUBCASE("deterministic and measured") {
        const auto a = perturb(base, 0.05, 7);
        const auto b = perturb(base, 0.05, 7);
        CHECK(a.grid.F == b.grid.F);
        CHECK(a.initial_rperp2_sup > 0.0);
        CHECK(a.initial_rperp2_sup == sup_norm(geometry(a.grid).Rperp2));
        const auto c = perturb(base, 0.05, 8);
        CHECK(c.grid.F != a.grid.F);
    }
    SUBCASE("non-finite amplitude is rejected by name") {
        try {
            perturb(base, std::numeric_limits<double>::infinity(), 7);
            FAIL("expected rejection");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("amplitude inf") != std::string::npos);
        }
    }
}

TEST_CASE("structure residuals converge at second order on a reparametrised torus") {
    double prev[4] = {0, 0, 0, 0};
    for (int N : {32, 64}) {
        const auto r = check_structure_equations(geometry(product_torus(1.0, 2.0, N, N, 0.2)));
        const double cur[4] = {r.gauss, r.codazzi, r.interchange, r.simons};
        if (N == 64)
            for (int i = 0; i < 4; ++i) CHECK(prev[i] / cur[i] == doctest::Approx(4.0).epsilon(0.2));
        std::copy(cur, cur + 4, prev);
    }
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
    for (const auto& im : {generic_torus(1.0, 2.0, 0.3, 32, 32), eps_graph(0.3, 32, 32)}) {
        const auto s = geometry(im, 4, Exec::serial);
        const auto p = geometry(im, 4, Exec::parallel);
        CHECK(s.A == p.A);
        CHECK(s.Rperp2 == p.Rperp2);
        CHECK(s.grad_perp_A == p.grad_perp_A);
        CHECK(s.riemann == p.riemann);
        const auto rs = check_structure_equations(s, Exec::serial);
        const auto rp = check_structure_equations(p, Exec::parallel);
        CHECK(rs.simons == rp.simons);
    }
}
